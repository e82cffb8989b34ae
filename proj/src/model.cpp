#include "aperiod/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "aperiod/error.hpp"

namespace aperiod {

namespace {

void require(bool ok, const std::string& message) {
    if (!ok) throw InputError(message);
}

bool all_finite(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

double modulation_sum(const DiffusionSpec& diffusion) {
    double total = 0.0;
    for (const auto& mode : diffusion.modes) total += std::fabs(mode.amplitude);
    return total;
}

double noise_scale(const ModelSpec& model) {
    double q_max = 0.0;
    for (std::size_t i = 0; i < model.shared_dim(); ++i) q_max = std::max(q_max, model.q_eigenvalues[i]);
    return std::max(1.0, std::sqrt(q_max));
}

}  // namespace

bool ModelSpec::autonomous() const noexcept {
    for (const auto& mode : drift.modes) {
        const bool silent = std::all_of(mode.amplitude.begin(), mode.amplitude.end(), [](double a) { return a == 0.0; });
        if (mode.frequency != 0.0 && !silent) return false;
    }
    for (const auto& mode : diffusion.modes) {
        if (mode.frequency != 0.0 && mode.amplitude != 0.0) return false;
    }
    return true;
}

void ModelSpec::validate() const {
    require(dim_state >= 1, "model: dim_state must be positive");
    require(dim_noise >= 1, "model: dim_noise must be positive");
    require(spectrum.size() == dim_state, "model: spectrum must have dim_state entries");
    require(all_finite(spectrum), "model: spectrum must be finite");
    for (double lambda : spectrum) require(lambda > 0.0, "model: spectrum entries must be positive");
    require(q_eigenvalues.size() == dim_noise, "model: q must have dim_noise entries");
    require(all_finite(q_eigenvalues), "model: q must be finite");
    for (double q : q_eigenvalues) require(q >= 0.0, "model: q entries must be nonnegative");

    require(drift.base.empty() || drift.base.size() == dim_state, "model: drift_base must have dim_state entries");
    require(all_finite(drift.base), "model: drift_base must be finite");
    for (const auto& mode : drift.modes) {
        require(mode.amplitude.size() == dim_state, "model: drift_mode amplitude must have dim_state entries");
        require(all_finite(mode.amplitude) && std::isfinite(mode.frequency) && std::isfinite(mode.phase),
                "model: drift_mode must be finite");
        require(mode.frequency >= 0.0, "model: drift_mode frequency must be nonnegative");
    }
    require(std::isfinite(drift.nonlinearity_gain) && drift.nonlinearity_gain >= 0.0,
            "model: drift_gain must be finite and nonnegative");

    require(diffusion.base_sigma.empty() || diffusion.base_sigma.size() == dim_noise,
            "model: diffusion_base must have dim_noise entries");
    require(all_finite(diffusion.base_sigma), "model: diffusion_base must be finite");
    for (double s : diffusion.base_sigma) require(s >= 0.0, "model: diffusion_base entries must be nonnegative");
    for (const auto& mode : diffusion.modes) {
        require(std::isfinite(mode.amplitude) && std::isfinite(mode.frequency) && std::isfinite(mode.phase),
                "model: diffusion_mode must be finite");
        require(mode.frequency >= 0.0, "model: diffusion_mode frequency must be nonnegative");
    }
    require(modulation_sum(diffusion) < 1.0, "model: diffusion_mode amplitudes must satisfy sum |alpha_j| < 1");
    require(std::isfinite(diffusion.state_gain) && diffusion.state_gain >= 0.0,
            "model: diffusion_gain must be finite and nonnegative");
}

double contraction_constant(double lipschitz, double delta) noexcept {
    return 2.0 * lipschitz * lipschitz * (1.0 + 1.0 / (2.0 * delta));
}

HypothesisReport check_hypotheses(const ModelSpec& model) {
    model.validate();
    HypothesisReport report;
    report.delta = *std::min_element(model.spectrum.begin(), model.spectrum.end());

    // ||G Q^{1/2}||_HS <= sqrt(q_max) ||G||_HS; the stochastic convolution
    // only sees the former, so the state gain is scaled when q_max > 1.
    const double qf = noise_scale(model);
    const double c = model.drift.nonlinearity_gain;
    const double gamma = model.diffusion.state_gain;
    report.lipschitz = c + gamma * qf;

    double forcing_bound = euclidean_norm(model.drift.base);
    for (const auto& mode : model.drift.modes) forcing_bound += euclidean_norm(mode.amplitude);
    double sigma_bound = 0.0;
    if (!model.diffusion.base_sigma.empty()) {
        sigma_bound = euclidean_norm(std::span(model.diffusion.base_sigma).first(model.shared_dim())) *
                      (1.0 + modulation_sum(model.diffusion));
    }
    report.growth = std::max(forcing_bound + qf * sigma_bound, c + qf * gamma);

    report.kappa = contraction_constant(report.lipschitz, report.delta);
    report.contraction_ok = report.kappa < 1.0;
    return report;
}

Vector semigroup_apply(std::span<const double> spectrum, double t, std::span<const double> x) {
    if (!(t >= 0.0)) throw InputError("semigroup_apply: t must be nonnegative");
    if (spectrum.size() != x.size()) throw InputError("semigroup_apply: dimension mismatch");
    Vector out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        // lambda t = hi + lo exactly; exp(-hi - lo) ~ exp(-hi) (1 - lo) keeps S(t)S(s) = S(t+s) to a few ulp.
        const double hi = spectrum[i] * t;
        const double lo = std::fma(spectrum[i], t, -hi);
        const double e = std::exp(-hi);
        out[i] = (e - e * lo) * x[i];
    }
    return out;
}

void eval_forcing(const ModelSpec& model, double t, std::span<double> out) {
    const std::size_t d = model.dim_state;
    for (std::size_t i = 0; i < d; ++i) out[i] = model.drift.base.empty() ? 0.0 : model.drift.base[i];
    for (const auto& mode : model.drift.modes) {
        const double wave = std::cos(mode.frequency * t + mode.phase);
        for (std::size_t i = 0; i < d; ++i) out[i] += mode.amplitude[i] * wave;
    }
}

void eval_sigma(const ModelSpec& model, double t, std::span<double> out) {
    double factor = 1.0;
    for (const auto& mode : model.diffusion.modes) factor += mode.amplitude * std::cos(mode.frequency * t + mode.phase);
    const std::size_t shared = model.shared_dim();
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = (i < shared && !model.diffusion.base_sigma.empty()) ? model.diffusion.base_sigma[i] * factor : 0.0;
    }
}

Vector eval_drift(const ModelSpec& model, double t, std::span<const double> x) {
    if (x.size() != model.dim_state) throw InputError("eval_drift: state dimension mismatch");
    Vector out(model.dim_state);
    eval_forcing(model, t, out);
    const double c = model.drift.nonlinearity_gain;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += c * saturate(x[i]);
    return out;
}

Vector eval_diffusion(const ModelSpec& model, double t, std::span<const double> x) {
    if (x.size() != model.dim_state) throw InputError("eval_diffusion: state dimension mismatch");
    Vector sigma(model.dim_state);
    eval_sigma(model, t, sigma);
    Vector out(model.shared_dim());
    const double gamma = model.diffusion.state_gain;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = sigma[i] + gamma * saturate(x[i]);
    return out;
}

double hs_norm(std::span<const double> diagonal) noexcept { return euclidean_norm(diagonal); }

double euclidean_norm(std::span<const double> x) noexcept {
    double acc = 0.0;
    for (double v : x) acc += v * v;
    return std::sqrt(acc);
}

}  // namespace aperiod
