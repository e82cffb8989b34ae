#include "aperiod/ap_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "aperiod/error.hpp"
#include "aperiod/format.hpp"

namespace aperiod {

std::string ErrorBudget::to_text() const {
    std::ostringstream out;
    out << "budget_solver=" << format_number(solver) << '\n'
        << "budget_burn_in=" << format_number(burn_in) << '\n'
        << "budget_scheme=" << format_number(scheme) << '\n'
        << "budget_monte_carlo=" << format_number(monte_carlo) << '\n'
        << "budget_total=" << format_number(total()) << '\n';
    return out.str();
}

// ---------------------------------------------------------------------------
// Coupled shift distances

CoupledShiftAnalyzer::CoupledShiftAnalyzer(ModelSpec model, NoiseEnsemble noise, std::vector<double> eval_times,
                                           SolverOptions options)
    : model_(std::move(model)), noise_(std::move(noise)), options_(options) {
    hypotheses_ = check_hypotheses(model_);
    if (eval_times.empty()) throw InputError("coupled shift: empty evaluation grid");
    eval_nodes_.reserve(eval_times.size());
    for (double t : eval_times) eval_nodes_.push_back(node_index(noise_.grid(), t));
    base_ = solve_bounded(model_, noise_, options_);
}

ShiftMeasurement CoupledShiftAnalyzer::measure(double tau, double p) const {
    ShiftMeasurement m;
    m.tau = tau;
    if (steps_of(tau, noise_.grid().dt) == 0) return m;
    const SolveResult shifted = translated_solution(model_, noise_, tau, options_);

    const std::size_t dim = model_.dim_state;
    double best_sd = 0.0;
    for (std::size_t node : eval_nodes_) {
        const std::vector<double> x = states_at(shifted.solution, node);
        const std::vector<double> y = states_at(base_.solution, node);
        const Samples xs{x, dim};
        const Samples ys{y, dim};
        const std::vector<double> dist = truncated_distances(xs, ys);
        double mean = 0.0;
        for (double v : dist) mean += v;
        mean /= static_cast<double>(dist.size());
        if (mean > m.d0 || node == eval_nodes_.front()) {
            double var = 0.0;
            for (double v : dist) var += (v - mean) * (v - mean);
            best_sd = dist.size() > 1 ? std::sqrt(var / static_cast<double>(dist.size() - 1)) : 0.0;
            m.d0 = mean;
        }
        m.pmean = std::max(m.pmean, lp_dist(p, xs, ys));
    }
    m.monte_carlo = 3.0 * best_sd / std::sqrt(static_cast<double>(noise_.n_paths()));
    return m;
}

ErrorBudget CoupledShiftAnalyzer::budget() const {
    ErrorBudget b;
    b.solver = 2.0 * options_.tol / (1.0 - std::sqrt(hypotheses_.kappa));
    const double first_eval = noise_.grid().time(*std::min_element(eval_nodes_.begin(), eval_nodes_.end()));
    const double burn_in = first_eval - noise_.grid().t_start;
    b.burn_in = 2.0 * burn_in_bound(hypotheses_, sup_l2_norm(base_.solution, options_.threads), burn_in);
    if (!scheme_) {
        const NoiseEnsemble coarse_noise = coarsen(noise_, 2);
        const SolveResult coarse = solve_bounded(model_, coarse_noise, options_);
        double worst = 0.0;
        for (std::size_t node : eval_nodes_) {
            const std::size_t even = node - node % 2;
            const std::vector<double> fine_states = states_at(base_.solution, even);
            const std::vector<double> coarse_states = states_at(coarse.solution, even / 2);
            worst = std::max(worst, lp_dist(2.0, Samples{fine_states, model_.dim_state},
                                             Samples{coarse_states, model_.dim_state}));
        }
        scheme_ = 2.0 * worst;
    }
    b.scheme = *scheme_;
    return b;
}

ErrorBudget CoupledShiftAnalyzer::budget_for(const ShiftMeasurement& m) const {
    ErrorBudget b = budget();
    b.monte_carlo = m.monte_carlo;
    return b;
}

double coupled_shift_distance(const ModelSpec& model, const NoiseEnsemble& noise, double tau,
                              std::span<const double> eval_times, const SolverOptions& options) {
    const CoupledShiftAnalyzer analyzer(model, noise, {eval_times.begin(), eval_times.end()}, options);
    return analyzer.measure(tau).d0;
}

double coupled_shift_distance_pmean(const ModelSpec& model, const NoiseEnsemble& noise, double tau,
                                    std::span<const double> eval_times, double p, const SolverOptions& options) {
    if (!(p >= 1.0)) throw InputError("coupled_shift_distance_pmean: p must be at least 1");
    const CoupledShiftAnalyzer analyzer(model, noise, {eval_times.begin(), eval_times.end()}, options);
    return analyzer.measure(tau, p).pmean;
}

// ---------------------------------------------------------------------------
// Almost-period scans

std::string AlmostPeriodReport::to_text() const {
    std::ostringstream out;
    out << "epsilon=" << format_number(epsilon) << '\n'
        << "tau_range=" << format_number(tau_start) << ',' << format_number(tau_end) << '\n'
        << "tau_step=" << format_number(tau_step) << '\n'
        << "accepted_count=" << accepted.size() << '\n'
        << "max_gap=" << format_number(max_gap) << '\n'
        << "inclusion_length=" << format_number(inclusion_length) << '\n'
        << "l_max=" << format_number(l_max) << '\n'
        << "relatively_dense=" << (relatively_dense ? "true" : "false") << '\n';
    return out.str();
}

AlmostPeriodReport scan_almost_periods(const DistanceCurve& distance, double epsilon, double l_max) {
    if (distance.tau.empty()) throw InputError("scan_almost_periods: empty tau grid");
    if (distance.tau.size() != distance.value.size()) throw InputError("scan_almost_periods: size mismatch");
    AlmostPeriodReport report;
    report.epsilon = epsilon;
    report.l_max = l_max;
    report.tau_start = distance.tau.front();
    report.tau_end = distance.tau.back();
    report.tau_step = distance.tau.size() > 1 ? distance.tau[1] - distance.tau[0] : 0.0;
    for (std::size_t i = 0; i < distance.tau.size(); ++i) {
        const double expected = report.tau_start + static_cast<double>(i) * report.tau_step;
        if (std::fabs(distance.tau[i] - expected) > 1e-9 * std::max(1.0, std::fabs(expected))) {
            throw InputError("scan_almost_periods: tau values must form an arithmetic grid");
        }
        if (distance.value[i] <= epsilon) report.accepted.push_back(distance.tau[i]);
    }
    double previous = report.tau_start;
    for (double tau : report.accepted) {
        report.max_gap = std::max(report.max_gap, tau - previous);
        previous = tau;
    }
    report.max_gap = std::max(report.max_gap, report.tau_end - previous);
    report.inclusion_length = report.max_gap;
    report.relatively_dense = !report.accepted.empty() && report.max_gap <= l_max;
    return report;
}

// ---------------------------------------------------------------------------
// Bochner double sequences

std::string to_string(Verdict verdict) {
    switch (verdict) {
        case Verdict::holds: return "holds";
        case Verdict::fails: return "fails";
        case Verdict::inconclusive: return "inconclusive";
    }
    return "unknown";
}

namespace {

class ShiftCache {
public:
    ShiftCache(const ShiftEvaluator& evaluator, std::size_t dim, std::span<const double> probes)
        : evaluator_(evaluator), dim_(dim), probes_(probes) {}

    const std::vector<std::vector<double>>& at(double shift) {
        auto it = cache_.find(shift);
        if (it == cache_.end()) {
            std::vector<std::vector<double>> samples;
            samples.reserve(probes_.size());
            for (double t : probes_) samples.push_back(evaluator_(t, shift));
            it = cache_.emplace(shift, std::move(samples)).first;
        }
        return it->second;
    }

    double distance(double shift_a, double shift_b) {
        const auto& a = at(shift_a);
        const auto& b = at(shift_b);
        double worst = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, d0(Samples{a[i], dim_}, Samples{b[i], dim_}));
        return worst;
    }

private:
    const ShiftEvaluator& evaluator_;
    std::size_t dim_;
    std::span<const double> probes_;
    std::map<double, std::vector<std::vector<double>>> cache_;
};

// Indices of `shifts` within `threshold` of the last one, ascending.
std::vector<std::size_t> cauchy_filter(ShiftCache& cache, const std::vector<double>& shifts, double threshold) {
    std::vector<std::size_t> kept;
    const double anchor = shifts.back();
    for (std::size_t i = 0; i < shifts.size(); ++i) {
        if (i + 1 == shifts.size() || cache.distance(shifts[i], anchor) <= threshold) kept.push_back(i);
    }
    return kept;
}

}  // namespace

BochnerResult bochner_double_sequence_test(const ShiftEvaluator& evaluator, std::size_t dim,
                                           std::span<const double> alpha, std::span<const double> beta,
                                           std::span<const double> t_probe, double tol) {
    constexpr std::size_t kMaxPrefix = 16;
    constexpr std::size_t kMinKept = 2;
    if (alpha.empty() || beta.empty() || t_probe.empty()) throw InputError("bochner: empty sequence or probe grid");
    if (alpha.size() > kMaxPrefix || beta.size() > kMaxPrefix) {
        throw InputError("bochner: sequence prefixes are limited to 16 terms");
    }
    ShiftCache cache(evaluator, dim, t_probe);
    BochnerResult result;
    const std::size_t n = std::min(alpha.size(), beta.size());

    std::vector<double> diagonal(n);
    for (std::size_t k = 0; k < n; ++k) diagonal[k] = alpha[k] + beta[k];
    const std::vector<std::size_t> kept = cauchy_filter(cache, diagonal, tol / 2);
    if (kept.size() < 2 * kMinKept) {
        result.detail = "diagonal sequence does not stabilize within the prefix";
        return result;
    }
    result.subsequence = kept;
    const std::size_t half = kept.size() / 2;
    const std::vector<std::size_t> outer(kept.begin(), kept.begin() + static_cast<std::ptrdiff_t>(half));
    const std::vector<std::size_t> inner(kept.begin() + static_cast<std::ptrdiff_t>(half), kept.end());

    std::vector<double> outer_limits;  // shift realizing lim_m at each outer index
    for (std::size_t a : outer) {
        std::vector<double> shifts;
        for (std::size_t b : inner) shifts.push_back(alpha[a] + beta[b]);
        if (cauchy_filter(cache, shifts, tol / 2).size() < kMinKept) {
            result.detail = "inner limit does not stabilize for outer index " + std::to_string(a);
            return result;
        }
        outer_limits.push_back(shifts.back());
    }
    if (cauchy_filter(cache, outer_limits, tol / 2).size() < kMinKept) {
        result.detail = "outer limit does not stabilize within the prefix";
        return result;
    }
    result.discrepancy = cache.distance(outer_limits.back(), diagonal[kept.back()]);
    result.verdict = result.discrepancy <= tol ? Verdict::holds : Verdict::fails;
    result.detail = "iterated vs diagonal d0 = " + format_number(result.discrepancy);
    return result;
}

// ---------------------------------------------------------------------------
// Distributional distances

namespace {

std::size_t shifted_node(const PathEnsemble& ensemble, std::size_t node, double tau, const char* op) {
    const std::int64_t shifted = static_cast<std::int64_t>(node) + steps_of(tau, ensemble.grid.dt);
    if (shifted < 0 || shifted > static_cast<std::int64_t>(ensemble.grid.n_steps)) {
        throw InputError(std::string(op) + ": shifted time leaves the ensemble grid");
    }
    return static_cast<std::size_t>(shifted);
}

}  // namespace

double apod_distance(const PathEnsemble& ensemble, double t, double tau, const TransportOptions& options) {
    const std::size_t node = node_index(ensemble.grid, t);
    const std::size_t target = shifted_node(ensemble, node, tau, "apod_distance");
    return wasserstein_trunc(marginal_law(ensemble, node), marginal_law(ensemble, target), options);
}

double apfd_distance(const PathEnsemble& ensemble, std::span<const double> t_tuple, double tau,
                     const TransportOptions& options) {
    if (t_tuple.empty()) throw InputError("apfd_distance: empty time tuple");
    std::vector<std::size_t> nodes, targets;
    for (double t : t_tuple) {
        nodes.push_back(node_index(ensemble.grid, t));
        targets.push_back(shifted_node(ensemble, nodes.back(), tau, "apfd_distance"));
    }
    EmpiricalLaw a = joint_law(ensemble, nodes);
    EmpiricalLaw b = joint_law(ensemble, targets);
    return wasserstein_trunc(a, b, options);
}

double appd_distance(const PathEnsemble& ensemble, double t0, double t1, double tau,
                     const TransportOptions& options) {
    const std::size_t first = node_index(ensemble.grid, t0);
    const std::size_t last = node_index(ensemble.grid, t1);
    if (last < first) throw InputError("appd_distance: window end precedes its start");
    const std::size_t first_shifted = shifted_node(ensemble, first, tau, "appd_distance");
    shifted_node(ensemble, last, tau, "appd_distance");
    return wass_window(ensemble, ensemble, first, first_shifted, last - first + 1, options);
}

// ---------------------------------------------------------------------------
// Tightness and uniform integrability

namespace {

std::size_t last_node(const PathEnsemble& ensemble, const NodeRange& range) {
    return std::min(range.last, ensemble.grid.n_steps);
}

double norm_of(std::span<const double> x) {
    double acc = 0.0;
    for (double v : x) acc += v * v;
    return std::sqrt(acc);
}

}  // namespace

double modulus_tightness(const PathEnsemble& ensemble, double j0, double j1, double delta, NodeRange range) {
    const double dt = ensemble.grid.dt;
    if (delta < dt) throw InputError("modulus_tightness: delta is below the grid step");
    if (j1 < j0) throw InputError("modulus_tightness: window end precedes its start");
    const std::int64_t offset0 = steps_of(j0, dt);
    const std::int64_t offset1 = steps_of(j1, dt);
    const std::size_t max_lag = static_cast<std::size_t>(std::floor(delta / dt + 1e-9));
    const std::size_t width = static_cast<std::size_t>(offset1 - offset0);
    const std::size_t stride = std::max<std::size_t>(range.stride, 1);

    const std::int64_t last = static_cast<std::int64_t>(last_node(ensemble, range));
    double sup = 0.0;
    for (std::int64_t k = static_cast<std::int64_t>(range.first); k <= last; k += static_cast<std::int64_t>(stride)) {
        if (k + offset0 < 0 || k + offset1 > static_cast<std::int64_t>(ensemble.grid.n_steps)) continue;
        const std::size_t start = static_cast<std::size_t>(k + offset0);
        double total = 0.0;
        for (std::size_t p = 0; p < ensemble.n_paths; ++p) {
            double oscillation = 0.0;
            for (std::size_t i = 0; i <= width && oscillation < 1.0; ++i) {
                const auto a = ensemble.state(p, start + i);
                for (std::size_t lag = 1; lag <= max_lag && i + lag <= width; ++lag) {
                    const auto b = ensemble.state(p, start + i + lag);
                    double acc = 0.0;
                    for (std::size_t c = 0; c < a.size(); ++c) acc += (a[c] - b[c]) * (a[c] - b[c]);
                    oscillation = std::max(oscillation, std::sqrt(acc));
                    if (oscillation >= 1.0) break;
                }
            }
            total += std::min(oscillation, 1.0);
        }
        sup = std::max(sup, total / static_cast<double>(ensemble.n_paths));
    }
    return sup;
}

double tightness_check(const PathEnsemble& ensemble, double epsilon, NodeRange range) {
    if (!(epsilon >= 0.0)) throw InputError("tightness_check: epsilon must be nonnegative");
    const std::size_t n = ensemble.n_paths;
    const std::size_t allowed_outside = static_cast<std::size_t>(std::floor(std::min(epsilon, 1.0) * static_cast<double>(n)));
    if (allowed_outside >= n) return 0.0;
    const std::size_t last = last_node(ensemble, range);
    std::vector<double> norms(n);
    double radius = 0.0;
    for (std::size_t k = range.first; k <= last; k += std::max<std::size_t>(range.stride, 1)) {
        for (std::size_t p = 0; p < n; ++p) norms[p] = norm_of(ensemble.state(p, k));
        const std::size_t rank = n - allowed_outside - 1;  // 0-based order statistic
        std::nth_element(norms.begin(), norms.begin() + static_cast<std::ptrdiff_t>(rank), norms.end());
        radius = std::max(radius, norms[rank]);
    }
    return radius;
}

std::vector<double> uniform_integrability_check(const PathEnsemble& ensemble, double p,
                                                std::span<const double> thresholds, NodeRange range) {
    if (!(p >= 1.0)) throw InputError("uniform_integrability_check: p must be at least 1");
    std::vector<double> out(thresholds.size(), 0.0);
    const std::size_t last = last_node(ensemble, range);
    std::vector<double> norms(ensemble.n_paths);
    for (std::size_t k = range.first; k <= last; k += std::max<std::size_t>(range.stride, 1)) {
        for (std::size_t path = 0; path < ensemble.n_paths; ++path) norms[path] = norm_of(ensemble.state(path, k));
        for (std::size_t r = 0; r < thresholds.size(); ++r) {
            double tail = 0.0;
            for (double v : norms) {
                if (v > thresholds[r]) tail += std::pow(v, p);
            }
            out[r] = std::max(out[r], tail / static_cast<double>(ensemble.n_paths));
        }
    }
    return out;
}

std::string to_string(DistributionMode mode) {
    switch (mode) {
        case DistributionMode::apod: return "APOD";
        case DistributionMode::apfd: return "APFD";
        case DistributionMode::appd: return "APPD";
        case DistributionMode::theta_coupled: return "theta-coupled";
    }
    return "unknown";
}

double DistributionalReport::acceptance(double epsilon) const {
    if (value.empty()) return 0.0;
    const auto accepted = std::count_if(value.begin(), value.end(), [&](double v) { return v <= epsilon; });
    return static_cast<double>(accepted) / static_cast<double>(value.size());
}

}  // namespace aperiod
