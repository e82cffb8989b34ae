#include "aperiod/mild_solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "aperiod/error.hpp"
#include "aperiod/format.hpp"
#include "aperiod/parallel.hpp"
#include "aperiod/simd/kernels.hpp"

namespace aperiod {

namespace {

// Time-dependent coefficient tables for every step of the grid.
struct CoefficientTable {
    std::size_t dim = 0;
    std::vector<double> forcing;  // [step][coordinate]
    std::vector<double> sigma;    // [step][coordinate], zero beyond the shared diagonal
    std::vector<double> decay;    // exp(-lambda_i dt)

    CoefficientTable(const ModelSpec& model, const TimeGrid& grid) : dim(model.dim_state) {
        forcing.resize(grid.n_steps * dim);
        sigma.resize(grid.n_steps * dim);
        for (std::size_t k = 0; k < grid.n_steps; ++k) {
            const double t = grid.time(k);
            eval_forcing(model, t, std::span(forcing).subspan(k * dim, dim));
            eval_sigma(model, t, std::span(sigma).subspan(k * dim, dim));
        }
        decay.resize(dim);
        for (std::size_t i = 0; i < dim; ++i) decay[i] = std::exp(-model.spectrum[i] * grid.dt);
    }
};

void check_noise(const ModelSpec& model, const NoiseEnsemble& noise) {
    if (noise.n_paths() == 0) throw InputError("solver: empty noise ensemble");
    if (noise.dim() != model.dim_noise) throw InputError("solver: noise dimension does not match dim_noise");
}

// Runs the step recursion for every path. With `source` == nullptr the
// coefficients are evaluated along the propagated value (plain integration),
// otherwise along `source` (one application of Gamma).
void propagate(const ModelSpec& model, const NoiseEnsemble& noise, const PathEnsemble* source,
               std::span<const double> start, PathEnsemble& out, double ceiling, unsigned threads) {
    const TimeGrid& grid = noise.grid();
    const CoefficientTable table(model, grid);
    const std::size_t d = model.dim_state;
    const std::size_t shared = model.shared_dim();
    const bool direct_dw = noise.dim() == d;
    const double ceiling_sq = ceiling * ceiling;
    const auto& kernels = simd::active_kernels();

    parallel_for(noise.n_paths(), threads, [&](std::size_t begin, std::size_t end) {
        std::vector<double> padded(d, 0.0);
        for (std::size_t p = begin; p < end; ++p) {
            std::copy(start.begin(), start.end(), out.state(p, 0).begin());
            for (std::size_t k = 0; k < grid.n_steps; ++k) {
                std::span<const double> dw = noise.increment(p, k);
                if (!direct_dw) {
                    for (std::size_t i = 0; i < shared; ++i) padded[i] = dw[i];
                    dw = padded;
                }
                const auto y = std::as_const(out).state(p, k);
                const auto x = source ? source->state(p, k) : y;
                auto next = out.state(p, k + 1);
                kernels.mild_step({.out = next,
                                   .y = y,
                                   .x = x,
                                   .forcing = std::span(table.forcing).subspan(k * d, d),
                                   .sigma = std::span(table.sigma).subspan(k * d, d),
                                   .dw = dw,
                                   .decay = table.decay,
                                   .drift_gain = model.drift.nonlinearity_gain,
                                   .diffusion_gain = model.diffusion.state_gain,
                                   .dt = grid.dt});
                double norm_sq = 0.0;
                for (double v : next) norm_sq += v * v;
                if (!(norm_sq <= ceiling_sq)) {
                    std::ostringstream msg;
                    msg << "solver: path " << p << " left the divergence ceiling " << ceiling << " at t = "
                        << grid.time(k + 1) << " (unstable model or dt too large)";
                    throw DivergenceError(msg.str());
                }
            }
        }
    });
}

double resolve_ceiling(const ModelSpec& model, const HypothesisReport& hypotheses, const SolverOptions& options) {
    return options.divergence_ceiling > 0.0 ? options.divergence_ceiling
                                            : default_divergence_ceiling(model, hypotheses);
}

}  // namespace

PathEnsemble PathEnsemble::zeros(const TimeGrid& grid, std::size_t n_paths, std::size_t dim, NoiseId id) {
    PathEnsemble e;
    e.grid = grid;
    e.n_paths = n_paths;
    e.dim = dim;
    e.values.assign(n_paths * grid.n_nodes() * dim, 0.0);
    e.noise_id = id;
    return e;
}

std::string ConvergenceReport::to_text() const {
    std::ostringstream out;
    out << "kappa=" << format_number(kappa) << '\n';
    out << "sqrt_kappa=" << format_number(std::sqrt(kappa)) << '\n';
    out << "iterations=" << iterations << '\n';
    out << "converged=" << (converged ? "true" : "false") << '\n';
    out << "deltas=";
    for (std::size_t i = 0; i < deltas.size(); ++i) out << (i ? "," : "") << format_number(deltas[i]);
    out << '\n';
    return out.str();
}

double default_divergence_ceiling(const ModelSpec& model, const HypothesisReport& hypotheses) {
    double forcing = euclidean_norm(model.drift.base);
    for (const auto& mode : model.drift.modes) forcing += euclidean_norm(mode.amplitude);
    return 1e6 * (1.0 + forcing / hypotheses.delta);
}

PathEnsemble integrate(const ModelSpec& model, const NoiseEnsemble& noise, std::span<const double> x0,
                       const SolverOptions& options) {
    const HypothesisReport hypotheses = check_hypotheses(model);
    check_noise(model, noise);
    if (x0.size() != model.dim_state) throw InputError("integrate: x0 must have dim_state entries");
    PathEnsemble out = PathEnsemble::zeros(noise.grid(), noise.n_paths(), model.dim_state, noise.id());
    propagate(model, noise, nullptr, x0, out, resolve_ceiling(model, hypotheses, options), options.threads);
    return out;
}

PathEnsemble gamma_apply(const ModelSpec& model, const PathEnsemble& x, const NoiseEnsemble& noise,
                         const SolverOptions& options) {
    const HypothesisReport hypotheses = check_hypotheses(model);
    check_noise(model, noise);
    if (!(x.noise_id == noise.id())) throw InputError("gamma_apply: process is not bound to this noise ensemble");
    if (!(x.grid == noise.grid()) || x.n_paths != noise.n_paths() || x.dim != model.dim_state) {
        throw InputError("gamma_apply: process grid or shape does not match the noise ensemble");
    }
    PathEnsemble out = PathEnsemble::zeros(noise.grid(), noise.n_paths(), model.dim_state, noise.id());
    const std::vector<double> origin(model.dim_state, 0.0);
    propagate(model, noise, &x, origin, out, resolve_ceiling(model, hypotheses, options), options.threads);
    return out;
}

SolveResult solve_bounded(const ModelSpec& model, const NoiseEnsemble& noise, const SolverOptions& options) {
    const HypothesisReport hypotheses = check_hypotheses(model);
    if (!hypotheses.contraction_ok) {
        std::ostringstream msg;
        msg << "solve_bounded: contraction condition fails, kappa = " << format_number(hypotheses.kappa) << " >= 1";
        throw SolverRefused(msg.str(), hypotheses.kappa);
    }
    check_noise(model, noise);
    SolveResult result;
    result.report.kappa = hypotheses.kappa;
    PathEnsemble current = PathEnsemble::zeros(noise.grid(), noise.n_paths(), model.dim_state, noise.id());
    for (std::size_t n = 0; n < options.max_iter; ++n) {
        PathEnsemble next = gamma_apply(model, current, noise, options);
        const double delta = sup_l2_distance(next, current, options.threads);
        current = std::move(next);
        result.report.deltas.push_back(delta);
        result.report.iterations = n + 1;
        if (delta < options.tol) {
            result.report.converged = true;
            break;
        }
    }
    result.solution = std::move(current);
    return result;
}

SolveResult translated_solution(const ModelSpec& model, const NoiseEnsemble& noise, double tau,
                                const SolverOptions& options) {
    const NoiseEnsemble coupled = coupled_increments(noise, tau);
    SolveResult result = solve_bounded(model, coupled, options);
    result.solution.grid = noise.grid();
    result.solution.noise_id = noise.id();
    return result;
}

double default_burn_in(const HypothesisReport& hypotheses, double tol) {
    return std::log(100.0 * (1.0 + hypotheses.growth) / tol) / hypotheses.delta;
}

double burn_in_bound(const HypothesisReport& hypotheses, double sup_l2, double burn_in) {
    const double delta = hypotheses.delta;
    return hypotheses.growth * (1.0 + sup_l2) * std::exp(-delta * burn_in) *
           (1.0 / delta + 1.0 / std::sqrt(2.0 * delta));
}

double l2_norm_at(const PathEnsemble& x, std::size_t node) {
    double acc = 0.0;
    for (std::size_t p = 0; p < x.n_paths; ++p) {
        for (double v : x.state(p, node)) acc += v * v;
    }
    return std::sqrt(acc / static_cast<double>(x.n_paths));
}

double l2_distance_at(const PathEnsemble& x, const PathEnsemble& y, std::size_t node) {
    double acc = 0.0;
    for (std::size_t p = 0; p < x.n_paths; ++p) {
        const auto a = x.state(p, node);
        const auto b = y.state(p, node);
        for (std::size_t i = 0; i < a.size(); ++i) {
            const double diff = a[i] - b[i];
            acc += diff * diff;
        }
    }
    return std::sqrt(acc / static_cast<double>(x.n_paths));
}

namespace {

// Per-node mean over paths of `term(a, b)` summed over coordinates, taken as a
// sup over nodes. Each node accumulates in path order whatever the chunking.
template <class Term>
double sup_mean_over_nodes(const PathEnsemble& x, const PathEnsemble* y, unsigned threads, Term&& term) {
    const std::size_t n_nodes = x.grid.n_nodes();
    std::vector<double> acc(n_nodes, 0.0);
    parallel_for(n_nodes, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t p = 0; p < x.n_paths; ++p) {
            for (std::size_t k = begin; k < end; ++k) {
                const auto a = x.state(p, k);
                double sum = acc[k];
                if (y) {
                    const auto b = y->state(p, k);
                    for (std::size_t i = 0; i < a.size(); ++i) sum += term(a[i], b[i]);
                } else {
                    for (std::size_t i = 0; i < a.size(); ++i) sum += term(a[i], 0.0);
                }
                acc[k] = sum;
            }
        }
    });
    const double worst = *std::max_element(acc.begin(), acc.end());
    return std::sqrt(worst / static_cast<double>(x.n_paths));
}

double squared_difference(double a, double b) {
    const double diff = a - b;
    return diff * diff;
}

}  // namespace

double sup_l2_norm(const PathEnsemble& x, unsigned threads) {
    return sup_mean_over_nodes(x, nullptr, threads, squared_difference);
}

double sup_l2_distance(const PathEnsemble& x, const PathEnsemble& y, unsigned threads) {
    if (!(x.grid == y.grid) || x.n_paths != y.n_paths || x.dim != y.dim) {
        throw InputError("sup_l2_distance: ensembles have different shapes");
    }
    return sup_mean_over_nodes(x, &y, threads, squared_difference);
}

}  // namespace aperiod
