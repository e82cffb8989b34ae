#pragma once

// Exponential-Euler realization of the mild formulation and the Picard
// iteration of the convolution operator
//     (Gamma X)(t) = int_{-inf}^t S(t-s) F(s, X(s)) ds + int_{-inf}^t S(t-s) G(s, X(s)) dW(s)
// whose fixed point is the unique bounded solution when kappa < 1.
// The improper integrals start at the left edge of the noise grid (burn-in).

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "aperiod/model.hpp"
#include "aperiod/noise.hpp"

namespace aperiod {

/// X(t_k, omega_p) for every path and node, laid out [path][node][coordinate].
struct PathEnsemble {
    TimeGrid grid;
    std::size_t n_paths = 0;
    std::size_t dim = 0;
    std::vector<double> values;
    NoiseId noise_id;

    static PathEnsemble zeros(const TimeGrid& grid, std::size_t n_paths, std::size_t dim, NoiseId id = {});

    std::span<double> state(std::size_t path, std::size_t node) noexcept {
        return {values.data() + (path * grid.n_nodes() + node) * dim, dim};
    }
    std::span<const double> state(std::size_t path, std::size_t node) const noexcept {
        return {values.data() + (path * grid.n_nodes() + node) * dim, dim};
    }
};

struct SolverOptions {
    double tol = 1e-3;
    std::size_t max_iter = 100;
    /// Norm above which integration aborts; <= 0 selects 1e6 (1 + ||forcing|| / delta).
    double divergence_ceiling = 0.0;
    unsigned threads = 1;
};

struct ConvergenceReport {
    double kappa = 0.0;
    std::vector<double> deltas;  // sup_t ||X_{n+1}(t) - X_n(t)||_{L2}, n = 0, 1, ...
    std::size_t iterations = 0;
    bool converged = false;

    std::string to_text() const;
};

struct SolveResult {
    PathEnsemble solution;
    ConvergenceReport report;
};

/// Pathwise X(t+dt) = S(dt) [X(t) + F(t, X(t)) dt + G(t, X(t)) dW(t)] from x0 at the grid start.
PathEnsemble integrate(const ModelSpec& model, const NoiseEnsemble& noise, std::span<const double> x0,
                       const SolverOptions& options = {});

/// Discretized Gamma by the O(n) recursion
///   GX(t+dt) = S(dt) [GX(t) + F(t, X(t)) dt + G(t, X(t)) dW(t)],  GX(t_start) = 0.
PathEnsemble gamma_apply(const ModelSpec& model, const PathEnsemble& x, const NoiseEnsemble& noise,
                         const SolverOptions& options = {});

/// Picard iteration X_{n+1} = Gamma X_n from X_0 = 0. Throws SolverRefused when kappa >= 1.
SolveResult solve_bounded(const ModelSpec& model, const NoiseEnsemble& noise, const SolverOptions& options = {});

/// Y(t, omega) = X(t + tau, theta_{-tau} omega): the bounded solution driven by
/// coupled_increments(noise, tau), returned on the labels of `noise`.
SolveResult translated_solution(const ModelSpec& model, const NoiseEnsemble& noise, double tau,
                                const SolverOptions& options = {});

/// (1/delta) ln(100 (1 + K) / tol).
double default_burn_in(const HypothesisReport& hypotheses, double tol);

/// K (1 + sup_l2) e^{-delta T} (1/delta + 1/sqrt(2 delta)): L2 effect of starting Gamma at -T instead of -inf.
double burn_in_bound(const HypothesisReport& hypotheses, double sup_l2, double burn_in);

double default_divergence_ceiling(const ModelSpec& model, const HypothesisReport& hypotheses);

/// sqrt(mean_p ||X(t_k, p)||^2) at one node.
double l2_norm_at(const PathEnsemble& x, std::size_t node);
/// sqrt(mean_p ||X(t_k, p) - Y(t_k, p)||^2) at one node.
double l2_distance_at(const PathEnsemble& x, const PathEnsemble& y, std::size_t node);

double sup_l2_norm(const PathEnsemble& x, unsigned threads = 1);
double sup_l2_distance(const PathEnsemble& x, const PathEnsemble& y, unsigned threads = 1);

}  // namespace aperiod
