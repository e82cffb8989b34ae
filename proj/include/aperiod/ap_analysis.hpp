#pragma once

// Detectors for almost periodicity of solution ensembles: noise-coupled shift
// distances, almost-period scans, the Bochner double-sequence test, the
// APOD/APFD/APPD distributional distances and the tightness/uniform
// integrability diagnostics.

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aperiod/metrics.hpp"
#include "aperiod/mild_solver.hpp"
#include "aperiod/model.hpp"
#include "aperiod/noise.hpp"

namespace aperiod {

/// Error budget attached to every "distance <= small" verdict.
struct ErrorBudget {
    double solver = 0.0;       // 2 tol / (1 - sqrt(kappa)): Picard stopping error of both solves
    double burn_in = 0.0;      // 2 x left-truncation bound
    double scheme = 0.0;       // 2 x measured dt vs 2dt discrepancy
    double monte_carlo = 0.0;  // 3 standard errors of the distance estimator

    double total() const noexcept { return solver + burn_in + scheme + monte_carlo; }
    std::string to_text() const;
};

struct ShiftMeasurement {
    double tau = 0.0;
    double d0 = 0.0;           // sup_t d0(X(t + tau, theta_{-tau}.), X(t, .))
    double pmean = 0.0;        // same coupling, sup_t (E dist^p)^{1/p}
    double monte_carlo = 0.0;  // 3 sd / sqrt(n) of the truncated distances at the d0 maximizer
};

/// Solves the bounded solution once and measures noise-coupled shifts against it.
class CoupledShiftAnalyzer {
public:
    /// `eval_times` must be grid nodes of `noise`; they should sit after the burn-in.
    CoupledShiftAnalyzer(ModelSpec model, NoiseEnsemble noise, std::vector<double> eval_times,
                         SolverOptions options = {});

    ShiftMeasurement measure(double tau, double p = 2.0) const;

    /// Solver, burn-in and scheme terms; the Monte Carlo term is per measurement.
    ErrorBudget budget() const;
    ErrorBudget budget_for(const ShiftMeasurement& m) const;

    const SolveResult& base() const noexcept { return base_; }
    const HypothesisReport& hypotheses() const noexcept { return hypotheses_; }
    const std::vector<std::size_t>& eval_nodes() const noexcept { return eval_nodes_; }
    const NoiseEnsemble& noise() const noexcept { return noise_; }

private:
    ModelSpec model_;
    NoiseEnsemble noise_;
    SolverOptions options_;
    HypothesisReport hypotheses_;
    std::vector<std::size_t> eval_nodes_;
    SolveResult base_;
    mutable std::optional<double> scheme_;
};

double coupled_shift_distance(const ModelSpec& model, const NoiseEnsemble& noise, double tau,
                              std::span<const double> eval_times, const SolverOptions& options = {});

double coupled_shift_distance_pmean(const ModelSpec& model, const NoiseEnsemble& noise, double tau,
                                    std::span<const double> eval_times, double p,
                                    const SolverOptions& options = {});

/// Distance values on an arithmetic tau grid.
struct DistanceCurve {
    std::vector<double> tau;
    std::vector<double> value;
};

struct AlmostPeriodReport {
    double epsilon = 0.0;
    double tau_start = 0.0;
    double tau_step = 0.0;
    double tau_end = 0.0;
    std::vector<double> accepted;  // sorted
    double max_gap = 0.0;          // over {tau_start} + accepted + {tau_end}
    double inclusion_length = 0.0;
    double l_max = 0.0;
    bool relatively_dense = false;

    std::string to_text() const;
};

AlmostPeriodReport scan_almost_periods(const DistanceCurve& distance, double epsilon, double l_max);

enum class Verdict { holds, fails, inconclusive };
std::string to_string(Verdict verdict);

/// evaluator(t, s) returns the samples of X(t + s, theta_{-s} .) paired on omega, row-major with `dim` columns.
using ShiftEvaluator = std::function<std::vector<double>(double t, double shift)>;

struct BochnerResult {
    Verdict verdict = Verdict::inconclusive;
    double discrepancy = 0.0;               // max over probes of d0(iterated, diagonal)
    std::vector<std::size_t> subsequence;   // common indices kept by the Cauchy filter
    std::string detail;
};

/// Finite-prefix Bochner test. The diagonal alpha_k + beta_k is Cauchy-filtered
/// (anchored at its last term, threshold tol/2); the kept indices are split,
/// the first half driving the outer limit and the second half the inner one.
/// Holds iff the iterated and diagonal limit estimates are within tol in d0 at every probe.
BochnerResult bochner_double_sequence_test(const ShiftEvaluator& evaluator, std::size_t dim,
                                           std::span<const double> alpha, std::span<const double> beta,
                                           std::span<const double> t_probe, double tol);

/// W(law X(t), law X(t + tau)).
double apod_distance(const PathEnsemble& ensemble, double t, double tau, const TransportOptions& options = {});

/// W(law (X(t_1..t_n)), law (X(t_1 + tau .. t_n + tau))) with sup-over-tuple ground metric.
double apfd_distance(const PathEnsemble& ensemble, std::span<const double> t_tuple, double tau,
                     const TransportOptions& options = {});

/// Path-law distance between the window [t0, t1] and the window shifted by tau.
double appd_distance(const PathEnsemble& ensemble, double t0, double t1, double tau,
                     const TransportOptions& options = {});

/// Restricts "sup over t" to nodes [first, last] of the ensemble grid.
struct NodeRange {
    std::size_t first = 0;
    std::size_t last = std::numeric_limits<std::size_t>::max();
    std::size_t stride = 1;
};

/// sup_t E( sup_{r,s in J, |r-s| <= delta} ||X(t+r) - X(t+s)|| ^ 1 ), J = [j0, j1] as offsets.
double modulus_tightness(const PathEnsemble& ensemble, double j0, double j1, double delta, NodeRange range = {});

/// Smallest R with sup_t P(||X(t)|| > R) <= epsilon (empirical order statistic).
double tightness_check(const PathEnsemble& ensemble, double epsilon, NodeRange range = {});

/// For each R: sup_t E(||X(t)||^p 1{||X(t)|| > R}).
std::vector<double> uniform_integrability_check(const PathEnsemble& ensemble, double p,
                                                std::span<const double> thresholds, NodeRange range = {});

enum class DistributionMode { apod, apfd, appd, theta_coupled };
std::string to_string(DistributionMode mode);

struct DistributionalReport {
    DistributionMode mode = DistributionMode::apod;
    std::vector<double> tau;
    std::vector<double> value;

    /// Fraction of tau values with value <= epsilon.
    double acceptance(double epsilon) const;
};

}  // namespace aperiod
