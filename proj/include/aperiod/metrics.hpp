#pragma once

// Distances between random variables (paired samples on a common omega) and
// between laws (equal-weight empirical measures). Everything except lp_dist
// works with the truncated ground metric min(dist, 1).

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "aperiod/mild_solver.hpp"

namespace aperiod {

/// n samples of a dim-dimensional variable, row-major.
struct Samples {
    std::span<const double> data;
    std::size_t dim = 1;

    std::size_t size() const noexcept { return dim == 0 ? 0 : data.size() / dim; }
    std::span<const double> operator[](std::size_t i) const noexcept { return data.subspan(i * dim, dim); }
};

/// Samples of X(t_k, .) for all paths of an ensemble, copied out row-major.
std::vector<double> states_at(const PathEnsemble& ensemble, std::size_t node);

/// E(min(||X - Y||, 1)) for samples paired on the same omega.
double d0(const Samples& x, const Samples& y);

/// Per-pair truncated distances min(||x_p - y_p||, 1).
std::vector<double> truncated_distances(const Samples& x, const Samples& y);

/// (E ||X - Y||^p)^{1/p}, p >= 1.
double lp_dist(double p, const Samples& x, const Samples& y);

enum class LawKind { marginal, joint, path };

/// Equal-weight atoms; each atom is `nodes` points of R^dim (nodes = 1 for marginals).
struct EmpiricalLaw {
    LawKind kind = LawKind::marginal;
    std::size_t n = 0;
    std::size_t nodes = 1;
    std::size_t dim = 1;
    std::vector<double> atoms;  // [atom][node][coordinate]

    std::span<const double> atom(std::size_t i) const noexcept {
        return {atoms.data() + i * nodes * dim, nodes * dim};
    }
};

EmpiricalLaw marginal_law(const PathEnsemble& ensemble, std::size_t node);
EmpiricalLaw joint_law(const PathEnsemble& ensemble, std::span<const std::size_t> nodes);
EmpiricalLaw path_law(const PathEnsemble& ensemble, std::size_t first_node, std::size_t count);
EmpiricalLaw sample_law(const Samples& samples);

struct TransportOptions {
    std::size_t n_exact = 512;  // larger clouds are subsampled to this many atoms
    std::uint64_t seed = 0;     // picks the subsampling offset
    unsigned threads = 1;
};

/// Evenly strided subset of m indices out of n, offset chosen by seed.
std::vector<std::size_t> subsample_indices(std::size_t n, std::size_t m, std::uint64_t seed);

/// Optimal-coupling cost with ground cost min(d, 1), where d is the sup over
/// nodes of the per-node Euclidean distance. Exact assignment over the
/// (possibly subsampled) atoms.
double wasserstein_trunc(const EmpiricalLaw& mu, const EmpiricalLaw& nu, const TransportOptions& options = {});

/// Upper noise level of wasserstein_trunc between independent samples of one
/// law: mean + 3 sd of the distances between complementary halves of each
/// given law, over four fixed splits of the atom indices.
double transport_noise_level(std::span<const EmpiricalLaw> laws, const TransportOptions& options = {});

/// Full truncated cost matrix (row-major, mu atoms by nu atoms).
std::vector<double> cost_matrix(const EmpiricalLaw& mu, const EmpiricalLaw& nu, unsigned threads = 1);

/// sup over nodes of ||a(node) - b(node)||; a and b hold nodes*dim values.
double path_semidistance(std::span<const double> a, std::span<const double> b, std::size_t dim);

/// Truncated Wasserstein distance between the path laws of two ensembles on
/// the window of `count` nodes starting at node `first_a` (resp. `first_b`).
double wass_window(const PathEnsemble& a, const PathEnsemble& b, std::size_t first_a, std::size_t first_b,
                   std::size_t count, const TransportOptions& options = {});

}  // namespace aperiod
