#include "aperiod/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "aperiod/assignment.hpp"
#include "aperiod/error.hpp"
#include "aperiod/parallel.hpp"
#include "aperiod/simd/kernels.hpp"

namespace aperiod {

namespace {

void require_paired(const Samples& x, const Samples& y, const char* op) {
    if (x.dim != y.dim || x.data.size() != y.data.size()) {
        throw InputError(std::string(op) + ": paired samples must have equal length and dimension");
    }
    if (x.size() == 0) throw InputError(std::string(op) + ": no samples");
}

double distance(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double diff = a[i] - b[i];
        acc += diff * diff;
    }
    return std::sqrt(acc);
}

EmpiricalLaw subset(const EmpiricalLaw& law, std::span<const std::size_t> indices) {
    EmpiricalLaw out{law.kind, indices.size(), law.nodes, law.dim, {}};
    out.atoms.reserve(indices.size() * law.nodes * law.dim);
    for (std::size_t i : indices) {
        const auto atom = law.atom(i);
        out.atoms.insert(out.atoms.end(), atom.begin(), atom.end());
    }
    return out;
}

}  // namespace

std::vector<double> states_at(const PathEnsemble& ensemble, std::size_t node) {
    if (node >= ensemble.grid.n_nodes()) throw InputError("states_at: node outside the grid");
    std::vector<double> out;
    out.reserve(ensemble.n_paths * ensemble.dim);
    for (std::size_t p = 0; p < ensemble.n_paths; ++p) {
        const auto s = ensemble.state(p, node);
        out.insert(out.end(), s.begin(), s.end());
    }
    return out;
}

std::vector<double> truncated_distances(const Samples& x, const Samples& y) {
    require_paired(x, y, "d0");
    std::vector<double> out(x.size());
    for (std::size_t p = 0; p < out.size(); ++p) out[p] = std::min(distance(x[p], y[p]), 1.0);
    return out;
}

double d0(const Samples& x, const Samples& y) {
    const std::vector<double> dist = truncated_distances(x, y);
    double acc = 0.0;
    for (double v : dist) acc += v;
    return acc / static_cast<double>(dist.size());
}

double lp_dist(double p, const Samples& x, const Samples& y) {
    if (!(p >= 1.0)) throw InputError("lp_dist: p must be at least 1");
    require_paired(x, y, "lp_dist");
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) acc += std::pow(distance(x[i], y[i]), p);
    return std::pow(acc / static_cast<double>(x.size()), 1.0 / p);
}

EmpiricalLaw marginal_law(const PathEnsemble& ensemble, std::size_t node) {
    return EmpiricalLaw{LawKind::marginal, ensemble.n_paths, 1, ensemble.dim, states_at(ensemble, node)};
}

EmpiricalLaw joint_law(const PathEnsemble& ensemble, std::span<const std::size_t> nodes) {
    if (nodes.empty()) throw InputError("joint_law: empty time tuple");
    for (std::size_t k : nodes) {
        if (k >= ensemble.grid.n_nodes()) throw InputError("joint_law: node outside the grid");
    }
    EmpiricalLaw law{LawKind::joint, ensemble.n_paths, nodes.size(), ensemble.dim, {}};
    law.atoms.reserve(ensemble.n_paths * nodes.size() * ensemble.dim);
    for (std::size_t p = 0; p < ensemble.n_paths; ++p) {
        for (std::size_t k : nodes) {
            const auto s = ensemble.state(p, k);
            law.atoms.insert(law.atoms.end(), s.begin(), s.end());
        }
    }
    return law;
}

EmpiricalLaw path_law(const PathEnsemble& ensemble, std::size_t first_node, std::size_t count) {
    if (count == 0 || first_node + count > ensemble.grid.n_nodes()) {
        throw InputError("path_law: window exceeds the ensemble grid");
    }
    EmpiricalLaw law{LawKind::path, ensemble.n_paths, count, ensemble.dim, {}};
    law.atoms.reserve(ensemble.n_paths * count * ensemble.dim);
    for (std::size_t p = 0; p < ensemble.n_paths; ++p) {
        const auto first = ensemble.state(p, first_node);
        law.atoms.insert(law.atoms.end(), first.data(), first.data() + count * ensemble.dim);
    }
    return law;
}

EmpiricalLaw sample_law(const Samples& samples) {
    return EmpiricalLaw{LawKind::marginal, samples.size(), 1, samples.dim,
                        std::vector<double>(samples.data.begin(), samples.data.end())};
}

std::vector<std::size_t> subsample_indices(std::size_t n, std::size_t m, std::uint64_t seed) {
    if (m == 0 || m > n) throw InputError("subsample_indices: need 0 < m <= n");
    std::vector<std::size_t> out(m);
    if (m == n) {
        for (std::size_t i = 0; i < n; ++i) out[i] = i;
        return out;
    }
    // floor((i + u) n / m) with u in [0, 1): strictly increasing since n / m > 1.
    const double offset = static_cast<double>(seed % 1024) / 1024.0;
    const double stride = static_cast<double>(n) / static_cast<double>(m);
    for (std::size_t i = 0; i < m; ++i) {
        out[i] = std::min(n - 1, static_cast<std::size_t>((static_cast<double>(i) + offset) * stride));
    }
    return out;
}

std::vector<double> cost_matrix(const EmpiricalLaw& mu, const EmpiricalLaw& nu, unsigned threads) {
    const std::size_t rows = mu.n;
    const std::size_t cols = nu.n;
    const std::size_t width = nu.nodes * nu.dim;
    std::vector<double> others(width * cols);
    for (std::size_t j = 0; j < cols; ++j) {
        const auto atom = nu.atom(j);
        for (std::size_t r = 0; r < width; ++r) others[r * cols + j] = atom[r];
    }
    std::vector<double> cost(rows * cols);
    const auto& kernels = simd::active_kernels();
    parallel_for(rows, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            kernels.cost_row({.atom = mu.atom(i),
                              .others = others,
                              .nodes = mu.nodes,
                              .dim = mu.dim,
                              .count = cols,
                              .stride = cols,
                              .out = std::span(cost).subspan(i * cols, cols)});
        }
    });
    return cost;
}

double wasserstein_trunc(const EmpiricalLaw& mu, const EmpiricalLaw& nu, const TransportOptions& options) {
    if (mu.kind != nu.kind || mu.nodes != nu.nodes || mu.dim != nu.dim) {
        throw InputError("wasserstein_trunc: laws live on different spaces");
    }
    if (mu.n == 0 || nu.n == 0) throw InputError("wasserstein_trunc: empty law");
    const std::size_t n = std::min({mu.n, nu.n, std::max<std::size_t>(options.n_exact, 1)});
    EmpiricalLaw a = mu.n == n ? mu : subset(mu, subsample_indices(mu.n, n, options.seed));
    EmpiricalLaw b = nu.n == n ? nu : subset(nu, subsample_indices(nu.n, n, options.seed));
    // Optimal matchings can tie; a canonical argument order makes W(mu, nu) and
    // W(nu, mu) the same computation, hence equal bit for bit.
    if (std::lexicographical_compare(b.atoms.begin(), b.atoms.end(), a.atoms.begin(), a.atoms.end())) std::swap(a, b);

    const std::vector<double> cost = cost_matrix(a, b, options.threads);
    const std::vector<std::size_t> match = solve_assignment(cost, n);
    std::vector<double> chosen(n);
    for (std::size_t i = 0; i < n; ++i) chosen[i] = cost[i * n + match[i]];
    std::sort(chosen.begin(), chosen.end());
    double total = 0.0;
    for (double c : chosen) total += c;
    return total / static_cast<double>(n);
}

double path_semidistance(std::span<const double> a, std::span<const double> b, std::size_t dim) {
    if (a.size() != b.size() || dim == 0 || a.size() % dim != 0) {
        throw InputError("path_semidistance: windows must share the same grid");
    }
    double worst = 0.0;
    for (std::size_t off = 0; off < a.size(); off += dim) {
        worst = std::max(worst, distance(a.subspan(off, dim), b.subspan(off, dim)));
    }
    return worst;
}

double wass_window(const PathEnsemble& a, const PathEnsemble& b, std::size_t first_a, std::size_t first_b,
                   std::size_t count, const TransportOptions& options) {
    if (a.dim != b.dim || a.grid.dt != b.grid.dt) throw InputError("wass_window: ensembles use different grids");
    return wasserstein_trunc(path_law(a, first_a, count), path_law(b, first_b, count), options);
}

double transport_noise_level(std::span<const EmpiricalLaw> laws, const TransportOptions& options) {
    if (laws.empty()) throw InputError("transport_noise_level: no laws");
    std::vector<double> samples;
    for (const EmpiricalLaw& law : laws) {
        if (law.n < 8) throw InputError("transport_noise_level: need at least 8 atoms per law");
        const std::size_t half = law.n / 2;
        const auto in_first = [&](int split, std::size_t i) {
            switch (split) {
                case 0: return i % 2 == 0;
                case 1: return i < half;
                case 2: return (i / 2) % 2 == 0;
                default: return (i / 4) % 2 == 0;
            }
        };
        for (int split = 0; split < 4; ++split) {
            EmpiricalLaw a = law, b = law;
            a.atoms.clear();
            b.atoms.clear();
            a.n = b.n = 0;
            for (std::size_t i = 0; i < law.n; ++i) {
                EmpiricalLaw& target = in_first(split, i) ? a : b;
                const auto atom = law.atom(i);
                target.atoms.insert(target.atoms.end(), atom.begin(), atom.end());
                ++target.n;
            }
            samples.push_back(wasserstein_trunc(a, b, options));
        }
    }
    double mean = 0.0;
    for (double v : samples) mean += v;
    mean /= static_cast<double>(samples.size());
    double var = 0.0;
    for (double v : samples) var += (v - mean) * (v - mean);
    var /= static_cast<double>(samples.size() - 1);
    return mean + 3.0 * std::sqrt(var);
}

}  // namespace aperiod
