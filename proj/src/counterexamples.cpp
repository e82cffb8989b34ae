#include "aperiod/counterexamples.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "aperiod/error.hpp"
#include "aperiod/format.hpp"
#include "aperiod/parallel.hpp"
#include "aperiod/rng.hpp"

namespace aperiod {

namespace {

double spike_sum(double t, double n, double eps) {
    // Centers (2k+1) n; the nearest one to t.
    const double k = std::floor((t / n - 1.0) / 2.0 + 0.5);
    const double center = (2.0 * k + 1.0) * n;
    const double offset = std::fabs(t - center);
    return offset < eps ? 1.0 / eps - offset / (eps * eps) : 0.0;
}

double frac(double x) { return x - std::floor(x); }

}  // namespace

UrsellSpec UrsellSpec::geometric(std::size_t n_max) {
    UrsellSpec spec;
    spec.n_max = n_max;
    for (std::size_t n = 1; n <= n_max; ++n) spec.eps.push_back(std::ldexp(1.0, -static_cast<int>(n)));
    return spec;
}

void UrsellSpec::validate(double t_lo, double t_hi) const {
    if (eps.size() < n_max) throw InputError("ursell: eps has fewer than n_max entries");
    for (std::size_t n = 0; n < n_max; ++n) {
        if (!(eps[n] > 0.0 && eps[n] <= 1.0)) throw InputError("ursell: eps_" + std::to_string(n + 1) + " must lie in (0, 1]");
    }
    if (!(t_hi >= t_lo)) throw InputError("ursell: empty window");
    // Centers are integers, so distinct centers are at least 1 apart and
    // only pairs with eps_n + eps_m > 1 can collide.
    for (std::size_t n = 1; n <= n_max; ++n) {
        for (std::size_t m = n + 1; m <= n_max; ++m) {
            const double reach = eps[n - 1] + eps[m - 1];
            if (reach <= 1.0) continue;
            const double dn = static_cast<double>(n);
            const double dm = static_cast<double>(m);
            const double k_lo = std::floor((t_lo - 1.0) / (2.0 * dm) - 1.0);
            const double k_hi = std::ceil((t_hi + 1.0) / (2.0 * dm) + 1.0);
            for (double k = k_lo; k <= k_hi; k += 1.0) {
                const double center = (2.0 * k + 1.0) * dm;
                const double j = std::floor((center / dn - 1.0) / 2.0 + 0.5);
                for (double jj = j - 1.0; jj <= j + 1.0; jj += 1.0) {
                    const double other = (2.0 * jj + 1.0) * dn;
                    const double gap = std::fabs(center - other);
                    if (gap > 0.0 && gap < reach) {
                        throw InputError("ursell: spikes of n=" + std::to_string(n) + " and n=" + std::to_string(m) +
                                         " partially overlap near t=" + format_number(center));
                    }
                }
            }
        }
    }
}

void UrsellSpec::validate_grid(const TimeGrid& grid) const {
    if (n_max == 0) return;
    const double limit = eps[n_max - 1] / 4.0;
    if (grid.dt > limit * (1.0 + 1e-12)) {
        throw InputError("ursell: dt=" + format_number(grid.dt) + " does not resolve the narrowest spike (need dt <= " +
                         format_number(limit) + ")");
    }
}

double ursell_f(double t, const UrsellSpec& spec) {
    double total = 0.0;
    for (std::size_t n = 1; n <= spec.n_max; ++n) total += spike_sum(t, static_cast<double>(n), spec.eps[n - 1]);
    return total;
}

std::vector<double> stratified_omegas(std::size_t n_paths, std::uint64_t seed) {
    std::vector<double> omegas(n_paths);
    for (std::size_t p = 0; p < n_paths; ++p) {
        rng::NormalStream stream(seed, p);
        omegas[p] = (static_cast<double>(p) + stream.next_uniform()) / static_cast<double>(n_paths);
    }
    return omegas;
}

PathEnsemble ursell_ensemble(const UrsellSpec& spec, const TimeGrid& grid, std::span<const double> omegas,
                             unsigned threads) {
    spec.validate(grid.t_start, grid.t_end() + 1.0);
    spec.validate_grid(grid);
    PathEnsemble out = PathEnsemble::zeros(grid, omegas.size(), 1);
    parallel_for(omegas.size(), threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t p = begin; p < end; ++p) {
            for (std::size_t k = 0; k < grid.n_nodes(); ++k) out.state(p, k)[0] = ursell_f(grid.time(k) + omegas[p], spec);
        }
    });
    return out;
}

PathEnsemble ursell_ensemble(const UrsellSpec& spec, const TimeGrid& grid, std::size_t n_paths, std::uint64_t seed,
                             unsigned threads) {
    const std::vector<double> omegas = stratified_omegas(n_paths, seed);
    return ursell_ensemble(spec, grid, omegas, threads);
}

double stepanov_distance(const UrsellSpec& spec, double t, double tau, std::size_t n_quad) {
    if (n_quad == 0) throw InputError("stepanov_distance: n_quad must be positive");
    double total = 0.0;
    for (std::size_t i = 0; i < n_quad; ++i) {
        const double omega = (static_cast<double>(i) + 0.5) / static_cast<double>(n_quad);
        total += std::fabs(ursell_f(t + tau + omega, spec) - ursell_f(t + omega, spec));
    }
    return total / static_cast<double>(n_quad);
}

double ursell_coupled_distance(const UrsellSpec& spec, const TimeGrid& grid, double tau,
                               std::span<const double> omegas) {
    if (omegas.empty()) throw InputError("ursell_coupled_distance: no omega samples");
    double sup = 0.0;
    for (std::size_t k = 0; k < grid.n_nodes(); ++k) {
        const double t = grid.time(k);
        double total = 0.0;
        for (double omega : omegas) {
            const double shifted = ursell_f(t + tau + frac(omega - tau), spec);
            total += std::min(std::fabs(shifted - ursell_f(t + omega, spec)), 1.0);
        }
        sup = std::max(sup, total / static_cast<double>(omegas.size()));
    }
    return sup;
}

double common_near_period(const UrsellSpec& spec) {
    std::uint64_t period = 1;
    for (std::uint64_t n = 1; n <= spec.n_max; ++n) period = std::lcm(period, 2 * n);
    return static_cast<double>(period);
}

double verify_not_appd(const UrsellSpec& spec, const TimeGrid& grid, double delta, std::size_t n_omega) {
    if (!(delta > 0.0)) throw InputError("verify_not_appd: delta must be positive");
    if (n_omega == 0) throw InputError("verify_not_appd: n_omega must be positive");
    spec.validate_grid(grid);
    const std::int64_t max_lag = static_cast<std::int64_t>(std::floor(delta / grid.dt + 1e-9));
    double sup = 0.0;
    for (std::size_t n = 1; n <= spec.n_max; ++n) {
        const double dn = static_cast<double>(n);
        const double probe = dn * (2.0 * dn + 1.0) - 1.0;
        if (!grid.index_of(probe) || !grid.index_of(probe + 2.0)) {
            throw InputError("verify_not_appd: probe window at t=" + format_number(probe) + " leaves the grid");
        }
        double total = 0.0;
        for (std::size_t i = 0; i < n_omega; ++i) {
            const double omega = (static_cast<double>(i) + 0.5) / static_cast<double>(n_omega);
            const double r = 1.0 - omega;
            const double peak = ursell_f(probe + r + omega, spec);
            double best = 0.0;
            for (std::int64_t j = -max_lag; j <= max_lag && best < 1.0; ++j) {
                const double s = r + static_cast<double>(j) * grid.dt;
                if (j == 0 || s < 0.0 || s > 2.0) continue;
                best = std::max(best, std::min(std::fabs(peak - ursell_f(probe + s + omega, spec)), 1.0));
            }
            total += best;
        }
        sup = std::max(sup, total / static_cast<double>(n_omega));
    }
    return sup;
}

PathEnsemble ou_reference(std::span<const double> lambda, double sigma, std::span<const double> q,
                          const TimeGrid& grid, std::size_t n_paths, std::uint64_t seed, unsigned threads) {
    if (lambda.empty() || lambda.size() != q.size()) throw InputError("ou_reference: lambda and q must be nonempty and equal length");
    for (std::size_t i = 0; i < lambda.size(); ++i) {
        if (!(lambda[i] > 0.0)) throw InputError("ou_reference: lambda must be positive");
        if (!(q[i] >= 0.0)) throw InputError("ou_reference: q must be nonnegative");
    }
    const std::size_t dim = lambda.size();
    std::vector<double> decay(dim), step_sd(dim), stationary_sd(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        decay[i] = std::exp(-lambda[i] * grid.dt);
        stationary_sd[i] = std::sqrt(sigma * sigma * q[i] / (2.0 * lambda[i]));
        step_sd[i] = stationary_sd[i] * std::sqrt(-std::expm1(-2.0 * lambda[i] * grid.dt));
    }
    PathEnsemble out = PathEnsemble::zeros(grid, n_paths, dim);
    parallel_for(n_paths, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t p = begin; p < end; ++p) {
            rng::NormalStream stream(seed, p);
            auto x0 = out.state(p, 0);
            for (std::size_t i = 0; i < dim; ++i) x0[i] = stationary_sd[i] * stream.next();
            for (std::size_t k = 1; k < grid.n_nodes(); ++k) {
                const auto prev = out.state(p, k - 1);
                auto next = out.state(p, k);
                for (std::size_t i = 0; i < dim; ++i) next[i] = decay[i] * prev[i] + step_sd[i] * stream.next();
            }
        }
    });
    return out;
}

}  // namespace aperiod
