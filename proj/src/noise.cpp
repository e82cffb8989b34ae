#include "aperiod/noise.hpp"

#include <bit>
#include <cmath>
#include <string>

#include "aperiod/error.hpp"
#include "aperiod/parallel.hpp"
#include "aperiod/rng.hpp"

namespace aperiod {

namespace {

constexpr double kGridTolerance = 1e-6;  // fraction of a step

std::uint64_t mix(std::uint64_t h, std::uint64_t v) noexcept {
    // splitmix64 finalizer over a running combination
    std::uint64_t z = h ^ (v + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2));
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace

std::optional<std::size_t> TimeGrid::index_of(double t) const noexcept {
    const double r = (t - t_start) / dt;
    const double k = std::nearbyint(r);
    if (!std::isfinite(r) || std::fabs(r - k) > kGridTolerance) {
        return std::nullopt;
    }
    if (k < 0.0 || k > static_cast<double>(n_steps)) return std::nullopt;
    return static_cast<std::size_t>(k);
}

std::int64_t steps_of(double tau, double dt) {
    const double r = tau / dt;
    const double k = std::nearbyint(r);
    if (!std::isfinite(r) || std::fabs(r - k) > kGridTolerance) {
        throw InputError("shift " + std::to_string(tau) + " is not an integer multiple of dt");
    }
    return static_cast<std::int64_t>(k);
}

std::size_t node_index(const TimeGrid& grid, double t) {
    if (auto k = grid.index_of(t)) return *k;
    throw InputError("time " + std::to_string(t) + " is not a node of the grid [" + std::to_string(grid.t_start) +
                     ", " + std::to_string(grid.t_end()) + "]");
}

NoiseEnsemble NoiseEnsemble::from_increments(TimeGrid grid, std::size_t n_paths, std::size_t dim,
                                             std::vector<double> increments, std::uint64_t seed,
                                             std::vector<double> q) {
    if (n_paths == 0 || grid.n_steps == 0 || dim == 0) throw InputError("noise: empty ensemble");
    if (!(grid.dt > 0.0)) throw InputError("noise: dt must be positive");
    if (increments.size() != n_paths * grid.n_steps * dim) throw InputError("noise: increment array size mismatch");
    NoiseEnsemble e;
    e.grid_ = grid;
    e.n_paths_ = n_paths;
    e.dim_ = dim;
    e.seed_ = seed;
    e.q_ = q.empty() ? std::vector<double>(dim, 0.0) : std::move(q);
    std::uint64_t h = mix(seed, n_paths);
    h = mix(h, grid.n_steps);
    h = mix(h, dim);
    h = mix(h, std::bit_cast<std::uint64_t>(grid.dt));
    for (double v : increments) h = mix(h, std::bit_cast<std::uint64_t>(v));
    e.id_ = NoiseId{h};
    e.stride_ = grid.n_steps;
    e.offset_ = 0;
    e.origin_ = grid.t_start;
    e.label_steps_ = 0;
    e.buffer_ = std::make_shared<const std::vector<double>>(std::move(increments));
    return e;
}

NoiseEnsemble NoiseEnsemble::relabeled(std::int64_t shift_steps) const {
    NoiseEnsemble e = *this;
    e.label_steps_ = label_steps_ + shift_steps;
    e.grid_.t_start = e.label_steps_ == 0 ? origin_ : origin_ + static_cast<double>(e.label_steps_) * grid_.dt;
    return e;
}

NoiseEnsemble NoiseEnsemble::window(std::size_t first, std::size_t count) const {
    if (count == 0 || first + count > grid_.n_steps) throw InputError("noise: window exceeds the stored grid");
    NoiseEnsemble e = *this;
    e.label_steps_ = label_steps_ + static_cast<std::int64_t>(first);
    e.grid_.t_start = e.label_steps_ == 0 ? origin_ : origin_ + static_cast<double>(e.label_steps_) * grid_.dt;
    e.grid_.n_steps = count;
    e.offset_ = offset_ + first;
    e.id_ = NoiseId{mix(mix(id_.value, first), count)};
    return e;
}

NoiseEnsemble sample_ensemble(const TimeGrid& grid, std::span<const double> q_eigenvalues, std::size_t n_paths,
                              std::uint64_t seed, unsigned threads) {
    if (n_paths == 0) throw InputError("sample_ensemble: n_paths must be positive");
    if (grid.n_steps == 0) throw InputError("sample_ensemble: n_steps must be positive");
    if (!(grid.dt > 0.0)) throw InputError("sample_ensemble: dt must be positive");
    if (q_eigenvalues.empty()) throw InputError("sample_ensemble: q must be nonempty");
    const std::size_t dim = q_eigenvalues.size();
    std::vector<double> scale(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        if (!(q_eigenvalues[i] >= 0.0)) throw InputError("sample_ensemble: q entries must be nonnegative");
        scale[i] = std::sqrt(q_eigenvalues[i] * grid.dt);
    }
    const std::size_t per_path = grid.n_steps * dim;
    std::vector<double> increments(n_paths * per_path);
    parallel_for(n_paths, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t p = begin; p < end; ++p) {
            rng::NormalStream stream(seed, p);
            double* out = increments.data() + p * per_path;
            for (std::size_t k = 0; k < per_path; ++k) {
                const double z = stream.next();
                const double s = scale[k % dim];
                out[k] = s == 0.0 ? 0.0 : s * z;
            }
        }
    });
    NoiseEnsemble e = NoiseEnsemble::from_increments(grid, n_paths, dim, std::move(increments), seed,
                                                     std::vector<double>(q_eigenvalues.begin(), q_eigenvalues.end()));
    return e;
}

NoiseEnsemble wiener_shift(const NoiseEnsemble& ensemble, double tau) {
    const std::int64_t k = steps_of(tau, ensemble.grid().dt);
    if (k == 0) return ensemble;
    const std::size_t shift = static_cast<std::size_t>(k > 0 ? k : -k);
    if (shift >= ensemble.grid().n_steps) {
        throw InputError("wiener_shift: shift of " + std::to_string(tau) + " leaves no steps inside the stored grid");
    }
    const std::size_t count = ensemble.grid().n_steps - shift;
    if (k > 0) {
        // labels t_start..: read increments from t + tau
        return ensemble.window(shift, count).relabeled(-k);
    }
    // labels start |tau| later; increment at t comes from t - |tau|
    return ensemble.window(0, count).relabeled(static_cast<std::int64_t>(shift));
}

NoiseEnsemble coupled_increments(const NoiseEnsemble& ensemble, double tau) {
    const std::int64_t k = steps_of(tau, ensemble.grid().dt);
    if (k == 0) return ensemble;
    return ensemble.relabeled(k);
}

std::vector<double> path_value(const NoiseEnsemble& ensemble, std::size_t path, double t) {
    if (path >= ensemble.n_paths()) throw InputError("path_value: path index out of range");
    const std::size_t k = node_index(ensemble.grid(), t);
    std::vector<double> w(ensemble.dim(), 0.0);
    for (std::size_t j = 0; j < k; ++j) {
        const auto dw = ensemble.increment(path, j);
        for (std::size_t i = 0; i < w.size(); ++i) w[i] += dw[i];
    }
    return w;
}

NoiseEnsemble coarsen(const NoiseEnsemble& ensemble, std::size_t factor) {
    if (factor == 0) throw InputError("coarsen: factor must be positive");
    const TimeGrid& fine = ensemble.grid();
    const std::size_t steps = fine.n_steps / factor;
    if (steps == 0) throw InputError("coarsen: grid shorter than one coarse step");
    const std::size_t dim = ensemble.dim();
    std::vector<double> increments(ensemble.n_paths() * steps * dim, 0.0);
    for (std::size_t p = 0; p < ensemble.n_paths(); ++p) {
        for (std::size_t k = 0; k < steps; ++k) {
            double* out = increments.data() + (p * steps + k) * dim;
            for (std::size_t j = 0; j < factor; ++j) {
                const auto dw = ensemble.increment(p, k * factor + j);
                for (std::size_t i = 0; i < dim; ++i) out[i] += dw[i];
            }
        }
    }
    TimeGrid coarse{fine.t_start, fine.dt * static_cast<double>(factor), steps};
    return NoiseEnsemble::from_increments(coarse, ensemble.n_paths(), dim, std::move(increments), ensemble.seed(),
                                          ensemble.q_eigenvalues());
}

NoiseEnsemble truncate(const NoiseEnsemble& ensemble, double t_end) {
    const std::size_t k = node_index(ensemble.grid(), t_end);
    if (k == 0) throw InputError("truncate: window would be empty");
    if (k == ensemble.grid().n_steps) return ensemble;
    return ensemble.window(0, k);
}

}  // namespace aperiod
