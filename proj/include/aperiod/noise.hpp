#pragma once

// Two-sided Brownian increments on a finite grid and the Wiener shift.
//
// An ensemble stores increments dW[path][step][coordinate] for steps
// k = 0 .. n_steps-1, step k spanning [t_k, t_{k+1}]. Path values are
// anchored at the left edge: W(t_start) = 0. Shifts never copy increments;
// they produce views with moved time labels over the same immutable buffer.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace aperiod {

struct TimeGrid {
    double t_start = 0.0;
    double dt = 0.01;
    std::size_t n_steps = 1;

    double time(std::size_t k) const noexcept { return t_start + static_cast<double>(k) * dt; }
    double t_end() const noexcept { return time(n_steps); }
    std::size_t n_nodes() const noexcept { return n_steps + 1; }

    /// Node index of t, or nullopt when t is off-grid or outside [t_start, t_end].
    std::optional<std::size_t> index_of(double t) const noexcept;

    bool operator==(const TimeGrid&) const = default;
};

/// Number of grid steps in tau; throws InputError when tau is not an integer multiple of dt.
std::int64_t steps_of(double tau, double dt);

/// Node index of t on the grid; throws InputError when off-grid or out of range.
std::size_t node_index(const TimeGrid& grid, double t);

/// Identity of an increment array; views that relabel time keep it.
struct NoiseId {
    std::uint64_t value = 0;
    bool operator==(const NoiseId&) const = default;
};

class NoiseEnsemble {
public:
    NoiseEnsemble() = default;

    const TimeGrid& grid() const noexcept { return grid_; }
    std::size_t n_paths() const noexcept { return n_paths_; }
    std::size_t dim() const noexcept { return dim_; }
    std::uint64_t seed() const noexcept { return seed_; }
    const std::vector<double>& q_eigenvalues() const noexcept { return q_; }
    NoiseId id() const noexcept { return id_; }

    /// Increment vector of step k for path p (length dim()).
    std::span<const double> increment(std::size_t path, std::size_t step) const noexcept {
        return {buffer_->data() + (path * stride_ + offset_ + step) * dim_, dim_};
    }

    /// Builds an ensemble from explicit increments laid out [path][step][coordinate].
    static NoiseEnsemble from_increments(TimeGrid grid, std::size_t n_paths, std::size_t dim,
                                         std::vector<double> increments, std::uint64_t seed = 0,
                                         std::vector<double> q = {});

    /// Same increments with every time label moved by shift_steps*dt.
    NoiseEnsemble relabeled(std::int64_t shift_steps) const;
    /// Sub-window of steps [first, first+count) with grid labels preserved.
    NoiseEnsemble window(std::size_t first, std::size_t count) const;

private:
    TimeGrid grid_;
    std::size_t n_paths_ = 0;
    std::size_t dim_ = 0;
    std::uint64_t seed_ = 0;
    std::vector<double> q_;
    NoiseId id_;
    std::shared_ptr<const std::vector<double>> buffer_;
    std::size_t stride_ = 0;  // steps per path in buffer_
    std::size_t offset_ = 0;  // first step of this view
    // Labels are origin_ + label_steps_ * dt so that composed shifts give bit-identical grids.
    double origin_ = 0.0;
    std::int64_t label_steps_ = 0;
};

/// dW_i ~ N(0, q_i dt), independent over (path, step, coordinate). Path p
/// draws from the Philox stream keyed by (seed, p).
NoiseEnsemble sample_ensemble(const TimeGrid& grid, std::span<const double> q_eigenvalues, std::size_t n_paths,
                              std::uint64_t seed, unsigned threads = 1);

/// theta_tau: the output increment at label t is the input increment at t + tau.
/// Labels stay put; the window shrinks by |tau|.
NoiseEnsemble wiener_shift(const NoiseEnsemble& ensemble, double tau);

/// Increments driving the tau-translated solution, i.e. those of theta_{-tau}:
/// the array is untouched and every label moves forward by tau.
NoiseEnsemble coupled_increments(const NoiseEnsemble& ensemble, double tau);

/// W(t) - W(t_start) for one path.
std::vector<double> path_value(const NoiseEnsemble& ensemble, std::size_t path, double t);

/// Sums groups of `factor` consecutive increments (dt -> factor*dt); trailing steps are dropped.
NoiseEnsemble coarsen(const NoiseEnsemble& ensemble, std::size_t factor);

/// Prefix of the ensemble ending at node `t_end`.
NoiseEnsemble truncate(const NoiseEnsemble& ensemble, double t_end);

}  // namespace aperiod
