#pragma once

// Known-answer controls. The Ursell-type process X(t, omega) = f(t + omega)
// on Omega = [0, 1) with theta_t omega = frac(t + omega) is theta-almost
// periodic without being almost periodic in path distribution; the stationary
// Ornstein-Uhlenbeck process passes every detector.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "aperiod/mild_solver.hpp"
#include "aperiod/noise.hpp"

namespace aperiod {

/// f = sum_{n <= n_max} f_n, where f_n has a triangular spike of height
/// 1/eps_n and half-width eps_n at every x_{n,k} = (2k+1) n.
struct UrsellSpec {
    std::vector<double> eps;  // eps[n-1] = eps_n, each in (0, 1]
    std::size_t n_max = 0;

    static UrsellSpec geometric(std::size_t n_max);  // eps_n = 2^-n

    /// Rejects bad eps values and spikes of distinct n that partially overlap
    /// on [t_lo, t_hi]. Spikes sharing a center are allowed: the lattices
    /// (2k+1) n are not disjoint.
    void validate(double t_lo, double t_hi) const;
    /// Grid resolution: dt <= eps_{n_max} / 4.
    void validate_grid(const TimeGrid& grid) const;
};

double ursell_f(double t, const UrsellSpec& spec);

/// Path p is t -> f(t + omega_p) with omega_p = (p + u_p) / n_paths.
PathEnsemble ursell_ensemble(const UrsellSpec& spec, const TimeGrid& grid, std::size_t n_paths, std::uint64_t seed,
                             unsigned threads = 1);
PathEnsemble ursell_ensemble(const UrsellSpec& spec, const TimeGrid& grid, std::span<const double> omegas,
                             unsigned threads = 1);
std::vector<double> stratified_omegas(std::size_t n_paths, std::uint64_t seed);

/// int_0^1 |f(t + tau + omega) - f(t + omega)| d omega, composite midpoint rule.
double stepanov_distance(const UrsellSpec& spec, double t, double tau, std::size_t n_quad = 4096);

/// sup over grid nodes of E min(|X(t + tau, theta_{-tau} omega) - X(t, omega)|, 1).
double ursell_coupled_distance(const UrsellSpec& spec, const TimeGrid& grid, double tau,
                               std::span<const double> omegas);

/// Smallest tau > 0 at which every spike lattice n <= n_max repeats: lcm(2, 4, ..., 2 n_max).
double common_near_period(const UrsellSpec& spec);

/// Lower-bound witness against path-distribution almost periodicity, J = [0, 2].
/// At the probe t_n = n(2n+1) - 1 the time r = 1 - omega puts every path on
/// the peak x_{n,n}; s ranges over r + j dt in J with 0 < |j| dt <= delta.
/// Returns sup_n E max_s min(|X(t_n + r) - X(t_n + s)|, 1), omega midpoint-sampled.
double verify_not_appd(const UrsellSpec& spec, const TimeGrid& grid, double delta, std::size_t n_omega = 1000);

/// Stationary OU, one independent mode per entry of lambda:
/// X(t+dt) = e^{-lambda dt} X(t) + N(0, sigma^2 q (1 - e^{-2 lambda dt}) / (2 lambda)).
PathEnsemble ou_reference(std::span<const double> lambda, double sigma, std::span<const double> q,
                          const TimeGrid& grid, std::size_t n_paths, std::uint64_t seed, unsigned threads = 1);

}  // namespace aperiod
