#pragma once

// Truncated Hilbert-space semilinear SDE
//     dX = (A X + F(t, X)) dt + G(t, X) dW
// with A = -diag(spectrum), noise covariance Q = diag(q_eigenvalues) and a
// closed catalog of coefficients whose Lipschitz and growth constants are
// known in closed form:
//     F(t, x) = b + sum_j a_j cos(w_j t + phi_j) + c * s(x)
//     G(t, x) = diag(sigma_i(t) + gamma * s(x)_i),  i < min(d, m)
//     sigma_i(t) = base_sigma_i * (1 + sum_j alpha_j cos(w_j t + phi_j))
// where s(u) = u / (1 + |u|) componentwise.

#include <cstddef>
#include <span>
#include <vector>

namespace aperiod {

using Vector = std::vector<double>;

struct ForcingMode {
    Vector amplitude;  // length dim_state
    double frequency = 0.0;
    double phase = 0.0;
};

struct DriftSpec {
    Vector base;
    std::vector<ForcingMode> modes;
    double nonlinearity_gain = 0.0;
};

struct ModulationMode {
    double amplitude = 0.0;
    double frequency = 0.0;
    double phase = 0.0;
};

struct DiffusionSpec {
    Vector base_sigma;  // length dim_noise
    std::vector<ModulationMode> modes;
    double state_gain = 0.0;
};

struct ModelSpec {
    std::size_t dim_state = 1;
    std::size_t dim_noise = 1;
    Vector spectrum;       // eigenvalues of -A, all > 0
    Vector q_eigenvalues;  // diagonal of Q, all >= 0
    DriftSpec drift;
    DiffusionSpec diffusion;

    /// Number of coordinates carrying a diffusion entry: min(d, m).
    std::size_t shared_dim() const noexcept { return dim_state < dim_noise ? dim_state : dim_noise; }

    /// True when neither F nor G depends on time.
    bool autonomous() const noexcept;

    /// Throws InputError describing the first violated invariant.
    void validate() const;
};

struct HypothesisReport {
    double delta = 0.0;       // min spectrum
    double lipschitz = 0.0;   // c + gamma * max(1, sqrt(q_max))
    double growth = 0.0;      // K with ||F|| + ||G|| <= K (1 + ||x||)
    double kappa = 0.0;       // 2 l^2 (1 + 1/(2 delta))
    bool contraction_ok = false;
};

/// 2 l^2 (1 + 1/(2 delta)).
double contraction_constant(double lipschitz, double delta) noexcept;

HypothesisReport check_hypotheses(const ModelSpec& model);

/// (S(t) x)_i = exp(-lambda_i t) x_i.
Vector semigroup_apply(std::span<const double> spectrum, double t, std::span<const double> x);

/// s(u) = u / (1 + |u|).
inline double saturate(double u) noexcept { return u / (1.0 + (u < 0 ? -u : u)); }

/// Time-dependent part of the drift, b + sum_j a_j cos(w_j t + phi_j), written into out (length d).
void eval_forcing(const ModelSpec& model, double t, std::span<double> out);

/// Time-dependent diffusion diagonal sigma_i(t), i < shared_dim; zero elsewhere (out has length d).
void eval_sigma(const ModelSpec& model, double t, std::span<double> out);

Vector eval_drift(const ModelSpec& model, double t, std::span<const double> x);

/// Diagonal entries of G(t, x) on the shared leading diagonal (length shared_dim()).
Vector eval_diffusion(const ModelSpec& model, double t, std::span<const double> x);

/// Hilbert-Schmidt norm of a diagonal-rectangular operator given its diagonal.
double hs_norm(std::span<const double> diagonal) noexcept;

double euclidean_norm(std::span<const double> x) noexcept;

}  // namespace aperiod
