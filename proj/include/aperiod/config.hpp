#pragma once

// Run configuration: flat INI sections of key = value decimal text.
// Lists are comma separated; drift modes are "a_1,..,a_d | freq | phase"
// entries separated by ';', diffusion modes "alpha | freq | phase".

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "aperiod/mild_solver.hpp"
#include "aperiod/model.hpp"

namespace aperiod {

struct GridConfig {
    double dt = 0.01;
    std::optional<double> burn_in;  // default: default_burn_in(hypotheses, tol)
    double eval_start = 0.0;
    double eval_end = 10.0;
    std::optional<double> eval_step;  // default: dt
};

struct EnsembleConfig {
    std::size_t n_paths = 256;
    std::uint64_t seed = 1;
};

struct ScanConfig {
    double tau_start = 0.0;
    double tau_end = 10.0;
    std::optional<double> tau_step;  // default: dt
    std::vector<double> epsilons;    // empty: 2 x error budget
    double l_max = 10.0;
    double p = 2.0;
};

struct DistributionConfig {
    std::vector<double> tuple_offsets{0.0, 0.5, 1.0};
    std::optional<double> appd_start;  // default: eval window
    std::optional<double> appd_end;
    double modulus_window = 1.0;
    std::vector<double> deltas{0.1, 0.05, 0.02};
    double tightness_eps = 0.05;
    double ui_p = 2.0;
    std::vector<double> ui_thresholds{1.0, 2.0, 4.0};
    std::size_t n_exact = 256;
};

struct UrsellConfig {
    std::size_t n_max = 5;
    std::vector<double> eps;  // empty: eps_n = 2^-n
    std::optional<double> dt;  // default: eps_{n_max} / 4
    double t_start = 0.0;
    std::optional<double> t_end;  // default: last probe window
    std::size_t n_paths = 256;
    std::size_t csv_paths = 8;
    double delta = 0.1;
    std::size_t n_omega = 1000;
    std::optional<double> tau;  // default: common near-period
    double coupled_max = 0.1;
    double not_appd_min = 0.9;
};

struct OutputConfig {
    std::string dir;
    std::string verbosity = "normal";  // normal | full
};

struct RunConfig {
    std::optional<ModelSpec> model;
    GridConfig grid;
    EnsembleConfig ensemble;
    SolverOptions solver;
    ScanConfig scan;
    DistributionConfig distribution;
    UrsellConfig ursell;
    OutputConfig output;

    /// Cross-field checks: eval window after burn-in, tau steps on the grid.
    void validate() const;
};

/// Throws InputError naming the section, key and line of the first problem.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

}  // namespace aperiod
