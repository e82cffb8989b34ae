#include <gtest/gtest.h>

#include <cmath>

#include "aperiod/ap_analysis.hpp"
#include "aperiod/counterexamples.hpp"
#include "aperiod/error.hpp"

namespace aperiod {
namespace {

TEST(Ursell, SpikeHeightAndSupport) {
    const UrsellSpec spec = UrsellSpec::geometric(3);
    EXPECT_DOUBLE_EQ(ursell_f(1.0, spec), 2.0);     // x_{1,0}
    EXPECT_DOUBLE_EQ(ursell_f(2.0, spec), 4.0);     // x_{2,0}
    EXPECT_DOUBLE_EQ(ursell_f(3.0, spec), 2.0 + 8.0);  // x_{1,1} = x_{3,0}
    EXPECT_DOUBLE_EQ(ursell_f(1.25, spec), 1.0);    // halfway down the n = 1 spike
    EXPECT_EQ(ursell_f(0.0, spec), 0.0);
    EXPECT_EQ(ursell_f(1.6, spec), 0.0);
    EXPECT_DOUBLE_EQ(ursell_f(-1.0, spec), 2.0);  // x_{1,-1}
    EXPECT_EQ(ursell_f(12.5, spec), 0.0);
}

TEST(Ursell, UnitAreaPerSpike) {
    const UrsellSpec spec = UrsellSpec::geometric(4);
    // [6.5, 7.5] holds only the n = 1 spike at 7 (lattices 2k+1 and 3(2k+1) miss 7).
    const int n = 200000;
    double area = 0.0;
    for (int i = 0; i < n; ++i) area += ursell_f(6.5 + (i + 0.5) / n, spec);
    EXPECT_NEAR(area / n, 1.0, 1e-6);
    // x_{4,0} = 4: only the n = 4 spike, eps = 1/16.
    area = 0.0;
    for (int i = 0; i < n; ++i) area += ursell_f(3.9 + 0.2 * (i + 0.5) / n, spec);
    EXPECT_NEAR(0.2 * area / n, 1.0, 1e-6);
}

TEST(Ursell, EmptySpecIsZero) {
    const UrsellSpec spec = UrsellSpec::geometric(0);
    for (double t : {0.0, 1.0, 3.0, 77.0}) EXPECT_EQ(ursell_f(t, spec), 0.0);
    EXPECT_EQ(common_near_period(spec), 1.0);  // empty lcm: f = 0 repeats with any period
}

TEST(Ursell, Validation) {
    UrsellSpec bad{{0.5, 1.5}, 2};
    EXPECT_THROW(bad.validate(0.0, 10.0), InputError);
    // Half-widths 0.9 and 0.8 around 1 and 2 overlap partially.
    UrsellSpec overlapping{{0.9, 0.8}, 2};
    EXPECT_THROW(overlapping.validate(0.0, 10.0), InputError);
    EXPECT_NO_THROW(UrsellSpec::geometric(6).validate(0.0, 500.0));
    const UrsellSpec spec = UrsellSpec::geometric(5);
    EXPECT_THROW(spec.validate_grid({0.0, 0.01, 100}), InputError);
    EXPECT_NO_THROW(spec.validate_grid({0.0, 1.0 / 128.0, 100}));
    EXPECT_THROW(ursell_ensemble(spec, {0.0, 0.01, 100}, 4, 1), InputError);
}

TEST(Ursell, StratifiedOmegas) {
    const std::vector<double> w = stratified_omegas(100, 3);
    ASSERT_EQ(w.size(), 100u);
    for (std::size_t p = 0; p < w.size(); ++p) {
        EXPECT_GE(w[p], static_cast<double>(p) / 100.0);
        EXPECT_LT(w[p], static_cast<double>(p + 1) / 100.0);
    }
    EXPECT_EQ(w, stratified_omegas(100, 3));
    EXPECT_NE(w, stratified_omegas(100, 4));
}

TEST(Ursell, EnsembleIsShiftedF) {
    const UrsellSpec spec = UrsellSpec::geometric(3);
    const TimeGrid grid{0.0, 1.0 / 32.0, 320};
    const std::vector<double> omegas{0.0, 0.25, 0.5};
    const PathEnsemble x = ursell_ensemble(spec, grid, omegas);
    for (std::size_t p = 0; p < omegas.size(); ++p) {
        for (std::size_t k = 0; k <= grid.n_steps; k += 7) {
            EXPECT_EQ(x.state(p, k)[0], ursell_f(grid.time(k) + omegas[p], spec));
        }
    }
    // omega = 0 on every path reproduces f itself.
    const std::vector<double> zeros(4, 0.0);
    const PathEnsemble y = ursell_ensemble(spec, grid, zeros);
    EXPECT_EQ(y.state(3, 32)[0], ursell_f(1.0, spec));
    EXPECT_EQ(ursell_ensemble(spec, grid, 16, 9, 1).values, ursell_ensemble(spec, grid, 16, 9, 4).values);
}

TEST(Ursell, MarginalMeanMatchesQuadrature) {
    // E f(t + omega) = int_t^{t+1} f, the area of the spikes inside [t, t+1].
    const UrsellSpec spec = UrsellSpec::geometric(3);
    const TimeGrid grid{0.0, 1.0 / 32.0, 32 * 20};
    const PathEnsemble x = ursell_ensemble(spec, grid, 4000, 2);
    for (double t : {0.5, 2.5, 6.5}) {
        const std::size_t node = node_index(grid, t);
        double mean = 0.0;
        for (std::size_t p = 0; p < x.n_paths; ++p) mean += x.state(p, node)[0];
        mean /= static_cast<double>(x.n_paths);
        const int m = 100000;
        double quad = 0.0;
        for (int i = 0; i < m; ++i) quad += ursell_f(t + (i + 0.5) / m, spec);
        quad /= m;
        EXPECT_NEAR(mean, quad, 0.05 * quad + 1e-3);
    }
}

TEST(Ursell, CoupledDistanceVanishesAtNearPeriod) {
    const UrsellSpec spec = UrsellSpec::geometric(5);
    EXPECT_EQ(common_near_period(spec), 120.0);
    const double dt = spec.eps[4] / 4.0;
    const TimeGrid grid{0.0, dt, static_cast<std::size_t>(40.0 / dt)};
    const std::vector<double> omegas = stratified_omegas(200, 1);
    EXPECT_LE(ursell_coupled_distance(spec, grid, 120.0, omegas), 1e-9);
    EXPECT_GT(ursell_coupled_distance(spec, grid, 1.0, omegas), 0.1);
}

TEST(Ursell, StepanovDistanceAtNearPeriod) {
    const UrsellSpec spec = UrsellSpec::geometric(5);
    for (double t : {0.0, 3.5, 17.0}) EXPECT_LE(stepanov_distance(spec, t, 120.0), 1e-9);
    EXPECT_GT(stepanov_distance(spec, 0.0, 1.0), 0.5);
}

TEST(Ursell, NotAppdWitness) {
    const UrsellSpec spec = UrsellSpec::geometric(5);
    const double dt = spec.eps[4] / 4.0;
    const TimeGrid grid{0.0, dt, static_cast<std::size_t>(60.0 / dt)};
    const double at_delta = verify_not_appd(spec, grid, 0.1);
    EXPECT_GE(at_delta, 0.9);
    double prev = 0.0;
    for (double delta : {dt, 0.02, 0.05, 0.1, 0.3}) {
        const double v = verify_not_appd(spec, grid, delta, 200);
        EXPECT_GE(v, prev);
        prev = v;
    }
    EXPECT_EQ(verify_not_appd(UrsellSpec::geometric(0), grid, 0.1), 0.0);
    EXPECT_THROW(verify_not_appd(spec, {0.0, dt, 1000}, 0.1), InputError);
    EXPECT_THROW(verify_not_appd(spec, {0.0, 0.05, 1200}, 0.1), InputError);
}

TEST(Ursell, PathLawSeparatesWhereCouplingDoesNot) {
    // Truncated at n_max the process is exactly periodic with lcm(2, ..., 2 n_max);
    // with n_max = 7 the shift 120 keeps n <= 6 aligned but moves the n = 7 spikes.
    const UrsellSpec spec = UrsellSpec::geometric(7);
    const double dt = spec.eps[6] / 4.0;
    const std::size_t steps = static_cast<std::size_t>(2.0 / dt);
    const TimeGrid window{104.0, dt, steps};
    const TimeGrid shifted{224.0, dt, steps};
    const std::vector<double> omegas = stratified_omegas(256, 5);
    const double coupled = ursell_coupled_distance(spec, window, 120.0, omegas);
    EXPECT_LE(coupled, 0.1);
    TransportOptions options;
    options.n_exact = 256;
    const double path = wass_window(ursell_ensemble(spec, window, omegas), ursell_ensemble(spec, shifted, omegas), 0, 0,
                                    steps + 1, options);
    EXPECT_GE(path, 0.5);
}

TEST(OrnsteinUhlenbeck, ZeroNoiseStaysAtZero) {
    const std::vector<double> lambda{1.0, 3.0}, q{1.0, 1.0};
    const PathEnsemble x = ou_reference(lambda, 0.0, q, {0.0, 0.1, 50}, 4, 1);
    for (double v : x.values) EXPECT_EQ(v, 0.0);
}

TEST(OrnsteinUhlenbeck, StationaryMoments) {
    const std::vector<double> lambda{2.0}, q{0.5};
    const double sigma = 1.5;
    const PathEnsemble x = ou_reference(lambda, sigma, q, {0.0, 0.25, 8}, 20000, 6, 2);
    const double var = sigma * sigma * q[0] / (2.0 * lambda[0]);
    for (std::size_t lag : {0u, 1u, 4u}) {
        double acc = 0.0;
        for (std::size_t p = 0; p < x.n_paths; ++p) acc += x.state(p, 2)[0] * x.state(p, 2 + lag)[0];
        acc /= static_cast<double>(x.n_paths);
        const double expected = var * std::exp(-lambda[0] * 0.25 * static_cast<double>(lag));
        EXPECT_NEAR(acc, expected, 0.05 * var);
    }
    EXPECT_THROW(ou_reference(std::vector<double>{-1.0}, 1.0, q, {0.0, 0.1, 5}, 2, 1), InputError);
}

}  // namespace
}  // namespace aperiod
