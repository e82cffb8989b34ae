#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "aperiod/error.hpp"
#include "aperiod/format.hpp"
#include "aperiod/noise.hpp"
#include "support.hpp"

namespace aperiod {
namespace {

std::vector<double> all_increments(const NoiseEnsemble& e) {
    std::vector<double> out;
    for (std::size_t p = 0; p < e.n_paths(); ++p) {
        for (std::size_t k = 0; k < e.grid().n_steps; ++k) {
            const auto dw = e.increment(p, k);
            out.insert(out.end(), dw.begin(), dw.end());
        }
    }
    return out;
}

// Increment of `e` at the step starting at label t, coordinate 0.
double increment_at(const NoiseEnsemble& e, std::size_t path, double t) {
    return e.increment(path, node_index(e.grid(), t))[0];
}

TEST(TimeGrid, NodesAndAlignment) {
    const TimeGrid g{-1.0, 0.25, 8};
    EXPECT_EQ(g.t_end(), 1.0);
    EXPECT_EQ(g.n_nodes(), 9u);
    EXPECT_EQ(g.index_of(0.0), std::optional<std::size_t>(4));
    EXPECT_FALSE(g.index_of(0.1));
    EXPECT_FALSE(g.index_of(1.25));
    EXPECT_EQ(steps_of(-0.75, 0.25), -3);
    EXPECT_THROW(steps_of(0.3, 0.25), InputError);
    EXPECT_THROW(node_index(g, 2.0), InputError);
    EXPECT_EQ(steps_of(0.3, 0.1), 3);  // tolerant of representation error
}

TEST(SampleEnsemble, ZeroCovarianceGivesExactZeros) {
    const std::vector<double> q{0.0, 2.0};
    const NoiseEnsemble e = sample_ensemble({0.0, 0.1, 50}, q, 4, 99);
    for (std::size_t p = 0; p < 4; ++p) {
        for (std::size_t k = 0; k < 50; ++k) EXPECT_EQ(e.increment(p, k)[0], 0.0);
    }
}

TEST(SampleEnsemble, DeterministicAndThreadInvariant) {
    const std::vector<double> q{1.0, 0.5};
    const TimeGrid g{-2.0, 0.01, 300};
    const NoiseEnsemble a = sample_ensemble(g, q, 17, 1234, 1);
    const NoiseEnsemble b = sample_ensemble(g, q, 17, 1234, 1);
    const NoiseEnsemble c = sample_ensemble(g, q, 17, 1234, 8);
    EXPECT_EQ(all_increments(a), all_increments(b));
    EXPECT_EQ(all_increments(a), all_increments(c));
    EXPECT_EQ(a.id(), c.id());
    const NoiseEnsemble d = sample_ensemble(g, q, 17, 1235, 1);
    EXPECT_NE(all_increments(a), all_increments(d));
}

TEST(SampleEnsemble, PathsDoNotDependOnEnsembleSize) {
    const std::vector<double> q{1.0};
    const TimeGrid g{0.0, 0.1, 20};
    const NoiseEnsemble small = sample_ensemble(g, q, 3, 5);
    const NoiseEnsemble large = sample_ensemble(g, q, 10, 5);
    for (std::size_t p = 0; p < 3; ++p) {
        for (std::size_t k = 0; k < 20; ++k) EXPECT_EQ(small.increment(p, k)[0], large.increment(p, k)[0]);
    }
}

TEST(SampleEnsemble, VarianceMatchesCovariance) {
    const std::vector<double> q{1.0};
    const NoiseEnsemble e = sample_ensemble({0.0, 0.01, 1000}, q, 10000, 2024);
    double sum = 0.0, sum_sq = 0.0;
    const std::vector<double> all = all_increments(e);
    for (double v : all) {
        sum += v;
        sum_sq += v * v;
    }
    const double n = static_cast<double>(all.size());
    const double var = sum_sq / n - (sum / n) * (sum / n);
    EXPECT_GE(var, 0.0097);
    EXPECT_LE(var, 0.0103);
}

TEST(SampleEnsemble, RejectsEmpty) {
    const std::vector<double> q{1.0};
    EXPECT_THROW(sample_ensemble({0.0, 0.1, 10}, q, 0, 1), InputError);
    EXPECT_THROW(sample_ensemble({0.0, 0.1, 0}, q, 3, 1), InputError);
}

TEST(WienerShift, ZeroIsIdentity) {
    const std::vector<double> q{1.0};
    const NoiseEnsemble e = sample_ensemble({0.0, 0.1, 30}, q, 3, 8);
    const NoiseEnsemble s = wiener_shift(e, 0.0);
    EXPECT_EQ(s.grid(), e.grid());
    EXPECT_EQ(all_increments(s), all_increments(e));
}

TEST(WienerShift, HandExample) {
    // W = (0, 1, 3) on nodes (0, dt, 2dt).
    const double dt = 0.5;
    const NoiseEnsemble e = NoiseEnsemble::from_increments({0.0, dt, 2}, 1, 1, {1.0, 2.0});
    const NoiseEnsemble s = wiener_shift(e, dt);
    ASSERT_EQ(s.grid().n_steps, 1u);
    EXPECT_EQ(s.grid().t_start, 0.0);
    EXPECT_EQ(path_value(s, 0, 0.0)[0], 0.0);
    EXPECT_EQ(path_value(s, 0, dt)[0], 2.0);
}

TEST(WienerShift, IncrementAtLabelComesFromShiftedTime) {
    const std::vector<double> q{1.0};
    const double dt = 0.1;
    const NoiseEnsemble e = sample_ensemble({-3.0, dt, 60}, q, 2, 3);
    for (int shift : {4, -7}) {
        const double tau = shift * dt;
        const NoiseEnsemble s = wiener_shift(e, tau);
        for (std::size_t k = 0; k < s.grid().n_steps; ++k) {
            const double t = s.grid().time(k);
            EXPECT_EQ(s.increment(1, k)[0], increment_at(e, 1, t + tau));
        }
    }
}

TEST(WienerShift, GroupLawBitExact) {
    const std::vector<double> q{1.0, 0.3};
    const double dt = 0.05;
    std::mt19937_64 gen(77);
    std::uniform_int_distribution<int> steps(-20, 20);
    for (int trial = 0; trial < 100; ++trial) {
        const NoiseEnsemble e = sample_ensemble({-5.0, dt, 200}, q, 3, 1000 + trial);
        const int a = steps(gen), b = steps(gen);
        const NoiseEnsemble twice = wiener_shift(wiener_shift(e, a * dt), b * dt);
        const NoiseEnsemble once = wiener_shift(e, (a + b) * dt);
        const double lo = std::max(twice.grid().t_start, once.grid().t_start);
        const double hi = std::min(twice.grid().t_end(), once.grid().t_end());
        ASSERT_LT(lo, hi);
        for (std::int64_t k = 0; lo + k * dt < hi - dt / 2; ++k) {
            const double t = lo + k * dt;
            for (std::size_t p = 0; p < 3; ++p) {
                const auto x = twice.increment(p, node_index(twice.grid(), t));
                const auto y = once.increment(p, node_index(once.grid(), t));
                ASSERT_EQ(x[0], y[0]);
                ASSERT_EQ(x[1], y[1]);
            }
        }
    }
}

TEST(WienerShift, ForwardThenBackRestoresSurvivingWindow) {
    const std::vector<double> q{1.0};
    const double dt = 0.1;
    const NoiseEnsemble e = sample_ensemble({0.0, dt, 40}, q, 2, 4);
    const NoiseEnsemble back = wiener_shift(wiener_shift(e, dt), -dt);
    for (std::size_t k = 0; k < back.grid().n_steps; ++k) {
        const double t = back.grid().time(k);
        EXPECT_EQ(back.increment(0, k)[0], increment_at(e, 0, t));
    }
}

TEST(WienerShift, IsAPermutationOfIncrements) {
    const std::vector<double> q{1.0};
    const NoiseEnsemble e = sample_ensemble({0.0, 0.1, 30}, q, 2, 5);
    const NoiseEnsemble s = wiener_shift(e, 0.5);
    std::vector<double> shifted = all_increments(s);
    std::vector<double> original;
    for (std::size_t p = 0; p < 2; ++p) {
        for (std::size_t k = 5; k < 30; ++k) original.push_back(e.increment(p, k)[0]);
    }
    EXPECT_EQ(shifted, original);
}

TEST(WienerShift, RejectsOffGridAndOverflow) {
    const std::vector<double> q{1.0};
    const NoiseEnsemble e = sample_ensemble({0.0, 0.1, 10}, q, 1, 5);
    EXPECT_THROW(wiener_shift(e, 0.15), InputError);
    EXPECT_THROW(wiener_shift(e, 1.0), InputError);
    EXPECT_THROW(coupled_increments(e, 0.15), InputError);
}

TEST(CoupledIncrements, OnlyLabelsMove) {
    const std::vector<double> q{1.0, 2.0};
    const double dt = 0.02;
    const NoiseEnsemble e = sample_ensemble({-1.0, dt, 100}, q, 3, 6);
    EXPECT_EQ(coupled_increments(e, 0.0).grid(), e.grid());
    for (int shift : {1, 17, -40}) {
        const NoiseEnsemble c = coupled_increments(e, shift * dt);
        EXPECT_EQ(all_increments(c), all_increments(e));
        EXPECT_EQ(c.id(), e.id());
        EXPECT_NEAR(c.grid().t_start, e.grid().t_start + shift * dt, 1e-12);
    }
}

TEST(CoupledIncrements, IncrementIdentityOnPathValues) {
    // W(t + tau, theta_{-tau} w) = W(t, w) - W(-tau, w): with coupled labels the
    // path at label t + tau equals the original path at t, both anchored at the
    // respective window starts.
    const std::vector<double> q{1.0};
    const double dt = 0.1;
    std::mt19937_64 gen(9);
    std::uniform_int_distribution<int> steps(-30, 30);
    for (int trial = 0; trial < 100; ++trial) {
        const NoiseEnsemble e = sample_ensemble({-5.0, dt, 100}, q, 1, 500 + trial);
        const int shift = steps(gen);
        const double tau = shift * dt;
        const NoiseEnsemble c = coupled_increments(e, tau);
        for (std::size_t k = 0; k <= 100; k += 7) {
            const double t = e.grid().time(k);
            const double lhs = path_value(c, 0, c.grid().time(k))[0];
            const double rhs = path_value(e, 0, t)[0];
            EXPECT_EQ(lhs, rhs);
        }
        // Against the raw shift relation W(s) - W(r) computed by direct summation.
        const NoiseEnsemble theta = wiener_shift(c, -tau);
        for (std::size_t k = 0; k < theta.grid().n_steps; ++k) {
            const double label = theta.grid().time(k);
            EXPECT_EQ(theta.increment(0, k)[0], increment_at(c, 0, label - tau));
        }
    }
}

TEST(PathValue, AnchoringAndPrefixSums) {
    const NoiseEnsemble one = NoiseEnsemble::from_increments({0.0, 0.1, 1}, 1, 1, {0.3});
    EXPECT_EQ(path_value(one, 0, 0.0)[0], 0.0);
    EXPECT_EQ(path_value(one, 0, 0.1)[0], 0.3);

    const std::vector<double> q{1.0};
    const NoiseEnsemble e = sample_ensemble({2.0, 0.05, 400}, q, 2, 12);
    for (std::size_t j = 0; j < 400; j += 37) {
        for (std::size_t k = j; k <= 400; k += 53) {
            double partial = 0.0;
            for (std::size_t i = j; i < k; ++i) partial += e.increment(1, i)[0];
            const double diff = path_value(e, 1, e.grid().time(k))[0] - path_value(e, 1, e.grid().time(j))[0];
            EXPECT_NEAR(diff, partial, 1e-12);
        }
    }
    EXPECT_THROW(path_value(e, 0, 2.01), InputError);
}

TEST(Coarsen, SumsConsecutiveIncrements) {
    const NoiseEnsemble e = NoiseEnsemble::from_increments({0.0, 0.5, 5}, 1, 1, {1, 2, 3, 4, 5});
    const NoiseEnsemble c = coarsen(e, 2);
    EXPECT_EQ(c.grid().dt, 1.0);
    ASSERT_EQ(c.grid().n_steps, 2u);
    EXPECT_EQ(c.increment(0, 0)[0], 3.0);
    EXPECT_EQ(c.increment(0, 1)[0], 7.0);
}

TEST(Truncate, KeepsPrefix) {
    const std::vector<double> q{1.0};
    const NoiseEnsemble e = sample_ensemble({0.0, 0.1, 50}, q, 2, 3);
    const NoiseEnsemble t = truncate(e, 2.0);
    EXPECT_EQ(t.grid().n_steps, 20u);
    EXPECT_EQ(t.increment(1, 19)[0], e.increment(1, 19)[0]);
    EXPECT_THROW(truncate(e, 2.05), InputError);
}

TEST(NoiseCsv, SeventeenDigitsAndHeader) {
    const NoiseEnsemble e = NoiseEnsemble::from_increments({0.0, 0.1, 1}, 1, 2, {0.1, -0.0});
    std::ostringstream out;
    write_noise_csv(out, e);
    EXPECT_EQ(out.str(), "path,t,dW_1,dW_2\n0,0,0.10000000000000001,0\n");
}

}  // namespace
}  // namespace aperiod

namespace aperiod {
namespace {

TEST(CoupledIncrements, ComposedRelabelsGiveIdenticalGrids) {
    const std::vector<double> q{1.0};
    const NoiseEnsemble e = sample_ensemble({-3.7, 0.01, 500}, q, 2, 8);
    for (int a : {-37, 3, 120}) {
        for (int b : {-11, 0, 59}) {
            const NoiseEnsemble twice = coupled_increments(coupled_increments(e, a * 0.01), b * 0.01);
            EXPECT_EQ(twice.grid(), coupled_increments(e, (a + b) * 0.01).grid());
            EXPECT_EQ(twice.id(), e.id());
        }
    }
    EXPECT_EQ(coupled_increments(coupled_increments(e, 0.25), -0.25).grid(), e.grid());
}

}  // namespace
}  // namespace aperiod
