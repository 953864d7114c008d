#include "trotbo/analysis.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

using namespace trotbo::analysis;
namespace sim = trotbo::sim;
using std::numbers::pi;

namespace {

std::vector<double> sine(double period, double amplitude, double dt, double seconds, double phase = 0.0) {
    std::vector<double> v;
    const auto n = static_cast<std::size_t>(std::lround(seconds / dt));
    for (std::size_t i = 0; i < n; ++i) v.push_back(amplitude * std::sin(2 * pi * i * dt / period + phase));
    return v;
}

}  // namespace

TEST(VerticalDelta, ConstantSeriesIsZero) {
    const std::vector<double> z(100, 0.32);
    EXPECT_EQ(vertical_delta(z), 0.0);
}

TEST(VerticalDelta, SineAmplitude) {
    const auto z = sine(3.0, 0.02, 0.01, 15.0, 0.1);
    EXPECT_NEAR(vertical_delta(z), 0.04, 1e-4);
}

TEST(VerticalDelta, MatchesExhaustiveScan) {
    std::mt19937_64 rng(6);
    std::normal_distribution<double> g(0.3, 0.01);
    std::vector<double> z(1501);
    for (double& v : z) v = g(rng);
    double lo = z[0];
    double hi = z[0];
    for (double v : z) {
        if (v < lo) lo = v;
        if (v > hi) hi = v;
    }
    EXPECT_EQ(vertical_delta(z), hi - lo);
}

TEST(VerticalDelta, EmptyThrows) {
    EXPECT_THROW((void)vertical_delta(std::vector<double>{}), EmptySeries);
}

TEST(EstimatePeriod, PureSine) {
    const auto p = estimate_period(sine(3.0, 1.0, 0.01, 15.0), 0.01);
    ASSERT_TRUE(p.has_value());
    EXPECT_NEAR(*p, 3.0, 0.05);
}

TEST(EstimatePeriod, NoisySine) {
    std::mt19937_64 rng(12);
    std::normal_distribution<double> noise(0.0, 0.1);
    for (int rep = 0; rep < 20; ++rep) {
        auto s = sine(3.0, 1.0, 0.01, 15.0, 0.3 * rep);
        for (double& v : s) v += noise(rng);
        const auto p = estimate_period(s, 0.01);
        ASSERT_TRUE(p.has_value());
        EXPECT_NEAR(*p, 3.0, 0.1);
    }
}

TEST(EstimatePeriod, OtherPeriods) {
    for (double period : {0.6, 1.0, 2.2, 5.0}) {
        const auto p = estimate_period(sine(period, 0.5, 0.01, 15.0), 0.01);
        ASSERT_TRUE(p.has_value()) << period;
        EXPECT_NEAR(*p, period, 0.02 * period) << period;
    }
}

TEST(EstimatePeriod, WhiteNoiseIsAperiodic) {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> noise(0.0, 1.0);
    for (int rep = 0; rep < 10; ++rep) {
        std::vector<double> s(1500);
        for (double& v : s) v = noise(rng);
        EXPECT_FALSE(estimate_period(s, 0.01).has_value());
    }
}

TEST(EstimatePeriod, ConstantIsAperiodic) {
    EXPECT_FALSE(estimate_period(std::vector<double>(1500, 0.3), 0.01).has_value());
}

TEST(EstimatePeriod, TooShortSignal) {
    EXPECT_THROW((void)estimate_period(sine(1.0, 1.0, 0.01, 3.0), 0.01), TooShort);
    EXPECT_NO_THROW((void)estimate_period(sine(1.0, 1.0, 0.01, 4.0), 0.01));
}

TEST(Autocorrelation, UnitAtZeroLagAndBounded) {
    const auto acf = autocorrelation(sine(2.0, 1.0, 0.01, 10.0), 400);
    ASSERT_EQ(acf.size(), 401u);
    EXPECT_DOUBLE_EQ(acf[0], 1.0);
    EXPECT_NEAR(acf[200], 1.0, 0.02);
    EXPECT_NEAR(acf[100], -1.0, 0.02);
}

TEST(TraceMetrics, FromSyntheticTrace) {
    sim::TrialTrace tr;
    const sim::RobotModel m;
    const auto z = sine(3.0, 0.01, 0.01, 15.01);
    for (std::size_t i = 0; i < z.size(); ++i) {
        sim::TraceSample s;
        s.t = static_cast<double>(i) * 0.01;
        s.body.position.z() = 0.3 + z[i];
        s.sensors.rope_tension = m.weight() / 4;
        tr.samples.push_back(s);
    }
    const auto met = trace_metrics(tr, m);
    EXPECT_NEAR(met.vertical_delta, 0.02, 1e-5);
    ASSERT_TRUE(met.dominant_period.has_value());
    EXPECT_NEAR(*met.dominant_period, 3.0, 0.05);
    EXPECT_NEAR(met.mean_fitness, 0.75, 1e-9);
    EXPECT_EQ(met.termination, "completed");
}

TEST(TraceMetrics, ShortTraceHasNoPeriod) {
    sim::TrialTrace tr;
    tr.termination = sim::Termination::fell;
    for (int i = 0; i < 100; ++i) {
        sim::TraceSample s;
        s.t = i * 0.01;
        s.body.position.z() = 0.3 - 0.001 * i;
        tr.samples.push_back(s);
    }
    const auto met = trace_metrics(tr, sim::RobotModel{});
    EXPECT_FALSE(met.dominant_period.has_value());
    EXPECT_NEAR(met.vertical_delta, 0.099, 1e-12);
    EXPECT_EQ(met.termination, "fell");
}
