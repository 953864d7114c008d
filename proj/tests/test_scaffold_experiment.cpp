#include "trotbo/scaffold_experiment.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace trotbo::experiment;
namespace sim = trotbo::sim;
namespace bo = trotbo::bo;

namespace {

sim::TrialTrace constant_tension_trace(double tension, std::size_t samples = 1501) {
    sim::TrialTrace tr;
    tr.dt = 0.01;
    tr.duration = 15.0;
    for (std::size_t i = 0; i < samples; ++i) {
        sim::TraceSample s;
        s.t = static_cast<double>(i) * tr.dt;
        s.sensors.rope_tension = tension;
        tr.samples.push_back(s);
    }
    if (samples < tr.expected_samples()) tr.termination = sim::Termination::fell;
    return tr;
}

ExperimentConfig short_config(Condition c) {
    ExperimentConfig cfg;
    cfg.condition = c;
    cfg.seed = 3;
    cfg.trial.duration_s = 1.0;
    cfg.bo.n_candidates = 256;
    cfg.bo.n_local_candidates = 32;
    return cfg;
}

}  // namespace

TEST(Schedule, MinimumCondition) {
    for (int i = 1; i <= 50; ++i) EXPECT_EQ(schedule_height(Condition::minimum, i), 0.39);
    for (int i = 51; i <= 60; ++i) EXPECT_EQ(schedule_height(Condition::minimum, i), 0.325);
}

TEST(Schedule, ReducingCondition) {
    const auto h = [](int i) { return schedule_height(Condition::reducing, i); };
    for (int i = 1; i <= 10; ++i) EXPECT_EQ(h(i), 0.475);
    for (int i = 11; i <= 20; ++i) EXPECT_EQ(h(i), 0.45);
    for (int i = 21; i <= 30; ++i) EXPECT_EQ(h(i), 0.42);
    for (int i = 31; i <= 50; ++i) EXPECT_EQ(h(i), 0.39);
    for (int i = 51; i <= 60; ++i) EXPECT_EQ(h(i), 0.325);
}

TEST(Schedule, NoneDisablesRope) {
    for (int i = 1; i <= 60; ++i) {
        EXPECT_FALSE(schedule_height(Condition::none, i).has_value());
        EXPECT_FALSE(support_for(Condition::none, i, sim::SupportConfig::at(0.39)).enabled);
    }
}

TEST(Schedule, OutOfRangeIterations) {
    EXPECT_THROW((void)schedule_height(Condition::minimum, 0), std::out_of_range);
    EXPECT_THROW((void)schedule_height(Condition::reducing, 61), std::out_of_range);
    EXPECT_THROW((void)schedule_height(Condition::none, -3), std::out_of_range);
}

TEST(Schedule, NonIncreasingAndReducingStartsHigher) {
    for (auto c : {Condition::minimum, Condition::reducing}) {
        for (int i = 2; i <= 60; ++i) EXPECT_LE(*schedule_height(c, i), *schedule_height(c, i - 1));
    }
    EXPECT_GT(*schedule_height(Condition::reducing, 1), *schedule_height(Condition::minimum, 1));
}

TEST(Schedule, SupportKeepsRopeConstants) {
    sim::SupportConfig rope = sim::SupportConfig::at(1.0);
    rope.stiffness = 1234.0;
    const auto s = support_for(Condition::reducing, 15, rope);
    EXPECT_TRUE(s.enabled);
    EXPECT_EQ(s.height_m, 0.45);
    EXPECT_EQ(s.stiffness, 1234.0);
}

TEST(ParseCondition, AcceptsShortAndLongNames) {
    EXPECT_EQ(parse_condition("min"), Condition::minimum);
    EXPECT_EQ(parse_condition("minimum"), Condition::minimum);
    EXPECT_EQ(parse_condition("red"), Condition::reducing);
    EXPECT_EQ(parse_condition("reducing"), Condition::reducing);
    EXPECT_EQ(parse_condition("none"), Condition::none);
    EXPECT_THROW((void)parse_condition("max"), std::invalid_argument);
    EXPECT_EQ(to_string(Condition::reducing), "red");
}

TEST(ComputeFitness, Examples) {
    const sim::RobotModel m;
    EXPECT_DOUBLE_EQ(compute_fitness(constant_tension_trace(0.0), m), 1.0);
    EXPECT_DOUBLE_EQ(compute_fitness(constant_tension_trace(m.weight()), m), 0.0);
    EXPECT_NEAR(compute_fitness(constant_tension_trace(m.weight() / 2), m), 0.5, 1e-12);
    EXPECT_DOUBLE_EQ(compute_fitness(constant_tension_trace(3 * m.weight()), m), 0.0);
}

TEST(ComputeFitness, EarlyTerminationPaddedWithZero) {
    const sim::RobotModel m;
    const auto tr = constant_tension_trace(0.0, 301);
    EXPECT_NEAR(compute_fitness(tr, m), 301.0 / 1501.0, 1e-12);
}

TEST(ComputeFitness, StrictlyDecreasingInTension) {
    const sim::RobotModel m;
    double prev = compute_fitness(constant_tension_trace(0.0), m);
    for (double t = 0.5; t < m.weight(); t += 0.5) {
        const double f = compute_fitness(constant_tension_trace(t), m);
        EXPECT_LT(f, prev);
        prev = f;
    }
}

TEST(ComputeFitness, InverseTensionAlternative) {
    const sim::RobotModel m;
    const auto metric = FitnessMetric::inverse_tension;
    EXPECT_DOUBLE_EQ(compute_fitness(constant_tension_trace(0.0), m, metric), 1.0);
    EXPECT_NEAR(compute_fitness(constant_tension_trace(m.weight()), m, metric), 0.5, 1e-12);
    EXPECT_LT(compute_fitness(constant_tension_trace(2.0 * m.weight()), m, metric), 0.5);
}

TEST(ComputeFitness, RejectsEmptyTrace) {
    EXPECT_THROW((void)compute_fitness(sim::TrialTrace{}, sim::RobotModel{}), std::invalid_argument);
}

TEST(RunExperiment, MinimumConditionEchoesHeights) {
    auto cfg = short_config(Condition::minimum);
    const auto r = run_experiment(cfg);
    ASSERT_EQ(r.history.size(), 60u);
    ASSERT_EQ(r.traces.size(), 60u);
    for (const auto& rec : r.history.records()) {
        ASSERT_TRUE(rec.support_height_m.has_value());
        EXPECT_EQ(*rec.support_height_m, rec.iteration <= 50 ? 0.39 : 0.325);
        EXPECT_GE(rec.fitness, 0.0);
        EXPECT_LE(rec.fitness, 1.0);
    }
}

TEST(RunExperiment, ReducingHeightsMatchSchedule) {
    auto cfg = short_config(Condition::reducing);
    cfg.keep_traces = false;
    const auto r = run_experiment(cfg);
    EXPECT_TRUE(r.traces.empty());
    for (const auto& rec : r.history.records())
        EXPECT_EQ(rec.support_height_m, schedule_height(Condition::reducing, rec.iteration));
}

TEST(RunExperiment, NoneConditionHasNoHeights) {
    auto cfg = short_config(Condition::none);
    cfg.n_iter = 8;
    const auto r = run_experiment(cfg);
    ASSERT_EQ(r.history.size(), 8u);
    for (const auto& rec : r.history.records()) EXPECT_FALSE(rec.support_height_m.has_value());
}

TEST(RunExperiment, ProbeRerunsBestOfFirstFifty) {
    auto cfg = short_config(Condition::reducing);
    const auto r = run_experiment(cfg);
    const std::size_t best = r.history.argmax(50);
    EXPECT_EQ(r.probe.source_iteration, static_cast<int>(best) + 1);
    EXPECT_EQ(r.probe.params, r.history.records()[best].params);
    EXPECT_EQ(r.probe.height_m, 0.325);
    EXPECT_FALSE(r.probe.trace.samples.empty());
    EXPECT_NEAR(r.probe.fitness, compute_fitness(r.probe.trace, cfg.trial.model), 1e-15);
}

TEST(RunExperiment, CallbackSeesEveryIteration) {
    auto cfg = short_config(Condition::minimum);
    cfg.n_iter = 10;
    int calls = 0;
    const auto r = run_experiment(cfg, [&](const bo::HistoryRecord& rec, const sim::TrialTrace& tr) {
        ++calls;
        EXPECT_EQ(rec.iteration, calls);
        EXPECT_FALSE(tr.samples.empty());
    });
    EXPECT_EQ(calls, 10);
    EXPECT_EQ(r.history.size(), 10u);
}

TEST(RunExperiment, Deterministic) {
    auto cfg = short_config(Condition::reducing);
    cfg.n_iter = 12;
    cfg.trial.sim.imu_noise = true;
    const auto a = run_experiment(cfg);
    const auto b = run_experiment(cfg);
    for (std::size_t i = 0; i < a.history.size(); ++i) {
        EXPECT_EQ(a.history.records()[i].params, b.history.records()[i].params);
        EXPECT_EQ(a.history.records()[i].fitness, b.history.records()[i].fitness);
    }
}

TEST(ExperimentConfig, ValidateRejectsBadBudget) {
    ExperimentConfig cfg;
    cfg.n_iter = 61;
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
    cfg.n_iter = 3;
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(ApplySettings, OverridesKnownKeys) {
    ExperimentConfig cfg;
    apply_settings(cfg, {{"condition", "min"},
                         {"n_iter", "20"},
                         {"trial_duration_s", "5"},
                         {"rope_stiffness", "1500"},
                         {"kappa", "1.5"},
                         {"imu_noise", "true"},
                         {"initial_design", "uniform_random"},
                         {"fitness_metric", "inverse_tension"}});
    EXPECT_EQ(cfg.condition, Condition::minimum);
    EXPECT_EQ(cfg.n_iter, 20);
    EXPECT_EQ(cfg.trial.duration_s, 5.0);
    EXPECT_EQ(cfg.rope.stiffness, 1500.0);
    EXPECT_EQ(cfg.bo.kappa, 1.5);
    EXPECT_TRUE(cfg.trial.sim.imu_noise);
    EXPECT_EQ(cfg.bo.design, bo::DesignKind::uniform_random);
    EXPECT_EQ(cfg.metric, FitnessMetric::inverse_tension);
}

TEST(ApplySettings, RejectsUnknownKeysAndBadValues) {
    ExperimentConfig cfg;
    EXPECT_THROW(apply_settings(cfg, {{"no_such_key", "1"}}), std::invalid_argument);
    EXPECT_THROW(apply_settings(cfg, {{"kappa", "lots"}}), std::invalid_argument);
    EXPECT_THROW(apply_settings(cfg, {{"n_iter", "2.5"}}), std::invalid_argument);
}

TEST(TrialSeed, DistinctPerIteration) {
    EXPECT_NE(trial_seed(7, 1), trial_seed(7, 2));
    EXPECT_NE(trial_seed(7, 1), trial_seed(8, 1));
    EXPECT_EQ(trial_seed(7, 5), trial_seed(7, 5));
}
