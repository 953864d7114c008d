#include "trotbo/quadruped_sim.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace trotbo::sim;
using trotbo::bo::ParamVector;
namespace control = trotbo::control;

namespace {

const ParamVector kTable2{77.99391797172291, -0.08307456005155922, 0.17227550937265934, 0.4861753588049966,
                          -0.05160482932681609};

double contact_sum(const SensorReadings& s) {
    double sum = 0.0;
    for (double c : s.contact_normal) sum += c;
    return sum;
}

std::vector<double> stand_z(double dt, double seconds) {
    const TrialConfig cfg;
    SimState s = standing_start(cfg);
    const auto targets = s.joints;
    const int n = static_cast<int>(std::lround(seconds / dt));
    const int every = static_cast<int>(std::lround(1e-3 / dt));
    std::vector<double> z;
    for (int i = 1; i <= n; ++i) {
        (void)step_dynamics(s, targets, cfg.model, SupportConfig::none(), cfg.sim, dt);
        if (i % every == 0) z.push_back(s.body.position.z());
    }
    return z;
}

}  // namespace

TEST(RopeForce, SlackAboveRestHeight) {
    const auto sup = SupportConfig::at(0.39);
    EXPECT_EQ(rope_force(0.391, 0.0, sup), 0.0);
    EXPECT_EQ(rope_force(0.2, 0.0, SupportConfig::none()), 0.0);
}

TEST(RopeForce, StretchedSpring) {
    const auto sup = SupportConfig::at(0.39);
    EXPECT_NEAR(rope_force(0.38, 0.0, sup), 20.0, 1e-9);
    EXPECT_NEAR(rope_force(0.38, -0.1, sup), 25.0, 1e-9);
}

TEST(RopeForce, NeverPushes) {
    const auto sup = SupportConfig::at(0.39);
    EXPECT_EQ(rope_force(0.389, 5.0, sup), 0.0);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> z(0.2, 0.5);
    std::uniform_real_distribution<double> v(-3.0, 3.0);
    for (int i = 0; i < 1000; ++i) EXPECT_GE(rope_force(z(rng), v(rng), sup), 0.0);
}

TEST(ContactForce, FootAboveGroundIsFree) {
    EXPECT_EQ(contact_force(0.001, -1.0, {0.5, 0.2}, ContactParams{}), Eigen::Vector3d::Zero());
}

TEST(ContactForce, StaticPenetration) {
    const auto f = contact_force(-0.002, 0.0, Eigen::Vector2d::Zero(), ContactParams{});
    EXPECT_NEAR(f.z(), 20.0, 1e-9);
    EXPECT_EQ(f.x(), 0.0);
    EXPECT_EQ(f.y(), 0.0);
}

TEST(ContactForce, FrictionSaturatesAtCoulombLimit) {
    const ContactParams cp;
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> depth(0.0, 0.01);
    std::uniform_real_distribution<double> vz(-0.5, 0.5);
    std::normal_distribution<double> vt(0.0, 1.0);
    for (int i = 0; i < 2000; ++i) {
        const auto f = contact_force(-depth(rng), vz(rng), {vt(rng), vt(rng)}, cp);
        EXPECT_GE(f.z(), 0.0);
        EXPECT_LE(f.head<2>().norm(), cp.friction_mu * f.z() * (1.0 + 1e-12));
    }
}

TEST(ContactForce, ViscousBelowSaturation) {
    const ContactParams cp;
    const auto f = contact_force(-0.002, 0.0, {0.01, 0.0}, cp);
    EXPECT_NEAR(f.x(), -2.0, 1e-12);
}

TEST(StepDynamics, RejectsBadTimeStep) {
    const TrialConfig cfg;
    SimState s = standing_start(cfg);
    const auto t = s.joints;
    EXPECT_THROW((void)step_dynamics(s, t, cfg.model, SupportConfig::none(), cfg.sim, 0.0), std::invalid_argument);
    EXPECT_THROW((void)step_dynamics(s, t, cfg.model, SupportConfig::none(), cfg.sim, 6e-3), std::invalid_argument);
}

TEST(StepDynamics, HangingRobotCarriesWeightOnRope) {
    const RobotModel m;
    SimState s;
    s.body.position = {0.0, 0.0, 0.39};
    s.joints = control::retracted_pose();
    const auto sup = SupportConfig::at(0.39);
    SensorReadings r;
    for (int i = 0; i < 2000; ++i) r = step_dynamics(s, s.joints, m, sup, SimParams{}, 1e-3);
    EXPECT_NEAR(r.rope_tension, 20.601, 0.02 * 20.601);
    EXPECT_EQ(contact_sum(r), 0.0);
}

TEST(StepDynamics, StandingRobotSettlesAtStandHeight) {
    const TrialConfig cfg;
    SimState s = standing_start(cfg);
    const auto targets = s.joints;
    SensorReadings r;
    for (int i = 0; i < 2000; ++i) r = step_dynamics(s, targets, cfg.model, SupportConfig::none(), cfg.sim, 1e-3);
    EXPECT_NEAR(s.body.position.z(), cfg.controller.nominal_stand_height_m, 5e-3);
    EXPECT_NEAR(contact_sum(r) + r.rope_tension, cfg.model.weight(), 0.02 * cfg.model.weight());
}

TEST(StepDynamics, ForceBalanceWithPartialRopeSupport) {
    const TrialConfig cfg;
    SimState s = standing_start(cfg);
    const auto targets = s.joints;
    const auto sup = SupportConfig::at(0.325);
    SensorReadings r;
    for (int i = 0; i < 3000; ++i) r = step_dynamics(s, targets, cfg.model, sup, cfg.sim, 1e-3);
    EXPECT_GT(r.rope_tension, 0.0);
    EXPECT_GT(contact_sum(r), 0.0);
    EXPECT_NEAR(contact_sum(r) + r.rope_tension, cfg.model.weight(), 0.02 * cfg.model.weight());
}

TEST(StepDynamics, TimeStepConsistency) {
    const auto coarse = stand_z(1e-3, 1.0);
    const auto fine = stand_z(5e-4, 1.0);
    ASSERT_EQ(coarse.size(), fine.size());
    for (std::size_t i = 0; i < coarse.size(); ++i) EXPECT_NEAR(coarse[i], fine[i], 1e-3);
}

TEST(StepDynamics, BallisticFreeFall) {
    // The semi-implicit update overshoots the closed form by g*dt*t/2, so the
    // 1e-4 m bound over 0.3 s needs a step well below 1 ms.
    const RobotModel m;
    const double dt = 5e-5;
    SimState s;
    s.body.position = {0.0, 0.0, 2.0};
    s.body.linear_velocity = {0.0, 0.0, 0.5};
    s.joints = control::retracted_pose();
    const int n = static_cast<int>(std::lround(0.3 / dt));
    for (int i = 1; i <= n; ++i) {
        (void)step_dynamics(s, s.joints, m, SupportConfig::none(), SimParams{}, dt);
        const double t = i * dt;
        EXPECT_NEAR(s.body.position.z(), 2.0 + 0.5 * t - 0.5 * m.gravity * t * t, 1e-4);
    }
}

TEST(StepDynamics, DivergenceIsReported) {
    const RobotModel m;
    SimState s;
    s.body.position = {0.0, 0.0, 11.0};
    s.joints = control::retracted_pose();
    EXPECT_THROW((void)step_dynamics(s, s.joints, m, SupportConfig::none(), SimParams{}, 1e-3), NumericalDivergence);
}

TEST(ReadSensors, ImuMatchesTrunkExactly) {
    const TrialConfig cfg;
    SimState s = standing_start(cfg);
    s.body.orientation = Eigen::AngleAxisd(0.1, Eigen::Vector3d::UnitZ()) *
                         Eigen::AngleAxisd(-0.07, Eigen::Vector3d::UnitY()) *
                         Eigen::AngleAxisd(0.04, Eigen::Vector3d::UnitX());
    s.body.angular_velocity = {0.3, -0.2, 0.1};
    const auto r = read_sensors(s, cfg.model, SupportConfig::none(), cfg.sim);
    EXPECT_NEAR(r.imu.roll, 0.04, 1e-12);
    EXPECT_NEAR(r.imu.pitch, -0.07, 1e-12);
    EXPECT_EQ(r.imu.roll, s.body.roll());
    EXPECT_EQ(r.imu.pitch, s.body.pitch());
    EXPECT_EQ(r.imu.roll_rate, 0.3);
    EXPECT_EQ(r.imu.pitch_rate, -0.2);
}

TEST(RunTrial, ReferenceGainsCompleteWithPartialSupport) {
    const TrialConfig cfg;
    const auto tr = run_trial(kTable2, SupportConfig::at(0.325), cfg, 0);
    EXPECT_EQ(tr.termination, Termination::completed);
    EXPECT_EQ(tr.samples.size(), tr.expected_samples());
    EXPECT_EQ(tr.samples.size(), 1501u);
    EXPECT_NEAR(tr.samples.back().t, 15.0, 1e-9);
    for (std::size_t i = 1; i < tr.samples.size(); ++i) EXPECT_GT(tr.samples[i].t, tr.samples[i - 1].t);
}

TEST(RunTrial, BoxCornerGainsFallQuicklyWithoutSupport) {
    // A perfectly level robot with exact sensing has nothing to amplify, so
    // this uses the optional IMU noise as the disturbance source.
    TrialConfig cfg;
    cfg.sim.imu_noise = true;
    for (double g : {1.0, -1.0}) {
        for (double h : {60.0, 120.0}) {
            const auto tr = run_trial(ParamVector{h, g, g, g, g}, SupportConfig::none(), cfg, 1);
            EXPECT_EQ(tr.termination, Termination::fell) << "gain " << g << " height " << h;
            EXPECT_LT(tr.samples.back().t, 2.0) << "gain " << g << " height " << h;
        }
    }
}

TEST(RunTrial, FallAngleOnlyWithoutRope) {
    TrialConfig cfg;
    cfg.sim.imu_noise = true;
    const auto tr = run_trial(ParamVector{120, 1, 1, 1, 1}, SupportConfig::none(), cfg, 2);
    ASSERT_EQ(tr.termination, Termination::fell);
    const auto& last = tr.samples.back().body;
    EXPECT_GE(std::max(std::abs(last.roll()), std::abs(last.pitch())), cfg.fall_angle);
    for (std::size_t i = 0; i + 1 < tr.samples.size(); ++i) {
        const auto& b = tr.samples[i].body;
        EXPECT_LT(std::max(std::abs(b.roll()), std::abs(b.pitch())), cfg.fall_angle);
    }
}

TEST(RunTrial, ForcesNonNegativeAcrossRandomTrials) {
    TrialConfig cfg;
    cfg.duration_s = 3.0;
    cfg.sim.imu_noise = true;
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> g(-1.0, 1.0);
    std::uniform_real_distribution<double> h(60.0, 120.0);
    const std::array<SupportConfig, 4> supports{SupportConfig::none(), SupportConfig::at(0.325),
                                                SupportConfig::at(0.39), SupportConfig::at(0.475)};
    for (int i = 0; i < 24; ++i) {
        const ParamVector p{h(rng), g(rng), g(rng), g(rng), g(rng)};
        const auto tr = run_trial(p, supports[static_cast<std::size_t>(i) % supports.size()], cfg,
                                  static_cast<std::uint64_t>(i));
        for (const auto& s : tr.samples) {
            EXPECT_GE(s.sensors.rope_tension, 0.0);
            for (double c : s.sensors.contact_normal) EXPECT_GE(c, 0.0);
        }
    }
}

TEST(RunTrial, SameSeedSameTrace) {
    TrialConfig cfg;
    cfg.duration_s = 4.0;
    cfg.sim.imu_noise = true;
    const ParamVector p{95, 0.3, 0.05, 0.2, -0.1};
    const auto a = run_trial(p, SupportConfig::at(0.325), cfg, 9);
    const auto b = run_trial(p, SupportConfig::at(0.325), cfg, 9);
    ASSERT_EQ(a.samples.size(), b.samples.size());
    EXPECT_EQ(a.termination, b.termination);
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
        EXPECT_EQ(a.samples[i].t, b.samples[i].t);
        EXPECT_EQ(a.samples[i].body.position, b.samples[i].body.position);
        EXPECT_EQ(a.samples[i].body.orientation.coeffs(), b.samples[i].body.orientation.coeffs());
        EXPECT_EQ(a.samples[i].sensors.rope_tension, b.samples[i].sensors.rope_tension);
        EXPECT_EQ(a.samples[i].command, b.samples[i].command);
    }
}

TEST(RunTrial, RejectsInvalidSupport) {
    SupportConfig bad = SupportConfig::at(0.3);
    bad.stiffness = -1.0;
    EXPECT_THROW((void)run_trial(kTable2, bad, TrialConfig{}, 0), std::invalid_argument);
}
