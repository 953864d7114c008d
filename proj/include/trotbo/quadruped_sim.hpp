#pragma once

#include "trotbo/bo_engine.hpp"
#include "trotbo/raibert_controller.hpp"

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include <array>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace trotbo::sim {

class NumericalDivergence : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RobotModel {
    double mass = 2.1;
    /// Principal inertia of a 0.485 x 0.42 x 0.10 m box of the trunk mass.
    Eigen::Vector3d inertia{0.032620, 0.042914, 0.072028};
    control::LegGeometry geometry;
    double gravity = 9.81;

    [[nodiscard]] double weight() const { return mass * gravity; }
    [[nodiscard]] bool valid() const;
};

/// Trunk pose and twist. Linear velocity is in the world frame, angular
/// velocity in the body frame (what a strapdown IMU measures).
struct BodyState {
    Eigen::Vector3d position = Eigen::Vector3d::Zero();
    Eigen::Quaterniond orientation = Eigen::Quaterniond::Identity();
    Eigen::Vector3d linear_velocity = Eigen::Vector3d::Zero();
    Eigen::Vector3d angular_velocity = Eigen::Vector3d::Zero();

    /// Z-Y-X Euler angles (roll, pitch, yaw).
    [[nodiscard]] Eigen::Vector3d rpy() const;
    [[nodiscard]] double roll() const { return rpy().x(); }
    [[nodiscard]] double pitch() const { return rpy().y(); }
    [[nodiscard]] double yaw() const { return rpy().z(); }
};

struct SupportConfig {
    double height_m = 0.39;
    double stiffness = 2000.0;
    double damping = 50.0;
    bool enabled = true;

    static SupportConfig at(double height_m) { return {height_m, 2000.0, 50.0, true}; }
    static SupportConfig none() { return {0.0, 2000.0, 50.0, false}; }
    [[nodiscard]] bool valid() const;
};

struct ContactParams {
    double stiffness = 1e4;
    double damping = 100.0;
    double friction_mu = 0.8;
    double viscous_friction = 200.0;
};

struct SensorReadings {
    control::ImuReading imu;
    double rope_tension = 0.0;
    std::array<double, control::kNumLegs> contact_normal{};
};

struct SimParams {
    ContactParams contact;
    double servo_time_constant = 0.03;
    bool imu_noise = false;
    double imu_sigma_angle = 0.5 * std::numbers::pi / 180.0;
    double imu_sigma_rate = 2.0 * std::numbers::pi / 180.0;
};

/// Everything integrated between steps: the trunk plus the servo-tracked
/// joint angles.
struct SimState {
    BodyState body;
    control::JointTargets joints;
};

/// Unilateral spring-damper acting vertically on the trunk CoG.
[[nodiscard]] double rope_force(double z, double z_rate, const SupportConfig& sup);

/// Penalty contact at a point foot. Returns the world-frame force on the foot.
[[nodiscard]] Eigen::Vector3d contact_force(double foot_z, double foot_z_rate, const Eigen::Vector2d& tangential_velocity,
                                            const ContactParams& params);

/// Noise-free sensor readout of a state (foot velocities from the body twist only).
[[nodiscard]] SensorReadings read_sensors(const SimState& state, const RobotModel& model, const SupportConfig& sup,
                                          const SimParams& params);

/// One semi-implicit Euler step; `state` is advanced in place and the returned
/// sensors are read after the update. dt must lie in (0, 5 ms].
SensorReadings step_dynamics(SimState& state, const control::JointTargets& targets, const RobotModel& model,
                             const SupportConfig& sup, const SimParams& params, double dt);

enum class Termination { completed, fell, ik_failure, diverged };
[[nodiscard]] std::string_view to_string(Termination t);

struct TraceSample {
    double t = 0.0;
    BodyState body;
    control::JointTargets command;
    control::JointTargets joints;  // servo-tracked actual angles
    SensorReadings sensors;
};

struct TrialTrace {
    double dt = 0.01;
    double duration = 15.0;
    std::vector<TraceSample> samples;
    Termination termination = Termination::completed;

    /// Number of samples a completed trial holds.
    [[nodiscard]] std::size_t expected_samples() const;
};

struct TrialConfig {
    double duration_s = 15.0;
    double physics_dt = 1e-3;
    double control_dt = 1e-2;
    /// Tilt limit for `fell` when the rope is disabled.
    double fall_angle = 60.0 * std::numbers::pi / 180.0;
    RobotModel model;
    control::ControllerConfig controller;
    SimParams sim;
};

[[nodiscard]] SimState standing_start(const TrialConfig& cfg);

/// Closed-loop trial: controller at control_dt, physics at physics_dt,
/// samples recorded every control period starting at t = 0.
[[nodiscard]] TrialTrace run_trial(const bo::ParamVector& p, const SupportConfig& sup, const TrialConfig& cfg,
                                   std::uint64_t seed);

}  // namespace trotbo::sim
