#pragma once

#include "trotbo/bo_engine.hpp"

#include <Eigen/Dense>

#include <array>
#include <stdexcept>

namespace trotbo::control {

class OutOfReach : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ControllerConfig {
    double gait_period_s = 0.6;
    double duty_factor = 0.6;
    double desired_pitch = 0.0;
    double desired_roll = 0.0;
    double nominal_stand_height_m = 0.32;
    /// Symmetric clamp applied to each attitude correction angle.
    double correction_limit = 0.5;

    [[nodiscard]] bool valid() const;
};

/// Trunk attitude as reported by the IMU. Rates are body-frame angular
/// velocity components about y (pitch) and x (roll).
struct ImuReading {
    double pitch = 0.0;
    double roll = 0.0;
    double pitch_rate = 0.0;
    double roll_rate = 0.0;
};

enum class Leg : int { FL = 0, FR = 1, RL = 2, RR = 3 };
inline constexpr std::array<Leg, 4> kLegs{Leg::FL, Leg::FR, Leg::RL, Leg::RR};
inline constexpr int kNumLegs = 4;

struct LegAngles {
    double abduction = 0.0;
    double flexion = 0.0;
    double knee = 0.0;

    friend bool operator==(const LegAngles&, const LegAngles&) = default;
};

struct JointTargets {
    std::array<LegAngles, kNumLegs> legs{};

    [[nodiscard]] LegAngles& operator[](Leg l) { return legs[static_cast<std::size_t>(l)]; }
    [[nodiscard]] const LegAngles& operator[](Leg l) const { return legs[static_cast<std::size_t>(l)]; }

    /// All angles within +-pi/2 abduction and +-pi flexion/knee.
    [[nodiscard]] bool within_limits() const;

    friend bool operator==(const JointTargets&, const JointTargets&) = default;
};

struct LegGeometry {
    double thigh_length = 0.21;
    double shank_length = 0.21;
    /// Hip positions relative to the trunk center (x forward, y left, z up).
    std::array<Eigen::Vector3d, kNumLegs> hip_offsets{
        Eigen::Vector3d(0.2425, 0.21, 0.0), Eigen::Vector3d(0.2425, -0.21, 0.0),
        Eigen::Vector3d(-0.2425, 0.21, 0.0), Eigen::Vector3d(-0.2425, -0.21, 0.0)};

    [[nodiscard]] const Eigen::Vector3d& hip(Leg l) const { return hip_offsets[static_cast<std::size_t>(l)]; }
    [[nodiscard]] bool valid() const;
};

/// Diagonal pairs: A = (FL, RR), B = (FR, RL).
struct PairPhase {
    double phase = 0.0;
    bool stance = false;
};

struct GaitPhase {
    PairPhase pair_a;
    PairPhase pair_b;

    [[nodiscard]] const PairPhase& of(Leg l) const { return (l == Leg::FL || l == Leg::RR) ? pair_a : pair_b; }
};

struct AttitudeCorrection {
    double pitch = 0.0;
    double roll = 0.0;
};

[[nodiscard]] GaitPhase gait_phase(double t, const ControllerConfig& cfg);

/// Foot lift in meters for a pair at `phase`; `hop_height_mm` is the peak.
[[nodiscard]] double swing_foot_height(double phase, const ControllerConfig& cfg, double hop_height_mm);

/// theta_pitch = -kp1 (pitch - desired) - kv1 * pitch_rate, and the roll
/// analogue, before clamping.
[[nodiscard]] AttitudeCorrection stance_correction_unclamped(const ImuReading& imu, const bo::ParamVector& p,
                                                             const ControllerConfig& cfg);

/// As above, each angle clamped to +-cfg.correction_limit.
[[nodiscard]] AttitudeCorrection stance_correction(const ImuReading& imu, const bo::ParamVector& p,
                                                   const ControllerConfig& cfg);

/// Reach margin used by the inverse kinematics precondition.
inline constexpr double kReachEpsilon = 1e-9;

/// Foot position in the hip frame from joint angles. Abduction rotates the leg
/// plane about x; in that plane flexion swings the thigh forward and a
/// positive knee angle swings the shank forward relative to the thigh.
[[nodiscard]] Eigen::Vector3d leg_forward_kinematics(const LegAngles& q, const LegGeometry& geom);

/// Two-link IK with abduction, knee-backward branch (knee >= 0).
/// Throws OutOfReach if the target distance is outside
/// [|l1-l2| + eps, l1+l2 - eps].
[[nodiscard]] LegAngles leg_inverse_kinematics(const Eigen::Vector3d& foot_target, const LegGeometry& geom);

/// Hip-frame foot target for one leg before IK.
[[nodiscard]] Eigen::Vector3d foot_target(double t, const ImuReading& imu, const bo::ParamVector& p,
                                          const ControllerConfig& cfg, Leg leg);

/// Full in-place trot command. Diagonal legs always receive identical angles.
[[nodiscard]] JointTargets controller_step(double t, const ImuReading& imu, const bo::ParamVector& p,
                                           const ControllerConfig& cfg, const LegGeometry& geom);

/// Symmetric stand with every foot at the nominal height.
[[nodiscard]] JointTargets stand_pose(const ControllerConfig& cfg, const LegGeometry& geom);

/// Legs folded so the feet sit just below the hips.
[[nodiscard]] JointTargets retracted_pose();

}  // namespace trotbo::control
