#include "trotbo/raibert_controller.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace trotbo::control {

using std::numbers::pi;

bool ControllerConfig::valid() const {
    return gait_period_s > 0.0 && duty_factor > 0.0 && duty_factor < 1.0 && nominal_stand_height_m > 0.0 &&
           correction_limit >= 0.0;
}

bool JointTargets::within_limits() const {
    return std::all_of(legs.begin(), legs.end(), [](const LegAngles& q) {
        return std::abs(q.abduction) <= pi / 2 && std::abs(q.flexion) <= pi && std::abs(q.knee) <= pi;
    });
}

bool LegGeometry::valid() const {
    if (!(thigh_length > 0.0 && shank_length > 0.0)) return false;
    const auto& fl = hip(Leg::FL);
    const auto& fr = hip(Leg::FR);
    const auto& rl = hip(Leg::RL);
    const auto& rr = hip(Leg::RR);
    constexpr double tol = 1e-12;
    return std::abs(fl.x() - fr.x()) < tol && std::abs(rl.x() - rr.x()) < tol && std::abs(fl.x() + rl.x()) < tol &&
           std::abs(fl.y() + fr.y()) < tol && std::abs(rl.y() + rr.y()) < tol && std::abs(fl.y() - rl.y()) < tol;
}

GaitPhase gait_phase(double t, const ControllerConfig& cfg) {
    const double cycles = t / cfg.gait_period_s;
    const double a = cycles - std::floor(cycles);
    double b = a + 0.5;
    if (b >= 1.0) b -= 1.0;
    return {{a, a < cfg.duty_factor}, {b, b < cfg.duty_factor}};
}

double swing_foot_height(double phase, const ControllerConfig& cfg, double hop_height_mm) {
    if (phase < cfg.duty_factor) return 0.0;
    const double s = (phase - cfg.duty_factor) / (1.0 - cfg.duty_factor);
    return hop_height_mm / 1000.0 * std::sin(pi * s);
}

AttitudeCorrection stance_correction_unclamped(const ImuReading& imu, const bo::ParamVector& p,
                                               const ControllerConfig& cfg) {
    return {-p.pitch_kp * (imu.pitch - cfg.desired_pitch) - p.pitch_kv * imu.pitch_rate,
            -p.roll_kp * (imu.roll - cfg.desired_roll) - p.roll_kv * imu.roll_rate};
}

AttitudeCorrection stance_correction(const ImuReading& imu, const bo::ParamVector& p, const ControllerConfig& cfg) {
    const auto raw = stance_correction_unclamped(imu, p, cfg);
    const double lim = cfg.correction_limit;
    return {std::clamp(raw.pitch, -lim, lim), std::clamp(raw.roll, -lim, lim)};
}

Eigen::Vector3d leg_forward_kinematics(const LegAngles& q, const LegGeometry& geom) {
    const double l1 = geom.thigh_length;
    const double l2 = geom.shank_length;
    const double sx = l1 * std::sin(q.flexion) + l2 * std::sin(q.flexion + q.knee);
    const double sz = -l1 * std::cos(q.flexion) - l2 * std::cos(q.flexion + q.knee);
    const double ca = std::cos(q.abduction);
    const double sa = std::sin(q.abduction);
    return {sx, -sa * sz, ca * sz};
}

LegAngles leg_inverse_kinematics(const Eigen::Vector3d& target, const LegGeometry& geom) {
    const double l1 = geom.thigh_length;
    const double l2 = geom.shank_length;
    const double d = target.norm();
    if (!(d <= l1 + l2 - kReachEpsilon && d >= std::abs(l1 - l2) + kReachEpsilon)) {
        std::ostringstream msg;
        msg << "foot target at distance " << d << " m outside reach [" << std::abs(l1 - l2) << ", " << l1 + l2 << "]";
        throw OutOfReach(msg.str());
    }

    const double abduction = std::atan2(target.y(), -target.z());
    const double r = std::hypot(target.y(), target.z());
    const double c = std::clamp((d * d - l1 * l1 - l2 * l2) / (2.0 * l1 * l2), -1.0, 1.0);
    const double knee = std::acos(c);
    const double toward_foot = std::atan2(target.x(), r);
    const double offset = std::atan2(l2 * std::sin(knee), l1 + l2 * std::cos(knee));
    return {abduction, toward_foot - offset, knee};
}

Eigen::Vector3d foot_target(double t, const ImuReading& imu, const bo::ParamVector& p, const ControllerConfig& cfg,
                            Leg leg) {
    const PairPhase ph = gait_phase(t, cfg).of(leg);
    Eigen::Vector3d foot(0.0, 0.0, -cfg.nominal_stand_height_m);
    if (ph.stance) {
        const auto corr = stance_correction(imu, p, cfg);
        foot = Eigen::AngleAxisd(corr.roll, Eigen::Vector3d::UnitX()) *
               (Eigen::AngleAxisd(corr.pitch, Eigen::Vector3d::UnitY()) * foot);
    } else {
        foot.z() += swing_foot_height(ph.phase, cfg, p.hop_height_mm);
    }
    return foot;
}

JointTargets controller_step(double t, const ImuReading& imu, const bo::ParamVector& p, const ControllerConfig& cfg,
                             const LegGeometry& geom) {
    // One virtual leg per diagonal pair.
    const LegAngles a = leg_inverse_kinematics(foot_target(t, imu, p, cfg, Leg::FL), geom);
    const LegAngles b = leg_inverse_kinematics(foot_target(t, imu, p, cfg, Leg::FR), geom);
    JointTargets out;
    out[Leg::FL] = a;
    out[Leg::RR] = a;
    out[Leg::FR] = b;
    out[Leg::RL] = b;
    return out;
}

JointTargets stand_pose(const ControllerConfig& cfg, const LegGeometry& geom) {
    const LegAngles q = leg_inverse_kinematics(Eigen::Vector3d(0.0, 0.0, -cfg.nominal_stand_height_m), geom);
    JointTargets out;
    out.legs.fill(q);
    return out;
}

JointTargets retracted_pose() {
    JointTargets out;
    out.legs.fill(LegAngles{0.0, -1.2, 2.4});
    return out;
}

}  // namespace trotbo::control
