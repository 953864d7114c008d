#include "trotbo/quadruped_sim.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace trotbo::sim {

using control::JointTargets;
using control::kLegs;
using control::Leg;

bool RobotModel::valid() const {
    return mass > 0.0 && (inertia.array() > 0.0).all() && gravity > 0.0 && geometry.valid();
}

Eigen::Vector3d BodyState::rpy() const {
    const Eigen::Matrix3d r = orientation.toRotationMatrix();
    const double pitch = std::asin(std::clamp(-r(2, 0), -1.0, 1.0));
    const double roll = std::atan2(r(2, 1), r(2, 2));
    const double yaw = std::atan2(r(1, 0), r(0, 0));
    return {roll, pitch, yaw};
}

bool SupportConfig::valid() const {
    if (stiffness < 0.0 || damping < 0.0) return false;
    return !enabled || height_m > 0.0;
}

double rope_force(double z, double z_rate, const SupportConfig& sup) {
    if (!sup.enabled || z >= sup.height_m) return 0.0;
    return std::max(0.0, sup.stiffness * (sup.height_m - z) - sup.damping * z_rate);
}

Eigen::Vector3d contact_force(double foot_z, double foot_z_rate, const Eigen::Vector2d& tangential_velocity,
                              const ContactParams& params) {
    if (foot_z >= 0.0) return Eigen::Vector3d::Zero();
    const double normal = std::max(0.0, params.stiffness * (-foot_z) - params.damping * foot_z_rate);
    Eigen::Vector2d tangential = -params.viscous_friction * tangential_velocity;
    const double cap = params.friction_mu * normal;
    const double mag = tangential.norm();
    if (mag > cap) tangential *= cap / mag;
    return {tangential.x(), tangential.y(), normal};
}

namespace {

struct FootKinematics {
    Eigen::Vector3d offset;    // CoG to foot, world frame
    Eigen::Vector3d position;  // world
    Eigen::Vector3d velocity;  // world
};

FootKinematics foot_kinematics(const BodyState& body, const Eigen::Matrix3d& rot, const Eigen::Vector3d& local,
                               const Eigen::Vector3d& local_rate) {
    FootKinematics fk;
    fk.offset = rot * local;
    fk.position = body.position + fk.offset;
    fk.velocity = body.linear_velocity + rot * (body.angular_velocity.cross(local) + local_rate);
    return fk;
}

Eigen::Vector3d foot_local(const control::LegAngles& q, const RobotModel& model, Leg leg) {
    return model.geometry.hip(leg) + control::leg_forward_kinematics(q, model.geometry);
}

control::ImuReading imu_of(const BodyState& body) {
    const Eigen::Vector3d rpy = body.rpy();
    return {rpy.y(), rpy.x(), body.angular_velocity.y(), body.angular_velocity.x()};
}

void check_sanity(const BodyState& b) {
    const bool finite = b.position.allFinite() && b.linear_velocity.allFinite() && b.angular_velocity.allFinite() &&
                        b.orientation.coeffs().allFinite();
    if (!finite || std::abs(b.position.z()) > 10.0 || b.linear_velocity.norm() > 100.0 ||
        b.angular_velocity.norm() > 100.0) {
        std::ostringstream msg;
        msg << "integration diverged (z=" << b.position.z() << " m, |v|=" << b.linear_velocity.norm()
            << " m/s, |w|=" << b.angular_velocity.norm() << " rad/s)";
        throw NumericalDivergence(msg.str());
    }
}

SensorReadings readout(const SimState& state, const RobotModel& model, const SupportConfig& sup,
                       const SimParams& params, const std::array<Eigen::Vector3d, control::kNumLegs>& local_rates) {
    SensorReadings s;
    s.imu = imu_of(state.body);
    s.rope_tension = rope_force(state.body.position.z(), state.body.linear_velocity.z(), sup);
    const Eigen::Matrix3d rot = state.body.orientation.toRotationMatrix();
    for (Leg leg : kLegs) {
        const auto i = static_cast<std::size_t>(leg);
        const auto fk = foot_kinematics(state.body, rot, foot_local(state.joints[leg], model, leg), local_rates[i]);
        s.contact_normal[i] =
            contact_force(fk.position.z(), fk.velocity.z(), fk.velocity.head<2>(), params.contact).z();
    }
    return s;
}

}  // namespace

SensorReadings read_sensors(const SimState& state, const RobotModel& model, const SupportConfig& sup,
                            const SimParams& params) {
    std::array<Eigen::Vector3d, control::kNumLegs> still;
    still.fill(Eigen::Vector3d::Zero());
    return readout(state, model, sup, params, still);
}

SensorReadings step_dynamics(SimState& state, const JointTargets& targets, const RobotModel& model,
                             const SupportConfig& sup, const SimParams& params, double dt) {
    if (!(dt > 0.0 && dt <= 5e-3)) throw std::invalid_argument("physics dt must lie in (0, 5 ms]");

    // First-order servo lag toward the commanded angles.
    const double blend = params.servo_time_constant > 0.0 ? 1.0 - std::exp(-dt / params.servo_time_constant) : 1.0;
    std::array<Eigen::Vector3d, control::kNumLegs> local_rates;
    std::array<Eigen::Vector3d, control::kNumLegs> locals;
    for (Leg leg : kLegs) {
        const auto i = static_cast<std::size_t>(leg);
        auto& q = state.joints[leg];
        const auto& cmd = targets[leg];
        const Eigen::Vector3d before = foot_local(q, model, leg);
        q.abduction += blend * (cmd.abduction - q.abduction);
        q.flexion += blend * (cmd.flexion - q.flexion);
        q.knee += blend * (cmd.knee - q.knee);
        locals[i] = foot_local(q, model, leg);
        local_rates[i] = (locals[i] - before) / dt;
    }

    BodyState& b = state.body;
    const Eigen::Matrix3d rot = b.orientation.toRotationMatrix();

    Eigen::Vector3d force(0.0, 0.0, -model.weight());
    Eigen::Vector3d torque_world = Eigen::Vector3d::Zero();
    for (std::size_t i = 0; i < locals.size(); ++i) {
        const auto fk = foot_kinematics(b, rot, locals[i], local_rates[i]);
        const Eigen::Vector3d f = contact_force(fk.position.z(), fk.velocity.z(), fk.velocity.head<2>(), params.contact);
        force += f;
        torque_world += fk.offset.cross(f);
    }
    force.z() += rope_force(b.position.z(), b.linear_velocity.z(), sup);

    // Semi-implicit Euler: velocities first, then poses with the new velocities.
    b.linear_velocity += force / model.mass * dt;
    b.position += b.linear_velocity * dt;

    const Eigen::Vector3d torque_body = rot.transpose() * torque_world;
    const Eigen::Vector3d& inertia = model.inertia;
    const Eigen::Vector3d& w = b.angular_velocity;
    const Eigen::Vector3d gyro = w.cross(inertia.cwiseProduct(w));
    b.angular_velocity += ((torque_body - gyro).array() / inertia.array()).matrix() * dt;

    const double angle = b.angular_velocity.norm() * dt;
    if (angle > 0.0) {
        b.orientation = b.orientation * Eigen::Quaterniond(Eigen::AngleAxisd(angle, b.angular_velocity.normalized()));
        b.orientation.normalize();
    }

    check_sanity(b);
    return readout(state, model, sup, params, local_rates);
}

std::string_view to_string(Termination t) {
    switch (t) {
        case Termination::completed: return "completed";
        case Termination::fell: return "fell";
        case Termination::ik_failure: return "ik_failure";
        case Termination::diverged: return "diverged";
    }
    return "unknown";
}

std::size_t TrialTrace::expected_samples() const {
    return static_cast<std::size_t>(std::llround(duration / dt)) + 1;
}

SimState standing_start(const TrialConfig& cfg) {
    SimState s;
    s.body.position = {0.0, 0.0, cfg.controller.nominal_stand_height_m};
    s.joints = control::stand_pose(cfg.controller, cfg.model.geometry);
    return s;
}

TrialTrace run_trial(const bo::ParamVector& p, const SupportConfig& sup, const TrialConfig& cfg, std::uint64_t seed) {
    if (!sup.valid()) throw std::invalid_argument("invalid support configuration");
    if (!cfg.controller.valid() || !cfg.model.valid()) throw std::invalid_argument("invalid trial configuration");
    if (!(cfg.physics_dt > 0.0 && cfg.control_dt >= cfg.physics_dt && cfg.duration_s > 0.0))
        throw std::invalid_argument("invalid trial timing");

    const auto substeps = static_cast<int>(std::llround(cfg.control_dt / cfg.physics_dt));
    const auto periods = static_cast<int>(std::llround(cfg.duration_s / cfg.control_dt));

    TrialTrace trace;
    trace.dt = cfg.control_dt;
    trace.duration = cfg.duration_s;
    trace.samples.reserve(static_cast<std::size_t>(periods) + 1);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    auto measure = [&](const BodyState& body) {
        control::ImuReading imu = imu_of(body);
        if (cfg.sim.imu_noise) {
            imu.pitch += cfg.sim.imu_sigma_angle * noise(rng);
            imu.roll += cfg.sim.imu_sigma_angle * noise(rng);
            imu.pitch_rate += cfg.sim.imu_sigma_rate * noise(rng);
            imu.roll_rate += cfg.sim.imu_sigma_rate * noise(rng);
        }
        return imu;
    };

    SimState state = standing_start(cfg);
    JointTargets command = state.joints;
    SensorReadings sensors = read_sensors(state, cfg.model, sup, cfg.sim);
    trace.samples.push_back({0.0, state.body, command, state.joints, sensors});

    const double tilt_limit = sup.enabled ? std::numbers::pi / 2 : cfg.fall_angle;
    for (int k = 0; k < periods; ++k) {
        const double t = k * cfg.control_dt;
        try {
            command = control::controller_step(t, measure(state.body), p, cfg.controller, cfg.model.geometry);
        } catch (const control::OutOfReach&) {
            trace.termination = Termination::ik_failure;
            return trace;
        }

        for (int s = 0; s < substeps; ++s) {
            try {
                sensors = step_dynamics(state, command, cfg.model, sup, cfg.sim, cfg.physics_dt);
            } catch (const NumericalDivergence&) {
                trace.termination = Termination::diverged;
                return trace;
            }
            const Eigen::Vector3d rpy = state.body.rpy();
            if (std::abs(rpy.x()) >= tilt_limit || std::abs(rpy.y()) >= tilt_limit) {
                const double t_fall = t + (s + 1) * cfg.physics_dt;
                trace.samples.push_back({t_fall, state.body, command, state.joints, sensors});
                trace.termination = Termination::fell;
                return trace;
            }
        }
        trace.samples.push_back({(k + 1) * cfg.control_dt, state.body, command, state.joints, sensors});
    }
    return trace;
}

}  // namespace trotbo::sim
