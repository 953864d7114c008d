#include "trotbo/scaffold_experiment.hpp"

#include <algorithm>
#include <charconv>
#include <stdexcept>

namespace trotbo::experiment {

Condition parse_condition(std::string_view s) {
    if (s == "min" || s == "minimum") return Condition::minimum;
    if (s == "red" || s == "reducing") return Condition::reducing;
    if (s == "none") return Condition::none;
    throw std::invalid_argument("unknown support condition '" + std::string(s) + "'");
}

std::string_view to_string(Condition c) {
    switch (c) {
        case Condition::minimum: return "min";
        case Condition::reducing: return "red";
        case Condition::none: return "none";
    }
    return "unknown";
}

std::optional<double> schedule_height(Condition condition, int iteration) {
    if (iteration < 1 || iteration > kScheduleLength)
        throw std::out_of_range("schedule iteration " + std::to_string(iteration) + " outside 1..60");
    switch (condition) {
        case Condition::minimum:
            return iteration <= 50 ? 0.39 : 0.325;
        case Condition::reducing:
            if (iteration <= 10) return 0.475;
            if (iteration <= 20) return 0.45;
            if (iteration <= 30) return 0.42;
            if (iteration <= 50) return 0.39;
            return 0.325;
        case Condition::none:
            return std::nullopt;
    }
    return std::nullopt;
}

sim::SupportConfig support_for(Condition condition, int iteration, const sim::SupportConfig& rope) {
    const auto h = schedule_height(condition, iteration);
    sim::SupportConfig sup = rope;
    sup.enabled = h.has_value();
    sup.height_m = h.value_or(0.0);
    return sup;
}

double compute_fitness(const sim::TrialTrace& trace, const sim::RobotModel& model, FitnessMetric metric) {
    if (trace.samples.empty()) throw std::invalid_argument("fitness of an empty trace");
    const double weight = model.weight();
    double sum = 0.0;
    for (const auto& s : trace.samples) {
        const double tension = s.sensors.rope_tension;
        if (metric == FitnessMetric::weight_fraction) {
            sum += std::clamp(1.0 - tension / weight, 0.0, 1.0);
        } else {
            sum += weight / (weight + std::max(0.0, tension));
        }
    }
    const std::size_t n = std::max(trace.expected_samples(), trace.samples.size());
    return sum / static_cast<double>(n);
}

void ExperimentConfig::validate() const {
    if (n_iter < 1) throw std::invalid_argument("n_iter must be positive");
    if (condition != Condition::none && n_iter > kScheduleLength)
        throw std::invalid_argument("supported conditions cover at most 60 iterations");
    if (n_iter < bo.n_init) throw std::invalid_argument("n_iter must be at least n_init");
    if (probe_window < 1) throw std::invalid_argument("probe window must be positive");
    if (!(probe_height_m > 0.0)) throw std::invalid_argument("probe height must be positive");
    if (!bo.bounds.valid()) throw std::invalid_argument("invalid parameter bounds");
    bo.kernel.validate();
}

// ---------------------------------------------------------------------------
// Flat key = value settings

namespace {

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return d;
    } catch (const std::exception&) {
        throw std::invalid_argument("setting '" + key + "': expected a number, got '" + v + "'");
    }
}

long long to_int(const std::string& key, const std::string& v) {
    long long out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size())
        throw std::invalid_argument("setting '" + key + "': expected an integer, got '" + v + "'");
    return out;
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw std::invalid_argument("setting '" + key + "': expected a boolean, got '" + v + "'");
}

using Setter = void (*)(ExperimentConfig&, const std::string& key, const std::string& value);

const std::map<std::string, Setter, std::less<>>& setters() {
    static const std::map<std::string, Setter, std::less<>> table{
        {"condition", [](ExperimentConfig& c, const std::string&, const std::string& v) { c.condition = parse_condition(v); }},
        {"n_iter", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.n_iter = static_cast<int>(to_int(k, v)); }},
        {"seed", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.seed = static_cast<std::uint64_t>(to_int(k, v)); }},
        {"trial_duration_s", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.trial.duration_s = to_double(k, v); }},
        {"physics_dt_s", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.trial.physics_dt = to_double(k, v); }},
        {"control_dt_s", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.trial.control_dt = to_double(k, v); }},
        {"mass_kg", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.trial.model.mass = to_double(k, v); }},
        {"gait_period_s", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.trial.controller.gait_period_s = to_double(k, v); }},
        {"duty_factor", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.trial.controller.duty_factor = to_double(k, v); }},
        {"stand_height_m", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.trial.controller.nominal_stand_height_m = to_double(k, v); }},
        {"correction_limit_rad", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.trial.controller.correction_limit = to_double(k, v); }},
        {"thigh_length_m", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.trial.model.geometry.thigh_length = to_double(k, v); }},
        {"shank_length_m", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.trial.model.geometry.shank_length = to_double(k, v); }},
        {"rope_stiffness", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.rope.stiffness = to_double(k, v); }},
        {"rope_damping", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.rope.damping = to_double(k, v); }},
        {"contact_stiffness", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.trial.sim.contact.stiffness = to_double(k, v); }},
        {"contact_damping", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.trial.sim.contact.damping = to_double(k, v); }},
        {"friction_mu", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.trial.sim.contact.friction_mu = to_double(k, v); }},
        {"friction_viscous", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.trial.sim.contact.viscous_friction = to_double(k, v); }},
        {"servo_time_constant_s", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.trial.sim.servo_time_constant = to_double(k, v); }},
        {"imu_noise", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.trial.sim.imu_noise = to_bool(k, v); }},
        {"n_init", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.bo.n_init = static_cast<int>(to_int(k, v)); }},
        {"kappa", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.bo.kappa = to_double(k, v); }},
        {"n_candidates", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.bo.n_candidates = static_cast<int>(to_int(k, v)); }},
        {"n_local_candidates", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.bo.n_local_candidates = static_cast<int>(to_int(k, v)); }},
        {"local_sigma_frac", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.bo.local_sigma_frac = to_double(k, v); }},
        {"initial_design", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
             if (v == "quasi_random") c.bo.design = bo::DesignKind::quasi_random;
             else if (v == "uniform_random") c.bo.design = bo::DesignKind::uniform_random;
             else throw std::invalid_argument("setting '" + k + "': expected quasi_random or uniform_random");
         }},
        {"refit_hyperparameters", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.bo.refit_hyperparameters = to_bool(k, v); }},
        {"length_scale", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.bo.kernel.length_scales.setConstant(to_double(k, v)); }},
        {"signal_variance", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.bo.kernel.signal_variance = to_double(k, v); }},
        {"noise_variance", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.bo.kernel.noise_variance = to_double(k, v); }},
        {"fitness_metric", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
             if (v == "weight_fraction") c.metric = FitnessMetric::weight_fraction;
             else if (v == "inverse_tension") c.metric = FitnessMetric::inverse_tension;
             else throw std::invalid_argument("setting '" + k + "': expected weight_fraction or inverse_tension");
         }},
        {"probe_window", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.probe_window = static_cast<int>(to_int(k, v)); }},
        {"probe_height_m", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.probe_height_m = to_double(k, v); }},
    };
    return table;
}

}  // namespace

void apply_settings(ExperimentConfig& cfg, const std::map<std::string, std::string>& kv) {
    const auto& table = setters();
    for (const auto& [key, value] : kv) {
        const auto it = table.find(key);
        if (it == table.end()) throw std::invalid_argument("unknown setting '" + key + "'");
        it->second(cfg, key, value);
    }
}

// ---------------------------------------------------------------------------

std::uint64_t trial_seed(std::uint64_t seed, int iteration) {
    return (seed + 1) * 0xD1B54A32D192ED03ull ^ static_cast<std::uint64_t>(iteration);
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const IterationCallback& on_iteration) {
    cfg.validate();

    ExperimentResult result;
    auto height_of = [&](int it) -> std::optional<double> {
        return cfg.condition == Condition::none ? std::nullopt : schedule_height(cfg.condition, it);
    };

    auto objective = [&](const bo::ParamVector& p, int it) {
        const auto h = height_of(it);
        sim::SupportConfig sup = cfg.rope;
        sup.enabled = h.has_value();
        sup.height_m = h.value_or(0.0);
        sim::TrialTrace trace = sim::run_trial(p, sup, cfg.trial, trial_seed(cfg.seed, it));
        const double fitness = compute_fitness(trace, cfg.trial.model, cfg.metric);
        if (on_iteration) on_iteration(bo::HistoryRecord{it, p, h, fitness, 0.0}, trace);
        if (cfg.keep_traces) result.traces.push_back(std::move(trace));
        return fitness;
    };

    try {
        result.history = bo::run_bo_loop(objective, cfg.n_iter, cfg.bo, cfg.seed);
    } catch (const bo::ObjectiveFailure& failure) {
        bo::OptimizationHistory partial = failure.partial_history();
        for (auto& r : partial.mutable_records()) r.support_height_m = height_of(r.iteration);
        throw bo::ObjectiveFailure(failure.iteration(), std::move(partial), failure.cause());
    }
    for (auto& r : result.history.mutable_records()) r.support_height_m = height_of(r.iteration);

    const std::size_t best = result.history.argmax(static_cast<std::size_t>(cfg.probe_window));
    ProbeResult& probe = result.probe;
    probe.source_iteration = result.history.records()[best].iteration;
    probe.params = result.history.records()[best].params;
    probe.height_m = cfg.probe_height_m;
    sim::SupportConfig sup = cfg.rope;
    sup.enabled = true;
    sup.height_m = cfg.probe_height_m;
    probe.trace = sim::run_trial(probe.params, sup, cfg.trial, trial_seed(cfg.seed, 0));
    probe.fitness = compute_fitness(probe.trace, cfg.trial.model, cfg.metric);
    return result;
}

}  // namespace trotbo::experiment
