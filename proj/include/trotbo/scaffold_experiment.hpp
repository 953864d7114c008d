#pragma once

#include "trotbo/bo_engine.hpp"
#include "trotbo/quadruped_sim.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace trotbo::experiment {

enum class Condition { minimum, reducing, none };

/// Accepts "min"/"minimum", "red"/"reducing", "none".
[[nodiscard]] Condition parse_condition(std::string_view s);
[[nodiscard]] std::string_view to_string(Condition c);

inline constexpr int kScheduleLength = 60;

/// Rope rest height for an iteration in 1..60, or nullopt when the rope is
/// disabled. Throws std::out_of_range outside 1..60.
[[nodiscard]] std::optional<double> schedule_height(Condition condition, int iteration);

[[nodiscard]] sim::SupportConfig support_for(Condition condition, int iteration, const sim::SupportConfig& rope);

enum class FitnessMetric { weight_fraction, inverse_tension };

/// Mean over the expected sample count of clamp(1 - tension/(m g), 0, 1).
/// Samples missing because the trial ended early count as zero.
///
/// The inverse_tension alternative averages m g / (m g + tension), which is
/// 1 with a slack rope and 1/2 when the rope carries the whole weight.
[[nodiscard]] double compute_fitness(const sim::TrialTrace& trace, const sim::RobotModel& model,
                                     FitnessMetric metric = FitnessMetric::weight_fraction);

struct ExperimentConfig {
    Condition condition = Condition::reducing;
    int n_iter = kScheduleLength;
    std::uint64_t seed = 0;
    sim::TrialConfig trial;
    sim::SupportConfig rope = sim::SupportConfig::at(0.39);  // height taken from the schedule
    bo::Settings bo;
    FitnessMetric metric = FitnessMetric::weight_fraction;
    /// Re-run the best of the first `probe_window` iterations at `probe_height_m`.
    int probe_window = 50;
    double probe_height_m = 0.325;
    bool keep_traces = true;

    void validate() const;
};

/// Applies flat `key = value` settings. Throws std::invalid_argument on an
/// unknown key or a malformed value.
void apply_settings(ExperimentConfig& cfg, const std::map<std::string, std::string>& kv);

struct ProbeResult {
    int source_iteration = 0;
    bo::ParamVector params;
    double height_m = 0.0;
    double fitness = 0.0;
    sim::TrialTrace trace;
};

struct ExperimentResult {
    bo::OptimizationHistory history;
    std::vector<sim::TrialTrace> traces;  // one per iteration when keep_traces
    ProbeResult probe;
};

using IterationCallback = std::function<void(const bo::HistoryRecord&, const sim::TrialTrace&)>;

/// One continuous BO run across the whole schedule, then the fixed-height
/// probe. On objective failure the rethrown bo::ObjectiveFailure carries the
/// partial history (support heights filled in).
[[nodiscard]] ExperimentResult run_experiment(const ExperimentConfig& cfg, const IterationCallback& on_iteration = {});

/// Deterministic per-iteration trial seed.
[[nodiscard]] std::uint64_t trial_seed(std::uint64_t seed, int iteration);

}  // namespace trotbo::experiment
