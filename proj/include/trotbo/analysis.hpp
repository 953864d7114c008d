#pragma once

#include "trotbo/quadruped_sim.hpp"

#include <optional>
#include <span>
#include <stdexcept>
#include <string>

namespace trotbo::analysis {

class EmptySeries : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class TooShort : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct TraceMetrics {
    double vertical_delta = 0.0;
    std::optional<double> dominant_period;
    double mean_fitness = 0.0;
    std::string termination;
};

/// max - min of the series.
[[nodiscard]] double vertical_delta(std::span<const double> z);

struct PeriodOptions {
    /// Minimum peak prominence, as a fraction of the zero-lag autocorrelation.
    double min_prominence = 0.3;
    double min_lag_s = 0.5;
    double min_duration_s = 4.0;
};

/// Lag of the first prominent autocorrelation peak in [min_lag, duration/2],
/// refined by parabolic interpolation; nullopt when the signal is aperiodic.
/// Throws TooShort when the signal spans less than min_duration_s.
[[nodiscard]] std::optional<double> estimate_period(std::span<const double> signal, double dt,
                                                    const PeriodOptions& opts = {});

/// Normalized autocorrelation r(k)/r(0) for lags 0..max_lag with the mean
/// removed, each lag averaged over its own overlap (unbiased).
[[nodiscard]] std::vector<double> autocorrelation(std::span<const double> signal, std::size_t max_lag);

[[nodiscard]] TraceMetrics trace_metrics(const sim::TrialTrace& trace, const sim::RobotModel& model);

}  // namespace trotbo::analysis
