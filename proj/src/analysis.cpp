#include "trotbo/analysis.hpp"

#include "trotbo/scaffold_experiment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace trotbo::analysis {

double vertical_delta(std::span<const double> z) {
    if (z.empty()) throw EmptySeries("vertical delta of an empty series");
    const auto [lo, hi] = std::minmax_element(z.begin(), z.end());
    return *hi - *lo;
}

std::vector<double> autocorrelation(std::span<const double> signal, std::size_t max_lag) {
    const std::size_t n = signal.size();
    if (n == 0) throw EmptySeries("autocorrelation of an empty series");
    max_lag = std::min(max_lag, n - 1);
    const double mean = std::accumulate(signal.begin(), signal.end(), 0.0) / static_cast<double>(n);

    std::vector<double> centered(signal.begin(), signal.end());
    for (double& v : centered) v -= mean;

    std::vector<double> acf(max_lag + 1, 0.0);
    for (std::size_t k = 0; k <= max_lag; ++k) {
        double s = 0.0;
        for (std::size_t i = 0; i + k < n; ++i) s += centered[i] * centered[i + k];
        acf[k] = s / static_cast<double>(n - k);
    }
    const double r0 = acf[0];
    if (!(r0 > 0.0)) return std::vector<double>(max_lag + 1, 0.0);
    for (double& v : acf) v /= r0;
    return acf;
}

std::optional<double> estimate_period(std::span<const double> signal, double dt, const PeriodOptions& opts) {
    if (!(dt > 0.0)) throw std::invalid_argument("sample interval must be positive");
    const double span_s = static_cast<double>(signal.size()) * dt;
    if (span_s < opts.min_duration_s - 1e-9)
        throw TooShort("period estimation needs at least " + std::to_string(opts.min_duration_s) + " s of signal");

    const std::size_t max_lag = signal.size() / 2;
    const auto acf = autocorrelation(signal, max_lag);
    if (acf[0] == 0.0) return std::nullopt;  // constant signal

    const auto min_lag = static_cast<std::size_t>(std::ceil(opts.min_lag_s / dt));
    for (std::size_t k = std::max<std::size_t>(min_lag, 1); k + 1 < acf.size(); ++k) {
        if (!(acf[k] > acf[k - 1] && acf[k] >= acf[k + 1])) continue;

        // Prominence: height above the higher of the two bases, each base being
        // the lowest point before the signal climbs above this peak.
        double left_min = acf[k];
        for (std::size_t j = k; j-- > 0;) {
            if (acf[j] > acf[k]) break;
            left_min = std::min(left_min, acf[j]);
        }
        double right_min = acf[k];
        for (std::size_t j = k + 1; j < acf.size(); ++j) {
            if (acf[j] > acf[k]) break;
            right_min = std::min(right_min, acf[j]);
        }
        const double prominence = acf[k] - std::max(left_min, right_min);
        if (prominence < opts.min_prominence) continue;

        const double y0 = acf[k - 1];
        const double y1 = acf[k];
        const double y2 = acf[k + 1];
        const double denom = y0 - 2.0 * y1 + y2;
        const double shift = denom < 0.0 ? 0.5 * (y0 - y2) / denom : 0.0;
        return (static_cast<double>(k) + std::clamp(shift, -0.5, 0.5)) * dt;
    }
    return std::nullopt;
}

TraceMetrics trace_metrics(const sim::TrialTrace& trace, const sim::RobotModel& model) {
    TraceMetrics m;
    std::vector<double> z;
    z.reserve(trace.samples.size());
    for (const auto& s : trace.samples) z.push_back(s.body.position.z());
    m.vertical_delta = vertical_delta(z);
    if (static_cast<double>(z.size()) * trace.dt >= PeriodOptions{}.min_duration_s)
        m.dominant_period = estimate_period(z, trace.dt);
    m.mean_fitness = experiment::compute_fitness(trace, model);
    m.termination = std::string(sim::to_string(trace.termination));
    return m;
}

}  // namespace trotbo::analysis
