#pragma once

#include "trotbo/gp_surrogate.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <stdexcept>
#include <vector>

namespace trotbo::bo {

inline constexpr int kNumParams = 5;

/// The five searched gait-controller parameters.
struct ParamVector {
    double hop_height_mm = 90.0;  // x0
    double pitch_kp = 0.0;        // x1
    double pitch_kv = 0.0;        // x2
    double roll_kp = 0.0;         // x3
    double roll_kv = 0.0;         // x4

    [[nodiscard]] std::array<double, kNumParams> as_array() const {
        return {hop_height_mm, pitch_kp, pitch_kv, roll_kp, roll_kv};
    }
    [[nodiscard]] Eigen::VectorXd as_vector() const;
    static ParamVector from_array(const std::array<double, kNumParams>& a) {
        return {a[0], a[1], a[2], a[3], a[4]};
    }
    static ParamVector from_vector(const Eigen::VectorXd& v);

    friend bool operator==(const ParamVector&, const ParamVector&) = default;
};

struct Bounds {
    std::array<double, kNumParams> lower{60.0, -1.0, -1.0, -1.0, -1.0};
    std::array<double, kNumParams> upper{120.0, 1.0, 1.0, 1.0, 1.0};

    /// Hopping height in [60,120] mm, all four gains in [-1,1].
    static Bounds table_defaults() { return {}; }

    [[nodiscard]] bool valid() const;
    [[nodiscard]] bool contains(const ParamVector& p) const;
    [[nodiscard]] Eigen::VectorXd normalize(const ParamVector& p) const;
    [[nodiscard]] ParamVector denormalize(const Eigen::VectorXd& u) const;
};

enum class DesignKind { quasi_random, uniform_random };

struct Settings {
    int n_init = 5;
    double kappa = 2.0;
    int n_candidates = 2048;
    int n_local_candidates = 256;
    double local_sigma_frac = 0.05;
    DesignKind design = DesignKind::quasi_random;
    bool refit_hyperparameters = false;
    gp::KernelParams kernel = gp::KernelParams::defaults();
    Bounds bounds = Bounds::table_defaults();
};

struct HistoryRecord {
    int iteration = 0;  // 1-based
    ParamVector params;
    std::optional<double> support_height_m;  // nullopt when no support
    double fitness = 0.0;
    double wall_time_s = 0.0;
};

class OptimizationHistory {
public:
    /// Appends a record; its iteration must be size()+1.
    void append(HistoryRecord r);

    [[nodiscard]] const std::vector<HistoryRecord>& records() const { return records_; }
    [[nodiscard]] std::vector<HistoryRecord>& mutable_records() { return records_; }
    [[nodiscard]] std::size_t size() const { return records_.size(); }
    [[nodiscard]] bool empty() const { return records_.empty(); }

    /// Running maximum of fitness.
    [[nodiscard]] std::vector<double> best_so_far() const;
    /// Index of the best record among the first `limit` (ties keep the earliest).
    [[nodiscard]] std::size_t argmax(std::size_t limit) const;

private:
    std::vector<HistoryRecord> records_;
};

/// Raised by run_bo_loop when the objective throws. Carries the iteration at
/// which the failure happened and the history gathered up to that point.
class ObjectiveFailure : public std::runtime_error {
public:
    ObjectiveFailure(int iteration, OptimizationHistory partial, const std::string& what);
    [[nodiscard]] int iteration() const { return iteration_; }
    [[nodiscard]] const OptimizationHistory& partial_history() const { return partial_; }
    /// The objective's own error message.
    [[nodiscard]] const std::string& cause() const { return cause_; }

private:
    int iteration_;
    OptimizationHistory partial_;
    std::string cause_;
};

using Objective = std::function<double(const ParamVector&, int iteration)>;

[[nodiscard]] std::vector<ParamVector> initial_design(int n, const Bounds& bounds, std::uint64_t seed,
                                                      DesignKind kind = DesignKind::quasi_random);

[[nodiscard]] double ucb_score(double mean, double variance, double kappa);

/// Deterministic candidate set (normalized coordinates) scored by propose_next:
/// `n_candidates` rotated-Halton points followed by `n_local` Gaussian
/// perturbations of the incumbent, clipped to the unit cube. The local block
/// is empty when the model has no observations.
[[nodiscard]] std::vector<Eigen::VectorXd> candidate_set(const gp::GPModel& model, const Settings& settings,
                                                         std::uint64_t seed);

/// Argmax of UCB over candidate_set (lowest index wins ties). An empty model
/// yields a single seeded random point.
[[nodiscard]] ParamVector propose_next(const gp::GPModel& model, const Settings& settings, std::uint64_t seed);

/// Fits the surrogate (with optional evidence-grid refit) to the history.
[[nodiscard]] gp::GPModel fit_surrogate(const OptimizationHistory& history, const Settings& settings);

[[nodiscard]] OptimizationHistory run_bo_loop(const Objective& objective, int n_iter, const Settings& settings,
                                              std::uint64_t seed);

/// Uniform random search with the same budget; the baseline for bo-bench.
[[nodiscard]] OptimizationHistory run_random_search(const Objective& objective, int n_iter, const Bounds& bounds,
                                                    std::uint64_t seed);

}  // namespace trotbo::bo
