#pragma once

#include "trotbo/bo_engine.hpp"

#include <cstdint>
#include <string_view>
#include <vector>

namespace trotbo::bench {

/// Synthetic objectives over the gait-parameter box, both maximized.
enum class BenchObjective { quad1d, sphere5d };

[[nodiscard]] BenchObjective parse_objective(std::string_view s);

/// quad1d: -(x0 - 90)^2, optimum 0 at x0 = 90 mm.
/// sphere5d: -sum_d ((x_d - c_d) / range_d)^2 with c the reference gait below.
[[nodiscard]] double evaluate(BenchObjective obj, const bo::ParamVector& p);
[[nodiscard]] bo::ParamVector optimum(BenchObjective obj);

struct SeedOutcome {
    std::uint64_t seed = 0;
    double bo_best = 0.0;
    bo::ParamVector bo_best_params;
    /// First evaluation whose best-so-far entered the success region, or 0.
    int bo_evals_to_success = 0;
    double random_best = 0.0;
    bo::ParamVector random_best_params;
    int random_evals_to_success = 0;
    bool bo_curve_monotone = true;
    bool random_curve_monotone = true;
};

struct BenchReport {
    BenchObjective objective = BenchObjective::quad1d;
    int iterations = 0;
    std::vector<SeedOutcome> seeds;

    [[nodiscard]] int bo_successes() const;
    [[nodiscard]] int random_successes() const;
};

/// Success region: |x0 - 90| <= 5 mm for quad1d; objective >= -0.01 for sphere5d.
[[nodiscard]] bool success(BenchObjective obj, const bo::ParamVector& p);

/// Runs BO and uniform random search for seeds first_seed .. first_seed+n_seeds-1.
[[nodiscard]] BenchReport run_bench(BenchObjective obj, int iterations, int n_seeds, std::uint64_t first_seed = 1,
                                    const bo::Settings& settings = {});

}  // namespace trotbo::bench
