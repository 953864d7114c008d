#include "trotbo/bench.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace trotbo::bench {

BenchObjective parse_objective(std::string_view s) {
    if (s == "quad1d") return BenchObjective::quad1d;
    if (s == "sphere5d") return BenchObjective::sphere5d;
    throw std::invalid_argument("unknown benchmark objective '" + std::string(s) + "'");
}

bo::ParamVector optimum(BenchObjective obj) {
    if (obj == BenchObjective::quad1d) return {90.0, 0.0, 0.0, 0.0, 0.0};
    return {78.0, -0.08, 0.17, 0.49, -0.05};
}

double evaluate(BenchObjective obj, const bo::ParamVector& p) {
    if (obj == BenchObjective::quad1d) return -(p.hop_height_mm - 90.0) * (p.hop_height_mm - 90.0);
    const bo::Bounds b = bo::Bounds::table_defaults();
    const auto x = p.as_array();
    const auto c = optimum(obj).as_array();
    double s = 0.0;
    for (std::size_t d = 0; d < x.size(); ++d) {
        const double u = (x[d] - c[d]) / (b.upper[d] - b.lower[d]);
        s += u * u;
    }
    return -s;
}

bool success(BenchObjective obj, const bo::ParamVector& p) {
    if (obj == BenchObjective::quad1d) return std::abs(p.hop_height_mm - 90.0) <= 5.0;
    return evaluate(obj, p) >= -0.01;
}

int BenchReport::bo_successes() const {
    int n = 0;
    for (const auto& s : seeds) n += s.bo_evals_to_success > 0 ? 1 : 0;
    return n;
}

int BenchReport::random_successes() const {
    int n = 0;
    for (const auto& s : seeds) n += s.random_evals_to_success > 0 ? 1 : 0;
    return n;
}

namespace {

struct Summary {
    double best = 0.0;
    bo::ParamVector params;
    int evals_to_success = 0;
    bool monotone = true;
};

Summary summarize(BenchObjective obj, const bo::OptimizationHistory& h) {
    Summary s;
    const auto curve = h.best_so_far();
    for (std::size_t i = 1; i < curve.size(); ++i) s.monotone = s.monotone && curve[i] >= curve[i - 1];
    const std::size_t best = h.argmax(h.size());
    s.best = h.records()[best].fitness;
    s.params = h.records()[best].params;
    for (const auto& r : h.records()) {
        if (success(obj, r.params)) {
            s.evals_to_success = r.iteration;
            break;
        }
    }
    return s;
}

}  // namespace

BenchReport run_bench(BenchObjective obj, int iterations, int n_seeds, std::uint64_t first_seed,
                      const bo::Settings& settings) {
    BenchReport report;
    report.objective = obj;
    report.iterations = iterations;
    auto f = [obj](const bo::ParamVector& p, int) { return evaluate(obj, p); };
    for (int k = 0; k < n_seeds; ++k) {
        const std::uint64_t seed = first_seed + static_cast<std::uint64_t>(k);
        const Summary b = summarize(obj, bo::run_bo_loop(f, iterations, settings, seed));
        const Summary r = summarize(obj, bo::run_random_search(f, iterations, settings.bounds, seed));
        report.seeds.push_back({seed, b.best, b.params, b.evals_to_success, r.best, r.params, r.evals_to_success,
                                b.monotone, r.monotone});
    }
    return report;
}

}  // namespace trotbo::bench
