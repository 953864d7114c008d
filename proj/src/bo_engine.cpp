#include "trotbo/bo_engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace trotbo::bo {

namespace {

// Independent streams derived from one user seed.
enum Stream : std::uint64_t {
    kDesignStream = 1,
    kHaltonShiftStream = 2,
    kLocalStream = 3,
    kFallbackStream = 4,
    kRandomSearchStream = 5,
};

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), 0x5eedu};
    return std::mt19937_64(seq);
}

constexpr std::array<int, 10> kPrimes{2, 3, 5, 7, 11, 13, 17, 19, 23, 29};

double radical_inverse(std::uint64_t index, int base) {
    double result = 0.0;
    double f = 1.0 / base;
    while (index > 0) {
        result += f * static_cast<double>(index % static_cast<std::uint64_t>(base));
        index /= static_cast<std::uint64_t>(base);
        f /= base;
    }
    return result;
}

// Halton points with a seeded Cranley-Patterson rotation, in [0,1)^dim.
std::vector<Eigen::VectorXd> rotated_halton(int n, Eigen::Index dim, std::uint64_t seed) {
    if (dim > static_cast<Eigen::Index>(kPrimes.size()))
        throw std::invalid_argument("quasi-random design supports at most 10 dimensions");
    auto rng = make_rng(seed, kHaltonShiftStream);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Eigen::VectorXd shift(dim);
    for (Eigen::Index d = 0; d < dim; ++d) shift[d] = unif(rng);

    std::vector<Eigen::VectorXd> pts;
    pts.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        Eigen::VectorXd u(dim);
        for (Eigen::Index d = 0; d < dim; ++d) {
            const double h = radical_inverse(static_cast<std::uint64_t>(i) + 1, kPrimes[static_cast<std::size_t>(d)]);
            u[d] = std::fmod(h + shift[d], 1.0);
        }
        pts.push_back(std::move(u));
    }
    return pts;
}

std::uint64_t iteration_seed(std::uint64_t seed, int iteration) {
    return seed * 0x9E3779B97F4A7C15ull + static_cast<std::uint64_t>(iteration);
}

}  // namespace

// ---------------------------------------------------------------------------

Eigen::VectorXd ParamVector::as_vector() const {
    const auto a = as_array();
    return Eigen::Map<const Eigen::VectorXd>(a.data(), kNumParams);
}

ParamVector ParamVector::from_vector(const Eigen::VectorXd& v) {
    if (v.size() != kNumParams) throw std::invalid_argument("parameter vector must have 5 entries");
    return {v[0], v[1], v[2], v[3], v[4]};
}

bool Bounds::valid() const {
    for (int d = 0; d < kNumParams; ++d) {
        if (!(lower[d] < upper[d])) return false;
    }
    return true;
}

bool Bounds::contains(const ParamVector& p) const {
    const auto a = p.as_array();
    for (int d = 0; d < kNumParams; ++d) {
        if (!(a[d] >= lower[d] && a[d] <= upper[d])) return false;
    }
    return true;
}

Eigen::VectorXd Bounds::normalize(const ParamVector& p) const {
    const auto a = p.as_array();
    Eigen::VectorXd u(kNumParams);
    for (int d = 0; d < kNumParams; ++d) u[d] = std::clamp((a[d] - lower[d]) / (upper[d] - lower[d]), 0.0, 1.0);
    return u;
}

ParamVector Bounds::denormalize(const Eigen::VectorXd& u) const {
    std::array<double, kNumParams> a{};
    for (int d = 0; d < kNumParams; ++d) {
        const double t = std::clamp(u[d], 0.0, 1.0);
        a[d] = std::clamp(lower[d] + t * (upper[d] - lower[d]), lower[d], upper[d]);
    }
    return ParamVector::from_array(a);
}

// ---------------------------------------------------------------------------

void OptimizationHistory::append(HistoryRecord r) {
    if (r.iteration != static_cast<int>(records_.size()) + 1)
        throw std::invalid_argument("history iterations must be contiguous from 1");
    records_.push_back(r);
}

std::vector<double> OptimizationHistory::best_so_far() const {
    std::vector<double> best;
    best.reserve(records_.size());
    double running = -std::numeric_limits<double>::infinity();
    for (const auto& r : records_) {
        running = std::max(running, r.fitness);
        best.push_back(running);
    }
    return best;
}

std::size_t OptimizationHistory::argmax(std::size_t limit) const {
    if (records_.empty()) throw std::out_of_range("argmax of an empty history");
    const std::size_t n = std::min(limit, records_.size());
    std::size_t best = 0;
    for (std::size_t i = 1; i < n; ++i) {
        if (records_[i].fitness > records_[best].fitness) best = i;
    }
    return best;
}

ObjectiveFailure::ObjectiveFailure(int iteration, OptimizationHistory partial, const std::string& what)
    : std::runtime_error("objective failed at iteration " + std::to_string(iteration) + ": " + what),
      iteration_(iteration),
      partial_(std::move(partial)),
      cause_(what) {}

// ---------------------------------------------------------------------------

std::vector<ParamVector> initial_design(int n, const Bounds& bounds, std::uint64_t seed, DesignKind kind) {
    if (n < 1) throw std::invalid_argument("initial design needs at least one point");
    if (!bounds.valid()) throw std::invalid_argument("invalid bounds");

    std::vector<ParamVector> out;
    out.reserve(static_cast<std::size_t>(n));
    if (kind == DesignKind::quasi_random) {
        for (const auto& u : rotated_halton(n, kNumParams, seed ^ kDesignStream)) out.push_back(bounds.denormalize(u));
    } else {
        auto rng = make_rng(seed, kDesignStream);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        for (int i = 0; i < n; ++i) {
            Eigen::VectorXd u(kNumParams);
            for (int d = 0; d < kNumParams; ++d) u[d] = unif(rng);
            out.push_back(bounds.denormalize(u));
        }
    }
    return out;
}

double ucb_score(double mean, double variance, double kappa) {
    return mean + kappa * std::sqrt(std::max(0.0, variance));
}

std::vector<Eigen::VectorXd> candidate_set(const gp::GPModel& model, const Settings& settings, std::uint64_t seed) {
    const Eigen::Index dim = model.data().dim();
    std::vector<Eigen::VectorXd> cands = rotated_halton(settings.n_candidates, dim, seed);
    if (model.empty() || settings.n_local_candidates <= 0) return cands;

    const auto& targets = model.data().targets();
    const auto best = static_cast<std::size_t>(std::max_element(targets.begin(), targets.end()) - targets.begin());
    const Eigen::VectorXd& incumbent = model.data().inputs()[best];

    auto rng = make_rng(seed, kLocalStream);
    std::normal_distribution<double> gauss(0.0, settings.local_sigma_frac);
    cands.reserve(cands.size() + static_cast<std::size_t>(settings.n_local_candidates));
    for (int i = 0; i < settings.n_local_candidates; ++i) {
        Eigen::VectorXd u(dim);
        for (Eigen::Index d = 0; d < dim; ++d) u[d] = std::clamp(incumbent[d] + gauss(rng), 0.0, 1.0);
        cands.push_back(std::move(u));
    }
    return cands;
}

ParamVector propose_next(const gp::GPModel& model, const Settings& settings, std::uint64_t seed) {
    if (model.empty()) {
        auto rng = make_rng(seed, kFallbackStream);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        Eigen::VectorXd u(kNumParams);
        for (int d = 0; d < kNumParams; ++d) u[d] = unif(rng);
        return settings.bounds.denormalize(u);
    }

    const auto cands = candidate_set(model, settings, seed);
    std::size_t best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < cands.size(); ++i) {
        const auto pred = gp::posterior_predict(model, cands[i]);
        const double s = ucb_score(pred.mean, pred.variance, settings.kappa);
        if (s > best_score) {
            best_score = s;
            best = i;
        }
    }
    return settings.bounds.denormalize(cands[best]);
}

gp::GPModel fit_surrogate(const OptimizationHistory& history, const Settings& settings) {
    gp::Dataset data(kNumParams);
    for (const auto& r : history.records()) data.add(settings.bounds.normalize(r.params), r.fitness);
    const gp::KernelParams kp = settings.refit_hyperparameters
                                    ? gp::select_hyperparameters(data, gp::HyperGrid::standard(), kNumParams)
                                    : settings.kernel;
    return gp::fit(data, kp);
}

OptimizationHistory run_bo_loop(const Objective& objective, int n_iter, const Settings& settings,
                                std::uint64_t seed) {
    if (settings.n_init < 1) throw std::invalid_argument("n_init must be at least 1");
    if (n_iter < settings.n_init) throw std::invalid_argument("n_iter must be at least n_init");

    const auto design = initial_design(settings.n_init, settings.bounds, seed, settings.design);
    OptimizationHistory history;
    for (int it = 1; it <= n_iter; ++it) {
        const auto start = std::chrono::steady_clock::now();
        ParamVector p;
        if (it <= settings.n_init) {
            p = design[static_cast<std::size_t>(it - 1)];
        } else {
            p = propose_next(fit_surrogate(history, settings), settings, iteration_seed(seed, it));
        }

        double fitness = 0.0;
        try {
            fitness = objective(p, it);
        } catch (const std::exception& e) {
            throw ObjectiveFailure(it, history, e.what());
        }
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        history.append({it, p, std::nullopt, fitness, wall});
    }
    return history;
}

OptimizationHistory run_random_search(const Objective& objective, int n_iter, const Bounds& bounds,
                                      std::uint64_t seed) {
    auto rng = make_rng(seed, kRandomSearchStream);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    OptimizationHistory history;
    for (int it = 1; it <= n_iter; ++it) {
        Eigen::VectorXd u(kNumParams);
        for (int d = 0; d < kNumParams; ++d) u[d] = unif(rng);
        const ParamVector p = bounds.denormalize(u);
        history.append({it, p, std::nullopt, objective(p, it), 0.0});
    }
    return history;
}

}  // namespace trotbo::bo
