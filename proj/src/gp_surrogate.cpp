#include "trotbo/gp_surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>

namespace trotbo::gp {

bool KernelParams::valid() const {
    if (!(signal_variance > 0.0) || !std::isfinite(signal_variance)) return false;
    if (!(noise_variance >= 0.0) || !std::isfinite(noise_variance)) return false;
    if (length_scales.size() == 0) return false;
    return (length_scales.array() > 0.0).all() && length_scales.allFinite();
}

void KernelParams::validate() const {
    if (!valid()) throw std::invalid_argument("invalid kernel parameters");
}

KernelParams KernelParams::defaults(Eigen::Index dim) {
    KernelParams kp;
    kp.length_scales = Eigen::VectorXd::Constant(dim, 0.3);
    return kp;
}

// ---------------------------------------------------------------------------
// Dataset

Dataset::Dataset(std::vector<Eigen::VectorXd> inputs, std::vector<double> targets) {
    if (inputs.size() != targets.size())
        throw std::invalid_argument("dataset inputs and targets differ in length");
    if (!inputs.empty()) dim_ = inputs.front().size();
    for (const auto& x : inputs) check_input(x);
    inputs_ = std::move(inputs);
    targets_ = std::move(targets);
    restandardize();
}

void Dataset::add(const Eigen::VectorXd& x, double y) {
    check_input(x);
    if (!std::isfinite(y)) throw std::invalid_argument("dataset target must be finite");
    inputs_.push_back(x);
    targets_.push_back(y);
    restandardize();
}

void Dataset::check_input(const Eigen::VectorXd& x) const {
    if (x.size() != dim_)
        throw std::invalid_argument("dataset input has dimension " + std::to_string(x.size()) +
                                    ", expected " + std::to_string(dim_));
    for (Eigen::Index d = 0; d < x.size(); ++d) {
        if (!(x[d] >= 0.0 && x[d] <= 1.0))
            throw std::invalid_argument("dataset input outside the unit cube");
    }
}

void Dataset::restandardize() {
    if (targets_.empty()) {
        target_mean_ = 0.0;
        target_std_ = 1.0;
        return;
    }
    const double n = static_cast<double>(targets_.size());
    double mean = 0.0;
    for (double y : targets_) mean += y;
    mean /= n;

    const auto [lo, hi] = std::minmax_element(targets_.begin(), targets_.end());
    double sd = 1.0;
    if (*lo != *hi) {
        double ss = 0.0;
        for (double y : targets_) ss += (y - mean) * (y - mean);
        sd = std::sqrt(ss / n);
        if (!(sd > 0.0)) sd = 1.0;
    }
    target_mean_ = mean;
    target_std_ = sd;
}

Eigen::VectorXd Dataset::standardized_targets() const {
    Eigen::VectorXd y(static_cast<Eigen::Index>(targets_.size()));
    for (std::size_t i = 0; i < targets_.size(); ++i)
        y[static_cast<Eigen::Index>(i)] = (targets_[i] - target_mean_) / target_std_;
    return y;
}

// ---------------------------------------------------------------------------
// Kernel

double kernel_eval(const Eigen::VectorXd& a, const Eigen::VectorXd& b, const KernelParams& kp) {
    const double r2 = ((a - b).array() / kp.length_scales.array()).square().sum();
    return kp.signal_variance * std::exp(-0.5 * r2);
}

Eigen::MatrixXd kernel_matrix(const std::vector<Eigen::VectorXd>& xs, const KernelParams& kp) {
    const auto n = static_cast<Eigen::Index>(xs.size());
    Eigen::MatrixXd k(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        k(i, i) = kp.signal_variance;
        for (Eigen::Index j = 0; j < i; ++j) {
            const double v = kernel_eval(xs[static_cast<std::size_t>(i)], xs[static_cast<std::size_t>(j)], kp);
            k(i, j) = v;
            k(j, i) = v;
        }
    }
    return k;
}

namespace {

struct Factor {
    Eigen::MatrixXd lower;
    double jitter = 0.0;
};

// A factor is accepted only when every squared pivot clears n*eps relative to
// the largest diagonal entry; anything smaller is rounding noise.
std::optional<Eigen::MatrixXd> try_cholesky(const Eigen::MatrixXd& a) {
    Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() != Eigen::Success) return std::nullopt;
    Eigen::MatrixXd l = llt.matrixL();
    if (!l.allFinite()) return std::nullopt;
    const double max_diag = a.diagonal().maxCoeff();
    const double floor = static_cast<double>(a.rows()) * std::numeric_limits<double>::epsilon() * max_diag;
    for (Eigen::Index i = 0; i < l.rows(); ++i) {
        if (!(l(i, i) * l(i, i) > floor)) return std::nullopt;
    }
    return l;
}

Factor factorize(const Dataset& data, const KernelParams& kp, const JitterPolicy& policy) {
    Eigen::MatrixXd k = kernel_matrix(data.inputs(), kp);
    k.diagonal().array() += kp.noise_variance;

    if (auto l = try_cholesky(k)) return {std::move(*l), 0.0};

    for (double jitter = policy.initial; jitter <= policy.max * (1.0 + 1e-12); jitter *= policy.factor) {
        Eigen::MatrixXd kj = k;
        kj.diagonal().array() += jitter;
        if (auto l = try_cholesky(kj)) return {std::move(*l), jitter};
        if (!(policy.factor > 1.0)) break;
    }
    throw FactorizationFailure("kernel matrix is not positive definite after jitter up to " +
                               std::to_string(policy.max) + " (" + std::to_string(data.size()) + " points)");
}

}  // namespace

// ---------------------------------------------------------------------------
// Posterior

GPModel::GPModel(KernelParams kp, Eigen::Index dim) : data_(dim), kernel_(std::move(kp)) {
    kernel_.validate();
}

GPModel fit(const Dataset& data, const KernelParams& kp, const JitterPolicy& jitter) {
    kp.validate();
    if (kp.length_scales.size() != data.dim())
        throw std::invalid_argument("kernel length scales do not match dataset dimension");

    GPModel model(kp, data.dim());
    model.data_ = data;
    if (data.empty()) return model;

    Factor f = factorize(data, kp, jitter);
    const Eigen::VectorXd y = data.standardized_targets();
    const Eigen::VectorXd w = f.lower.triangularView<Eigen::Lower>().solve(y);
    model.alpha_ = f.lower.transpose().triangularView<Eigen::Upper>().solve(w);
    model.chol_ = std::move(f.lower);
    model.jitter_ = f.jitter;
    return model;
}

Prediction posterior_predict(const GPModel& model, const Eigen::VectorXd& x) {
    const Dataset& data = model.data();
    const KernelParams& kp = model.kernel();
    const double scale = data.target_std();

    if (model.empty()) return {data.target_mean(), kp.signal_variance * scale * scale};

    const auto n = static_cast<Eigen::Index>(data.size());
    Eigen::VectorXd kstar(n);
    for (Eigen::Index i = 0; i < n; ++i) kstar[i] = kernel_eval(data.inputs()[static_cast<std::size_t>(i)], x, kp);

    const double mean_std = kstar.dot(model.alpha());
    const Eigen::VectorXd v = model.chol().triangularView<Eigen::Lower>().solve(kstar);
    const double var_std = std::max(0.0, kp.signal_variance - v.squaredNorm());

    return {data.target_mean() + scale * mean_std, var_std * scale * scale};
}

double log_marginal_likelihood(const Dataset& data, const KernelParams& kp, const JitterPolicy& jitter) {
    kp.validate();
    if (data.empty()) throw std::invalid_argument("log marginal likelihood needs at least one observation");

    const Factor f = factorize(data, kp, jitter);
    const Eigen::VectorXd y = data.standardized_targets();
    const Eigen::VectorXd w = f.lower.triangularView<Eigen::Lower>().solve(y);
    const double n = static_cast<double>(data.size());
    return -0.5 * w.squaredNorm() - f.lower.diagonal().array().log().sum() -
           0.5 * n * std::log(2.0 * std::numbers::pi);
}

// ---------------------------------------------------------------------------
// Hyperparameter grid

namespace {
std::vector<double> logspace(double lo, double hi, int n) {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(n));
    const double a = std::log10(lo);
    const double b = std::log10(hi);
    for (int i = 0; i < n; ++i) out.push_back(std::pow(10.0, a + (b - a) * i / (n - 1)));
    return out;
}
}  // namespace

HyperGrid HyperGrid::standard() {
    return {logspace(0.1, 10.0, 5), logspace(0.05, 1.0, 5), logspace(1e-6, 1e-1, 5)};
}

KernelParams select_hyperparameters(const Dataset& data, const HyperGrid& grid, Eigen::Index dim) {
    KernelParams best = KernelParams::defaults(dim);
    if (data.empty()) return best;

    double best_lml = -std::numeric_limits<double>::infinity();
    for (double sv : grid.signal_variances) {
        for (double ls : grid.length_scales) {
            for (double nv : grid.noise_variances) {
                KernelParams kp{sv, Eigen::VectorXd::Constant(dim, ls), nv};
                double lml = 0.0;
                try {
                    lml = log_marginal_likelihood(data, kp);
                } catch (const FactorizationFailure&) {
                    continue;
                }
                if (lml > best_lml) {
                    best_lml = lml;
                    best = kp;
                }
            }
        }
    }
    return best;
}

}  // namespace trotbo::gp
