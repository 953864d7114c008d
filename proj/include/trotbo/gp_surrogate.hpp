#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <vector>

namespace trotbo::gp {

/// Raised when K + noise*I cannot be factorized even after the jitter ladder.
class FactorizationFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Squared-exponential ARD kernel hyperparameters.
struct KernelParams {
    double signal_variance = 1.0;
    Eigen::VectorXd length_scales = Eigen::VectorXd::Constant(5, 0.3);
    double noise_variance = 1e-4;

    [[nodiscard]] bool valid() const;
    /// Throws std::invalid_argument unless valid().
    void validate() const;

    static KernelParams defaults(Eigen::Index dim = 5);
};

/// Jitter added to the diagonal when the first factorization attempt fails.
struct JitterPolicy {
    double initial = 1e-10;
    double factor = 10.0;
    double max = 1e-4;
};

/// Observation history in normalized input space.
///
/// Targets are kept in raw fitness units; the standardization constants are
/// recomputed on every mutation so the GP always works on zero-mean,
/// unit-variance targets.
class Dataset {
public:
    Dataset() = default;
    explicit Dataset(Eigen::Index dim) : dim_(dim) {}
    Dataset(std::vector<Eigen::VectorXd> inputs, std::vector<double> targets);

    void add(const Eigen::VectorXd& x, double y);

    [[nodiscard]] Eigen::Index dim() const { return dim_; }
    [[nodiscard]] std::size_t size() const { return targets_.size(); }
    [[nodiscard]] bool empty() const { return targets_.empty(); }

    [[nodiscard]] const std::vector<Eigen::VectorXd>& inputs() const { return inputs_; }
    [[nodiscard]] const std::vector<double>& targets() const { return targets_; }
    [[nodiscard]] double target_mean() const { return target_mean_; }
    [[nodiscard]] double target_std() const { return target_std_; }

    [[nodiscard]] Eigen::VectorXd standardized_targets() const;

private:
    void check_input(const Eigen::VectorXd& x) const;
    void restandardize();

    Eigen::Index dim_ = 5;
    std::vector<Eigen::VectorXd> inputs_;
    std::vector<double> targets_;
    double target_mean_ = 0.0;
    double target_std_ = 1.0;
};

struct Prediction {
    double mean = 0.0;
    double variance = 0.0;
};

[[nodiscard]] double kernel_eval(const Eigen::VectorXd& a, const Eigen::VectorXd& b, const KernelParams& kp);

/// Dense kernel matrix K(X, X) without the noise term.
[[nodiscard]] Eigen::MatrixXd kernel_matrix(const std::vector<Eigen::VectorXd>& xs, const KernelParams& kp);

/// Fitted GP posterior. Immutable once built, so concurrent queries are safe.
class GPModel {
public:
    /// Prior-only model (no observations).
    explicit GPModel(KernelParams kp = KernelParams::defaults(), Eigen::Index dim = 5);

    [[nodiscard]] const Dataset& data() const { return data_; }
    [[nodiscard]] const KernelParams& kernel() const { return kernel_; }
    [[nodiscard]] const Eigen::MatrixXd& chol() const { return chol_; }
    [[nodiscard]] const Eigen::VectorXd& alpha() const { return alpha_; }
    /// Diagonal jitter that was needed on top of the noise variance.
    [[nodiscard]] double jitter() const { return jitter_; }
    [[nodiscard]] bool empty() const { return data_.empty(); }

    friend GPModel fit(const Dataset& data, const KernelParams& kp, const JitterPolicy& jitter);

private:
    Dataset data_;
    KernelParams kernel_;
    Eigen::MatrixXd chol_;
    Eigen::VectorXd alpha_;
    double jitter_ = 0.0;
};

[[nodiscard]] GPModel fit(const Dataset& data, const KernelParams& kp, const JitterPolicy& jitter = {});

/// Posterior mean and latent variance at x, in raw target units.
[[nodiscard]] Prediction posterior_predict(const GPModel& model, const Eigen::VectorXd& x);

/// log p(y | X, kp) on standardized targets.
[[nodiscard]] double log_marginal_likelihood(const Dataset& data, const KernelParams& kp,
                                             const JitterPolicy& jitter = {});

/// Candidate grid for the optional evidence-maximizing refit.
struct HyperGrid {
    std::vector<double> signal_variances;
    std::vector<double> length_scales;
    std::vector<double> noise_variances;

    /// 5x5x5 log-spaced grid.
    static HyperGrid standard();
};

/// Grid point with the highest log marginal likelihood. Length scales are
/// isotropic across dimensions. Ties keep the first grid point visited.
[[nodiscard]] KernelParams select_hyperparameters(const Dataset& data, const HyperGrid& grid,
                                                  Eigen::Index dim);

}  // namespace trotbo::gp
