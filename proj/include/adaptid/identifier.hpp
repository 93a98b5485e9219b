#pragma once

// Sliding-window Gram integral and the gradient-flow update law for the
// unknown coefficients.

#include <vector>

#include <Eigen/Core>

#include "adaptid/coeffs.hpp"
#include "adaptid/filters.hpp"

namespace adaptid {

/// M(t) = int_{t-T}^{t} phi phi^T over a window of fixed length T, sampled
/// every dt, with phi = 0 before the first sample. The trapezoid rule is
/// used on whole intervals; the partial interval at the trailing edge uses
/// a linearly interpolated phi.
class GramWindow {
public:
    static constexpr long long kRecomputeEvery = 100000;

    GramWindow() = default;
    GramWindow(int dim, double span, double dt);

    /// Append phi(t_k) for the next sample time t_k = k dt (k = 0, 1, ...).
    void push(const Eigen::VectorXd& phi);

    [[nodiscard]] const Eigen::MatrixXd& gram() const { return gram_; }
    /// From-scratch trapezoid over the stored samples.
    [[nodiscard]] Eigen::MatrixXd recompute() const;

    [[nodiscard]] int dim() const { return dim_; }
    [[nodiscard]] double span() const { return span_; }
    [[nodiscard]] double dt() const { return dt_; }
    [[nodiscard]] long long count() const { return count_; }
    [[nodiscard]] std::size_t capacity() const { return ring_.size(); }

private:
    // Sample `back` steps before the newest one (zero if not yet recorded).
    [[nodiscard]] const Eigen::VectorXd& sample(long long back) const;
    [[nodiscard]] Eigen::MatrixXd assemble(const Eigen::MatrixXd& sum) const;

    int dim_ = 0;
    double span_ = 0.0;
    double dt_ = 0.0;
    long long whole_ = 0;  // whole intervals in the window
    double frac_ = 0.0;    // trailing partial interval, in units of dt
    std::vector<Eigen::VectorXd> ring_;
    Eigen::VectorXd zero_;
    std::size_t head_ = 0;
    long long count_ = 0;
    Eigen::MatrixXd sum_;  // sum of phi phi^T over the samples back = 0..whole_
    Eigen::MatrixXd gram_;
};

enum class UpdateScheme { Exponential, RK4 };

class Estimator {
public:
    /// Throws std::invalid_argument if gamma <= 0, alpha0 has the wrong size
    /// or the window parameters are invalid.
    Estimator(CoeffModel model, double gamma, Eigen::VectorXd alpha0, double omega, double dt,
              UpdateScheme scheme = UpdateScheme::Exponential);

    /// Push the regressor for the new time and advance alpha over dt with M
    /// frozen at its new value. Throws GuardError on divergence.
    void step(const Regressor& reg);

    /// J = beta_bar^T M beta_bar.
    [[nodiscard]] double cost() const;
    /// dJ/dalpha = 2 L M beta_bar.
    [[nodiscard]] Eigen::VectorXd gradient() const;

    [[nodiscard]] const Eigen::VectorXd& alpha() const { return alpha_; }
    void set_alpha(const Eigen::VectorXd& alpha);
    /// Full coefficient vector with the current estimates in the unknown slots.
    [[nodiscard]] Eigen::VectorXd beta_bar() const { return model_.embed(alpha_); }
    [[nodiscard]] const CoeffModel& model() const { return model_; }
    [[nodiscard]] const GramWindow& window() const { return window_; }
    [[nodiscard]] double gamma() const { return gamma_; }
    [[nodiscard]] double time() const { return t_; }

    static constexpr double kDivergenceNorm = 1e6;

private:
    void advance_exponential();
    void advance_rk4();

    CoeffModel model_;
    std::vector<int> unknown_;
    double gamma_;
    double dt_;
    UpdateScheme scheme_;
    Eigen::VectorXd alpha_;
    Eigen::VectorXd known_;  // beta with the unknown slots zeroed
    GramWindow window_;
    double t_ = 0.0;
};

/// beta^T phi for the true coefficients: the regression residual -delta.
[[nodiscard]] double residual_delta(const CoeffModel& model, const Regressor& reg);

}  // namespace adaptid
