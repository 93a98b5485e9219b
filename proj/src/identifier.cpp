#include "adaptid/identifier.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "adaptid/guard.hpp"

namespace adaptid {

GramWindow::GramWindow(int dim, double span, double dt) : dim_(dim), span_(span), dt_(dt) {
    if (dim <= 0 || !(span > 0.0) || !(dt > 0.0) || !std::isfinite(span / dt)) {
        throw std::invalid_argument("GramWindow: need dim > 0, span > 0 and dt > 0");
    }
    const double ratio = span / dt;
    const double nearest = std::round(ratio);
    const double snapped = std::abs(ratio - nearest) < 1e-9 * std::max(1.0, ratio) ? nearest : ratio;
    whole_ = static_cast<long long>(std::floor(snapped));
    frac_ = snapped - static_cast<double>(whole_);
    ring_.assign(static_cast<std::size_t>(whole_ + 2), Eigen::VectorXd::Zero(dim));
    zero_ = Eigen::VectorXd::Zero(dim);
    sum_ = Eigen::MatrixXd::Zero(dim, dim);
    gram_ = Eigen::MatrixXd::Zero(dim, dim);
}

const Eigen::VectorXd& GramWindow::sample(long long back) const {
    if (back >= count_) {
        return zero_;
    }
    const auto size = static_cast<long long>(ring_.size());
    const auto idx = ((static_cast<long long>(head_) - back) % size + size) % size;
    return ring_[static_cast<std::size_t>(idx)];
}

Eigen::MatrixXd GramWindow::assemble(const Eigen::MatrixXd& sum) const {
    const Eigen::VectorXd& newest = sample(0);
    const Eigen::VectorXd& oldest = sample(whole_);
    Eigen::MatrixXd m = dt_ * (sum - 0.5 * newest * newest.transpose() - 0.5 * oldest * oldest.transpose());
    if (frac_ > 0.0) {
        const Eigen::VectorXd edge = frac_ * sample(whole_ + 1) + (1.0 - frac_) * oldest;
        m += 0.5 * frac_ * dt_ * (edge * edge.transpose() + oldest * oldest.transpose());
    }
    return 0.5 * (m + m.transpose());
}

void GramWindow::push(const Eigen::VectorXd& phi) {
    if (phi.size() != dim_) {
        throw std::invalid_argument("GramWindow::push: regressor has the wrong size");
    }
    // The sample leaving the whole-interval range is the one at back = whole_
    // before this push, i.e. back = whole_ + 1 afterwards.
    const Eigen::VectorXd leaving = sample(whole_);
    head_ = (head_ + 1) % ring_.size();
    ring_[head_] = phi;
    ++count_;
    if (count_ % kRecomputeEvery == 0) {
        sum_.setZero();
        for (long long back = 0; back <= whole_; ++back) {
            const Eigen::VectorXd& s = sample(back);
            sum_.noalias() += s * s.transpose();
        }
    } else {
        sum_.noalias() += phi * phi.transpose();
        sum_.noalias() -= leaving * leaving.transpose();
    }
    gram_ = assemble(sum_);
}

Eigen::MatrixXd GramWindow::recompute() const {
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(dim_, dim_);
    for (long long back = 0; back <= whole_; ++back) {
        const Eigen::VectorXd& s = sample(back);
        sum.noalias() += s * s.transpose();
    }
    return assemble(sum);
}

Estimator::Estimator(CoeffModel model, double gamma, Eigen::VectorXd alpha0, double omega, double dt,
                     UpdateScheme scheme)
    : model_(std::move(model)), gamma_(gamma), dt_(dt), scheme_(scheme), alpha_(std::move(alpha0)) {
    model_.check();
    if (!(gamma > 0.0)) {
        throw std::invalid_argument("Estimator: gain must be positive");
    }
    if (!(omega > 0.0)) {
        throw std::invalid_argument("Estimator: omega must be positive");
    }
    unknown_ = model_.unknown_indices();
    if (alpha_.size() != static_cast<Eigen::Index>(unknown_.size())) {
        throw std::invalid_argument("Estimator: initial estimate has " + std::to_string(alpha_.size()) +
                                    " entries, the mask has " + std::to_string(unknown_.size()) + " unknowns");
    }
    known_ = model_.beta();
    for (int i : unknown_) {
        known_[i] = 0.0;
    }
    window_ = GramWindow(model_.dim(), 2.0 * std::numbers::pi / omega, dt);
}

void Estimator::set_alpha(const Eigen::VectorXd& alpha) {
    if (alpha.size() != alpha_.size()) {
        throw std::invalid_argument("Estimator::set_alpha: wrong size");
    }
    alpha_ = alpha;
}

void Estimator::step(const Regressor& reg) {
    window_.push(reg.phi);
    t_ = reg.t;
    if (!unknown_.empty()) {
        if (scheme_ == UpdateScheme::Exponential) {
            advance_exponential();
        } else {
            advance_rk4();
        }
    }
    if (!alpha_.allFinite() || alpha_.norm() > kDivergenceNorm) {
        throw GuardError("estimator diverged (|alpha| = " + std::to_string(alpha_.norm()) + ")", t_);
    }
}

// alpha' = -2 Gamma (A alpha + b), A = L M L^T, b = L M beta_known.
void Estimator::advance_exponential() {
    const auto r = static_cast<Eigen::Index>(unknown_.size());
    const Eigen::MatrixXd& M = window_.gram();
    Eigen::MatrixXd A(r, r);
    Eigen::VectorXd b(r);
    const Eigen::VectorXd Mk = M * known_;
    for (Eigen::Index i = 0; i < r; ++i) {
        b[i] = Mk[unknown_[static_cast<std::size_t>(i)]];
        for (Eigen::Index j = 0; j < r; ++j) {
            A(i, j) = M(unknown_[static_cast<std::size_t>(i)], unknown_[static_cast<std::size_t>(j)]);
        }
    }
    const Eigen::VectorXd f = -2.0 * gamma_ * (A * alpha_ + b);
    // Exact step of the frozen linear ODE: alpha += dt phi1(-2 Gamma A dt) f.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(A);
    const Eigen::VectorXd coords = eig.eigenvectors().transpose() * f;
    Eigen::VectorXd scaled(r);
    for (Eigen::Index i = 0; i < r; ++i) {
        const double z = -2.0 * gamma_ * std::max(eig.eigenvalues()[i], 0.0) * dt_;
        scaled[i] = coords[i] * (std::abs(z) < 1e-12 ? 1.0 + 0.5 * z : std::expm1(z) / z);
    }
    alpha_ += dt_ * (eig.eigenvectors() * scaled);
}

void Estimator::advance_rk4() {
    const Eigen::MatrixXd& M = window_.gram();
    auto f = [&](const Eigen::VectorXd& a) {
        const Eigen::VectorXd g = M * model_.embed(a);
        Eigen::VectorXd out(a.size());
        for (Eigen::Index i = 0; i < a.size(); ++i) {
            out[i] = -2.0 * gamma_ * g[unknown_[static_cast<std::size_t>(i)]];
        }
        return out;
    };
    const Eigen::VectorXd k1 = f(alpha_);
    const Eigen::VectorXd k2 = f(alpha_ + 0.5 * dt_ * k1);
    const Eigen::VectorXd k3 = f(alpha_ + 0.5 * dt_ * k2);
    const Eigen::VectorXd k4 = f(alpha_ + dt_ * k3);
    alpha_ += dt_ / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

double Estimator::cost() const {
    const Eigen::VectorXd b = beta_bar();
    return b.dot(window_.gram() * b);
}

Eigen::VectorXd Estimator::gradient() const {
    return 2.0 * model_.select(window_.gram() * beta_bar());
}

double residual_delta(const CoeffModel& model, const Regressor& reg) {
    if (reg.phi.size() != model.dim()) {
        throw std::invalid_argument("residual_delta: regressor size does not match the model");
    }
    return model.beta().dot(reg.phi);
}

}  // namespace adaptid
