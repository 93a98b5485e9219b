#include "adaptid/filters.hpp"

#include <cmath>
#include <stdexcept>

namespace adaptid {

FilterBank FilterBank::create(int n, double omega) {
    if (n < 0) {
        throw std::invalid_argument("FilterBank: n must be >= 0");
    }
    if (!std::isfinite(omega) || (n + 1) * omega < 1.0) {
        throw std::invalid_argument("FilterBank: need (n+1) omega >= 1");
    }
    return FilterBank(n, omega);
}

FilterBank::FilterBank(int n, double omega)
    : n_(n), omega_(omega), a_((n + 1) * omega), x_(static_cast<std::size_t>(n + 1), 0.0L) {
    const auto rows = static_cast<std::size_t>(n + 1);
    binom_.assign(rows * rows, 0.0L);
    for (std::size_t j = 0; j < rows; ++j) {
        binom_[j * rows] = 1.0;
        for (std::size_t i = 1; i <= j; ++i) {
            binom_[j * rows + i] = binom_[(j - 1) * rows + i - 1] + (i < j ? binom_[(j - 1) * rows + i] : 0.0L);
        }
    }
}

void FilterBank::rhs(const State& x, Real in, State& out) const {
    const Real a = a_;
    out[0] = a * (in - x[0]);
    for (std::size_t k = 1; k < x.size(); ++k) {
        out[k] = a * (x[k - 1] - x[k]);
    }
}

void FilterBank::step(double in_begin, double in_end, double dt) {
    if (!(dt > 0.0)) {
        throw std::invalid_argument("FilterBank::step: dt must be positive");
    }
    const std::size_t size = x_.size();
    const Real h = dt;
    const Real in_mid = 0.5L * (static_cast<Real>(in_begin) + static_cast<Real>(in_end));
    State k1(size), k2(size), k3(size), k4(size), tmp(size);
    rhs(x_, in_begin, k1);
    for (std::size_t i = 0; i < size; ++i) tmp[i] = x_[i] + 0.5L * h * k1[i];
    rhs(tmp, in_mid, k2);
    for (std::size_t i = 0; i < size; ++i) tmp[i] = x_[i] + 0.5L * h * k2[i];
    rhs(tmp, in_mid, k3);
    for (std::size_t i = 0; i < size; ++i) tmp[i] = x_[i] + h * k3[i];
    rhs(tmp, in_end, k4);
    for (std::size_t i = 0; i < size; ++i) {
        x_[i] += h / 6.0L * (k1[i] + 2.0L * k2[i] + 2.0L * k3[i] + k4[i]);
    }
}

Eigen::VectorXd FilterBank::states() const {
    Eigen::VectorXd out(n_ + 1);
    for (int i = 0; i <= n_; ++i) {
        out[i] = static_cast<double>(x_[static_cast<std::size_t>(i)]);
    }
    return out;
}

Eigen::VectorXd FilterBank::derivatives() const {
    // v^(j) = a^j sum_i (-1)^i C(j,i) x_{n+1-j+i}, with x 1-based.
    const auto rows = static_cast<std::size_t>(n_ + 1);
    Eigen::VectorXd d(n_ + 1);
    Real aj = 1.0L;
    for (int j = 0; j <= n_; ++j) {
        Real sum = 0.0L;
        for (int i = 0; i <= j; ++i) {
            const Real term = binom_[static_cast<std::size_t>(j) * rows + static_cast<std::size_t>(i)] *
                              x_[static_cast<std::size_t>(n_ - j + i)];
            sum += (i % 2 == 0) ? term : -term;
        }
        d[j] = static_cast<double>(aj * sum);
        aj *= a_;
    }
    return d;
}

Regressor regressor_assemble(const FilterBank& u_bank, const FilterBank& y_bank, double t) {
    if (u_bank.order() != y_bank.order() || u_bank.omega() != y_bank.omega()) {
        throw std::invalid_argument("regressor_assemble: filter banks differ in order or frequency");
    }
    const int m = u_bank.order() + 1;
    Regressor r;
    r.t = t;
    r.phi.resize(2 * m);
    r.phi.head(m) = u_bank.derivatives();
    r.phi.tail(m) = -y_bank.derivatives();
    return r;
}

}  // namespace adaptid
