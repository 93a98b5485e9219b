#pragma once

// Filter bank realized as n+1 identical first-order lags in series,
//
//     E_n(s) = a^{n+1} / (s + a)^{n+1},   a = (n+1) omega,
//
// whose last state is v and whose states give v', ..., v^(n) exactly.

#include <vector>

#include <Eigen/Core>

namespace adaptid {

class FilterBank {
public:
    /// Throws std::invalid_argument unless (n+1) omega >= 1.
    static FilterBank create(int n, double omega);

    /// One RK4 step; the input is linear between `in_begin` (at t) and
    /// `in_end` (at t + dt).
    void step(double in_begin, double in_end, double dt);

    /// v^(j), j = 0..n.
    [[nodiscard]] Eigen::VectorXd derivatives() const;

    [[nodiscard]] int order() const { return n_; }
    [[nodiscard]] double omega() const { return omega_; }
    [[nodiscard]] double pole() const { return a_; }
    [[nodiscard]] Eigen::VectorXd states() const;

private:
    // States and the binomial sums are kept in extended precision: v^(j) is a
    // j-th difference of O(1) states and can be many orders smaller.
    using Real = long double;
    using State = std::vector<Real>;

    FilterBank(int n, double omega);
    void rhs(const State& x, Real in, State& out) const;

    int n_ = 0;
    double omega_ = 1.0;
    double a_ = 1.0;
    State x_;
    std::vector<Real> binom_;  // row-major Pascal triangle up to n
};

struct Regressor {
    Eigen::VectorXd phi;  // [v, v', .., v^(n), -z, -z', .., -z^(n)]
    double t = 0.0;
};

/// Throws std::invalid_argument if the banks differ in n or omega.
[[nodiscard]] Regressor regressor_assemble(const FilterBank& u_bank, const FilterBank& y_bank, double t);

}  // namespace adaptid
