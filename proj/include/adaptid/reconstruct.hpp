#pragma once

// Physical parameters from (estimated) transfer-function coefficients.

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "adaptid/coeffs.hpp"

namespace adaptid {

struct ReconstructionResult {
    std::vector<std::pair<std::string, double>> params;
    double residual = 0.0;  // max defect of the defining equations
    int iterations = 0;

    /// Throws std::out_of_range for an unknown name.
    [[nodiscard]] double get(const std::string& name) const;
};

struct BisectionResult {
    double root = 0.0;
    double residual = 0.0;
    int iterations = 0;
};

/// Root of an increasing f on [lo, hi], doubling hi (up to hi_cap) until the
/// sign changes. Monotonicity is checked on a sample grid first; a violation
/// or a missing sign change throws std::domain_error.
[[nodiscard]] BisectionResult bisect_increasing(const std::function<double(double)>& f, double lo, double hi,
                                                double hi_cap = 1e6, double tol = 1e-12);

/// K = p0, tau = -p1/p0, a = q1, b = q0. Throws if |p0| <= 1e-9.
[[nodiscard]] ReconstructionResult reconstruct_delay(double p0, double p1, double q0, double q1);

/// Solves sqrt(r) sinh(sqrt(r)) = q0, then theta from q1 and lambda = r theta.
[[nodiscard]] ReconstructionResult reconstruct_heat(double q0, double q1, double series_tol = kSeriesTolerance);

/// Linear stiffness a + b xi from q1, q2: b = (1-q1)/q2, then
/// (a/b) log((a+b)/a) = q1 for a.
[[nodiscard]] ReconstructionResult reconstruct_wave(double q1, double q2);

/// Parameter names produced for this plant variant, in output order.
[[nodiscard]] std::vector<std::string> param_names(const PlantSpec& spec);

/// Dispatch on the plant variant using the entries of a full coefficient
/// vector beta = [p_0..p_n, q_0..q_n].
[[nodiscard]] ReconstructionResult reconstruct_params(const PlantSpec& spec, int n, const Eigen::VectorXd& beta);

}  // namespace adaptid
