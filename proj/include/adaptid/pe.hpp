#pragma once

// Persistency-of-excitation level kappa_n, the tail ratio rho_n^u and the
// sweep over n.

#include <complex>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "adaptid/coeffs.hpp"
#include "adaptid/plants.hpp"

namespace adaptid {

/// Smallest eigenvalue of (M + M^T)/2. Throws std::invalid_argument on
/// non-finite entries.
[[nodiscard]] double lambda_min(const Eigen::MatrixXd& M);

/// E_n(j omega) = (a / (a + j omega))^{n+1}, a = (n+1) omega_n.
[[nodiscard]] std::complex<double> filter_response(int n, double omega_n, double omega);

using FrequencyResponse = std::function<std::complex<double>(double)>;

/// Re sum_{m=1}^{n+1} h(-j m omega) h(j m omega)^T for the full regressor
/// h = [E s^j, -E G s^j]_{j=0..n}. The steady-state window Gram of phi
/// equals (pi / omega) times this matrix.
[[nodiscard]] Eigen::MatrixXd steady_gram(int n, double omega, const FrequencyResponse& G);

/// Rows/columns of a full-size matrix restricted to the unknown entries.
[[nodiscard]] Eigen::MatrixXd unknown_block(const Eigen::MatrixXd& full, const CoeffModel& model);

/// Numerator-only unknowns. Throws std::invalid_argument if any q is unknown.
[[nodiscard]] double kappa_numerator_unknown(const CoeffModel& model, double omega);

/// G^u(j omega) with the known numerator and the denominator bound sequence:
/// even powers on the real axis, odd powers on the imaginary axis.
[[nodiscard]] std::complex<double> bound_response(const CoeffModel& model, const CoeffBounds& bounds, double omega);

/// Denominator-only unknowns. Throws std::invalid_argument if any p is unknown.
[[nodiscard]] double kappa_denominator_unknown(const CoeffModel& model, const CoeffBounds& bounds, double omega);

/// kappa = lambda_min(window Gram restricted to the unknowns) / 2.
[[nodiscard]] double kappa_from_gram(const Eigen::MatrixXd& gram, const CoeffModel& model);

/// Window Gram of a sampled regressor series (spacing dt, window 2 pi/omega)
/// at the last sample, then kappa_from_gram.
[[nodiscard]] double kappa_from_samples(const std::vector<Eigen::VectorXd>& phi, double dt, double omega,
                                        const CoeffModel& model);

struct DataKappaOptions {
    SimOptions sim;
    double horizon_windows = 20.0;
    double settle_tol = 0.01;
};

struct DataKappa {
    double kappa = 0.0;
    bool settled = false;
    double t = 0.0;  // time at which kappa was read
    int windows = 0;
};

/// Simulate the plant under the multisine input and read kappa at the end of
/// each window until two consecutive values agree to settle_tol.
[[nodiscard]] DataKappa kappa_from_data(const PlantSpec& spec, const CoeffModel& model, double omega,
                                        const DataKappaOptions& options = {});

/// log of sum_{k>n} (p_k^u + q_k^u) (n+1)^{n+k+5/2} omega^{n+k}.
[[nodiscard]] double log_tail_sum(int n, double omega, const CoeffBounds& bounds);
/// The same sum with plain pow() per term; overflows for large n.
[[nodiscard]] double tail_sum_direct(int n, double omega, const CoeffBounds& bounds);

/// rho_n^u = tail / (omega kappa). Throws std::domain_error if kappa <= 0.
[[nodiscard]] double rho_upper(int n, double omega, double kappa, const CoeffBounds& bounds);

struct PEReport {
    int n = 0;
    double omega = 0.0;
    double kappa = 0.0;
    double tail = 0.0;
    double rho_u = 0.0;
    std::string method;
    bool settled = true;
};

inline constexpr const char* kAnalyticNumerator = "analytic-numerator";
inline constexpr const char* kAnalyticDenominator = "analytic-denominator";
inline constexpr const char* kDataDriven = "data-driven";

/// Picks the method from the mask: numerator-only, denominator-only, or data.
[[nodiscard]] std::string pe_method(const CoeffModel& model);

struct SweepOptions {
    /// omega_n for a given n; default 1/(n+1).
    std::function<double(int)> omega_rule;
    /// Adjusts the mask of the per-n model; default keeps the plant's mask.
    std::function<void(CoeffModel&)> mask_rule;
    DataKappaOptions data;
    /// Data-driven kappa values by n, reused when present and filled otherwise.
    std::map<int, DataKappa>* kappa_cache = nullptr;
};

[[nodiscard]] PEReport pe_report(const PlantSpec& spec, const CoeffBounds& bounds, int n, const SweepOptions& options);

[[nodiscard]] std::vector<PEReport> sweep(const PlantSpec& spec, const ParamBox& box, const std::vector<int>& n_range,
                                          const SweepOptions& options = {});

/// 1 + sup |G(j omega)| sampled on omega = 0 and a log grid over [1e-3, 1e3].
[[nodiscard]] double gain_constant(const PlantSpec& spec);

}  // namespace adaptid
