#pragma once

// Transfer-function coefficient models for the three plant families and the
// known/unknown partition used by the identifier.
//
// A plant transfer function is written as a ratio of two power series
//
//     G(s) = (p_0 + p_1 s + p_2 s^2 + ...) / (q_0 + q_1 s + q_2 s^2 + ...)
//
// and a CoeffModel stores the first n+1 terms of each series together with a
// mask that marks which entries are known a priori.

#include <complex>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

namespace adaptid {

/// Piecewise-affine function of time. Each piece is active for t > start
/// (the first piece is active from -inf); value = offset + slope * t.
class Schedule {
public:
    struct Piece {
        double start;
        double offset;
        double slope;
    };

    Schedule() = default;
    /* implicit */ Schedule(double constant);
    explicit Schedule(std::vector<Piece> pieces);

    [[nodiscard]] double operator()(double t) const;
    [[nodiscard]] bool is_constant() const;
    [[nodiscard]] const std::vector<Piece>& pieces() const { return pieces_; }

private:
    std::vector<Piece> pieces_{{-1e300, 0.0, 0.0}};
};

/// Spatial stiffness profile EI(xi) on [0, 1]: either a + b*xi or a table of
/// uniformly spaced samples (linearly interpolated).
class StiffnessProfile {
public:
    static StiffnessProfile linear(double a, double b);
    static StiffnessProfile tabulated(std::vector<double> samples);

    [[nodiscard]] double operator()(double xi) const;
    [[nodiscard]] bool is_linear() const { return samples_.empty(); }
    [[nodiscard]] double a() const { return a_; }
    [[nodiscard]] double b() const { return b_; }
    [[nodiscard]] const std::vector<double>& samples() const { return samples_; }

    /// Smallest value over `grid` uniform intervals (grid+1 points, plus the
    /// table knots for tabulated profiles).
    [[nodiscard]] double min_on_grid(int grid) const;
    [[nodiscard]] double max_on_grid(int grid) const;

private:
    double a_ = 1.0;
    double b_ = 0.0;
    std::vector<double> samples_;
};

struct DelayPlantSpec {
    double K = 1.5;
    double a = 0.3;
    double b = 1.0;
    double tau = 0.1;
};

struct HeatPlantSpec {
    Schedule theta{5.0};
    Schedule lambda{1.5};
};

struct WavePlantSpec {
    StiffnessProfile ei = StiffnessProfile::linear(20.0, 10.0);
};

using PlantSpec = std::variant<DelayPlantSpec, HeatPlantSpec, WavePlantSpec>;

/// Throws std::invalid_argument if the spec violates its parameter constraints.
void validate(const PlantSpec& spec);
[[nodiscard]] std::string plant_kind(const PlantSpec& spec);

/// Truncated numerator/denominator coefficients with a known/unknown mask.
///
/// The full coefficient vector is beta = [p_0 .. p_n, q_0 .. q_n]; the unknown
/// sub-vector alpha keeps the unknown entries of beta in the same order.
struct CoeffModel {
    int n = 0;
    std::vector<double> p;
    std::vector<double> q;
    std::vector<bool> known_mask;  // length 2n+2, indexed like beta

    [[nodiscard]] int dim() const { return 2 * n + 2; }
    [[nodiscard]] Eigen::VectorXd beta() const;
    [[nodiscard]] std::vector<int> unknown_indices() const;
    [[nodiscard]] int unknown_count() const;
    [[nodiscard]] bool numerator_has_unknowns() const;
    [[nodiscard]] bool denominator_has_unknowns() const;

    /// alpha = L beta.
    [[nodiscard]] Eigen::VectorXd select(const Eigen::VectorXd& beta) const;
    /// beta with unknown slots taken from alpha and known slots from this model.
    [[nodiscard]] Eigen::VectorXd embed(const Eigen::VectorXd& alpha) const;
    /// Same as embed() but known slots are taken from `base`.
    [[nodiscard]] Eigen::VectorXd embed(const Eigen::VectorXd& alpha, const Eigen::VectorXd& base) const;
    /// Selection matrix L (r x (2n+2)), L * Phi = phi.
    [[nodiscard]] Eigen::MatrixXd selection_matrix() const;

    /// "p0", "q3", ... for beta index i.
    [[nodiscard]] std::string coefficient_name(int i) const;
    [[nodiscard]] std::vector<std::string> unknown_names() const;

    /// Replace the mask: every entry whose name appears in `unknown` becomes
    /// unknown, everything else known. Throws on unknown names.
    void set_unknowns(const std::vector<std::string>& unknown);

    void check() const;
};

/// Assumption-style bound sequences |p_k| <= p_u[k] <= c0 c^k / k! and the
/// same for q. Sequences are stored far enough for tail sums to converge.
struct CoeffBounds {
    std::vector<double> p_u;
    std::vector<double> q_u;
    double c0 = 1.0;
    double c = 1.0;

    [[nodiscard]] std::size_t size() const { return p_u.size(); }
    [[nodiscard]] double p(std::size_t k) const { return k < p_u.size() ? p_u[k] : 0.0; }
    [[nodiscard]] double q(std::size_t k) const { return k < q_u.size() ? q_u[k] : 0.0; }
};

struct DelayBox {
    double K_max = 10.0;
    double a_max = 5.0;
    double b_max = 10.0;
    double tau_max = 0.2;
};

struct HeatBox {
    double theta_min = 1.0;
    double lambda_max = 5.0;
};

struct WaveBox {
    double ei0_max = 60.0;
    double ei_min = 10.0;
};

using ParamBox = std::variant<DelayBox, HeatBox, WaveBox>;

inline constexpr double kSeriesTolerance = 1e-14;

/// p_k = K(-tau)^k/k!, q = [b, a, 1, 0, ...]; p and q_0, q_1 unknown.
[[nodiscard]] CoeffModel delay_coeffs(double K, double a, double b, double tau, int n);

/// Heat rod with Neumann input at xi=1 and output T(0,t); p = [1, 0, ...]
/// known, all q unknown.
[[nodiscard]] CoeffModel heat_coeffs(double theta, double lambda, int n, double tol = kSeriesTolerance);

/// q_k of the heat transfer function for a single k (k >= 1 uses the series).
[[nodiscard]] double heat_q(double theta, double lambda, int k, double tol = kSeriesTolerance);

/// Wave string coefficients from coefficient-wise propagation of the
/// spatial transfer-matrix ODE. p_0 = q_0 = 1 known, q_1..q_n unknown.
[[nodiscard]] CoeffModel wave_coeffs_peano(const StiffnessProfile& ei, int n, int grid = 1000);

/// True coefficient model of a plant at time t (schedules evaluated at t).
[[nodiscard]] CoeffModel model_for(const PlantSpec& spec, int n, double t = 0.0);

[[nodiscard]] CoeffBounds bounds_for(const PlantSpec& spec, const ParamBox& box, int n_max);

/// Exact G(j omega) for the delay and heat plants. Throws std::domain_error for
/// the wave plant, which has no closed form.
[[nodiscard]] std::complex<double> closed_form_tf(const PlantSpec& spec, double omega, double t = 0.0);

/// Truncated series ratio sum p_k s^k / sum q_k s^k.
[[nodiscard]] std::complex<double> series_tf(const std::vector<double>& p, const std::vector<double>& q,
                                             std::complex<double> s);

/// sqrt(r) sinh(sqrt(r)) for r >= 0, accurate near r = 0.
[[nodiscard]] double sqrt_sinh(double r);
/// sum_i (1+i) r^i / (1+2i)!  (theta * q_1 of the heat plant).
[[nodiscard]] double heat_q1_series(double r, double tol = kSeriesTolerance);

}  // namespace adaptid
