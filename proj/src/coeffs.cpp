#include "adaptid/coeffs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace adaptid {

namespace {

constexpr double kMinusInf = -1e300;

double log_factorial(int k) { return std::lgamma(static_cast<double>(k) + 1.0); }

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

// --- Schedule ---------------------------------------------------------------

Schedule::Schedule(double constant) : pieces_{{kMinusInf, constant, 0.0}} {}

Schedule::Schedule(std::vector<Piece> pieces) : pieces_(std::move(pieces)) {
    if (pieces_.empty()) {
        throw std::invalid_argument("Schedule: needs at least one piece");
    }
    std::stable_sort(pieces_.begin(), pieces_.end(),
                     [](const Piece& l, const Piece& r) { return l.start < r.start; });
    pieces_.front().start = kMinusInf;
}

double Schedule::operator()(double t) const {
    const Piece* active = &pieces_.front();
    for (const auto& piece : pieces_) {
        if (piece.start < t) {
            active = &piece;
        }
    }
    return active->offset + active->slope * t;
}

bool Schedule::is_constant() const { return pieces_.size() == 1 && pieces_.front().slope == 0.0; }

// --- StiffnessProfile -------------------------------------------------------

StiffnessProfile StiffnessProfile::linear(double a, double b) {
    StiffnessProfile profile;
    profile.a_ = a;
    profile.b_ = b;
    return profile;
}

StiffnessProfile StiffnessProfile::tabulated(std::vector<double> samples) {
    if (samples.size() < 2) {
        throw std::invalid_argument("StiffnessProfile: a table needs at least two samples");
    }
    StiffnessProfile profile;
    profile.samples_ = std::move(samples);
    profile.a_ = profile.samples_.front();
    profile.b_ = profile.samples_.back() - profile.samples_.front();
    return profile;
}

double StiffnessProfile::operator()(double xi) const {
    if (samples_.empty()) {
        return a_ + b_ * xi;
    }
    const auto intervals = static_cast<double>(samples_.size() - 1);
    const double x = std::clamp(xi, 0.0, 1.0) * intervals;
    const auto i = std::min(static_cast<std::size_t>(x), samples_.size() - 2);
    const double frac = x - static_cast<double>(i);
    return (1.0 - frac) * samples_[i] + frac * samples_[i + 1];
}

double StiffnessProfile::min_on_grid(int grid) const {
    double lo = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= grid; ++i) {
        lo = std::min(lo, (*this)(static_cast<double>(i) / grid));
    }
    for (double s : samples_) {
        lo = std::min(lo, s);
    }
    return lo;
}

double StiffnessProfile::max_on_grid(int grid) const {
    double hi = -std::numeric_limits<double>::infinity();
    for (int i = 0; i <= grid; ++i) {
        hi = std::max(hi, (*this)(static_cast<double>(i) / grid));
    }
    for (double s : samples_) {
        hi = std::max(hi, s);
    }
    return hi;
}

// --- PlantSpec --------------------------------------------------------------

namespace {

void check_positive_schedule(const Schedule& schedule, const char* what) {
    std::vector<double> probes{0.0};
    for (const auto& piece : schedule.pieces()) {
        if (piece.start > 0.0) {
            probes.push_back(std::nextafter(piece.start, 1e300));
        }
    }
    for (double t : probes) {
        if (!(schedule(t) > 0.0)) {
            throw std::invalid_argument(std::string("heat plant: ") + what + " must be positive");
        }
    }
}

}  // namespace

void validate(const PlantSpec& spec) {
    std::visit(Overloaded{
                   [](const DelayPlantSpec& d) {
                       if (!(d.tau >= 0.0)) {
                           throw std::invalid_argument("delay plant: tau must be >= 0");
                       }
                       if (!(d.a > 0.0 && d.b > 0.0)) {
                           throw std::invalid_argument("delay plant: a and b must be positive (stability)");
                       }
                   },
                   [](const HeatPlantSpec& h) {
                       check_positive_schedule(h.theta, "theta");
                       check_positive_schedule(h.lambda, "lambda");
                   },
                   [](const WavePlantSpec& w) {
                       if (!(w.ei.min_on_grid(1000) > 0.0)) {
                           throw std::invalid_argument("wave plant: EI must be positive on [0,1]");
                       }
                   },
               },
               spec);
}

std::string plant_kind(const PlantSpec& spec) {
    return std::visit(Overloaded{
                          [](const DelayPlantSpec&) { return std::string("delay"); },
                          [](const HeatPlantSpec&) { return std::string("heat"); },
                          [](const WavePlantSpec&) { return std::string("wave"); },
                      },
                      spec);
}

// --- CoeffModel -------------------------------------------------------------

Eigen::VectorXd CoeffModel::beta() const {
    Eigen::VectorXd out(dim());
    for (int k = 0; k <= n; ++k) {
        out[k] = p[static_cast<std::size_t>(k)];
        out[n + 1 + k] = q[static_cast<std::size_t>(k)];
    }
    return out;
}

std::vector<int> CoeffModel::unknown_indices() const {
    std::vector<int> idx;
    for (int i = 0; i < dim(); ++i) {
        if (!known_mask[static_cast<std::size_t>(i)]) {
            idx.push_back(i);
        }
    }
    return idx;
}

int CoeffModel::unknown_count() const { return static_cast<int>(unknown_indices().size()); }

bool CoeffModel::numerator_has_unknowns() const {
    for (int k = 0; k <= n; ++k) {
        if (!known_mask[static_cast<std::size_t>(k)]) {
            return true;
        }
    }
    return false;
}

bool CoeffModel::denominator_has_unknowns() const {
    for (int k = 0; k <= n; ++k) {
        if (!known_mask[static_cast<std::size_t>(n + 1 + k)]) {
            return true;
        }
    }
    return false;
}

Eigen::VectorXd CoeffModel::select(const Eigen::VectorXd& full) const {
    if (full.size() != dim()) {
        throw std::invalid_argument("CoeffModel::select: size mismatch");
    }
    const auto idx = unknown_indices();
    Eigen::VectorXd alpha(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) {
        alpha[static_cast<Eigen::Index>(i)] = full[idx[i]];
    }
    return alpha;
}

Eigen::VectorXd CoeffModel::embed(const Eigen::VectorXd& alpha) const { return embed(alpha, beta()); }

Eigen::VectorXd CoeffModel::embed(const Eigen::VectorXd& alpha, const Eigen::VectorXd& base) const {
    const auto idx = unknown_indices();
    if (alpha.size() != static_cast<Eigen::Index>(idx.size()) || base.size() != dim()) {
        throw std::invalid_argument("CoeffModel::embed: size mismatch");
    }
    Eigen::VectorXd out = base;
    for (std::size_t i = 0; i < idx.size(); ++i) {
        out[idx[i]] = alpha[static_cast<Eigen::Index>(i)];
    }
    return out;
}

Eigen::MatrixXd CoeffModel::selection_matrix() const {
    const auto idx = unknown_indices();
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(idx.size()), dim());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        L(static_cast<Eigen::Index>(i), idx[i]) = 1.0;
    }
    return L;
}

std::string CoeffModel::coefficient_name(int i) const {
    if (i <= n) {
        return "p" + std::to_string(i);
    }
    return "q" + std::to_string(i - n - 1);
}

std::vector<std::string> CoeffModel::unknown_names() const {
    std::vector<std::string> names;
    for (int i : unknown_indices()) {
        names.push_back(coefficient_name(i));
    }
    return names;
}

void CoeffModel::set_unknowns(const std::vector<std::string>& unknown) {
    std::vector<bool> mask(static_cast<std::size_t>(dim()), true);
    for (const auto& name : unknown) {
        bool found = false;
        for (int i = 0; i < dim(); ++i) {
            if (coefficient_name(i) == name) {
                mask[static_cast<std::size_t>(i)] = false;
                found = true;
            }
        }
        if (!found) {
            throw std::invalid_argument("unknown coefficient name '" + name + "' for order n=" + std::to_string(n));
        }
    }
    known_mask = std::move(mask);
}

void CoeffModel::check() const {
    if (n < 0 || p.size() != static_cast<std::size_t>(n + 1) || q.size() != static_cast<std::size_t>(n + 1) ||
        known_mask.size() != static_cast<std::size_t>(2 * n + 2)) {
        throw std::invalid_argument("CoeffModel: inconsistent sizes");
    }
}

// --- coefficient series -----------------------------------------------------

double sqrt_sinh(double r) {
    if (r < 0.0) {
        throw std::domain_error("sqrt_sinh: r must be nonnegative");
    }
    if (r < 1e-2) {
        // r + r^2/6 + r^3/120 + r^4/5040 + ...
        double term = r;
        double sum = 0.0;
        for (int i = 0; i < 12 && term != 0.0; ++i) {
            sum += term;
            term *= r / ((2.0 * i + 2.0) * (2.0 * i + 3.0));
        }
        return sum;
    }
    const double root = std::sqrt(r);
    return root * std::sinh(root);
}

double heat_q(double theta, double lambda, int k, double tol) {
    if (!(theta > 0.0)) {
        throw std::invalid_argument("heat_q: theta must be positive");
    }
    if (!(tol > 0.0)) {
        throw std::invalid_argument("heat_q: tol must be positive");
    }
    if (lambda < 0.0) {
        throw std::invalid_argument("heat_q: lambda must be nonnegative");
    }
    const double r = lambda / theta;
    if (k == 0) {
        return sqrt_sinh(r);
    }
    // theta^-k sum_i r^i C(k+i, k) / (2k+2i-1)!
    const double log_scale = -std::lgamma(2.0 * k) - k * std::log(theta);
    double term = 1.0;
    double sum = 0.0;
    for (int i = 0; i < 100000; ++i) {
        sum += term;
        const double next =
            term * r * (k + i + 1.0) / (i + 1.0) / ((2.0 * k + 2.0 * i + 1.0) * (2.0 * k + 2.0 * i));
        if (!(next >= tol * sum)) {
            break;
        }
        term = next;
    }
    return sum * std::exp(log_scale);
}

double heat_q1_series(double r, double tol) { return heat_q(1.0, r, 1, tol); }

CoeffModel delay_coeffs(double K, double a, double b, double tau, int n) {
    if (n < 0) {
        throw std::invalid_argument("delay_coeffs: n must be >= 0");
    }
    CoeffModel m;
    m.n = n;
    m.p.resize(static_cast<std::size_t>(n + 1));
    m.q.assign(static_cast<std::size_t>(n + 1), 0.0);
    double term = K;
    for (int k = 0; k <= n; ++k) {
        m.p[static_cast<std::size_t>(k)] = term;
        term *= -tau / (k + 1.0);
    }
    // Denominator b + a s + s^2, cut at s^n for small n.
    const double den[3] = {b, a, 1.0};
    m.known_mask.assign(static_cast<std::size_t>(2 * n + 2), true);
    for (int k = 0; k <= n; ++k) {
        m.known_mask[static_cast<std::size_t>(k)] = false;
    }
    for (int k = 0; k <= std::min(n, 2); ++k) {
        m.q[static_cast<std::size_t>(k)] = den[k];
        if (k < 2) {
            m.known_mask[static_cast<std::size_t>(n + 1 + k)] = false;
        }
    }
    return m;
}

CoeffModel heat_coeffs(double theta, double lambda, int n, double tol) {
    if (!(theta > 0.0)) {
        throw std::invalid_argument("heat_coeffs: theta must be positive");
    }
    if (!(tol > 0.0)) {
        throw std::invalid_argument("heat_coeffs: tol must be positive");
    }
    if (n < 0) {
        throw std::invalid_argument("heat_coeffs: n must be >= 0");
    }
    CoeffModel m;
    m.n = n;
    m.p.assign(static_cast<std::size_t>(n + 1), 0.0);
    m.p[0] = 1.0;
    m.q.resize(static_cast<std::size_t>(n + 1));
    for (int k = 0; k <= n; ++k) {
        m.q[static_cast<std::size_t>(k)] = heat_q(theta, lambda, k, tol);
    }
    m.known_mask.assign(static_cast<std::size_t>(2 * n + 2), false);
    for (int k = 0; k <= n; ++k) {
        m.known_mask[static_cast<std::size_t>(k)] = true;
    }
    return m;
}

CoeffModel wave_coeffs_peano(const StiffnessProfile& ei, int n, int grid) {
    if (n < 0) {
        throw std::invalid_argument("wave_coeffs_peano: n must be >= 0");
    }
    if (grid < 100) {
        throw std::invalid_argument("wave_coeffs_peano: grid must be >= 100");
    }
    if (!(ei.min_on_grid(grid) > 0.0)) {
        throw std::invalid_argument("wave_coeffs_peano: EI must be positive on the grid");
    }
    // z1, z2 are polynomials in s truncated at degree n+1:
    //   z1' = z2 / EI(xi),   z2' = s^2 z1,   z1(0) = 1,  z2(0) = s EI(0).
    const int len = n + 2;
    using Vec = Eigen::VectorXd;
    Vec z(2 * len);
    z.setZero();
    z[0] = 1.0;
    if (len > 1) {
        z[len + 1] = ei(0.0);
    }
    auto rhs = [len](const Vec& state, double inv_ei) {
        Vec d(state.size());
        for (int k = 0; k < len; ++k) {
            d[k] = state[len + k] * inv_ei;
            d[len + k] = k >= 2 ? state[k - 2] : 0.0;
        }
        return d;
    };
    const double h = 1.0 / grid;
    for (int i = 0; i < grid; ++i) {
        const double xi = i * h;
        const double e0 = 1.0 / ei(xi);
        const double em = 1.0 / ei(xi + 0.5 * h);
        const double e1 = 1.0 / ei(xi + h);
        const Vec k1 = rhs(z, e0);
        const Vec k2 = rhs(z + 0.5 * h * k1, em);
        const Vec k3 = rhs(z + 0.5 * h * k2, em);
        const Vec k4 = rhs(z + h * k3, e1);
        z += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    CoeffModel m;
    m.n = n;
    m.p.assign(static_cast<std::size_t>(n + 1), 0.0);
    m.p[0] = 1.0;
    m.q.resize(static_cast<std::size_t>(n + 1));
    for (int k = 0; k <= n; ++k) {
        m.q[static_cast<std::size_t>(k)] = z[k];
    }
    m.q[0] = 1.0;
    m.known_mask.assign(static_cast<std::size_t>(2 * n + 2), false);
    for (int k = 0; k <= n; ++k) {
        m.known_mask[static_cast<std::size_t>(k)] = true;
    }
    m.known_mask[static_cast<std::size_t>(n + 1)] = true;
    return m;
}

CoeffModel model_for(const PlantSpec& spec, int n, double t) {
    return std::visit(Overloaded{
                          [&](const DelayPlantSpec& d) { return delay_coeffs(d.K, d.a, d.b, d.tau, n); },
                          [&](const HeatPlantSpec& h) { return heat_coeffs(h.theta(t), h.lambda(t), n); },
                          [&](const WavePlantSpec& w) { return wave_coeffs_peano(w.ei, n); },
                      },
                      spec);
}

// --- bounds -----------------------------------------------------------------

CoeffBounds bounds_for(const PlantSpec& spec, const ParamBox& box, int n_max) {
    if (n_max < 0) {
        throw std::invalid_argument("bounds_for: n_max must be >= 0");
    }
    if (spec.index() != box.index()) {
        throw std::invalid_argument("bounds_for: parameter box does not match the plant variant");
    }
    const auto len = static_cast<std::size_t>(n_max + 300);
    CoeffBounds out;
    out.p_u.assign(len, 0.0);
    out.q_u.assign(len, 0.0);

    if (const auto* d = std::get_if<DelayBox>(&box)) {
        if (!(d->K_max > 0.0 && d->a_max >= 0.0 && d->b_max >= 0.0 && d->tau_max >= 0.0)) {
            throw std::invalid_argument("bounds_for: inconsistent delay box");
        }
        for (std::size_t k = 0; k < len; ++k) {
            const auto kk = static_cast<int>(k);
            if (k == 0) {
                out.p_u[k] = d->K_max;
            } else if (d->tau_max > 0.0) {
                out.p_u[k] = std::exp(std::log(d->K_max) + kk * std::log(d->tau_max) - log_factorial(kk));
            }
        }
        out.q_u[0] = d->b_max;
        out.q_u[1] = d->a_max;
        out.q_u[2] = 1.0;
        out.c0 = std::max({d->K_max, d->a_max, d->b_max, 1.0});
        out.c = std::max({out.c0, d->tau_max, std::sqrt(2.0)});
    } else if (const auto* h = std::get_if<HeatBox>(&box)) {
        if (!(h->theta_min > 0.0 && h->lambda_max >= 0.0)) {
            throw std::invalid_argument("bounds_for: inconsistent heat box (theta floor must be positive)");
        }
        out.p_u[0] = 1.0;
        for (std::size_t k = 0; k < len; ++k) {
            out.q_u[k] = heat_q(h->theta_min, h->lambda_max, static_cast<int>(k));
        }
        out.c0 = std::exp(h->lambda_max / h->theta_min);
        out.c = 1.0 / h->theta_min;
    } else {
        const auto& w = std::get<WaveBox>(box);
        if (!(w.ei_min > 0.0 && w.ei0_max >= w.ei_min)) {
            throw std::invalid_argument("bounds_for: inconsistent wave box");
        }
        out.p_u[0] = 1.0;
        out.q_u[0] = 1.0;
        const double log_ei = std::log(w.ei_min);
        const double log_odd_scale = std::log(w.ei0_max) - 0.5 * log_ei;
        for (std::size_t k = 1; k < len; ++k) {
            const auto kk = static_cast<int>(k);
            double log_val = -log_factorial(kk) - 0.5 * kk * log_ei;
            if (kk % 2 == 1) {
                log_val += log_odd_scale;
            }
            out.q_u[k] = std::exp(log_val);
        }
        if (w.ei_min >= 1.0) {
            out.c = 1.0;
            out.c0 = std::max(1.0, w.ei0_max);
        } else {
            out.c = 1.0 / std::sqrt(w.ei_min);
            out.c0 = std::max(1.0, w.ei0_max / std::sqrt(w.ei_min));
        }
    }
    return out;
}

// --- transfer functions -----------------------------------------------------

std::complex<double> closed_form_tf(const PlantSpec& spec, double omega, double t) {
    if (omega < 0.0) {
        throw std::invalid_argument("closed_form_tf: omega must be >= 0");
    }
    using C = std::complex<double>;
    const C s{0.0, omega};
    if (const auto* d = std::get_if<DelayPlantSpec>(&spec)) {
        return d->K * std::exp(-s * d->tau) / (s * s + d->a * s + d->b);
    }
    if (const auto* h = std::get_if<HeatPlantSpec>(&spec)) {
        const C z = (s + h->lambda(t)) / h->theta(t);
        if (std::abs(z) < 1e-2) {
            // z + z^2/6 + ... avoids 0 * inf style cancellation near the origin.
            C term = z;
            C sum = 0.0;
            for (int i = 0; i < 12; ++i) {
                sum += term;
                term *= z / ((2.0 * i + 2.0) * (2.0 * i + 3.0));
            }
            return 1.0 / sum;
        }
        const C root = std::sqrt(z);
        return 1.0 / (root * std::sinh(root));
    }
    throw std::domain_error("closed_form_tf: the wave plant has no closed form; use series evaluation");
}

std::complex<double> series_tf(const std::vector<double>& p, const std::vector<double>& q, std::complex<double> s) {
    auto horner = [s](const std::vector<double>& c) {
        std::complex<double> acc = 0.0;
        for (auto it = c.rbegin(); it != c.rend(); ++it) {
            acc = acc * s + *it;
        }
        return acc;
    };
    return horner(p) / horner(q);
}

}  // namespace adaptid
