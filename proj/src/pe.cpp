#include "adaptid/pe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "adaptid/excitation.hpp"
#include "adaptid/filters.hpp"
#include "adaptid/identifier.hpp"

namespace adaptid {

double lambda_min(const Eigen::MatrixXd& M) {
    if (M.rows() != M.cols() || M.rows() == 0) {
        throw std::invalid_argument("lambda_min: need a non-empty square matrix");
    }
    if (!M.allFinite()) {
        throw std::invalid_argument("lambda_min: matrix has non-finite entries");
    }
    const Eigen::MatrixXd sym = 0.5 * (M + M.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym, Eigen::EigenvaluesOnly);
    if (eig.info() != Eigen::Success) {
        throw std::runtime_error("lambda_min: eigensolver did not converge");
    }
    return eig.eigenvalues()[0];
}

std::complex<double> filter_response(int n, double omega_n, double omega) {
    const double a = (n + 1) * omega_n;
    return std::pow(std::complex<double>(a, 0.0) / std::complex<double>(a, omega), n + 1);
}

namespace {

// Re sum_m conj(h_m) h_m^T for the given per-frequency vectors.
Eigen::MatrixXd real_outer_sum(const std::vector<Eigen::VectorXcd>& hs) {
    const auto d = hs.front().size();
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(d, d);
    for (const auto& h : hs) {
        out += (h.conjugate() * h.transpose()).real();
    }
    return out;
}

std::complex<double> jpow(double w, int k) { return std::pow(std::complex<double>(0.0, w), k); }

}  // namespace

Eigen::MatrixXd steady_gram(int n, double omega, const FrequencyResponse& G) {
    if (n < 0 || !(omega > 0.0)) {
        throw std::invalid_argument("steady_gram: need n >= 0 and omega > 0");
    }
    std::vector<Eigen::VectorXcd> hs;
    for (int m = 1; m <= n + 1; ++m) {
        const double w = m * omega;
        const auto E = filter_response(n, omega, w);
        const auto g = G(w);
        Eigen::VectorXcd h(2 * n + 2);
        for (int j = 0; j <= n; ++j) {
            h[j] = E * jpow(w, j);
            h[n + 1 + j] = -E * g * jpow(w, j);
        }
        hs.push_back(std::move(h));
    }
    return real_outer_sum(hs);
}

Eigen::MatrixXd unknown_block(const Eigen::MatrixXd& full, const CoeffModel& model) {
    const auto idx = model.unknown_indices();
    const auto r = static_cast<Eigen::Index>(idx.size());
    Eigen::MatrixXd out(r, r);
    for (Eigen::Index i = 0; i < r; ++i) {
        for (Eigen::Index j = 0; j < r; ++j) {
            out(i, j) = full(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
        }
    }
    return out;
}

namespace {

double kappa_from_vectors(const std::vector<Eigen::VectorXcd>& hs, double omega) {
    if (hs.empty() || hs.front().size() == 0) {
        throw std::invalid_argument("kappa: the mask has no unknown entries");
    }
    return std::max(0.0, std::numbers::pi / (2.0 * omega) * lambda_min(real_outer_sum(hs)));
}

}  // namespace

double kappa_numerator_unknown(const CoeffModel& model, double omega) {
    model.check();
    if (model.denominator_has_unknowns()) {
        throw std::invalid_argument("kappa_numerator_unknown: the mask has unknown denominator entries");
    }
    const int n = model.n;
    const auto idx = model.unknown_indices();
    std::vector<Eigen::VectorXcd> hs;
    for (int m = 1; m <= n + 1; ++m) {
        const double w = m * omega;
        const auto E = filter_response(n, omega, w);
        Eigen::VectorXcd h(static_cast<Eigen::Index>(idx.size()));
        for (std::size_t i = 0; i < idx.size(); ++i) {
            h[static_cast<Eigen::Index>(i)] = E * jpow(w, idx[i]);
        }
        hs.push_back(std::move(h));
    }
    return kappa_from_vectors(hs, omega);
}

std::complex<double> bound_response(const CoeffModel& model, const CoeffBounds& bounds, double omega) {
    std::complex<double> num = 0.0;
    for (std::size_t k = 0; k < model.p.size(); ++k) {
        num += model.p[k] * jpow(omega, static_cast<int>(k));
    }
    double re = 0.0;
    double im = 0.0;
    double wk = 1.0;
    for (std::size_t k = 0; k < bounds.q_u.size(); ++k) {
        const double term = bounds.q_u[k] * wk;
        (k % 2 == 0 ? re : im) += term;
        if (k > static_cast<std::size_t>(model.n) && term < 1e-17 * (std::abs(re) + std::abs(im))) {
            break;
        }
        wk *= omega;
        if (!std::isfinite(wk)) {
            throw std::overflow_error("bound_response: denominator bound series overflowed");
        }
    }
    return num / std::complex<double>(re, im);
}

double kappa_denominator_unknown(const CoeffModel& model, const CoeffBounds& bounds, double omega) {
    model.check();
    if (model.numerator_has_unknowns()) {
        throw std::invalid_argument("kappa_denominator_unknown: the mask has unknown numerator entries");
    }
    const int n = model.n;
    const auto idx = model.unknown_indices();
    std::vector<Eigen::VectorXcd> hs;
    for (int m = 1; m <= n + 1; ++m) {
        const double w = m * omega;
        const auto EG = filter_response(n, omega, w) * bound_response(model, bounds, w);
        Eigen::VectorXcd h(static_cast<Eigen::Index>(idx.size()));
        for (std::size_t i = 0; i < idx.size(); ++i) {
            h[static_cast<Eigen::Index>(i)] = EG * jpow(w, idx[i] - (n + 1));
        }
        hs.push_back(std::move(h));
    }
    return kappa_from_vectors(hs, omega);
}

double kappa_from_gram(const Eigen::MatrixXd& gram, const CoeffModel& model) {
    const auto block = unknown_block(gram, model);
    if (block.size() == 0) {
        throw std::invalid_argument("kappa_from_gram: the mask has no unknown entries");
    }
    return std::max(0.0, 0.5 * lambda_min(block));
}

double kappa_from_samples(const std::vector<Eigen::VectorXd>& phi, double dt, double omega, const CoeffModel& model) {
    GramWindow window(model.dim(), 2.0 * std::numbers::pi / omega, dt);
    for (const auto& v : phi) {
        window.push(v);
    }
    return kappa_from_gram(window.gram(), model);
}

DataKappa kappa_from_data(const PlantSpec& spec, const CoeffModel& model, double omega,
                          const DataKappaOptions& options) {
    const int n = model.n;
    const double dt = options.sim.dt;
    const double span = 2.0 * std::numbers::pi / omega;
    auto plant = plant_init(spec, options.sim);
    const auto u = Excitation::multisine(n, omega);
    auto u_bank = FilterBank::create(n, omega);
    auto y_bank = FilterBank::create(n, omega);
    GramWindow window(model.dim(), span, dt);
    window.push(Eigen::VectorXd::Zero(model.dim()));

    DataKappa out;
    const auto total = static_cast<long long>(std::ceil(options.horizon_windows * span / dt));
    double previous = -1.0;
    double y_prev = 0.0;
    int next_window = 1;
    for (long long k = 0; k < total; ++k) {
        const double t = static_cast<double>(k) * dt;
        const double y = plant_step(plant, spec, u, dt);
        u_bank.step(u.value(t), u.value(t + dt), dt);
        y_bank.step(y_prev, y, dt);
        y_prev = y;
        const double t_next = static_cast<double>(k + 1) * dt;
        window.push(regressor_assemble(u_bank, y_bank, t_next).phi);
        if (t_next + 0.5 * dt >= next_window * span) {
            const double kappa = kappa_from_gram(window.gram(), model);
            out.kappa = kappa;
            out.t = t_next;
            out.windows = next_window;
            ++next_window;
            if (previous > 0.0 && std::abs(kappa - previous) <= options.settle_tol * previous) {
                out.settled = true;
                return out;
            }
            previous = kappa;
        }
    }
    return out;
}

namespace {

double log_term(int n, int k, double omega, const CoeffBounds& bounds) {
    const double coeff = bounds.p(static_cast<std::size_t>(k)) + bounds.q(static_cast<std::size_t>(k));
    if (coeff <= 0.0) {
        return -std::numeric_limits<double>::infinity();
    }
    return std::log(coeff) + (n + k + 2.5) * std::log(n + 1.0) + (n + k) * std::log(omega);
}

}  // namespace

double log_tail_sum(int n, double omega, const CoeffBounds& bounds) {
    if (n < 0 || !(omega > 0.0)) {
        throw std::invalid_argument("log_tail_sum: need n >= 0 and omega > 0");
    }
    const double ninf = -std::numeric_limits<double>::infinity();
    double log_sum = ninf;
    const auto len = static_cast<int>(std::max(bounds.p_u.size(), bounds.q_u.size()));
    for (int k = n + 1; k < len; ++k) {
        const double lt = log_term(n, k, omega, bounds);
        if (lt == ninf) {
            continue;
        }
        if (log_sum == ninf) {
            log_sum = lt;
            continue;
        }
        const double hi = std::max(log_sum, lt);
        const double lo = std::min(log_sum, lt);
        const bool small = lt < log_sum + std::log(1e-16);
        log_sum = hi + std::log1p(std::exp(lo - hi));
        if (small && k > n + 3) {
            break;
        }
    }
    return log_sum;
}

double tail_sum_direct(int n, double omega, const CoeffBounds& bounds) {
    double sum = 0.0;
    const auto len = static_cast<int>(std::max(bounds.p_u.size(), bounds.q_u.size()));
    for (int k = n + 1; k < len; ++k) {
        const double coeff = bounds.p(static_cast<std::size_t>(k)) + bounds.q(static_cast<std::size_t>(k));
        const double term = coeff * std::pow(n + 1.0, n + k + 2.5) * std::pow(omega, n + k);
        if (coeff > 0.0 && term < 1e-16 * sum && k > n + 3) {
            sum += term;
            break;
        }
        sum += term;
    }
    return sum;
}

double rho_upper(int n, double omega, double kappa, const CoeffBounds& bounds) {
    if (!(kappa > 0.0)) {
        throw std::domain_error("rho_upper: kappa must be positive (excitation fails at n=" + std::to_string(n) + ")");
    }
    return std::exp(log_tail_sum(n, omega, bounds) - std::log(omega) - std::log(kappa));
}

std::string pe_method(const CoeffModel& model) {
    if (model.unknown_count() == 0) {
        throw std::invalid_argument("pe_method: the mask has no unknown entries");
    }
    if (!model.denominator_has_unknowns()) {
        return kAnalyticNumerator;
    }
    if (!model.numerator_has_unknowns()) {
        return kAnalyticDenominator;
    }
    return kDataDriven;
}

PEReport pe_report(const PlantSpec& spec, const CoeffBounds& bounds, int n, const SweepOptions& options) {
    PEReport r;
    r.n = n;
    r.omega = options.omega_rule ? options.omega_rule(n) : 1.0 / (n + 1);
    auto model = model_for(spec, n);
    if (options.mask_rule) {
        options.mask_rule(model);
    }
    r.method = pe_method(model);
    if (r.method == kAnalyticNumerator) {
        r.kappa = kappa_numerator_unknown(model, r.omega);
    } else if (r.method == kAnalyticDenominator) {
        r.kappa = kappa_denominator_unknown(model, bounds, r.omega);
    } else {
        DataKappa dk;
        if (options.kappa_cache && options.kappa_cache->count(n)) {
            dk = options.kappa_cache->at(n);
        } else {
            dk = kappa_from_data(spec, model, r.omega, options.data);
            if (options.kappa_cache) {
                (*options.kappa_cache)[n] = dk;
            }
        }
        r.kappa = dk.kappa;
        r.settled = dk.settled;
    }
    r.tail = std::exp(log_tail_sum(n, r.omega, bounds));
    r.rho_u = r.kappa > 0.0 ? rho_upper(n, r.omega, r.kappa, bounds) : std::numeric_limits<double>::infinity();
    return r;
}

std::vector<PEReport> sweep(const PlantSpec& spec, const ParamBox& box, const std::vector<int>& n_range,
                            const SweepOptions& options) {
    std::vector<PEReport> out;
    if (n_range.empty()) {
        return out;
    }
    const int n_max = *std::max_element(n_range.begin(), n_range.end());
    const auto bounds = bounds_for(spec, box, n_max);
    out.reserve(n_range.size());
    for (int n : n_range) {
        out.push_back(pe_report(spec, bounds, n, options));
    }
    return out;
}

double gain_constant(const PlantSpec& spec) {
    // The wave response comes from a truncated series, trusted only up to
    // moderate frequencies.
    const bool series = std::holds_alternative<WavePlantSpec>(spec);
    const double w_max = series ? 50.0 : 1e3;
    double sup = std::abs(steady_state_response(spec, 0.0, 80));
    for (int i = 0; i <= 600; ++i) {
        const double w = std::pow(10.0, -3.0 + 6.0 * i / 600.0);
        if (w > w_max) {
            break;
        }
        sup = std::max(sup, std::abs(steady_state_response(spec, w, 80)));
    }
    return 1.0 + sup;
}

}  // namespace adaptid
