#include "adaptid/reconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace adaptid {

double ReconstructionResult::get(const std::string& name) const {
    for (const auto& [key, value] : params) {
        if (key == name) {
            return value;
        }
    }
    throw std::out_of_range("ReconstructionResult: no parameter named " + name);
}

BisectionResult bisect_increasing(const std::function<double(double)>& f, double lo, double hi, double hi_cap,
                                  double tol) {
    if (!(hi > lo)) {
        throw std::invalid_argument("bisect_increasing: empty bracket");
    }
    double f_lo = f(lo);
    double f_hi = f(hi);
    while (f_hi < 0.0 && hi < hi_cap) {
        hi = std::min(2.0 * hi, hi_cap);
        f_hi = f(hi);
    }
    if (!(f_lo <= 0.0 && f_hi >= 0.0)) {
        throw std::domain_error("bisect_increasing: no sign change on the bracket");
    }
    constexpr int kSamples = 64;
    double last = f_lo;
    for (int i = 1; i <= kSamples; ++i) {
        const double x = lo + (hi - lo) * i / kSamples;
        const double v = f(x);
        if (v < last) {
            throw std::domain_error("bisect_increasing: target is not increasing on the bracket");
        }
        last = v;
    }
    BisectionResult out;
    while (hi - lo > tol * std::max(1.0, std::abs(hi)) && out.iterations < 400) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) {
            break;
        }
        if (f(mid) < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
        ++out.iterations;
    }
    out.root = 0.5 * (lo + hi);
    out.residual = std::abs(f(out.root));
    return out;
}

ReconstructionResult reconstruct_delay(double p0, double p1, double q0, double q1) {
    if (!(std::abs(p0) > 1e-9)) {
        throw std::domain_error("reconstruct_delay: p0 is too close to zero to recover the gain");
    }
    ReconstructionResult r;
    r.params = {{"K", p0}, {"tau", -p1 / p0}, {"a", q1}, {"b", q0}};
    return r;
}

ReconstructionResult reconstruct_heat(double q0, double q1, double series_tol) {
    if (!(q0 > 0.0) || !(q1 > 0.0)) {
        throw std::domain_error("reconstruct_heat: q0 and q1 must be positive");
    }
    const auto f = [q0](double r) { return sqrt_sinh(r) - q0; };
    const double lo = f(1e-9) > 0.0 ? 0.0 : 1e-9;
    const auto root = bisect_increasing(f, lo, 1.0);
    const double r = root.root;
    const double theta = heat_q1_series(r, series_tol) / q1;
    ReconstructionResult out;
    out.params = {{"theta", theta}, {"lambda", r * theta}};
    out.iterations = root.iterations;
    out.residual = std::max(root.residual, std::abs(heat_q1_series(r, series_tol) / theta - q1));
    return out;
}

ReconstructionResult reconstruct_wave(double q1, double q2) {
    if (!(q1 > 0.0 && q1 < 1.0)) {
        throw std::domain_error("reconstruct_wave: q1 must lie in (0, 1)");
    }
    if (!(q2 > 0.0)) {
        throw std::domain_error("reconstruct_wave: q2 must be positive");
    }
    const double b = (1.0 - q1) / q2;
    const auto f = [b, q1](double a) { return a / b * std::log1p(b / a) - q1; };
    const auto root = bisect_increasing(f, 1e-9, 1.0);
    ReconstructionResult out;
    out.params = {{"a", root.root}, {"b", b}};
    out.iterations = root.iterations;
    out.residual = root.residual;
    return out;
}

std::vector<std::string> param_names(const PlantSpec& spec) {
    switch (spec.index()) {
        case 0:
            return {"K", "tau", "a", "b"};
        case 1:
            return {"theta", "lambda"};
        default:
            return {"a", "b"};
    }
}

ReconstructionResult reconstruct_params(const PlantSpec& spec, int n, const Eigen::VectorXd& beta) {
    if (beta.size() != 2 * n + 2) {
        throw std::invalid_argument("reconstruct_params: beta has the wrong size");
    }
    const auto q = [&](int k) { return beta[n + 1 + k]; };
    switch (spec.index()) {
        case 0:
            if (n < 1) {
                throw std::invalid_argument("reconstruct_params: delay reconstruction needs n >= 1");
            }
            return reconstruct_delay(beta[0], beta[1], q(0), q(1));
        case 1:
            if (n < 1) {
                throw std::invalid_argument("reconstruct_params: heat reconstruction needs n >= 1");
            }
            return reconstruct_heat(q(0), q(1));
        default:
            if (n < 2) {
                throw std::invalid_argument("reconstruct_params: wave reconstruction needs n >= 2");
            }
            return reconstruct_wave(q(1), q(2));
    }
}

}  // namespace adaptid
