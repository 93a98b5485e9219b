#include <doctest.h>

#include <cmath>

#include "adaptid/coeffs.hpp"

using namespace adaptid;
using doctest::Approx;

namespace {

double factorial(int k) { return std::tgamma(k + 1.0); }

double binom(int n, int k) { return std::tgamma(n + 1.0) / (std::tgamma(k + 1.0) * std::tgamma(n - k + 1.0)); }

// Coefficient of s^k in sum_{j>=1} ((s + lambda)/theta)^j / (2j - 1)!, which
// is the power series of sqrt(z) sinh(sqrt(z)) with z = (s + lambda)/theta.
double heat_q_oracle(double theta, double lambda, int k) {
    double sum = 0.0;
    for (int j = std::max(k, 1); j < 60; ++j) {
        sum += binom(j, k) * std::pow(lambda, j - k) / std::pow(theta, j) / factorial(2 * j - 1);
    }
    return sum;
}

}  // namespace

TEST_CASE("delay coefficients follow the exponential series") {
    const auto m = delay_coeffs(1.5, 0.3, 1.0, 0.1, 11);
    CHECK(m.p[0] == Approx(1.5));
    CHECK(m.p[1] == Approx(-0.15));
    CHECK(m.p[2] == Approx(0.0075));
    CHECK(m.p[5] == Approx(1.5 * std::pow(-0.1, 5) / 120.0));
    CHECK(m.q[0] == 1.0);
    CHECK(m.q[1] == 0.3);
    CHECK(m.q[2] == 1.0);
    CHECK(m.q[3] == 0.0);
    CHECK(m.unknown_count() == 14);
    CHECK(m.unknown_names().back() == "q1");
    CHECK(m.numerator_has_unknowns());
    CHECK(m.denominator_has_unknowns());
}

TEST_CASE("delay coefficients with zero delay have a single numerator term") {
    const auto m = delay_coeffs(2.0, 0.3, 1.0, 0.0, 4);
    CHECK(m.p[0] == 2.0);
    for (int k = 1; k <= 4; ++k) {
        CHECK(m.p[static_cast<std::size_t>(k)] == 0.0);
    }
}

TEST_CASE("delay model below order two drops the higher denominator terms") {
    const auto m = delay_coeffs(1.5, 0.3, 1.0, 0.1, 1);
    CHECK(m.q.size() == 2);
    CHECK(m.unknown_count() == 4);
}

TEST_CASE("heat coefficients match an independent binomial expansion") {
    const auto m = heat_coeffs(5.0, 1.5, 9);
    CHECK(m.q[0] == Approx(0.31524).epsilon(1e-4));
    CHECK(m.q[1] == Approx(0.220454).epsilon(1e-5));
    for (int k = 0; k <= 9; ++k) {
        CHECK(m.q[static_cast<std::size_t>(k)] == Approx(heat_q_oracle(5.0, 1.5, k)).epsilon(1e-12));
    }
    CHECK(m.p[0] == 1.0);
    CHECK(m.unknown_count() == 10);
    CHECK_FALSE(m.numerator_has_unknowns());
}

TEST_CASE("heat q3 matches iterated quadrature of the rod equation") {
    // T'' = z T with T'(0) = 0, T(0) = 1 gives T(1) = cosh(sqrt z) and
    // T'(1) = sqrt z sinh sqrt z. Expanding T = sum_k T_k(xi) s^k with
    // z = (s + lambda)/theta gives T_k'' = (lambda T_k + T_{k-1}) / theta.
    const double theta = 5.0;
    const double lambda = 1.5;
    const int grid = 4000;
    const double h = 1.0 / grid;
    std::vector<std::vector<double>> T(4, std::vector<double>(grid + 1, 0.0));
    std::vector<std::vector<double>> dT(4, std::vector<double>(grid + 1, 0.0));
    for (int k = 0; k <= 3; ++k) {
        T[k][0] = k == 0 ? 1.0 : 0.0;
        for (int i = 0; i < grid; ++i) {
            // RK4 on (T_k, T_k') with T_{k-1} known on the grid (midpoint by averaging).
            auto f = [&](double x, double dx, double prev) { return std::pair{dx, (lambda * x + prev) / theta}; };
            const double p0 = k > 0 ? T[k - 1][i] : 0.0;
            const double p1 = k > 0 ? T[k - 1][i + 1] : 0.0;
            const double pm = 0.5 * (p0 + p1);
            const auto [a1, b1] = f(T[k][i], dT[k][i], p0);
            const auto [a2, b2] = f(T[k][i] + 0.5 * h * a1, dT[k][i] + 0.5 * h * b1, pm);
            const auto [a3, b3] = f(T[k][i] + 0.5 * h * a2, dT[k][i] + 0.5 * h * b2, pm);
            const auto [a4, b4] = f(T[k][i] + h * a3, dT[k][i] + h * b3, p1);
            T[k][i + 1] = T[k][i] + h / 6.0 * (a1 + 2 * a2 + 2 * a3 + a4);
            dT[k][i + 1] = dT[k][i] + h / 6.0 * (b1 + 2 * b2 + 2 * b3 + b4);
        }
    }
    // Flux at xi = 1 is theta T'(1); G = T(0)/u with u the flux divided by theta.
    CHECK(heat_q(theta, lambda, 3) == Approx(dT[3][grid]).epsilon(1e-5));
    CHECK(heat_q(theta, lambda, 1) == Approx(dT[1][grid]).epsilon(1e-6));
}

TEST_CASE("wave coefficient propagation matches the linear-profile closed forms") {
    const auto m = wave_coeffs_peano(StiffnessProfile::linear(20.0, 10.0), 16);
    const double q1 = 2.0 * std::log(1.5);
    CHECK(m.q[1] == Approx(q1).epsilon(1e-9));
    CHECK(m.q[2] == Approx((1.0 - q1) / 10.0).epsilon(1e-8));
    CHECK(m.p[0] == 1.0);
    CHECK(m.q[0] == 1.0);
    CHECK(m.known_mask[17]);
    CHECK(m.unknown_count() == 16);
}

TEST_CASE("uniform stiffness gives q1 = 1 and q2 = 1/(2 EI)") {
    const auto m = wave_coeffs_peano(StiffnessProfile::tabulated({20.0, 20.0}), 4);
    CHECK(m.q[1] == Approx(1.0).epsilon(1e-10));
    CHECK(m.q[2] == Approx(1.0 / 40.0).epsilon(1e-9));
}

TEST_CASE("truncated series approaches the closed-form heat response") {
    const HeatPlantSpec spec;
    const auto m = heat_coeffs(5.0, 1.5, 30);
    for (double w : {0.05, 0.5, 2.0}) {
        const auto exact = closed_form_tf(spec, w);
        const auto series = series_tf(m.p, m.q, {0.0, w});
        CHECK(std::abs(series - exact) / std::abs(exact) < 1e-10);
    }
    const auto d = delay_coeffs(1.5, 0.3, 1.0, 0.1, 30);
    const auto exact = closed_form_tf(DelayPlantSpec{}, 0.7);
    CHECK(std::abs(series_tf(d.p, d.q, {0.0, 0.7}) - exact) < 1e-10);
}

TEST_CASE("closed form refuses the wave plant") {
    CHECK_THROWS_AS((void)closed_form_tf(WavePlantSpec{}, 1.0), std::domain_error);
}

TEST_CASE("bounds dominate the true coefficients inside the box") {
    const auto hb = bounds_for(HeatPlantSpec{}, HeatBox{}, 12);
    const auto hm = heat_coeffs(5.0, 1.5, 12);
    for (std::size_t k = 0; k < hm.q.size(); ++k) {
        CHECK(hm.q[k] <= hb.q(k));
        CHECK(hb.q(k) <= hb.c0 * std::pow(hb.c, static_cast<double>(k)) / factorial(static_cast<int>(k)) * (1 + 1e-12));
    }
    const auto db = bounds_for(DelayPlantSpec{}, DelayBox{}, 12);
    const auto dm = delay_coeffs(1.5, 0.3, 1.0, 0.1, 12);
    for (std::size_t k = 0; k < dm.p.size(); ++k) {
        CHECK(std::abs(dm.p[k]) <= db.p(k));
        CHECK(std::abs(dm.q[k]) <= db.q(k));
    }
    CHECK(db.c0 == 10.0);
    CHECK(db.c == 10.0);
    const auto wb = bounds_for(WavePlantSpec{}, WaveBox{}, 12);
    const auto wm = wave_coeffs_peano(StiffnessProfile::linear(20.0, 10.0), 12);
    for (std::size_t k = 0; k < wm.q.size(); ++k) {
        CHECK(std::abs(wm.q[k]) <= wb.q(k) * (1 + 1e-9));
    }
    CHECK(wb.size() >= 300);
}

TEST_CASE("bounds reject a box of the wrong plant kind") {
    CHECK_THROWS_AS((void)bounds_for(HeatPlantSpec{}, DelayBox{}, 5), std::invalid_argument);
}

TEST_CASE("coefficient model selection, embedding and names") {
    const auto m = delay_coeffs(1.5, 0.3, 1.0, 0.1, 3);
    const auto beta = m.beta();
    CHECK(beta.size() == 8);
    const auto alpha = m.select(beta);
    CHECK(alpha.size() == 6);
    CHECK((m.embed(alpha) - beta).norm() == 0.0);
    const auto L = m.selection_matrix();
    CHECK((L * beta - alpha).norm() == 0.0);
    CHECK(m.coefficient_name(0) == "p0");
    CHECK(m.coefficient_name(5) == "q1");
    auto copy = m;
    copy.set_unknowns({"q0", "q1"});
    CHECK(copy.unknown_count() == 2);
    CHECK_THROWS_AS(copy.set_unknowns({"q9"}), std::invalid_argument);
}

TEST_CASE("schedule follows the jump and ramp") {
    const Schedule theta({{0.0, 5.0, 0.0}, {100.0, 6.0, 0.0005}});
    CHECK(theta(50.0) == 5.0);
    CHECK(theta(100.0) == 5.0);
    CHECK(theta(120.0) == Approx(6.06));
}

TEST_CASE("validation rejects nonphysical parameters") {
    CHECK_THROWS_AS(validate(DelayPlantSpec{1.0, -0.3, 1.0, 0.1}), std::invalid_argument);
    CHECK_THROWS_AS(validate(DelayPlantSpec{1.0, 0.3, 1.0, -0.1}), std::invalid_argument);
    CHECK_THROWS_AS(validate(HeatPlantSpec{Schedule(-1.0), Schedule(1.5)}), std::invalid_argument);
    CHECK_THROWS_AS(validate(WavePlantSpec{StiffnessProfile::linear(10.0, -20.0)}), std::invalid_argument);
    CHECK_NOTHROW(validate(WavePlantSpec{}));
}
