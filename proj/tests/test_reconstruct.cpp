#include <doctest.h>

#include <cmath>

#include "adaptid/reconstruct.hpp"
#include "properties.hpp"

using namespace adaptid;
using doctest::Approx;

TEST_CASE("delay parameters come straight from four coefficients") {
    const auto r = reconstruct_delay(1.5, -0.15, 1.0, 0.3);
    CHECK(r.get("K") == Approx(1.5));
    CHECK(r.get("tau") == Approx(0.1));
    CHECK(r.get("a") == Approx(0.3));
    CHECK(r.get("b") == Approx(1.0));
    CHECK(reconstruct_delay(1.5, 0.0, 1.0, 0.3).get("tau") == 0.0);
    CHECK_THROWS_AS((void)reconstruct_delay(1e-12, 0.1, 1.0, 0.3), std::domain_error);
    CHECK_THROWS_AS((void)r.get("theta"), std::out_of_range);
}

TEST_CASE("heat parameters from q0 and q1") {
    const auto r = reconstruct_heat(0.31524, 0.220454);
    CHECK(r.get("theta") == Approx(5.0).epsilon(1e-4));
    CHECK(r.get("lambda") == Approx(1.5).epsilon(1e-4));
    const auto m = heat_coeffs(5.0, 1.5, 2);
    const auto exact = reconstruct_heat(m.q[0], m.q[1]);
    CHECK(exact.get("theta") == Approx(5.0).epsilon(1e-9));
    CHECK(exact.get("lambda") == Approx(1.5).epsilon(1e-9));
    CHECK(exact.residual <= 1e-10);
    CHECK(std::abs(sqrt_sinh(exact.get("lambda") / exact.get("theta")) - m.q[0]) <= 1e-12);
}

TEST_CASE("tiny q0 drives r to zero and theta to 1/q1") {
    const auto r = reconstruct_heat(1e-14, 0.25);
    CHECK(r.get("theta") == Approx(4.0).epsilon(1e-9));
    // r is only resolved to the bisection tolerance, 1e-12.
    CHECK(r.get("lambda") < 1e-12 * r.get("theta") + 1e-13);
}

TEST_CASE("heat reconstruction rejects nonpositive inputs") {
    CHECK_THROWS_AS((void)reconstruct_heat(0.0, 0.2), std::domain_error);
    CHECK_THROWS_AS((void)reconstruct_heat(0.3, -0.2), std::domain_error);
}

TEST_CASE("wave parameters from q1 and q2") {
    const auto r = reconstruct_wave(0.810930, 0.0189070);
    CHECK(r.get("a") == Approx(20.0).epsilon(1e-4));
    CHECK(r.get("b") == Approx(10.0).epsilon(1e-4));
    CHECK(r.residual <= 1e-10);
    CHECK(reconstruct_wave(1.0 - 1e-9, 0.05).get("b") == Approx(2e-8));
    CHECK_THROWS_AS((void)reconstruct_wave(1.2, 0.01), std::domain_error);
    CHECK_THROWS_AS((void)reconstruct_wave(0.0, 0.01), std::domain_error);
    CHECK_THROWS_AS((void)reconstruct_wave(0.8, 0.0), std::domain_error);
}

TEST_CASE("bisection refuses a non-monotone target") {
    const auto bump = [](double x) { return std::sin(8.0 * x) - 0.2; };
    CHECK_THROWS_AS((void)bisect_increasing(bump, 0.0, 1.0), std::domain_error);
    const auto never = [](double) { return -1.0; };
    CHECK_THROWS_AS((void)bisect_increasing(never, 0.0, 1.0), std::domain_error);
    const auto line = [](double x) { return x - 300.0; };
    CHECK(bisect_increasing(line, 1e-9, 1.0).root == Approx(300.0));
}

TEST_CASE("coefficient round trips over random parameter draws") {
    const auto rt = props::roundtrip_errors(50);
    CHECK(rt.delay <= 1e-6);
    CHECK(rt.heat <= 1e-6);
    CHECK(rt.wave <= 1e-6);
}

TEST_CASE("dispatch by plant kind") {
    const auto m = heat_coeffs(5.0, 1.5, 4);
    const auto r = reconstruct_params(HeatPlantSpec{}, 4, m.beta());
    CHECK(r.get("theta") == Approx(5.0));
    CHECK(param_names(WavePlantSpec{}) == std::vector<std::string>{"a", "b"});
    CHECK_THROWS_AS((void)reconstruct_params(HeatPlantSpec{}, 4, Eigen::VectorXd::Zero(3)), std::invalid_argument);
}
