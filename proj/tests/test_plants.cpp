#include <doctest.h>

#include <cmath>
#include <numbers>

#include "adaptid/plants.hpp"
#include "properties.hpp"

using namespace adaptid;

namespace {

// Steady-state phasor of y under u = sin(w t), measured over the last period.
std::complex<double> measured_response(const PlantSpec& spec, double w, double settle, double max_dt = 1e-3) {
    const double period = 2.0 * std::numbers::pi / w;
    const auto per = static_cast<long long>(std::ceil(period / max_dt));
    const double dt = period / static_cast<double>(per);
    auto state = plant_init(spec, {0, dt});
    const auto u = Excitation::tone(w);
    const auto settle_steps = static_cast<long long>(std::ceil(settle / period)) * per;
    std::vector<double> ts;
    std::vector<double> ys;
    for (long long k = 0; k < settle_steps + per; ++k) {
        const double y = plant_step(state, spec, u, dt);
        if (k >= settle_steps) {
            ts.push_back(static_cast<double>(k + 1) * dt);
            ys.push_back(y);
        }
    }
    return props::phasor(ts, ys, w);
}

}  // namespace

TEST_CASE("zero input keeps every plant at rest") {
    for (const PlantSpec& spec : {PlantSpec{DelayPlantSpec{}}, PlantSpec{HeatPlantSpec{}}, PlantSpec{WavePlantSpec{}}}) {
        auto state = plant_init(spec);
        double worst = 0.0;
        for (int k = 0; k < 500; ++k) {
            worst = std::max(worst, std::abs(plant_step(state, spec, Excitation::zero(), kDefaultDt)));
        }
        CHECK(worst == 0.0);
        CHECK(plant_time(state) == doctest::Approx(0.5));
    }
}

TEST_CASE("delay plant reproduces its steady-state frequency response") {
    const DelayPlantSpec spec;
    for (double w : {0.3, 1.0}) {
        const auto got = measured_response(spec, w, 80.0);
        const auto want = steady_state_response(spec, w);
        CHECK(std::abs(got - want) / std::abs(want) < 1e-3);
    }
}

TEST_CASE("delay output is silent until the delay has elapsed") {
    const DelayPlantSpec spec{1.5, 0.3, 1.0, 0.1};
    auto state = plant_init(spec);
    const auto u = Excitation::tone(1.0, 1.0, std::numbers::pi / 2.0);
    for (int k = 0; k < 99; ++k) {
        CHECK(plant_step(state, spec, u, kDefaultDt) == 0.0);
    }
    for (int k = 0; k < 10; ++k) {
        plant_step(state, spec, u, kDefaultDt);
    }
    CHECK(plant_step(state, spec, u, kDefaultDt) > 0.0);
}

TEST_CASE("heat plant reproduces its steady-state frequency response") {
    const HeatPlantSpec spec;
    for (double w : {0.1, 1.0}) {
        const auto got = measured_response(spec, w, 20.0);
        const auto want = steady_state_response(spec, w);
        CHECK(std::abs(got - want) / std::abs(want) < 1e-3);
    }
}

TEST_CASE("wave plant reproduces the series frequency response") {
    const WavePlantSpec spec;
    for (double w : {0.5, 1.0}) {
        const auto got = measured_response(spec, w, 40.0);
        const auto want = steady_state_response(spec, w);
        CHECK(std::abs(got - want) / std::abs(want) < 1e-3);
    }
}

TEST_CASE("wave energy decays at least like 4 H0 exp(-t/4)") {
    CHECK(props::energy_decay_ratio(20.0) <= 1.0);
}

TEST_CASE("plant setup rejects bad options") {
    CHECK_THROWS_AS((void)plant_init(HeatPlantSpec{}, {20, 1e-3}), std::invalid_argument);
    CHECK_THROWS_AS((void)plant_init(DelayPlantSpec{}, {0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS((void)steady_state_response(WavePlantSpec{}, 1.0, 2), std::invalid_argument);
    auto state = plant_init(DelayPlantSpec{});
    CHECK_THROWS_AS(plant_step(state, HeatPlantSpec{}, Excitation::zero(), 1e-3), std::invalid_argument);
}

TEST_CASE("wave energy of a resting string is zero") {
    const WavePlantSpec spec;
    const auto state = plant_init(spec);
    CHECK(wave_energy(std::get<WavePlantState>(state), spec) == 0.0);
}
