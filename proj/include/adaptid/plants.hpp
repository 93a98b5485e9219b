#pragma once

// Time-domain simulators for the delay, heat and wave plants.

#include <complex>
#include <variant>
#include <vector>

#include "adaptid/coeffs.hpp"
#include "adaptid/excitation.hpp"
#include "adaptid/guard.hpp"

namespace adaptid {

inline constexpr int kDefaultHeatGrid = 200;
inline constexpr int kDefaultWaveGrid = 400;
inline constexpr double kDefaultDt = 1e-3;

struct SimOptions {
    int grid_points = 0;  // 0 picks the plant default
    double dt = kDefaultDt;
};

/// Second-order ODE with output delay y(t) = K x1(t - tau).
struct DelayPlantState {
    double x1 = 0.0;
    double x2 = 0.0;
    double t = 0.0;
    double dt = kDefaultDt;
    std::vector<double> history;  // x1 at uniformly spaced past samples
    std::size_t head = 0;         // slot holding x1(t)
    long long steps = 0;
};

/// Heat rod on a uniform grid xi_i = i/N, Crank-Nicolson in time.
struct HeatPlantState {
    std::vector<double> T;
    double t = 0.0;
};

/// Wave string on a uniform grid; w[N] carries the boundary input u(t).
struct WavePlantState {
    std::vector<double> w;
    std::vector<double> wt;
    double t = 0.0;
    double u = 0.0;   // input value at t
    double ud = 0.0;  // input derivative at t

    // Discretization data fixed at init.
    double h = 0.0;
    double ei0 = 0.0;
    std::vector<double> ei_half;  // EI((i + 1/2) h), i = 0..N-1
    std::vector<double> xi2;      // xi_i^2
    std::vector<double> source;   // discrete (EI (xi^2)_xi)_xi
    double max_substep = 0.0;

    [[nodiscard]] int intervals() const { return static_cast<int>(w.size()) - 1; }
};

using PlantState = std::variant<DelayPlantState, HeatPlantState, WavePlantState>;

/// Zero initial state at t = 0.
[[nodiscard]] PlantState plant_init(const PlantSpec& spec, const SimOptions& options = {});

/// Advance one step of length dt under input u and return y(t + dt).
double plant_step(PlantState& state, const PlantSpec& spec, const Excitation& u, double dt);

[[nodiscard]] double plant_time(const PlantState& state);

/// Steady-state frequency response G(j omega): closed form for delay/heat,
/// truncated series with n_series terms for the wave plant.
[[nodiscard]] std::complex<double> steady_state_response(const PlantSpec& spec, double omega, int n_series = 40);

/// H(t) = 1/2 int_0^1 (EI v_xi^2 + v_t^2) dxi with v = w - xi^2 u.
[[nodiscard]] double wave_energy(const WavePlantState& state, const PlantSpec& spec);

}  // namespace adaptid
