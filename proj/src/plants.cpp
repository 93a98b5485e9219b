#include "adaptid/plants.hpp"

#include <algorithm>
#include <cmath>

namespace adaptid {

namespace {

bool all_finite(const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

// --- delay ------------------------------------------------------------------

DelayPlantState delay_init(const DelayPlantSpec& spec, double dt) {
    DelayPlantState s;
    s.dt = dt;
    const auto slots = static_cast<std::size_t>(std::ceil(spec.tau / dt)) + 2;
    s.history.assign(slots, 0.0);
    return s;
}

// x1 at `lag` samples in the past; zero before t = 0.
double delay_history(const DelayPlantState& s, long long lag) {
    if (lag > s.steps) {
        return 0.0;
    }
    const auto size = static_cast<long long>(s.history.size());
    const auto idx = ((static_cast<long long>(s.head) - lag) % size + size) % size;
    return s.history[static_cast<std::size_t>(idx)];
}

double delay_output(const DelayPlantState& s, const DelayPlantSpec& spec) {
    double lag = spec.tau / s.dt;
    const double nearest = std::round(lag);
    if (std::abs(lag - nearest) < 1e-9) {
        lag = nearest;
    }
    const auto whole = static_cast<long long>(std::floor(lag));
    const double frac = lag - static_cast<double>(whole);
    const double x_now = delay_history(s, whole);
    const double x_before = frac > 0.0 ? delay_history(s, whole + 1) : 0.0;
    return spec.K * ((1.0 - frac) * x_now + frac * x_before);
}

double delay_step(DelayPlantState& s, const DelayPlantSpec& spec, const Excitation& u, double dt) {
    if (std::abs(dt - s.dt) > 1e-12 * s.dt) {
        throw std::invalid_argument("delay plant: step size must match the history sampling");
    }
    auto f = [&](double x1, double x2, double uu) { return std::pair{x2, -spec.b * x1 - spec.a * x2 + uu}; };
    const double u0 = u.value(s.t);
    const double um = u.value(s.t + 0.5 * dt);
    const double u1 = u.value(s.t + dt);
    const auto [a1, b1] = f(s.x1, s.x2, u0);
    const auto [a2, b2] = f(s.x1 + 0.5 * dt * a1, s.x2 + 0.5 * dt * b1, um);
    const auto [a3, b3] = f(s.x1 + 0.5 * dt * a2, s.x2 + 0.5 * dt * b2, um);
    const auto [a4, b4] = f(s.x1 + dt * a3, s.x2 + dt * b3, u1);
    s.x1 += dt / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
    s.x2 += dt / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4);
    ++s.steps;
    s.t = static_cast<double>(s.steps) * s.dt;
    s.head = (s.head + 1) % s.history.size();
    s.history[s.head] = s.x1;
    if (!std::isfinite(s.x1) || !std::isfinite(s.x2)) {
        throw GuardError("delay plant: non-finite state", s.t);
    }
    return delay_output(s, spec);
}

// --- heat -------------------------------------------------------------------

double heat_step(HeatPlantState& s, const HeatPlantSpec& spec, const Excitation& u, double dt) {
    const auto N = static_cast<int>(s.T.size()) - 1;
    const double h = 1.0 / N;
    const double tm = s.t + 0.5 * dt;
    const double theta = spec.theta(tm);
    const double lambda = spec.lambda(tm);
    const double c = theta / (h * h);
    const double half = 0.5 * dt;

    // Semi-discrete operator A (tridiagonal) with ghost nodes T_{-1} = T_1 and
    // T_{N+1} = T_{N-1} + 2 h u; input enters row N as (2 theta / h) u.
    auto lower = [&](int i) { return i == N ? 2.0 * c : c; };
    auto upper = [&](int i) { return i == 0 ? 2.0 * c : c; };
    const double diag = -2.0 * c - lambda;

    const auto size = static_cast<std::size_t>(N + 1);
    std::vector<double> rhs(size);
    for (int i = 0; i <= N; ++i) {
        double Ax = diag * s.T[static_cast<std::size_t>(i)];
        if (i > 0) {
            Ax += lower(i) * s.T[static_cast<std::size_t>(i - 1)];
        }
        if (i < N) {
            Ax += upper(i) * s.T[static_cast<std::size_t>(i + 1)];
        }
        rhs[static_cast<std::size_t>(i)] = s.T[static_cast<std::size_t>(i)] + half * Ax;
    }
    rhs[size - 1] += half * (2.0 * theta / h) * (u.value(s.t) + u.value(s.t + dt));

    // Thomas algorithm on (I - dt/2 A).
    std::vector<double> cp(size);
    std::vector<double> dp(size);
    const double b = 1.0 - half * diag;
    for (int i = 0; i <= N; ++i) {
        const auto k = static_cast<std::size_t>(i);
        const double a_i = i > 0 ? -half * lower(i) : 0.0;
        const double c_i = i < N ? -half * upper(i) : 0.0;
        const double denom = i > 0 ? b - a_i * cp[k - 1] : b;
        cp[k] = c_i / denom;
        dp[k] = (rhs[k] - (i > 0 ? a_i * dp[k - 1] : 0.0)) / denom;
    }
    s.T[size - 1] = dp[size - 1];
    for (int i = N - 1; i >= 0; --i) {
        const auto k = static_cast<std::size_t>(i);
        s.T[k] = dp[k] - cp[k] * s.T[k + 1];
    }
    s.t += dt;
    if (!all_finite(s.T)) {
        throw GuardError("heat plant: non-finite state", s.t);
    }
    return s.T.front();
}

// --- wave -------------------------------------------------------------------

WavePlantState wave_init(const WavePlantSpec& spec, int N) {
    WavePlantState s;
    const auto size = static_cast<std::size_t>(N + 1);
    s.w.assign(size, 0.0);
    s.wt.assign(size, 0.0);
    s.h = 1.0 / N;
    s.ei0 = spec.ei(0.0);
    s.ei_half.resize(static_cast<std::size_t>(N));
    for (int i = 0; i < N; ++i) {
        s.ei_half[static_cast<std::size_t>(i)] = spec.ei((i + 0.5) * s.h);
    }
    s.xi2.resize(size);
    for (int i = 0; i <= N; ++i) {
        const double xi = i * s.h;
        s.xi2[static_cast<std::size_t>(i)] = xi * xi;
    }
    // Discrete operator applied to xi^2 (the lifting of the boundary input).
    s.source.assign(size, 0.0);
    const double h2 = s.h * s.h;
    s.source[0] = 2.0 / s.h * (s.ei_half[0] * (s.xi2[1] - s.xi2[0]) / s.h);
    for (int i = 1; i < N; ++i) {
        const auto k = static_cast<std::size_t>(i);
        s.source[k] =
            (s.ei_half[k] * (s.xi2[k + 1] - s.xi2[k]) - s.ei_half[k - 1] * (s.xi2[k] - s.xi2[k - 1])) / h2;
    }
    const double ei_max = spec.ei.max_on_grid(N);
    // CFL for the interior plus the real boundary mode of the damping at xi = 0.
    s.max_substep = std::min(0.5 * s.h / std::sqrt(ei_max), s.h / s.ei0);
    return s;
}

// d/dt (v, p) for the lifted variables, written into (dv, dp).
void wave_rhs(const WavePlantState& s, const double* v, const double* p, double u, double udd, double* dv,
              double* dp) {
    const int N = s.intervals();
    const double h = s.h;
    const double h2 = h * h;
    const double* eh = s.ei_half.data();
    for (int i = 0; i < N; ++i) {
        dv[i] = p[i];
    }
    dp[0] = 2.0 / h * (eh[0] * (v[1] - v[0]) / h - s.ei0 * p[0]) + s.source[0] * u;
    for (int i = 1; i < N; ++i) {
        const double right = i + 1 < N ? v[i + 1] : 0.0;
        dp[i] = (eh[i] * (right - v[i]) - eh[i - 1] * (v[i] - v[i - 1])) / h2 + s.source[static_cast<std::size_t>(i)] * u -
                s.xi2[static_cast<std::size_t>(i)] * udd;
    }
}

double wave_step(WavePlantState& s, const Excitation& u, double dt) {
    const int N = s.intervals();
    const auto n = static_cast<std::size_t>(N);
    const int substeps = std::max(1, static_cast<int>(std::ceil(dt / s.max_substep - 1e-9)));
    const double tau = dt / substeps;

    std::vector<double> v(n), p(n);
    const double u0 = u.value(s.t);
    const double ud0 = u.derivative(s.t, 1);
    for (std::size_t i = 0; i < n; ++i) {
        v[i] = s.w[i] - s.xi2[i] * u0;
        p[i] = s.wt[i] - s.xi2[i] * ud0;
    }
    std::vector<double> k1v(n), k1p(n), k2v(n), k2p(n), k3v(n), k3p(n), k4v(n), k4p(n), tv(n), tp(n);
    double t = s.t;
    for (int step = 0; step < substeps; ++step) {
        const double ua = u.value(t);
        const double um = u.value(t + 0.5 * tau);
        const double ub = u.value(t + tau);
        const double udda = u.derivative(t, 2);
        const double uddm = u.derivative(t + 0.5 * tau, 2);
        const double uddb = u.derivative(t + tau, 2);
        wave_rhs(s, v.data(), p.data(), ua, udda, k1v.data(), k1p.data());
        for (std::size_t i = 0; i < n; ++i) {
            tv[i] = v[i] + 0.5 * tau * k1v[i];
            tp[i] = p[i] + 0.5 * tau * k1p[i];
        }
        wave_rhs(s, tv.data(), tp.data(), um, uddm, k2v.data(), k2p.data());
        for (std::size_t i = 0; i < n; ++i) {
            tv[i] = v[i] + 0.5 * tau * k2v[i];
            tp[i] = p[i] + 0.5 * tau * k2p[i];
        }
        wave_rhs(s, tv.data(), tp.data(), um, uddm, k3v.data(), k3p.data());
        for (std::size_t i = 0; i < n; ++i) {
            tv[i] = v[i] + tau * k3v[i];
            tp[i] = p[i] + tau * k3p[i];
        }
        wave_rhs(s, tv.data(), tp.data(), ub, uddb, k4v.data(), k4p.data());
        for (std::size_t i = 0; i < n; ++i) {
            v[i] += tau / 6.0 * (k1v[i] + 2.0 * k2v[i] + 2.0 * k3v[i] + k4v[i]);
            p[i] += tau / 6.0 * (k1p[i] + 2.0 * k2p[i] + 2.0 * k3p[i] + k4p[i]);
        }
        t += tau;
    }
    s.t += dt;
    s.u = u.value(s.t);
    s.ud = u.derivative(s.t, 1);
    for (std::size_t i = 0; i < n; ++i) {
        s.w[i] = v[i] + s.xi2[i] * s.u;
        s.wt[i] = p[i] + s.xi2[i] * s.ud;
    }
    s.w[n] = s.u;
    s.wt[n] = s.ud;
    if (!all_finite(s.w) || !all_finite(s.wt)) {
        throw GuardError("wave plant: non-finite state", s.t);
    }
    return s.w.front();
}

int resolve_grid(int requested, int fallback) {
    const int grid = requested > 0 ? requested : fallback;
    if (grid < 50) {
        throw std::invalid_argument("plant_init: PDE plants need at least 50 grid intervals");
    }
    return grid;
}

}  // namespace

PlantState plant_init(const PlantSpec& spec, const SimOptions& options) {
    validate(spec);
    if (!(options.dt > 0.0)) {
        throw std::invalid_argument("plant_init: dt must be positive");
    }
    if (const auto* d = std::get_if<DelayPlantSpec>(&spec)) {
        return delay_init(*d, options.dt);
    }
    if (std::holds_alternative<HeatPlantSpec>(spec)) {
        HeatPlantState s;
        s.T.assign(static_cast<std::size_t>(resolve_grid(options.grid_points, kDefaultHeatGrid) + 1), 0.0);
        return s;
    }
    return wave_init(std::get<WavePlantSpec>(spec), resolve_grid(options.grid_points, kDefaultWaveGrid));
}

double plant_step(PlantState& state, const PlantSpec& spec, const Excitation& u, double dt) {
    if (!(dt > 0.0)) {
        throw std::invalid_argument("plant_step: dt must be positive");
    }
    if (state.index() != spec.index()) {
        throw std::invalid_argument("plant_step: state does not match the plant spec");
    }
    if (auto* d = std::get_if<DelayPlantState>(&state)) {
        return delay_step(*d, std::get<DelayPlantSpec>(spec), u, dt);
    }
    if (auto* h = std::get_if<HeatPlantState>(&state)) {
        return heat_step(*h, std::get<HeatPlantSpec>(spec), u, dt);
    }
    return wave_step(std::get<WavePlantState>(state), u, dt);
}

double plant_time(const PlantState& state) {
    return std::visit([](const auto& s) { return s.t; }, state);
}

std::complex<double> steady_state_response(const PlantSpec& spec, double omega, int n_series) {
    if (omega < 0.0) {
        throw std::invalid_argument("steady_state_response: omega must be >= 0");
    }
    if (const auto* w = std::get_if<WavePlantSpec>(&spec)) {
        if (n_series < 4) {
            throw std::invalid_argument("steady_state_response: series evaluation needs n_series >= 4");
        }
        const auto model = wave_coeffs_peano(w->ei, n_series);
        return series_tf(model.p, model.q, {0.0, omega});
    }
    return closed_form_tf(spec, omega);
}

double wave_energy(const WavePlantState& s, const PlantSpec& spec) {
    if (!std::holds_alternative<WavePlantSpec>(spec)) {
        throw std::invalid_argument("wave_energy: needs the wave plant");
    }
    const int N = s.intervals();
    double strain = 0.0;
    double kinetic = 0.0;
    auto v = [&](int i) { return s.w[static_cast<std::size_t>(i)] - s.xi2[static_cast<std::size_t>(i)] * s.u; };
    auto vt = [&](int i) { return s.wt[static_cast<std::size_t>(i)] - s.xi2[static_cast<std::size_t>(i)] * s.ud; };
    for (int i = 0; i < N; ++i) {
        const double slope = (v(i + 1) - v(i)) / s.h;
        strain += s.ei_half[static_cast<std::size_t>(i)] * slope * slope * s.h;
        const double weight = (i == 0) ? 0.5 : 1.0;
        kinetic += weight * vt(i) * vt(i) * s.h;
    }
    kinetic += 0.5 * vt(N) * vt(N) * s.h;
    return 0.5 * (strain + kinetic);
}

}  // namespace adaptid
