// End-to-end acceptance checks. One line per criterion; exits 1 if any fails.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "adaptid/harness.hpp"
#include "properties.hpp"

using namespace adaptid;

namespace {

int failures = 0;

void report(const std::string& id, bool ok, const std::string& detail) {
    std::printf("%s %-28s %s\n", ok ? "PASS" : "FAIL", id.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!ok) {
        ++failures;
    }
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

std::string config_dir() {
#ifdef ADAPTID_CONFIG_DIR
    return ADAPTID_CONFIG_DIR;
#else
    return "configs";
#endif
}

ExperimentConfig preset(const std::string& name) { return load_config(config_dir() + "/" + name + ".json"); }

double param(const IdentifyResult& r, const std::string& name, double t) {
    const auto v = r.param_at(name, t);
    return v ? *v : std::nan("");
}

bool within(double got, double want, double tol) { return std::abs(got - want) <= tol; }

void delay_end_to_end() {
    const auto r = run_identify(preset("delay"));
    const double K = param(r, "K", 200.0), tau = param(r, "tau", 200.0);
    const double a = param(r, "a", 200.0), b = param(r, "b", 200.0);
    const bool ok = r.guard.ok && within(K, 1.5, 0.015) && within(tau, 0.1, 0.005) && within(a, 0.3, 0.01) &&
                    within(b, 1.0, 0.01);
    report("1 delay n=11 t=200", ok, fmt("K=%.4f tau=%.4f a=%.4f b=%.4f", K, tau, a, b));
}

void heat_end_to_end() {
    const auto r = run_identify(preset("heat"));
    const double th = param(r, "theta", 50.0), la = param(r, "lambda", 50.0);
    report("2a heat settle by t=50", r.guard.ok && within(th, 5.0, 0.1) && within(la, 1.5, 0.05),
           fmt("theta=%.4f lambda=%.4f", th, la));
    double worst = 0.0;
    double at = 0.0;
    for (std::size_t i = 0; i < r.t.size(); ++i) {
        const double t = r.t[i];
        if (t < 130.0 - 1e-9 || t > 160.0 + 1e-9) {
            continue;
        }
        const auto& p = r.params[i];
        const double err = p ? std::abs(p->get("theta") - (6.0 + 0.0005 * t)) : INFINITY;
        if (!(err <= worst)) {
            worst = err;
            at = t;
        }
    }
    report("2b heat tracking [130,160]", r.guard.ok && worst <= 0.15, fmt("max|theta err|=%.4f at t=%.1f", worst, at));
}

void wave_end_to_end() {
    const auto r = run_identify(preset("wave"));
    const double a = param(r, "a", 150.0), b = param(r, "b", 150.0);
    report("3 wave n=16 t=150", r.guard.ok && within(a, 20.0, 0.15) && within(b, 10.0, 0.05),
           fmt("a=%.4f b=%.4f", a, b));
}

double rel(double got, double want) { return std::abs(got - want) / std::abs(want); }

void pe_sweeps() {
    auto heat = preset("heat");
    heat.sweep_min = heat.sweep_max = 9;
    const auto h = run_sweep_rho(heat).front();
    report("4a heat rho_9", rel(h.rho_u, 5.624e-7) <= 0.05, fmt("rho=%.4e (%s)", h.rho_u, h.method.c_str()));

    auto wave = preset("wave");
    wave.sweep_min = wave.sweep_max = 16;
    const auto w = run_sweep_rho(wave).front();
    report("4b wave rho_16", rel(w.rho_u, 3.84e-6) <= 0.05, fmt("rho=%.4e (%s)", w.rho_u, w.method.c_str()));

    std::map<int, DataKappa> cache;
    auto delay = preset("delay");
    delay.sweep_min = 1;
    delay.sweep_max = 17;
    const auto tight_delay = run_sweep_rho(delay, "", &cache);
    double rho11 = 0.0;
    for (const auto& rep : tight_delay) {
        if (rep.n == 11) {
            rho11 = rep.rho_u;
        }
    }
    const double ratio = rho11 / 3.027e-5;
    report("4c delay rho_11", ratio >= 0.5 && ratio <= 2.0, fmt("rho=%.4e ratio=%.5f", rho11, ratio));

    auto ordering = [](const std::vector<PEReport>& tight, const std::vector<PEReport>& loose) {
        int bad = 0;
        for (std::size_t i = 0; i < tight.size() && i < loose.size(); ++i) {
            if (!(loose[i].rho_u >= tight[i].rho_u)) {
                ++bad;
            }
        }
        return bad + static_cast<int>(tight.size() != loose.size() || tight.size() != 17);
    };
    auto sweep_all = [](ExperimentConfig cfg, std::map<int, DataKappa>* c = nullptr) {
        cfg.sweep_min = 1;
        cfg.sweep_max = 17;
        return run_sweep_rho(cfg, "", c);
    };
    const int bad_delay = ordering(tight_delay, sweep_all(preset("delay_loose"), &cache));
    const int bad_heat = ordering(sweep_all(preset("heat")), sweep_all(preset("heat_loose")));
    const int bad_wave = ordering(sweep_all(preset("wave")), sweep_all(preset("wave_loose")));
    report("4d loose >= tight n=1..17", bad_delay + bad_heat + bad_wave == 0,
           fmt("violations delay=%d heat=%d wave=%d", bad_delay, bad_heat, bad_wave));
}

void properties() {
    const double r1 = props::steady_state_residual(1, 1.0), r2 = props::steady_state_residual(2, 1.0),
                 r3 = props::steady_state_residual(3, 1.0);
    report("5a steady-state residual", r2 < r1 && r3 < r2 && r3 < 1e-5,
           fmt("n=1..3: %.2e %.2e %.2e", r1, r2, r3));
    const double conf = std::max(props::filter_conformance_error(3, 0.25), props::filter_conformance_error(11, 1.0 / 12));
    report("5b filter conformance", conf < 1e-3, fmt("rel err=%.2e", conf));
    const double gram = props::gram_identity_error();
    report("5c gram identity", gram < 1e-3, fmt("rel err=%.2e", gram));
    const double grad = props::gradient_fd_error();
    report("5d gradient vs fd", grad < 1e-6, fmt("rel err=%.2e", grad));
    const double peano = props::peano_error();
    report("5e peano q1 q2", peano < 1e-6, fmt("rel err=%.2e", peano));
    const double decay = props::energy_decay_ratio(20.0);
    report("5f wave energy decay", decay <= 1.0, fmt("max H/(4H0 e^-t/4)=%.3f", decay));
    const auto rt = props::roundtrip_errors(50);
    report("5g reconstruction round trip", std::max({rt.delay, rt.heat, rt.wave}) < 1e-6,
           fmt("delay=%.1e heat=%.1e wave=%.1e", rt.delay, rt.heat, rt.wave));
    const double ident = props::rho_identity_error();
    report("5h rho log identity", ident < 1e-12, fmt("rel err=%.1e", ident));
}

void monotone_improvement() {
    std::vector<double> errs;
    std::string detail;
    for (int n : {3, 5, 7, 9}) {
        auto cfg = preset("heat");
        cfg.plant = HeatPlantSpec{};
        cfg.n = n;
        cfg.t_end = 160.0;
        const auto r = run_identify(cfg);
        errs.push_back(r.guard.ok ? (r.alpha.back() - r.alpha_true).norm() : INFINITY);
        detail += fmt("n=%d:%.2e ", n, errs.back());
    }
    bool ok = true;
    for (std::size_t i = 1; i < errs.size(); ++i) {
        ok = ok && errs[i] < errs[i - 1];
    }
    report("6 heat error decreasing in n", ok, detail);
}

}  // namespace

// Usage: acceptance [stage...], stages: delay heat wave pe properties monotone.
int main(int argc, char** argv) {
    const std::vector<std::pair<std::string, std::function<void()>>> stages{
        {"delay", delay_end_to_end}, {"heat", heat_end_to_end},      {"wave", wave_end_to_end},
        {"pe", pe_sweeps},           {"properties", properties}, {"monotone", monotone_improvement}};
    std::vector<std::string> wanted(argv + 1, argv + argc);
    for (const auto& w : wanted) {
        if (std::none_of(stages.begin(), stages.end(), [&](const auto& s) { return s.first == w; })) {
            std::fprintf(stderr, "unknown stage: %s\n", w.c_str());
            return 2;
        }
    }
    for (const auto& [name, stage] : stages) {
        if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), name) == wanted.end()) {
            continue;
        }
        try {
            stage();
        } catch (const std::exception& e) {
            report(name + " error", false, e.what());
        }
    }
    std::printf("%d failing\n", failures);
    return failures == 0 ? 0 : 1;
}
