// Command-line front end: simulate, identify, verify-pe, sweep-rho, reconstruct.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "adaptid/harness.hpp"

namespace fs = std::filesystem;
using namespace adaptid;

namespace {

struct Overrides {
    std::optional<int> n;
    std::optional<double> gamma;
    std::optional<double> t_end;
    std::optional<double> dt;
    std::optional<int> grid_points;
    std::optional<double> decimation;
    std::optional<std::string> scheme;
    std::optional<int> n_min;
    std::optional<int> n_max;

    void add_to(CLI::App* app) {
        app->add_option("--n", n, "Truncation order");
        app->add_option("--gamma", gamma, "Adaptation gain");
        app->add_option("--t-end", t_end, "Final time [s]");
        app->add_option("--dt", dt, "Time step [s]");
        app->add_option("--grid-points", grid_points, "PDE grid intervals");
        app->add_option("--decimation", decimation, "Output spacing [s]");
        app->add_option("--scheme", scheme, "Update-law integrator")->check(CLI::IsMember({"exponential", "rk4"}));
        app->add_option("--n-min", n_min, "First order of the sweep");
        app->add_option("--n-max", n_max, "Last order of the sweep");
    }

    ExperimentConfig apply(ExperimentConfig cfg) const {
        if (n) cfg.n = *n;
        if (gamma) cfg.gamma = *gamma;
        if (t_end) cfg.t_end = *t_end;
        if (dt) cfg.dt = *dt;
        if (grid_points) cfg.grid_points = *grid_points;
        if (decimation) cfg.decimation = *decimation;
        if (scheme) cfg.scheme = *scheme == "rk4" ? UpdateScheme::RK4 : UpdateScheme::Exponential;
        if (n_min) cfg.sweep_min = *n_min;
        if (n_max) cfg.sweep_max = *n_max;
        validate_config(cfg);
        return cfg;
    }
};

std::string join(const fs::path& dir, const char* file) { return (dir / file).string(); }

int report_guard(const GuardStatus& g) {
    if (g.ok) {
        return 0;
    }
    std::cerr << "guard tripped: " << g.error << '\n';
    return 1;
}

// Reads an estimates CSV (t,<names>,J) and writes t,<params> per row.
int reconstruct_file(const ExperimentConfig& cfg, const std::string& in_path, const std::string& out_path) {
    std::ifstream in(in_path);
    if (!in) {
        throw std::invalid_argument("cannot read " + in_path);
    }
    std::string line;
    std::getline(in, line);
    std::vector<std::string> cols;
    {
        std::stringstream ss(line);
        std::string c;
        while (std::getline(ss, c, ',')) cols.push_back(c);
    }
    if (cols.size() < 3 || cols.front() != "t" || cols.back() != "J") {
        throw std::invalid_argument(in_path + ": expected header t,<coefficient names>,J");
    }
    const std::vector<std::string> names(cols.begin() + 1, cols.end() - 1);
    auto model = configured_model(cfg, cfg.n);
    model.set_unknowns(names);
    const auto pnames = param_names(cfg.plant);
    std::ofstream out(out_path);
    out << "t";
    for (const auto& p : pnames) out << ',' << p;
    out << '\n';
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> v;
        while (std::getline(ss, cell, ',')) v.push_back(std::stod(cell));
        Eigen::VectorXd alpha(static_cast<Eigen::Index>(names.size()));
        for (std::size_t i = 0; i < names.size(); ++i) alpha[static_cast<Eigen::Index>(i)] = v[i + 1];
        out << std::setprecision(12) << v[0];
        try {
            const auto r = reconstruct_params(cfg.plant, cfg.n, model.embed(alpha));
            for (const auto& p : pnames) out << ',' << r.get(p);
        } catch (const std::domain_error&) {
            for (std::size_t i = 0; i < pnames.size(); ++i) out << ",NA";
        }
        out << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Adaptive identification of transfer-function coefficients"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    Overrides ov;

    auto* simulate = app.add_subcommand("simulate", "Plant-only run, writes trajectory.csv (t,u,y)");
    auto* identify = app.add_subcommand("identify", "Full identification run");
    auto* verify = app.add_subcommand("verify-pe", "Excitation level and tail ratio at the configured n");
    auto* sweep_cmd = app.add_subcommand("sweep-rho", "Tail ratio over a range of n, writes sweep.csv");
    auto* recon = app.add_subcommand("reconstruct", "Physical parameters from coefficient values");

    std::string estimates_path;
    std::vector<std::string> assignments;
    recon->add_option("--estimates", estimates_path, "estimates.csv from an identify run");
    recon->add_option("--set", assignments, "Coefficient value, e.g. --set q1=0.81");

    for (auto* sub : {simulate, identify, verify, sweep_cmd, recon}) {
        sub->add_option("config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
        sub->add_option("--out-dir", out_dir, "Directory for output files");
        ov.add_to(sub);
    }

    CLI11_PARSE(app, argc, argv);

    try {
        const auto cfg = ov.apply(load_config(config_path));
        const fs::path dir(out_dir);
        fs::create_directories(dir);

        if (*simulate) {
            const auto res = run_simulate(cfg, join(dir, "trajectory.csv"));
            std::cout << "wrote " << join(dir, "trajectory.csv") << " (" << res.t.size() << " rows)\n";
            return report_guard(res.guard);
        }
        if (*identify) {
            const auto res = run_identify(cfg, dir.string());
            std::cout << res.summary.dump(2) << '\n';
            return report_guard(res.guard);
        }
        if (*verify) {
            const auto bounds = bounds_for(cfg.plant, cfg.bounds, cfg.n);
            SweepOptions opts;
            opts.omega_rule = [&cfg](int n) { return cfg.omega_for(n); };
            opts.mask_rule = [&cfg](CoeffModel& m) { m = configured_model(cfg, m.n); };
            opts.data.sim = {cfg.grid_points, cfg.dt};
            const auto r = pe_report(cfg.plant, bounds, cfg.n, opts);
            std::printf("n=%d omega=%.6g method=%s kappa=%.6g tail=%.6g rho_u=%.6g settled=%s\n", r.n, r.omega,
                        r.method.c_str(), r.kappa, r.tail, r.rho_u, r.settled ? "yes" : "no");
            return (r.kappa > 0.0 && r.settled) ? 0 : 1;
        }
        if (*sweep_cmd) {
            const auto reports = run_sweep_rho(cfg, join(dir, "sweep.csv"));
            bool ok = true;
            for (const auto& r : reports) {
                std::printf("%d,%.6g,%.6g,%.6g,%.6g,%s\n", r.n, r.omega, r.kappa, r.tail, r.rho_u, r.method.c_str());
                ok = ok && r.kappa > 0.0 && r.settled;
            }
            return ok ? 0 : 1;
        }
        if (!estimates_path.empty()) {
            return reconstruct_file(cfg, estimates_path, join(dir, "reconstruction.csv"));
        }
        if (assignments.empty()) {
            std::cerr << "reconstruct: give --estimates or one or more --set name=value\n";
            return 2;
        }
        auto model = configured_model(cfg, cfg.n);
        Eigen::VectorXd beta = model.beta();
        for (const auto& a : assignments) {
            const auto eq = a.find('=');
            if (eq == std::string::npos) {
                throw std::invalid_argument("--set expects name=value, got " + a);
            }
            const auto name = a.substr(0, eq);
            bool found = false;
            for (int i = 0; i < model.dim(); ++i) {
                if (model.coefficient_name(i) == name) {
                    beta[i] = std::stod(a.substr(eq + 1));
                    found = true;
                }
            }
            if (!found) {
                throw std::invalid_argument("no coefficient named " + name);
            }
        }
        const auto r = reconstruct_params(cfg.plant, cfg.n, beta);
        for (const auto& [name, value] : r.params) {
            std::printf("%s=%.10g\n", name.c_str(), value);
        }
        std::printf("residual=%.3g iterations=%d\n", r.residual, r.iterations);
        return 0;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
