#pragma once

// Experiment configuration and the simulate / identify / sweep pipelines.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "adaptid/coeffs.hpp"
#include "adaptid/identifier.hpp"
#include "adaptid/pe.hpp"
#include "adaptid/reconstruct.hpp"

namespace adaptid {

/// Input signal for plant-only runs.
struct InputConfig {
    enum class Kind { Multisine, Tone, Zero } kind = Kind::Multisine;
    double freq = 1.0;
    double amp = 1.0;
};

struct ExperimentConfig {
    std::string name = "experiment";
    PlantSpec plant = DelayPlantSpec{};
    ParamBox bounds = DelayBox{};
    int n = 11;
    double omega_scale = 1.0;  // omega_n = omega_scale / (n + 1)
    double gamma = 50.0;
    std::vector<double> alpha0_head;  // leading entries of the initial estimate
    double alpha0_fill = 0.01;        // value of every remaining entry
    /// "default", "numerator", "denominator" or a list of coefficient names.
    std::vector<std::string> unknowns{"default"};
    double t_end = 200.0;
    double dt = kDefaultDt;
    int grid_points = 0;
    double decimation = 0.1;
    UpdateScheme scheme = UpdateScheme::Exponential;
    int sweep_min = 1;
    int sweep_max = 17;
    InputConfig input;
    double initial_displacement = 0.0;  // wave only: w(xi, 0) = A cos(pi xi / 2)
    unsigned seed = 0;                  // unused; the pipeline is deterministic

    [[nodiscard]] double omega() const { return omega_for(n); }
    [[nodiscard]] double omega_for(int order) const { return omega_scale / (order + 1); }
};

/// Throws std::invalid_argument with the offending key on malformed input.
[[nodiscard]] ExperimentConfig config_from_json(const nlohmann::json& j);
[[nodiscard]] nlohmann::json config_to_json(const ExperimentConfig& cfg);
[[nodiscard]] ExperimentConfig load_config(const std::string& path);
/// Checks cross-field constraints (t_end beyond one window, dt > 0, ...).
void validate_config(const ExperimentConfig& cfg);

/// Coefficient model at order n with the configured mask applied.
[[nodiscard]] CoeffModel configured_model(const ExperimentConfig& cfg, int n, double t = 0.0);
[[nodiscard]] Eigen::VectorXd initial_estimate(const ExperimentConfig& cfg, int unknowns);

struct GuardStatus {
    bool ok = true;
    std::string error;
    double time = 0.0;
};

struct IdentifyResult {
    std::vector<std::string> names;        // unknown coefficient names
    std::vector<std::string> param_names;  // reconstructed parameter names
    std::vector<double> t;
    std::vector<Eigen::VectorXd> alpha;
    std::vector<double> cost;
    std::vector<std::optional<ReconstructionResult>> params;
    Eigen::VectorXd alpha_true;  // true unknowns at the final time
    GuardStatus guard;
    nlohmann::json summary;

    /// Reconstructed parameter at the recorded time closest to t (nullopt if
    /// that sample was not invertible).
    [[nodiscard]] std::optional<double> param_at(const std::string& name, double t) const;
};

/// Plant, filters and estimator in lock step. Writes estimates.csv,
/// reconstruction.csv and summary.json into out_dir when it is non-empty.
/// Guard failures are reported in the result rather than thrown.
[[nodiscard]] IdentifyResult run_identify(const ExperimentConfig& cfg, const std::string& out_dir = "");

struct SimulateResult {
    std::vector<double> t;
    std::vector<double> u;
    std::vector<double> y;
    std::vector<double> energy;  // wave plant only
    GuardStatus guard;
};

/// Plant-only run; writes `t,u,y` (plus `H` for the wave plant) to csv_path
/// when it is non-empty.
[[nodiscard]] SimulateResult run_simulate(const ExperimentConfig& cfg, const std::string& csv_path = "");

/// PE sweep over [sweep_min, sweep_max]; writes `n,omega,kappa,tail,rho_u,method`.
[[nodiscard]] std::vector<PEReport> run_sweep_rho(const ExperimentConfig& cfg, const std::string& csv_path = "",
                                                  std::map<int, DataKappa>* kappa_cache = nullptr);

void write_sweep_csv(const std::vector<PEReport>& reports, const std::string& path);

}  // namespace adaptid
