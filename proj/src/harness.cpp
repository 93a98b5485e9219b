#include "adaptid/harness.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "adaptid/excitation.hpp"
#include "adaptid/filters.hpp"
#include "adaptid/plants.hpp"

namespace adaptid {

using nlohmann::json;

namespace {

template <class T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) {
        return fallback;
    }
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("config: bad value for '") + key + "': " + e.what());
    }
}

double require_number(const json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_number()) {
        throw std::invalid_argument(std::string("config: '") + key + "' must be a number");
    }
    return j.at(key).get<double>();
}

Schedule schedule_from_json(const json& j, const char* key) {
    if (j.is_number()) {
        return Schedule(j.get<double>());
    }
    if (!j.is_array() || j.empty()) {
        throw std::invalid_argument(std::string("config: '") + key + "' must be a number or a list of pieces");
    }
    std::vector<Schedule::Piece> pieces;
    for (const auto& piece : j) {
        pieces.push_back({get_or(piece, "start", -std::numeric_limits<double>::infinity()),
                          require_number(piece, "offset"), get_or(piece, "slope", 0.0)});
    }
    return Schedule(std::move(pieces));
}

json schedule_to_json(const Schedule& s) {
    if (s.is_constant()) {
        return s.pieces().front().offset;
    }
    json out = json::array();
    for (std::size_t i = 0; i < s.pieces().size(); ++i) {
        const auto& piece = s.pieces()[i];
        json pj{{"offset", piece.offset}, {"slope", piece.slope}};
        if (i > 0) {
            pj["start"] = piece.start;
        }
        out.push_back(pj);
    }
    return out;
}

std::string kind_of(const json& j) {
    const auto kind = get_or<std::string>(j, "kind", "");
    if (kind != "delay" && kind != "heat" && kind != "wave") {
        throw std::invalid_argument("config: plant.kind must be one of delay, heat, wave");
    }
    return kind;
}

PlantSpec plant_from_json(const json& j) {
    const auto kind = kind_of(j);
    if (kind == "delay") {
        DelayPlantSpec d;
        d.K = get_or(j, "K", d.K);
        d.a = get_or(j, "a", d.a);
        d.b = get_or(j, "b", d.b);
        d.tau = get_or(j, "tau", d.tau);
        return d;
    }
    if (kind == "heat") {
        HeatPlantSpec h;
        if (j.contains("theta")) {
            h.theta = schedule_from_json(j.at("theta"), "theta");
        }
        if (j.contains("lambda")) {
            h.lambda = schedule_from_json(j.at("lambda"), "lambda");
        }
        return h;
    }
    WavePlantSpec w;
    if (j.contains("ei")) {
        const auto& ei = j.at("ei");
        if (ei.contains("samples")) {
            w.ei = StiffnessProfile::tabulated(ei.at("samples").get<std::vector<double>>());
        } else {
            w.ei = StiffnessProfile::linear(require_number(ei, "a"), require_number(ei, "b"));
        }
    }
    return w;
}

json plant_to_json(const PlantSpec& spec) {
    if (const auto* d = std::get_if<DelayPlantSpec>(&spec)) {
        return {{"kind", "delay"}, {"K", d->K}, {"a", d->a}, {"b", d->b}, {"tau", d->tau}};
    }
    if (const auto* h = std::get_if<HeatPlantSpec>(&spec)) {
        return {{"kind", "heat"}, {"theta", schedule_to_json(h->theta)}, {"lambda", schedule_to_json(h->lambda)}};
    }
    const auto& w = std::get<WavePlantSpec>(spec);
    json ei = w.ei.is_linear() ? json{{"a", w.ei.a()}, {"b", w.ei.b()}} : json{{"samples", w.ei.samples()}};
    return {{"kind", "wave"}, {"ei", ei}};
}

ParamBox box_from_json(const json& j, const PlantSpec& plant) {
    switch (plant.index()) {
        case 0: {
            DelayBox b;
            b.K_max = get_or(j, "K_max", b.K_max);
            b.a_max = get_or(j, "a_max", b.a_max);
            b.b_max = get_or(j, "b_max", b.b_max);
            b.tau_max = get_or(j, "tau_max", b.tau_max);
            return b;
        }
        case 1: {
            HeatBox b;
            b.theta_min = get_or(j, "theta_min", b.theta_min);
            b.lambda_max = get_or(j, "lambda_max", b.lambda_max);
            return b;
        }
        default: {
            WaveBox b;
            b.ei0_max = get_or(j, "ei0_max", b.ei0_max);
            b.ei_min = get_or(j, "ei_min", b.ei_min);
            return b;
        }
    }
}

json box_to_json(const ParamBox& box) {
    if (const auto* d = std::get_if<DelayBox>(&box)) {
        return {{"K_max", d->K_max}, {"a_max", d->a_max}, {"b_max", d->b_max}, {"tau_max", d->tau_max}};
    }
    if (const auto* h = std::get_if<HeatBox>(&box)) {
        return {{"theta_min", h->theta_min}, {"lambda_max", h->lambda_max}};
    }
    const auto& w = std::get<WaveBox>(box);
    return {{"ei0_max", w.ei0_max}, {"ei_min", w.ei_min}};
}

ParamBox default_box(const PlantSpec& plant) {
    switch (plant.index()) {
        case 0:
            return DelayBox{};
        case 1:
            return HeatBox{};
        default:
            return WaveBox{};
    }
}

std::string format_number(double v) {
    std::ostringstream os;
    os << std::setprecision(12) << v;
    return os.str();
}

class CsvWriter {
public:
    explicit CsvWriter(const std::string& path) {
        if (path.empty()) {
            return;
        }
        const auto parent = std::filesystem::path(path).parent_path();
        if (!parent.empty()) {
            std::filesystem::create_directories(parent);
        }
        out_.open(path);
        if (!out_) {
            throw std::runtime_error("cannot open " + path + " for writing");
        }
    }
    void header(const std::vector<std::string>& cols) {
        if (!out_.is_open()) {
            return;
        }
        for (std::size_t i = 0; i < cols.size(); ++i) {
            out_ << (i ? "," : "") << cols[i];
        }
        out_ << '\n';
    }
    void row(const std::vector<std::string>& cells) { header(cells); }
    void trailer(const GuardStatus& g) {
        if (out_.is_open() && !g.ok) {
            out_ << "# error at t=" << format_number(g.time) << ": " << g.error << '\n';
        }
    }

private:
    std::ofstream out_;
};

long long steps_for(double span, double dt) { return static_cast<long long>(std::llround(span / dt)); }

Excitation input_for(const ExperimentConfig& cfg) {
    switch (cfg.input.kind) {
        case InputConfig::Kind::Tone:
            return Excitation::tone(cfg.input.freq, cfg.input.amp);
        case InputConfig::Kind::Zero:
            return Excitation::zero();
        default:
            return Excitation::multisine(cfg.n, cfg.omega());
    }
}

void apply_initial_displacement(PlantState& state, double amplitude) {
    auto* w = std::get_if<WavePlantState>(&state);
    if (w == nullptr || amplitude == 0.0) {
        return;
    }
    const int N = w->intervals();
    for (int i = 0; i < N; ++i) {
        w->w[static_cast<std::size_t>(i)] = amplitude * std::cos(0.5 * std::numbers::pi * i / N);
    }
}

}  // namespace

ExperimentConfig config_from_json(const json& j) {
    if (!j.is_object()) {
        throw std::invalid_argument("config: top level must be an object");
    }
    ExperimentConfig cfg;
    cfg.name = get_or<std::string>(j, "name", cfg.name);
    if (!j.contains("plant")) {
        throw std::invalid_argument("config: missing 'plant' section");
    }
    cfg.plant = plant_from_json(j.at("plant"));
    cfg.bounds = j.contains("bounds") ? box_from_json(j.at("bounds"), cfg.plant) : default_box(cfg.plant);
    cfg.n = get_or(j, "n", cfg.n);
    cfg.omega_scale = get_or(j, "omega_scale", cfg.omega_scale);
    cfg.gamma = get_or(j, "gamma", cfg.gamma);
    if (j.contains("alpha0")) {
        const auto& a = j.at("alpha0");
        if (a.is_number()) {
            cfg.alpha0_fill = a.get<double>();
        } else if (a.is_array()) {
            cfg.alpha0_head = a.get<std::vector<double>>();
            cfg.alpha0_fill = std::numeric_limits<double>::quiet_NaN();  // length must match
        } else if (a.is_object()) {
            cfg.alpha0_head = get_or(a, "head", std::vector<double>{});
            cfg.alpha0_fill = get_or(a, "fill", 0.0);
        } else {
            throw std::invalid_argument("config: 'alpha0' must be a number, a list or {head, fill}");
        }
    }
    if (j.contains("unknowns")) {
        const auto& u = j.at("unknowns");
        cfg.unknowns = u.is_string() ? std::vector<std::string>{u.get<std::string>()} : u.get<std::vector<std::string>>();
    }
    cfg.t_end = get_or(j, "t_end", cfg.t_end);
    cfg.dt = get_or(j, "dt", cfg.dt);
    cfg.grid_points = get_or(j, "grid_points", cfg.grid_points);
    const auto scheme = get_or<std::string>(j, "scheme", "exponential");
    if (scheme == "exponential") {
        cfg.scheme = UpdateScheme::Exponential;
    } else if (scheme == "rk4") {
        cfg.scheme = UpdateScheme::RK4;
    } else {
        throw std::invalid_argument("config: 'scheme' must be exponential or rk4");
    }
    if (j.contains("output")) {
        cfg.decimation = get_or(j.at("output"), "decimation", cfg.decimation);
    }
    if (j.contains("sweep")) {
        cfg.sweep_min = get_or(j.at("sweep"), "n_min", cfg.sweep_min);
        cfg.sweep_max = get_or(j.at("sweep"), "n_max", cfg.sweep_max);
    }
    if (j.contains("input")) {
        const auto& in = j.at("input");
        const auto kind = get_or<std::string>(in, "kind", "multisine");
        if (kind == "multisine") {
            cfg.input.kind = InputConfig::Kind::Multisine;
        } else if (kind == "tone") {
            cfg.input.kind = InputConfig::Kind::Tone;
            cfg.input.freq = require_number(in, "freq");
            cfg.input.amp = get_or(in, "amp", 1.0);
        } else if (kind == "zero") {
            cfg.input.kind = InputConfig::Kind::Zero;
        } else {
            throw std::invalid_argument("config: input.kind must be multisine, tone or zero");
        }
    }
    cfg.initial_displacement = get_or(j, "initial_displacement", cfg.initial_displacement);
    cfg.seed = get_or(j, "seed", cfg.seed);
    validate_config(cfg);
    return cfg;
}

json config_to_json(const ExperimentConfig& cfg) {
    json alpha0;
    if (std::isnan(cfg.alpha0_fill)) {
        alpha0 = cfg.alpha0_head;
    } else {
        alpha0 = {{"head", cfg.alpha0_head}, {"fill", cfg.alpha0_fill}};
    }
    json input;
    switch (cfg.input.kind) {
        case InputConfig::Kind::Tone:
            input = {{"kind", "tone"}, {"freq", cfg.input.freq}, {"amp", cfg.input.amp}};
            break;
        case InputConfig::Kind::Zero:
            input = {{"kind", "zero"}};
            break;
        default:
            input = {{"kind", "multisine"}};
    }
    return {{"name", cfg.name},
            {"plant", plant_to_json(cfg.plant)},
            {"bounds", box_to_json(cfg.bounds)},
            {"n", cfg.n},
            {"omega_scale", cfg.omega_scale},
            {"omega", cfg.omega()},
            {"gamma", cfg.gamma},
            {"alpha0", alpha0},
            {"unknowns", cfg.unknowns},
            {"t_end", cfg.t_end},
            {"dt", cfg.dt},
            {"grid_points", cfg.grid_points},
            {"scheme", cfg.scheme == UpdateScheme::RK4 ? "rk4" : "exponential"},
            {"output", {{"decimation", cfg.decimation}}},
            {"sweep", {{"n_min", cfg.sweep_min}, {"n_max", cfg.sweep_max}}},
            {"input", input},
            {"initial_displacement", cfg.initial_displacement},
            {"seed", cfg.seed}};
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("cannot read config file " + path);
    }
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw std::invalid_argument("config " + path + ": " + e.what());
    }
    return config_from_json(j);
}

void validate_config(const ExperimentConfig& cfg) {
    validate(cfg.plant);
    if (cfg.plant.index() != cfg.bounds.index()) {
        throw std::invalid_argument("config: bounds do not match the plant kind");
    }
    if (cfg.n < 0) {
        throw std::invalid_argument("config: n must be >= 0");
    }
    if (!(cfg.omega_scale >= 1.0)) {
        throw std::invalid_argument("config: omega_scale must be >= 1 so that (n+1) omega_n >= 1");
    }
    if (!(cfg.gamma > 0.0)) {
        throw std::invalid_argument("config: gamma must be positive");
    }
    if (!(cfg.dt > 0.0)) {
        throw std::invalid_argument("config: dt must be positive");
    }
    if (!(cfg.t_end > 2.0 * std::numbers::pi / cfg.omega())) {
        throw std::invalid_argument("config: t_end must exceed one window 2 pi / omega_n = " +
                                    format_number(2.0 * std::numbers::pi / cfg.omega()));
    }
    if (!(cfg.decimation >= cfg.dt)) {
        throw std::invalid_argument("config: output decimation must be at least dt");
    }
    if (cfg.sweep_min < 0 || cfg.sweep_max < cfg.sweep_min - 1) {
        throw std::invalid_argument("config: bad sweep range");
    }
    if (cfg.unknowns.empty()) {
        throw std::invalid_argument("config: 'unknowns' must not be empty");
    }
}

CoeffModel configured_model(const ExperimentConfig& cfg, int n, double t) {
    auto model = model_for(cfg.plant, n, t);
    if (cfg.unknowns.size() == 1 && cfg.unknowns.front() == "default") {
        return model;
    }
    if (cfg.unknowns.size() == 1 && (cfg.unknowns.front() == "numerator" || cfg.unknowns.front() == "denominator")) {
        const bool numerator = cfg.unknowns.front() == "numerator";
        for (int i = 0; i < model.dim(); ++i) {
            model.known_mask[static_cast<std::size_t>(i)] = numerator ? (i > n) : (i <= n);
        }
        return model;
    }
    model.set_unknowns(cfg.unknowns);
    return model;
}

Eigen::VectorXd initial_estimate(const ExperimentConfig& cfg, int unknowns) {
    if (std::isnan(cfg.alpha0_fill) && static_cast<int>(cfg.alpha0_head.size()) != unknowns) {
        throw std::invalid_argument("config: alpha0 list has " + std::to_string(cfg.alpha0_head.size()) +
                                    " entries but the model has " + std::to_string(unknowns) + " unknowns");
    }
    if (static_cast<int>(cfg.alpha0_head.size()) > unknowns) {
        throw std::invalid_argument("config: alpha0 head is longer than the number of unknowns");
    }
    Eigen::VectorXd a = Eigen::VectorXd::Constant(unknowns, std::isnan(cfg.alpha0_fill) ? 0.0 : cfg.alpha0_fill);
    for (std::size_t i = 0; i < cfg.alpha0_head.size(); ++i) {
        a[static_cast<Eigen::Index>(i)] = cfg.alpha0_head[i];
    }
    return a;
}

std::optional<double> IdentifyResult::param_at(const std::string& name, double time) const {
    if (t.empty()) {
        return std::nullopt;
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < t.size(); ++i) {
        if (std::abs(t[i] - time) < std::abs(t[best] - time)) {
            best = i;
        }
    }
    if (!params[best]) {
        return std::nullopt;
    }
    return params[best]->get(name);
}

IdentifyResult run_identify(const ExperimentConfig& cfg, const std::string& out_dir) {
    validate_config(cfg);
    const double omega = cfg.omega();
    const double dt = cfg.dt;
    const auto model = configured_model(cfg, cfg.n);
    Estimator est(model, cfg.gamma, initial_estimate(cfg, model.unknown_count()), omega, dt, cfg.scheme);

    IdentifyResult res;
    res.names = model.unknown_names();
    res.param_names = param_names(cfg.plant);

    std::string est_path;
    std::string rec_path;
    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        est_path = (std::filesystem::path(out_dir) / "estimates.csv").string();
        rec_path = (std::filesystem::path(out_dir) / "reconstruction.csv").string();
    }
    CsvWriter est_csv(est_path);
    CsvWriter rec_csv(rec_path);
    {
        auto cols = res.names;
        cols.insert(cols.begin(), "t");
        cols.emplace_back("J");
        est_csv.header(cols);
        auto pcols = res.param_names;
        pcols.insert(pcols.begin(), "t");
        rec_csv.header(pcols);
    }

    auto record = [&](double t) {
        res.t.push_back(t);
        res.alpha.push_back(est.alpha());
        res.cost.push_back(est.cost());
        std::optional<ReconstructionResult> rec;
        try {
            rec = reconstruct_params(cfg.plant, cfg.n, est.beta_bar());
        } catch (const std::domain_error&) {
        }
        res.params.push_back(rec);
        std::vector<std::string> row{format_number(t)};
        for (Eigen::Index i = 0; i < est.alpha().size(); ++i) {
            row.push_back(format_number(est.alpha()[i]));
        }
        row.push_back(format_number(res.cost.back()));
        est_csv.row(row);
        std::vector<std::string> prow{format_number(t)};
        for (const auto& name : res.param_names) {
            prow.push_back(rec ? format_number(rec->get(name)) : "NA");
        }
        rec_csv.row(prow);
    };

    const long long total = steps_for(cfg.t_end, dt);
    const long long every = std::max(1LL, steps_for(cfg.decimation, dt));
    double t = 0.0;
    try {
        auto plant = plant_init(cfg.plant, {cfg.grid_points, dt});
        const auto u = Excitation::multisine(cfg.n, omega);
        auto u_bank = FilterBank::create(cfg.n, omega);
        auto y_bank = FilterBank::create(cfg.n, omega);
        record(0.0);
        double y_prev = 0.0;
        for (long long k = 0; k < total; ++k) {
            const double t_next = static_cast<double>(k + 1) * dt;
            const double y = plant_step(plant, cfg.plant, u, dt);
            u_bank.step(u.value(t), u.value(t_next), dt);
            y_bank.step(y_prev, y, dt);
            y_prev = y;
            t = t_next;
            est.step(regressor_assemble(u_bank, y_bank, t));
            if ((k + 1) % every == 0) {
                record(t);
            }
        }
    } catch (const GuardError& e) {
        res.guard = {false, e.what(), e.time()};
    }
    est_csv.trailer(res.guard);
    rec_csv.trailer(res.guard);

    const double t_final = res.t.empty() ? 0.0 : res.t.back();
    const auto truth = configured_model(cfg, cfg.n, t_final);
    res.alpha_true = truth.select(truth.beta());

    json estimates = json::object();
    json true_coeffs = json::object();
    for (std::size_t i = 0; i < res.names.size(); ++i) {
        estimates[res.names[i]] = res.alpha.empty() ? 0.0 : res.alpha.back()[static_cast<Eigen::Index>(i)];
        true_coeffs[res.names[i]] = res.alpha_true[static_cast<Eigen::Index>(i)];
    }
    json params = nullptr;
    if (!res.params.empty() && res.params.back()) {
        params = json::object();
        for (const auto& [name, value] : res.params.back()->params) {
            params[name] = value;
        }
    }
    res.summary = {{"config", config_to_json(cfg)},
                   {"final_time", t_final},
                   {"estimates", estimates},
                   {"true_coefficients", true_coeffs},
                   {"parameters", params},
                   {"final_cost", res.cost.empty() ? 0.0 : res.cost.back()},
                   {"guard", {{"ok", res.guard.ok}, {"error", res.guard.error}, {"time", res.guard.time}}}};
    if (!out_dir.empty()) {
        std::ofstream out(std::filesystem::path(out_dir) / "summary.json");
        out << std::setw(2) << res.summary << '\n';
    }
    return res;
}

SimulateResult run_simulate(const ExperimentConfig& cfg, const std::string& csv_path) {
    validate_config(cfg);
    const double dt = cfg.dt;
    const bool wave = std::holds_alternative<WavePlantSpec>(cfg.plant);
    SimulateResult res;
    CsvWriter csv(csv_path);
    csv.header(wave ? std::vector<std::string>{"t", "u", "y", "H"} : std::vector<std::string>{"t", "u", "y"});
    const auto u = input_for(cfg);
    auto record = [&](const PlantState& state, double t, double y) {
        res.t.push_back(t);
        res.u.push_back(u.value(t));
        res.y.push_back(y);
        std::vector<std::string> row{format_number(t), format_number(res.u.back()), format_number(y)};
        if (wave) {
            res.energy.push_back(wave_energy(std::get<WavePlantState>(state), cfg.plant));
            row.push_back(format_number(res.energy.back()));
        }
        csv.row(row);
    };
    const long long total = steps_for(cfg.t_end, dt);
    const long long every = std::max(1LL, steps_for(cfg.decimation, dt));
    try {
        auto plant = plant_init(cfg.plant, {cfg.grid_points, dt});
        apply_initial_displacement(plant, cfg.initial_displacement);
        double y0 = 0.0;
        if (const auto* w = std::get_if<WavePlantState>(&plant)) {
            y0 = w->w.front();
        }
        record(plant, 0.0, y0);
        for (long long k = 0; k < total; ++k) {
            const double y = plant_step(plant, cfg.plant, u, dt);
            if ((k + 1) % every == 0) {
                record(plant, static_cast<double>(k + 1) * dt, y);
            }
        }
    } catch (const GuardError& e) {
        res.guard = {false, e.what(), e.time()};
    }
    csv.trailer(res.guard);
    return res;
}

void write_sweep_csv(const std::vector<PEReport>& reports, const std::string& path) {
    CsvWriter csv(path);
    csv.header({"n", "omega", "kappa", "tail", "rho_u", "method"});
    for (const auto& r : reports) {
        csv.row({std::to_string(r.n), format_number(r.omega), format_number(r.kappa), format_number(r.tail),
                 format_number(r.rho_u), r.method});
    }
}

std::vector<PEReport> run_sweep_rho(const ExperimentConfig& cfg, const std::string& csv_path,
                                    std::map<int, DataKappa>* kappa_cache) {
    validate(cfg.plant);
    std::vector<int> range;
    for (int n = cfg.sweep_min; n <= cfg.sweep_max; ++n) {
        range.push_back(n);
    }
    SweepOptions opts;
    opts.omega_rule = [&cfg](int n) { return cfg.omega_for(n); };
    opts.mask_rule = [&cfg](CoeffModel& m) { m = configured_model(cfg, m.n); };
    opts.data.sim = {cfg.grid_points, cfg.dt};
    opts.kappa_cache = kappa_cache;
    auto reports = sweep(cfg.plant, cfg.bounds, range, opts);
    if (!csv_path.empty()) {
        write_sweep_csv(reports, csv_path);
    }
    return reports;
}

}  // namespace adaptid
