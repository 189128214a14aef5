#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "phasemeter/io.hpp"

namespace pm = phasemeter;
using pm::Json;

namespace {

using ConfigMap = std::map<std::string, std::string>;

const std::set<std::string> kKnownKeys = {
    "state_type", "state_coeffs", "state_x", "state_p", "state_max_level",
    "lambda", "kappa", "detune_ratio", "pointer_width1", "pointer_width2",
    "readout_shift1", "readout_shift2", "dim", "profile", "seed", "regime",
    "region", "max_order", "grid_a", "grid_b",
    "kernel_form", "kernel_width", "kernel_shift", "kernel_file",
    "psi1d_width", "psi1d_p0", "psi1d_center", "grid1d_extent", "grid1d_n",
};

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    auto e = s.find_last_not_of(" \t\r\n");
    return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

void set_key(ConfigMap& cfg, const std::string& key, const std::string& value) {
    if (!kKnownKeys.count(key))
        throw pm::ValidationError("unknown config key: " + key);
    cfg[key] = value;
}

ConfigMap load_config_file(const std::string& path) {
    ConfigMap cfg;
    std::istringstream is(pm::read_text(path));
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto eq = t.find('=');
        if (eq == std::string::npos)
            throw pm::ValidationError(path + ":" + std::to_string(lineno) +
                                      ": expected key=value");
        set_key(cfg, trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    }
    return cfg;
}

double get_num(const ConfigMap& cfg, const std::string& key, double fallback) {
    auto it = cfg.find(key);
    if (it == cfg.end()) return fallback;
    try {
        std::size_t used = 0;
        double v = std::stod(it->second, &used);
        if (used != it->second.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw pm::ValidationError("config key " + key + ": not a number: " + it->second);
    }
}

std::string get_str(const ConfigMap& cfg, const std::string& key,
                    const std::string& fallback) {
    auto it = cfg.find(key);
    return it == cfg.end() ? fallback : it->second;
}

pm::Profile get_profile(const ConfigMap& cfg) {
    std::string p = get_str(cfg, "profile", "default");
    if (p == "default") return pm::Profile::Default;
    if (p == "fine") return pm::Profile::Fine;
    throw pm::ValidationError("profile must be 'default' or 'fine', got: " + p);
}

std::vector<double> split_nums(const std::string& s, const std::string& what) {
    std::vector<double> out;
    std::istringstream is(s);
    std::string tok;
    while (std::getline(is, tok, ',')) {
        tok = trim(tok);
        if (tok.empty()) continue;
        try {
            out.push_back(std::stod(tok));
        } catch (const std::exception&) {
            throw pm::ValidationError(what + ": not a number: " + tok);
        }
    }
    return out;
}

pm::StateVector build_state(const ConfigMap& cfg, std::uint64_t seed, int dim) {
    const double lambda = get_num(cfg, "lambda", 1.0);
    std::string type = get_str(cfg, "state_type", "fock");
    if (type == "fock") {
        std::vector<double> nums =
            split_nums(get_str(cfg, "state_coeffs", "1,0"), "state_coeffs");
        if (nums.empty() || nums.size() % 2 != 0)
            throw pm::ValidationError("state_coeffs: expected re,im pairs");
        int n = int(nums.size() / 2);
        pm::Vec amps = pm::Vec::Zero(std::max(n, dim));
        for (int i = 0; i < n; ++i) amps[i] = pm::Complex(nums[2 * i], nums[2 * i + 1]);
        return pm::StateVector{amps, lambda}.normalized();
    }
    if (type == "coherent") {
        pm::CoherentLabel label{get_num(cfg, "state_x", 0.0), get_num(cfg, "state_p", 0.0),
                                lambda};
        return pm::coherent_fock_coefficients(label, dim);
    }
    if (type == "random") {
        int maxLevel = int(get_num(cfg, "state_max_level", 3.0));
        return pm::random_finite_state(unsigned(seed), maxLevel, dim, lambda);
    }
    throw pm::ValidationError("state_type must be fock, coherent or random, got: " + type);
}

pm::MeasurementConfig build_measurement(const ConfigMap& cfg) {
    const double lambda = get_num(cfg, "lambda", 1.0);
    const double kappa = get_num(cfg, "kappa", 1.0);
    const double ratio = get_num(cfg, "detune_ratio", 1.0);
    pm::MeasurementConfig mc =
        pm::MeasurementConfig::detuned(lambda, ratio, get_profile(cfg), kappa);
    if (cfg.count("pointer_width1")) mc.pointerWidth1 = get_num(cfg, "pointer_width1", 0.0);
    if (cfg.count("pointer_width2")) mc.pointerWidth2 = get_num(cfg, "pointer_width2", 0.0);
    mc.readoutShift1 = get_num(cfg, "readout_shift1", 0.0);
    mc.readoutShift2 = get_num(cfg, "readout_shift2", 0.0);
    if (!(mc.pointerWidth1 > 0.0))
        throw pm::ValidationError("pointerWidth1 must be positive");
    if (!(mc.pointerWidth2 > 0.0))
        throw pm::ValidationError("pointerWidth2 must be positive");
    mc.validate();
    return mc;
}

std::pair<pm::Axis, pm::Axis> phase_space_axes(const ConfigMap& cfg) {
    const double lambda = get_num(cfg, "lambda", 1.0);
    const bool fine = get_profile(cfg) == pm::Profile::Fine;
    const double r = fine ? 11.0 : 8.0;
    const int n = fine ? 256 : 128;
    return {pm::Axis::centered(r * lambda, n), pm::Axis::centered(r / lambda, n)};
}

Json envelope(const std::string& command, const ConfigMap& cfg, std::uint64_t seed) {
    Json jc = Json::object();
    for (const auto& [k, v] : cfg) jc[k] = v;
    auto now = std::chrono::system_clock::now().time_since_epoch();
    return Json{{"schema", "phasemeter/1"},
                {"command", command},
                {"config", jc},
                {"seed", seed},
                {"metadata",
                 {{"timestamp_ms",
                   std::chrono::duration_cast<std::chrono::milliseconds>(now).count()}}}};
}

pm::MeasurementKernel build_kernel(const ConfigMap& cfg) {
    std::string form = get_str(cfg, "kernel_form", "delta");
    if (form == "delta")
        return pm::delta_kernel(pm::Mat(), {}, {}, get_num(cfg, "kernel_shift", 0.0));
    if (form == "gaussian") return pm::gaussian_kernel(get_num(cfg, "kernel_width", 0.1));
    if (form == "sampled") {
        std::string path = get_str(cfg, "kernel_file", "");
        if (path.empty()) throw pm::ValidationError("kernel_form=sampled needs kernel_file");
        Json j = pm::read_json(path);
        auto axis = [](const Json& a) {
            return pm::Axis{a.at("min").get<double>(), a.at("step").get<double>(),
                            a.at("n").get<int>()};
        };
        const auto& vals = j.at("samples");
        std::vector<pm::Complex> samples(vals.size());
        for (std::size_t i = 0; i < vals.size(); ++i)
            samples[i] = pm::Complex(vals[i].at(0).get<double>(), vals[i].at(1).get<double>());
        return pm::sampled_kernel(std::move(samples), axis(j.at("xAxis")),
                                  axis(j.at("muAxis")), axis(j.at("xpAxis")));
    }
    throw pm::ValidationError("kernel_form must be delta, gaussian or sampled, got: " + form);
}

int run_command(const std::string& command, const ConfigMap& cfg,
                const std::string& outDir, std::uint64_t seed) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(outDir, ec);
    if (ec) throw pm::IoError("cannot create output directory: " + outDir);
    auto outPath = [&](const std::string& name) { return (fs::path(outDir) / name).string(); };
    const int dim = int(get_num(cfg, "dim", 12.0));
    if (dim < 2 || dim > 64) throw pm::ValidationError("dim must be in [2, 64]");
    const double lambda = get_num(cfg, "lambda", 1.0);

    if (command == "simulate-joint" || command == "error-report") {
        pm::MeasurementConfig mc = build_measurement(cfg);
        Json out = envelope(command, cfg, seed);
        if (command == "simulate-joint") {
            pm::MeasurementProcess proc(mc);
            pm::StateVector psi = build_state(cfg, seed, dim).normalized();
            pm::JointWavefunction J = proc.evolve(psi);
            pm::PhaseSpaceGrid rho = proc.pointer_distribution(J);
            pm::write_grid_csv(outPath("rho.csv"), rho);
            pm::write_json(outPath("rho.json"),
                           [&] { Json g = envelope(command, cfg, seed);
                                 g["grid"] = pm::grid_to_json(rho); return g; }());
        }
        pm::MeasurementConfig opCfg = mc;
        opCfg.grid = pm::operator_grid(mc.lambdaTarget, mc.coupling, get_profile(cfg));
        pm::MeasurementProcess opProc(opCfg);
        std::string regime = get_str(cfg, "regime", "retrodictive");
        if (regime != "retrodictive" && regime != "predictive")
            throw pm::ValidationError("regime must be retrodictive or predictive, got: " +
                                      regime);
        pm::ErrorReport rep = pm::worst_case_errors(
            opProc, regime == "retrodictive" ? pm::Regime::Retrodictive
                                             : pm::Regime::Predictive,
            dim);
        out["report"] = pm::error_report_to_json(rep);
        pm::write_json(outPath("report.json"), out);
        return 0;
    }

    if (command == "husimi") {
        pm::StateVector psi = build_state(cfg, seed, dim).normalized();
        auto [xAxis, pAxis] = phase_space_axes(cfg);
        pm::PhaseSpaceGrid q = pm::husimi_q(psi, xAxis, pAxis, lambda);
        pm::write_grid_csv(outPath("q.csv"), q);
        Json out = envelope(command, cfg, seed);
        out["grid"] = pm::grid_to_json(q);
        pm::write_json(outPath("q.json"), out);
        return 0;
    }

    if (command == "compare") {
        std::string pa = get_str(cfg, "grid_a", ""), pb = get_str(cfg, "grid_b", "");
        if (pa.empty() || pb.empty())
            throw pm::ValidationError("compare needs grid_a and grid_b");
        pm::PhaseSpaceGrid a = pm::read_grid(pa), b = pm::read_grid(pb);
        int maxOrder = int(get_num(cfg, "max_order", 6.0));
        std::vector<std::pair<double, double>> ks;
        for (int i = -2; i <= 2; ++i)
            for (int j = -2; j <= 2; ++j)
                ks.emplace_back(0.5 * i * a.lambda, 0.5 * j / a.lambda);
        pm::EqualityReport rep = pm::measure_equality_oracle(a, b, maxOrder, ks);
        Json out = envelope(command, cfg, seed);
        out["equality"] = pm::equality_report_to_json(rep);
        pm::write_json(outPath("equality.json"), out);
        return 0;
    }

    if (command == "posterior") {
        std::vector<double> r = split_nums(get_str(cfg, "region", ""), "region");
        if (r.size() != 4)
            throw pm::ValidationError("region must be x0,x1,p0,p1");
        pm::Rect region{r[0], r[1], r[2], r[3]};
        pm::MeasurementConfig mc = build_measurement(cfg);
        pm::MeasurementProcess proc(mc);
        pm::StateVector psi = build_state(cfg, seed, dim).normalized();
        pm::JointWavefunction J = proc.evolve(psi);
        auto [rho, pR] = proc.condition_on_region(J, region, dim);
        pm::CoherentLabel center{0.5 * (region.x0 + region.x1),
                                 0.5 * (region.p0 + region.p1), lambda};
        pm::StateVector coh = pm::coherent_fock_coefficients(center, dim, 1e-6);
        double fidelity =
            (coh.amplitudes.adjoint() * rho * coh.amplitudes)(0, 0).real() /
            coh.amplitudes.squaredNorm();
        Json out = envelope(command, cfg, seed);
        out["posterior"] = {{"density", pm::matrix_to_json(rho)},
                            {"probability", pR},
                            {"coherentFidelity", fidelity}};
        pm::write_json(outPath("posterior.json"), out);
        return 0;
    }

    if (command == "simulate-1d") {
        const bool fine = get_profile(cfg) == pm::Profile::Fine;
        double extent = get_num(cfg, "grid1d_extent", fine ? 20.0 : 13.0);
        int n = int(get_num(cfg, "grid1d_n", fine ? 512.0 : 128.0));
        if (n < 8) throw pm::ValidationError("grid1d_n must be >= 8");
        pm::Axis x = pm::Axis::centered(extent, n);
        pm::Wavefunction1D psi = pm::modulated_gaussian(
            x, get_num(cfg, "psi1d_width", 1.0), get_num(cfg, "psi1d_p0", 0.0),
            get_num(cfg, "psi1d_center", 0.0));
        pm::MeasurementKernel K = build_kernel(cfg);
        pm::OutcomeDistribution d = pm::outcome_distribution(K, psi);
        double err = pm::retro_error(K, psi);
        pm::write_outcome_csv(outPath("outcome.csv"), d);
        Json out = envelope(command, cfg, seed);
        out["outcome"] = pm::outcome_to_json(d);
        out["retroError"] = err;
        pm::write_json(outPath("simulate1d.json"), out);
        return 0;
    }

    if (command == "oracle") {
        pm::StateVector psi = build_state(cfg, seed, dim).normalized();
        auto [xAxis, pAxis] = phase_space_axes(cfg);
        pm::PhaseSpaceGrid q = pm::husimi_q(psi, xAxis, pAxis, lambda);
        int maxOrder = int(get_num(cfg, "max_order", 6.0));
        pm::MomentTable table = pm::grid_moments(q, maxOrder);
        Json chars = Json::array();
        for (int i = -2; i <= 2; ++i)
            for (int j = -2; j <= 2; ++j) {
                double kx = 0.5 * i * lambda, kp = 0.5 * j / lambda;
                pm::Complex c = pm::characteristic_function(q, kx, kp);
                chars.push_back({{"kX", kx}, {"kP", kp}, {"value", {c.real(), c.imag()}}});
            }
        Json out = envelope(command, cfg, seed);
        out["moments"] = pm::moment_table_to_json(table);
        out["characteristic"] = chars;
        pm::write_json(outPath("oracle.json"), out);
        return 0;
    }

    throw pm::ValidationError("unknown command: " + command);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"phasemeter: joint position-momentum measurement simulator"};
    app.require_subcommand(1);
    app.fallthrough(true);

    std::string configPath, outDir = ".", profile;
    std::vector<std::string> overrides;
    std::uint64_t seed = 0;
    bool seedGiven = false;
    app.add_option("--config", configPath, "flat key=value config file");
    app.add_option("--set", overrides, "override KEY=VALUE (repeatable)");
    app.add_option("--out", outDir, "output directory");
    app.add_option("--profile", profile, "grid profile")
        ->check(CLI::IsMember({"default", "fine"}));
    auto* seedOpt = app.add_option("--seed", seed, "random seed");

    const std::vector<std::string> commands = {"simulate-joint", "husimi",  "compare",
                                               "error-report",   "posterior",
                                               "simulate-1d",    "oracle"};
    std::vector<std::string> positionals;
    for (const std::string& c : commands) {
        auto* sub = app.add_subcommand(c);
        if (c == "compare")
            sub->add_option("grids", positionals, "grid files to compare")->expected(0, 2);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }
    seedGiven = seedOpt->count() > 0;

    try {
        ConfigMap cfg;
        if (!configPath.empty()) cfg = load_config_file(configPath);
        for (const std::string& kv : overrides) {
            auto eq = kv.find('=');
            if (eq == std::string::npos)
                throw pm::ValidationError("--set expects KEY=VALUE, got: " + kv);
            set_key(cfg, trim(kv.substr(0, eq)), trim(kv.substr(eq + 1)));
        }
        if (!profile.empty()) cfg["profile"] = profile;
        if (seedGiven) cfg["seed"] = std::to_string(seed);
        std::uint64_t effSeed = std::uint64_t(get_num(cfg, "seed", 0.0));
        cfg["seed"] = std::to_string(effSeed);

        std::string command = app.get_subcommands().front()->get_name();
        if (command == "compare") {
            if (positionals.size() >= 1) cfg["grid_a"] = positionals[0];
            if (positionals.size() >= 2) cfg["grid_b"] = positionals[1];
        }
        return run_command(command, cfg, outDir, effSeed);
    } catch (const pm::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 1;
    } catch (const pm::AccuracyError& e) {
        std::cerr << "accuracy error: " << e.what() << "\n";
        return 2;
    } catch (const pm::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
