// SPDX-License-Identifier: Apache-2.0
//
// mmray - site-specific mmWave/sub-THz ray tracing and material calibration
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "mmray/calibration.hpp"
#include "mmray/channel_stats.hpp"
#include "mmray/io.hpp"
#include "mmray/tracer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace mmray;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitDegenerate = 3;

json read_config(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error &e) {
        throw ValidationError(path + ": " + e.what());
    }
    return j;
}

AntennaPattern pattern_from_config(const json &cfg, const char *key) {
    if (!cfg.contains(key)) return isotropic_pattern(0.0);
    const json &a = cfg[key];
    double gain = a.value("gain_dbi", 0.0);
    if (a.contains("cut_csv"))
        return load_antenna_cut(a["cut_csv"].get<std::string>(), gain, a.value("hpbw_deg", 360.0));
    if (a.contains("hpbw_deg")) return synthetic_pattern(a["hpbw_deg"].get<double>(), gain);
    return isotropic_pattern(gain);
}

struct CommonOpts {
    std::string env_path;
    std::string measurements_path;
    std::string config_path;
    std::string out_dir = ".";
    uint64_t seed = 42;
    std::string scattering = "";  // "on" | "off" | "" (config default)
    int nt = 0;                   // 0: keep config default
    int max_bounces = -1;
    bool strict = false;
};

void apply_overrides(TraceConfig &tc, const CommonOpts &opt) {
    if (opt.nt > 0) tc.tessellation_frequency = opt.nt;
    if (opt.max_bounces >= 0) tc.max_reflections = opt.max_bounces;
    if (opt.scattering == "on") tc.scattering_enabled = true;
    if (opt.scattering == "off") tc.scattering_enabled = false;
}

TraceConfig trace_config_from_json(const json &cfg) {
    TraceConfig tc;
    tc.tessellation_frequency = cfg.value("tessellation_frequency", tc.tessellation_frequency);
    tc.max_reflections = cfg.value("max_reflections", tc.max_reflections);
    tc.max_penetrations = cfg.value("max_penetrations", tc.max_penetrations);
    tc.rx_sensitivity_dbm = cfg.value("rx_sensitivity_dbm", tc.rx_sensitivity_dbm);
    tc.tx_power_dbm = cfg.value("tx_power_dbm", tc.tx_power_dbm);
    tc.frequency_ghz = cfg.value("frequency_ghz", tc.frequency_ghz);
    tc.scattering_enabled = cfg.value("scattering_enabled", tc.scattering_enabled);
    tc.match_threshold_hpbw = cfg.value("match_threshold_hpbw", tc.match_threshold_hpbw);
    if (cfg.contains("scattering")) {
        const json &s = cfg["scattering"];
        tc.scattering.lambda_mix = s.value("lambda", tc.scattering.lambda_mix);
        tc.scattering.alpha_forward = s.value("alpha_forward", tc.scattering.alpha_forward);
        tc.scattering.alpha_back = s.value("alpha_back", tc.scattering.alpha_back);
        tc.scattering.s_coefficient = s.value("s", tc.scattering.s_coefficient);
    }
    return tc;
}

AntennaPose pose_from_json(const json &p, const char *pos_key, const char *az_key,
                           const char *el_key) {
    AntennaPose pose;
    const json &v = p.at(pos_key);
    pose.position = {v.at(0).get<double>(), v.at(1).get<double>(), v.at(2).get<double>()};
    pose.boresight = az_el_to_vec(p.value(az_key, 0.0), p.value(el_key, 0.0));
    return pose;
}

int run_trace(const CommonOpts &opt) {
    json cfg = read_config(opt.config_path);
    EnvironmentMap env = load_environment(opt.env_path);
    TraceConfig tc = trace_config_from_json(cfg);
    apply_overrides(tc, opt);
    AntennaPattern tx_pat = pattern_from_config(cfg, "tx_antenna");
    AntennaPattern rx_pat = pattern_from_config(cfg, "rx_antenna");

    if (!cfg.contains("pairs") || !cfg["pairs"].is_array() || cfg["pairs"].empty())
        throw ValidationError("config: missing nonempty array 'pairs'");

    fs::create_directories(opt.out_dir);
    std::ostringstream summary;
    summary << "pair,n_components,strongest_dbm,los_blocked\n";
    for (const auto &p : cfg["pairs"]) {
        std::string id = p.value("id", std::string("pair"));
        AntennaPose tx = pose_from_json(p, "tx", "tx_az_deg", "tx_el_deg");
        AntennaPose rx = pose_from_json(p, "rx", "rx_az_deg", "rx_el_deg");
        TraceResult res;
        try {
            res = trace(env, tx, rx, tx_pat, rx_pat, tc);
        } catch (const std::invalid_argument &e) {
            throw ValidationError("pair '" + id + "': " + e.what());
        }
        atomic_write(fs::path(opt.out_dir) / ("components_" + id + ".csv"),
                     components_to_csv(res.components, env));
        summary << id << ',' << res.components.size() << ','
                << (res.components.empty() ? "" : format_number(res.components[0].power_dbm))
                << ',' << (res.los_blocked ? 1 : 0) << '\n';
    }
    atomic_write(fs::path(opt.out_dir) / "summary.csv", summary.str());
    std::cout << summary.str();
    return kExitOk;
}

int run_calibrate(const CommonOpts &opt) {
    json cfg = opt.config_path.empty() ? json::object() : read_config(opt.config_path);
    EnvironmentMap env = load_environment(opt.env_path);
    auto records = load_measurements(opt.measurements_path);
    if (records.empty()) throw ValidationError("measurements: no records");
    TraceConfig tc = trace_config_from_json(cfg);
    apply_overrides(tc, opt);
    AntennaPattern tx_pat = pattern_from_config(cfg, "tx_antenna");
    AntennaPattern rx_pat = pattern_from_config(cfg, "rx_antenna");

    CalibrationSystem system;
    try {
        system = assemble_system(records, env, tx_pat, rx_pat, tc);
    } catch (const std::runtime_error &e) {
        throw ValidationError(e.what());
    }

    SolveDiagnostics log_diag;
    LossVector log_sol = solve_log_domain(system, &log_diag);
    LinearSolveDiagnostics lin_diag;
    LossVector lin_sol = solve_linear_domain(system, opt.seed, &lin_diag);
    std::optional<ErrorStatistics> stats;
    if (log_diag.per_record_residual_db.size() >= 3)
        stats = error_statistics(log_diag.per_record_residual_db);

    fs::create_directories(opt.out_dir);
    std::ostringstream mats;
    mats << "material,penetration_db_log,reflection_db_log,penetration_db_lin,reflection_db_lin\n";
    auto cell = [](const std::optional<double> &v) { return v ? format_number(*v) : std::string("-"); };
    for (size_t i = 0; i < system.material_order.size(); ++i)
        mats << system.material_order[i] << ',' << cell(log_sol.penetration_db[i]) << ','
             << cell(log_sol.reflection_db[i]) << ',' << cell(lin_sol.penetration_db[i]) << ','
             << cell(lin_sol.reflection_db[i]) << '\n';
    atomic_write(fs::path(opt.out_dir) / "materials.csv", mats.str());

    std::ostringstream res;
    res << "record,residual_db\n";
    for (size_t j = 0; j < system.record_ids.size(); ++j)
        res << system.record_ids[j] << ',' << format_number(log_diag.per_record_residual_db[j])
            << '\n';
    atomic_write(fs::path(opt.out_dir) / "residuals.csv", res.str());

    double of_db_at_log = log_diag.of_db_rms;
    double of_db_at_lin = log_objective(system, lin_sol);
    double of_lin_at_log = linear_objective(system, log_sol);
    double of_lin_at_lin = linear_objective(system, lin_sol);
    std::ostringstream diag;
    diag << "metric,log_solution,lin_solution\n";
    diag << "of_db_rms," << format_number(of_db_at_log) << ',' << format_number(of_db_at_lin)
         << '\n';
    diag << "of_lin," << format_number(of_lin_at_log) << ',' << format_number(of_lin_at_lin)
         << '\n';
    diag << "error_mean_db," << (stats ? format_number(stats->mean_db) : "-") << ",\n";
    diag << "error_std_db," << (stats ? format_number(stats->std_db) : "-") << ",\n";
    diag << "error_best_fit," << (stats ? error_distribution_name(stats->best_fit) : "-") << ",\n";
    diag << "rank," << log_sol.rank << ",\n";
    diag << "dropped_records," << system.dropped_records.size() << ",\n";
    atomic_write(fs::path(opt.out_dir) / "diagnostics.csv", diag.str());
    std::cout << mats.str() << diag.str();

    if (log_sol.rank_deficient) {
        std::cerr << "warning: calibration system is rank deficient (rank " << log_sol.rank
                  << " of " << 2 * system.material_order.size() << ")\n";
        if (opt.strict) return kExitDegenerate;
    }
    return kExitOk;
}

int run_stats(const CommonOpts &opt) {
    json cfg = read_config(opt.config_path);
    if (!cfg.contains("locations") || !cfg["locations"].is_array() || cfg["locations"].empty())
        throw ValidationError("config: missing nonempty array 'locations'");
    double resolution_ns = cfg.value("resolution_ns", 2.5);
    bool svg = cfg.value("svg", false);

    fs::create_directories(opt.out_dir);
    std::vector<SpreadReport> reports;
    for (const auto &loc : cfg["locations"]) {
        std::string name = loc.at("name").get<std::string>();
        auto comps = components_from_csv(loc.at("components_csv").get<std::string>());
        if (comps.empty()) throw ValidationError("location '" + name + "': no components");
        SpreadReport r;
        r.location = name;
        r.n_components = static_cast<int>(comps.size());
        r.rms_delay_spread_ns = rms_delay_spread(comps);
        r.rms_angular_spread_deg = rms_angular_spread(comps, &r.angular_degenerate);
        reports.push_back(r);
        if (svg) {
            auto pdp = synthesize_pdp(comps, resolution_ns);
            SvgSeries s;
            for (const auto &b : pdp.bins)
                s.points.emplace_back(b.delay_ns, 10.0 * std::log10(b.power_mw));
            atomic_write(fs::path(opt.out_dir) / ("pdp_" + name + ".svg"),
                         render_svg({s}, "delay (ns)", "power (dBm)"));
        }
    }
    std::string out = spreads_to_csv(reports);
    atomic_write(fs::path(opt.out_dir) / "spreads.csv", out);
    std::cout << out;
    return kExitOk;
}

int run_compare(const CommonOpts &opt) {
    json cfg = read_config(opt.config_path);
    auto measured = spreads_from_csv(cfg.at("measured_csv").get<std::string>());
    auto simulated = spreads_from_csv(cfg.at("simulated_csv").get<std::string>());
    std::vector<SpreadComparisonRow> rows;
    try {
        rows = compare_statistics(measured, simulated);
    } catch (const std::invalid_argument &e) {
        throw ValidationError(e.what());
    }

    fs::create_directories(opt.out_dir);
    std::ostringstream os;
    os << "statistic,measured,predicted,delta\n";
    auto cell = [](const std::optional<double> &v) { return v ? format_number(*v) : std::string("-"); };
    for (const auto &r : rows)
        os << r.statistic << ',' << cell(r.measured) << ',' << cell(r.predicted) << ','
           << cell(r.delta) << '\n';
    atomic_write(fs::path(opt.out_dir) / "comparison.csv", os.str());
    std::cout << os.str();

    if (cfg.value("svg", false)) {
        SvgSeries ds, as;
        ds.scatter = as.scatter = true;
        as.color = "#b43f1f";
        for (size_t i = 0; i < measured.size(); ++i) {
            ds.points.emplace_back(measured[i].rms_delay_spread_ns,
                                   simulated[i].rms_delay_spread_ns);
            as.points.emplace_back(measured[i].rms_angular_spread_deg,
                                   simulated[i].rms_angular_spread_deg);
        }
        atomic_write(fs::path(opt.out_dir) / "delay_spread_scatter.svg",
                     render_svg({ds}, "measured (ns)", "simulated (ns)"));
        atomic_write(fs::path(opt.out_dir) / "angular_spread_scatter.svg",
                     render_svg({as}, "measured (deg)", "simulated (deg)"));
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"mmray: site-specific radio ray tracing and material calibration"};
    app.require_subcommand(1);

    CommonOpts opt;
    auto add_common = [&](CLI::App *sub, bool needs_env, bool needs_meas) {
        auto *env = sub->add_option("--env", opt.env_path, "environment map JSON");
        if (needs_env) env->required()->check(CLI::ExistingFile);
        auto *meas = sub->add_option("--measurements", opt.measurements_path, "measurements CSV");
        if (needs_meas) meas->required()->check(CLI::ExistingFile);
        sub->add_option("--config", opt.config_path, "run config JSON");
        sub->add_option("--out", opt.out_dir, "output directory");
        sub->add_option("--seed", opt.seed, "random seed");
        sub->add_option("--scattering", opt.scattering, "diffuse scattering")
            ->check(CLI::IsMember({"on", "off"}));
        sub->add_option("--nt", opt.nt, "icosahedron tessellation frequency");
        sub->add_option("--max-bounces", opt.max_bounces, "reflection depth limit");
        sub->add_flag("--strict", opt.strict, "escalate solver rank warnings to errors");
    };

    auto *trace_cmd = app.add_subcommand("trace", "trace multipath components per TX-RX pair");
    add_common(trace_cmd, true, false);
    trace_cmd->get_option("--config")->required()->check(CLI::ExistingFile);

    auto *cal_cmd = app.add_subcommand("calibrate", "fit material losses from measurements");
    add_common(cal_cmd, true, true);

    auto *stats_cmd = app.add_subcommand("stats", "channel statistics from component CSVs");
    add_common(stats_cmd, false, false);
    stats_cmd->get_option("--config")->required()->check(CLI::ExistingFile);

    auto *cmp_cmd = app.add_subcommand("compare", "measured vs simulated spread tables");
    add_common(cmp_cmd, false, false);
    cmp_cmd->get_option("--config")->required()->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    }

    try {
        if (trace_cmd->parsed()) return run_trace(opt);
        if (cal_cmd->parsed()) return run_calibrate(opt);
        if (stats_cmd->parsed()) return run_stats(opt);
        if (cmp_cmd->parsed()) return run_compare(opt);
    } catch (const ValidationError &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    }
    return kExitOk;
}
