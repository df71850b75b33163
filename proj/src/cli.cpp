#include "dwell/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "dwell/timing.hpp"

namespace dwell {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr const char* kSchemaVersion = "1.0.0";

// 17 significant digits: enough for exact double round trips, and stable
// byte-for-byte across runs.
std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

// Serialise an ordered_json tree with fmt17 doubles. nlohmann's own dump
// would choose shortest-round-trip forms; the fixed 17-digit style keeps
// every emitted number in one uniform format.
void dump_json(const ordered_json& v, std::string& out, int indent) {
    const std::string pad(indent, ' ');
    const std::string pad_in(indent + 2, ' ');
    switch (v.type()) {
        case ordered_json::value_t::object: {
            if (v.empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            bool first = true;
            for (const auto& [key, val] : v.items()) {
                if (!first) out += ",\n";
                first = false;
                out += pad_in + json(key).dump() + ": ";
                dump_json(val, out, indent + 2);
            }
            out += "\n" + pad + "}";
            return;
        }
        case ordered_json::value_t::array: {
            if (v.empty()) {
                out += "[]";
                return;
            }
            out += "[\n";
            bool first = true;
            for (const auto& item : v) {
                if (!first) out += ",\n";
                first = false;
                out += pad_in;
                dump_json(item, out, indent + 2);
            }
            out += "\n" + pad + "]";
            return;
        }
        case ordered_json::value_t::number_float: {
            const double x = v.get<double>();
            if (!std::isfinite(x)) throw Error("non-finite value in output document");
            out += fmt17(x);
            return;
        }
        default:
            out += v.dump();
            return;
    }
}

std::string dump_document(const ordered_json& doc) {
    std::string out;
    dump_json(doc, out, 0);
    out += "\n";
    return out;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open output file " + path.string());
    f << content;
}

// ---- config ---------------------------------------------------------------

double want_number(const json& v, const std::string& key) {
    if (!v.is_number()) throw ConfigError("config: " + key + " must be a number");
    return v.get<double>();
}

int want_int(const json& v, const std::string& key) {
    if (!v.is_number_integer()) throw ConfigError("config: " + key + " must be an integer");
    return v.get<int>();
}

std::complex<double> want_complex(const json& v, const std::string& key) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
        throw ConfigError("config: " + key + " must be a [re, im] pair");
    return {v[0].get<double>(), v[1].get<double>()};
}

void reject_unknown(const json& obj, const std::string& scope,
                    std::initializer_list<const char*> known) {
    for (const auto& [key, _] : obj.items()) {
        bool ok = false;
        for (const char* k : known)
            if (key == k) ok = true;
        if (!ok)
            throw ConfigError("config: unknown key \"" + (scope.empty() ? key : scope + "." + key) +
                              "\"");
    }
}

}  // namespace

void RunConfig::validate() const {
    try {
        geometry.validate();
    } catch (const DomainError& e) {
        throw ConfigError(std::string("config: geometry: ") + e.what());
    }
    if (n_even < 1) throw ConfigError("config: modes.n_even must be >= 1");
    if (n_odd < 1) throw ConfigError("config: modes.n_odd must be >= 1");
    const double cnorm = std::norm(c_even) + std::norm(c_odd);
    if (std::fabs(cnorm - 1.0) > 1e-12)
        throw ConfigError("config: coefficients: |c_even|^2 + |c_odd|^2 = " + fmt17(cnorm) +
                          ", expected 1 within 1e-12");
    if (n_trajectories < 1) throw ConfigError("config: n_trajectories must be >= 1");
    for (auto [v, key] : {std::pair{tol_root, "tolerances.root"},
                          {tol_quad, "tolerances.quad"},
                          {tol_ode, "tolerances.ode"},
                          {density_floor, "tolerances.density_floor"}})
        if (!(v > 0.0)) throw ConfigError(std::string("config: ") + key + " must be positive");
    if (nx < 2) throw ConfigError("config: grid.nx must be >= 2");
    if (nt < 2) throw ConfigError("config: grid.nt must be >= 2");
    for (double t : density_times)
        if (!(t >= 0.0)) throw ConfigError("config: density_times entries must be >= 0");
    if (report_class_ensemble < 1) throw ConfigError("config: report.n_class_ensemble must be >= 1");
    if (report_dwell_ensemble < 1) throw ConfigError("config: report.n_dwell_ensemble must be >= 1");
}

RunConfig parse_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config: document must be a JSON object");

    RunConfig cfg;
    reject_unknown(doc, "",
                   {"geometry", "modes", "coefficients", "n_trajectories", "tolerances", "grid",
                    "density_times", "report"});

    if (doc.contains("geometry")) {
        const json& g = doc["geometry"];
        if (!g.is_object()) throw ConfigError("config: geometry must be an object");
        reject_unknown(g, "geometry", {"a", "b", "V"});
        if (g.contains("a")) cfg.geometry.a = want_number(g["a"], "geometry.a");
        if (g.contains("b")) cfg.geometry.b = want_number(g["b"], "geometry.b");
        if (g.contains("V")) cfg.geometry.V = want_number(g["V"], "geometry.V");
    }
    if (doc.contains("modes")) {
        const json& m = doc["modes"];
        if (!m.is_object()) throw ConfigError("config: modes must be an object");
        reject_unknown(m, "modes", {"n_even", "n_odd"});
        if (m.contains("n_even")) cfg.n_even = want_int(m["n_even"], "modes.n_even");
        if (m.contains("n_odd")) cfg.n_odd = want_int(m["n_odd"], "modes.n_odd");
    }
    if (doc.contains("coefficients")) {
        const json& c = doc["coefficients"];
        if (!c.is_object()) throw ConfigError("config: coefficients must be an object");
        reject_unknown(c, "coefficients", {"c_even", "c_odd"});
        if (c.contains("c_even")) cfg.c_even = want_complex(c["c_even"], "coefficients.c_even");
        if (c.contains("c_odd")) cfg.c_odd = want_complex(c["c_odd"], "coefficients.c_odd");
    }
    if (doc.contains("n_trajectories"))
        cfg.n_trajectories = want_int(doc["n_trajectories"], "n_trajectories");
    if (doc.contains("tolerances")) {
        const json& t = doc["tolerances"];
        if (!t.is_object()) throw ConfigError("config: tolerances must be an object");
        reject_unknown(t, "tolerances", {"root", "quad", "ode", "density_floor"});
        if (t.contains("root")) cfg.tol_root = want_number(t["root"], "tolerances.root");
        if (t.contains("quad")) cfg.tol_quad = want_number(t["quad"], "tolerances.quad");
        if (t.contains("ode")) cfg.tol_ode = want_number(t["ode"], "tolerances.ode");
        if (t.contains("density_floor"))
            cfg.density_floor = want_number(t["density_floor"], "tolerances.density_floor");
    }
    if (doc.contains("grid")) {
        const json& g = doc["grid"];
        if (!g.is_object()) throw ConfigError("config: grid must be an object");
        reject_unknown(g, "grid", {"nx", "nt"});
        if (g.contains("nx")) cfg.nx = want_int(g["nx"], "grid.nx");
        if (g.contains("nt")) cfg.nt = want_int(g["nt"], "grid.nt");
    }
    if (doc.contains("density_times")) {
        const json& ts = doc["density_times"];
        if (!ts.is_array()) throw ConfigError("config: density_times must be an array");
        for (const json& t : ts) cfg.density_times.push_back(want_number(t, "density_times[]"));
    }
    if (doc.contains("report")) {
        const json& r = doc["report"];
        if (!r.is_object()) throw ConfigError("config: report must be an object");
        reject_unknown(r, "report", {"n_class_ensemble", "n_dwell_ensemble"});
        if (r.contains("n_class_ensemble"))
            cfg.report_class_ensemble = want_int(r["n_class_ensemble"], "report.n_class_ensemble");
        if (r.contains("n_dwell_ensemble"))
            cfg.report_dwell_ensemble = want_int(r["n_dwell_ensemble"], "report.n_dwell_ensemble");
    }
    return cfg;
}

namespace {

ordered_json config_echo(const RunConfig& cfg) {
    ordered_json out;
    out["geometry"] = {{"a", cfg.geometry.a}, {"b", cfg.geometry.b}, {"V", cfg.geometry.V}};
    out["modes"] = {{"n_even", cfg.n_even}, {"n_odd", cfg.n_odd}};
    out["coefficients"] = {{"c_even", {cfg.c_even.real(), cfg.c_even.imag()}},
                           {"c_odd", {cfg.c_odd.real(), cfg.c_odd.imag()}}};
    out["n_trajectories"] = cfg.n_trajectories;
    out["tolerances"] = {{"root", cfg.tol_root},
                         {"quad", cfg.tol_quad},
                         {"ode", cfg.tol_ode},
                         {"density_floor", cfg.density_floor}};
    out["grid"] = {{"nx", cfg.nx}, {"nt", cfg.nt}};
    out["density_times"] = cfg.density_times;
    out["report"] = {{"n_class_ensemble", cfg.report_class_ensemble},
                     {"n_dwell_ensemble", cfg.report_dwell_ensemble}};
    return out;
}

// CSV dumps carry provenance as comment lines ahead of the column header so
// any result file is reproducible from its own content
std::string csv_preamble(const RunConfig& cfg) {
    std::string compact;
    dump_json(config_echo(cfg), compact, 0);
    std::string flat;
    flat.reserve(compact.size());
    bool in_space = false;
    for (char c : compact) {
        if (c == '\n') c = ' ';
        if (c == ' ') {
            if (in_space) continue;
            in_space = true;
        } else {
            in_space = false;
        }
        flat += c;
    }
    return std::string("# schema_version: ") + kSchemaVersion + "\n# config: " + flat + "\n";
}

WavePacket build_packet(const RunConfig& cfg) {
    const Tolerance tol{cfg.tol_root, cfg.tol_root, 200};
    const EigenMode fe = solve_mode(Parity::Even, cfg.n_even, cfg.geometry, tol);
    const EigenMode fo = solve_mode(Parity::Odd, cfg.n_odd, cfg.geometry, tol);
    return make_packet(cfg.geometry, fe, fo, cfg.c_even, cfg.c_odd, cfg.density_floor);
}

ordered_json spectrum_block(const WavePacket& packet) {
    ordered_json out;
    out["E_even"] = packet.even_mode.energy;
    out["E_odd"] = packet.odd_mode.energy;
    out["splitting"] = packet.odd_mode.energy - packet.even_mode.energy;
    out["t_half"] = half_period(packet);
    return out;
}

ordered_json mode_block(const EigenMode& m) {
    ordered_json out;
    out["parity"] = m.parity == Parity::Even ? "even" : "odd";
    out["branch"] = m.branch;
    out["energy"] = m.energy;
    out["wavenumber"] = m.wavenumber;
    out["decay_constant"] = m.decay;
    out["norm"] = m.norm;
    return out;
}

int cmd_spectrum(const RunConfig& cfg, const std::filesystem::path& out_dir) {
    const WavePacket packet = build_packet(cfg);
    ordered_json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["command"] = "spectrum";
    doc["config"] = config_echo(cfg);
    doc["spectrum"] = spectrum_block(packet);
    doc["modes"] = {{"even", mode_block(packet.even_mode)}, {"odd", mode_block(packet.odd_mode)}};
    write_file(out_dir / "spectrum.json", dump_document(doc));

    std::cout << "E_even    = " << fmt17(packet.even_mode.energy) << "\n"
              << "E_odd     = " << fmt17(packet.odd_mode.energy) << "\n"
              << "splitting = " << fmt17(packet.odd_mode.energy - packet.even_mode.energy) << "\n"
              << "t_half    = " << fmt17(half_period(packet)) << "\n";
    return 0;
}

int cmd_trajectories(const RunConfig& cfg, const std::filesystem::path& out_dir,
                     const std::string& format) {
    const WavePacket packet = build_packet(cfg);
    const double t_half = half_period(packet);
    const double t_end = 2.0 * t_half;
    const Tolerance ode{cfg.tol_ode, cfg.tol_ode, 100000};
    const Tolerance root{cfg.tol_root, cfg.tol_root, 200};

    const bool degenerate = std::abs(packet.c_even) * std::abs(packet.c_odd) < 1e-15;
    std::optional<CriticalPoints> cp;
    if (!degenerate) cp = critical_points(packet, root);

    std::ostringstream csv;
    csv << csv_preamble(cfg) << "trajectory_id,x0,class,weight,t,x\n";
    ordered_json rows = ordered_json::array();
    for (int id = 1; id <= cfg.n_trajectories; ++id) {
        try {
            const double q = (id - 0.5) / cfg.n_trajectories;
            Trajectory traj = run_trajectory(packet, quantile_start(packet, q, root), t_end, ode);
            traj.weight = 1.0 / cfg.n_trajectories;
            TrajectoryClass cls;
            if (cp) {
                cls = classify(traj, *cp, packet.geom);
            } else {
                // motionless packet: reflection/transmission bands are empty
                cls = traj.x0 <= -packet.geom.b  ? TrajectoryClass::LeftStayer
                      : traj.x0 <= packet.geom.b ? TrajectoryClass::InsideAtStart
                                                 : TrajectoryClass::RightSide;
            }
            traj.fate = cls;
            const std::string cls_name{to_string(cls)};
            for (const OdeSample& s : traj.path.samples) {
                if (format == "json") {
                    rows.push_back({id, traj.x0, cls_name, traj.weight, s.t, s.x});
                } else {
                    csv << id << ',' << fmt17(traj.x0) << ',' << cls_name << ','
                        << fmt17(traj.weight) << ',' << fmt17(s.t) << ',' << fmt17(s.x) << '\n';
                }
            }
        } catch (const Error& e) {
            throw Error("trajectory " + std::to_string(id) + ": " + e.what());
        }
    }

    if (format == "json") {
        ordered_json doc;
        doc["schema_version"] = kSchemaVersion;
        doc["command"] = "trajectories";
        doc["config"] = config_echo(cfg);
        doc["columns"] = {"trajectory_id", "x0", "class", "weight", "t", "x"};
        doc["rows"] = rows;
        write_file(out_dir / "trajectories.json", dump_document(doc));
    } else {
        write_file(out_dir / "trajectories.csv", csv.str());
    }
    return 0;
}

int cmd_density(const RunConfig& cfg, const std::filesystem::path& out_dir,
                const std::string& format) {
    const WavePacket packet = build_packet(cfg);
    const double t_half = half_period(packet);
    const double a = packet.geom.a;

    std::vector<double> times;
    for (int i = 0; i < cfg.nt; ++i) times.push_back(t_half * i / (cfg.nt - 1));
    for (double t : cfg.density_times)
        if (std::find(times.begin(), times.end(), t) == times.end()) times.push_back(t);
    std::sort(times.begin(), times.end());

    std::ostringstream csv;
    csv << csv_preamble(cfg) << "t,x,rho,j,v_or_blank\n";
    ordered_json rows = ordered_json::array();
    for (double t : times) {
        for (int i = 0; i < cfg.nx; ++i) {
            const double x = -a + 2.0 * a * i / (cfg.nx - 1);
            const FieldSample s = sample_field(packet, x, t);
            if (format == "json") {
                ordered_json row = {s.t, s.x, s.rho, s.j};
                row.push_back(s.v ? ordered_json(*s.v) : ordered_json(nullptr));
                rows.push_back(row);
            } else {
                csv << fmt17(s.t) << ',' << fmt17(s.x) << ',' << fmt17(s.rho) << ','
                    << fmt17(s.j) << ',' << (s.v ? fmt17(*s.v) : "") << '\n';
            }
        }
    }

    if (format == "json") {
        ordered_json doc;
        doc["schema_version"] = kSchemaVersion;
        doc["command"] = "density";
        doc["config"] = config_echo(cfg);
        doc["columns"] = {"t", "x", "rho", "j", "v_or_blank"};
        doc["rows"] = rows;
        write_file(out_dir / "density.json", dump_document(doc));
    } else {
        write_file(out_dir / "density.csv", csv.str());
    }
    return 0;
}

ordered_json optional_number(const std::optional<double>& v) {
    return v ? ordered_json(*v) : ordered_json(nullptr);
}

int cmd_report(const RunConfig& cfg, const std::filesystem::path& out_dir) {
    const WavePacket packet = build_packet(cfg);
    ReportOptions opts;
    opts.n_class_ensemble = cfg.report_class_ensemble;
    opts.n_dwell_ensemble = cfg.report_dwell_ensemble;
    opts.root = Tolerance{cfg.tol_root, cfg.tol_root, 200};
    opts.quad = Tolerance{cfg.tol_quad, cfg.tol_quad, 100000};
    opts.ode = Tolerance{cfg.tol_ode, cfg.tol_ode, 100000};
    const TimingReport rep = full_report(packet, opts);

    ordered_json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["command"] = "report";
    doc["config"] = config_echo(cfg);
    doc["spectrum"] = spectrum_block(packet);
    doc["degenerate"] = rep.degenerate;

    if (rep.critical) {
        doc["critical_points"] = {{"s1", rep.critical->s1},   {"s2", rep.critical->s2},
                                  {"t_p", rep.critical->t_p}, {"t_m", rep.critical->t_m},
                                  {"t_n", rep.critical->t_n}, {"t_half", rep.critical->t_half}};
    } else {
        doc["critical_points"] = nullptr;
    }

    // trajectory-route transmission probability: initial mass right of the
    // trajectory-located bifurcation point
    const ordered_json t2_trajectory =
        rep.route_a ? ordered_json(transmission_coefficient(packet, rep.route_a->s2, opts.quad))
                    : ordered_json(nullptr);
    ordered_json probs;
    probs["transmission"] = {{"density", rep.transmission},
                             {"complement", rep.degenerate ? ordered_json(nullptr)
                                                           : ordered_json(rep.transmission_complement)},
                             {"flux_entry", rep.degenerate ? ordered_json(nullptr)
                                                           : ordered_json(rep.transmission_flux_entry)},
                             {"flux_exit", rep.degenerate ? ordered_json(nullptr)
                                                          : ordered_json(rep.transmission_flux_exit)},
                             {"trajectory", t2_trajectory}};
    probs["reflection"] = rep.reflection;
    probs["never_enter"] = rep.never_enter;
    probs["inside_at_start"] = rep.inside_at_start;
    probs["right_side"] = rep.right_side;
    probs["sum"] = rep.transmission + rep.reflection + rep.never_enter + rep.inside_at_start +
                   rep.right_side;
    doc["probabilities"] = probs;

    ordered_json times;
    times["dwell"] = {{"density", rep.dwell},
                      {"trajectory", rep.route_a ? ordered_json(rep.route_a->dwell)
                                                 : ordered_json(nullptr)}};
    times["transmission"] = {{"flux", optional_number(rep.time_transmission)},
                             {"trajectory", rep.route_a ? ordered_json(rep.route_a->time_transmission)
                                                        : ordered_json(nullptr)}};
    times["reflection"] = {{"flux", optional_number(rep.time_reflection)},
                           {"trajectory", rep.route_a ? ordered_json(rep.route_a->time_reflection)
                                                      : ordered_json(nullptr)}};
    times["mean_arrival_entry"] = {{"flux", optional_number(rep.mean_arrival_entry)},
                                   {"trajectory", rep.route_a
                                                      ? ordered_json(rep.route_a->mean_arrival_entry)
                                                      : ordered_json(nullptr)}};
    times["mean_arrival_exit"] = {{"flux", optional_number(rep.mean_arrival_exit)},
                                  {"trajectory", rep.route_a
                                                     ? ordered_json(rep.route_a->mean_arrival_exit)
                                                     : ordered_json(nullptr)}};
    doc["times"] = times;

    if (rep.route_a) {
        doc["route_a"] = {{"n_class_ensemble", rep.route_a->n_class_ensemble},
                          {"n_dwell_ensemble", rep.route_a->n_dwell_ensemble},
                          {"s2", rep.route_a->s2},
                          {"t_p", rep.route_a->t_p},
                          {"t_m", rep.route_a->t_m}};
    } else {
        doc["route_a"] = nullptr;
    }

    ordered_json checks = ordered_json::array();
    for (const TimingReport::Check& c : rep.checks)
        checks.push_back({{"name", c.name},
                          {"residual", c.residual},
                          {"tolerance", c.tolerance},
                          {"pass", c.pass}});
    doc["invariant_checks"] = checks;
    doc["all_checks_pass"] = rep.all_pass();

    write_file(out_dir / "report.json", dump_document(doc));

    std::cout << "spectrum: E_even=" << fmt17(rep.energy_even)
              << " E_odd=" << fmt17(rep.energy_odd) << " t_half=" << fmt17(rep.t_half) << "\n";
    if (rep.critical)
        std::cout << "critical: s1=" << fmt17(rep.critical->s1) << " s2=" << fmt17(rep.critical->s2)
                  << " t_p=" << fmt17(rep.critical->t_p) << " t_m=" << fmt17(rep.critical->t_m)
                  << " t_n=" << fmt17(rep.critical->t_n) << "\n";
    std::cout << "probabilities: T2=" << fmt17(rep.transmission) << " R2=" << fmt17(rep.reflection)
              << " never=" << fmt17(rep.never_enter) << " inside=" << fmt17(rep.inside_at_start)
              << " right=" << fmt17(rep.right_side) << "\n";
    std::cout << "times: dwell=" << fmt17(rep.dwell);
    if (rep.time_transmission) std::cout << " t_trans=" << fmt17(*rep.time_transmission);
    if (rep.time_reflection) std::cout << " t_refl=" << fmt17(*rep.time_reflection);
    std::cout << "\n";
    int n_pass = 0;
    for (const auto& c : rep.checks) n_pass += c.pass ? 1 : 0;
    std::cout << "invariant checks: " << n_pass << "/" << rep.checks.size() << " pass\n";
    for (const auto& c : rep.checks)
        if (!c.pass)
            std::cout << "  FAIL " << c.name << ": residual " << fmt17(c.residual)
                      << " exceeds " << fmt17(c.tolerance) << "\n";

    return rep.all_pass() ? 0 : 4;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"Bohmian transmission and reflection times in a double potential well"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    std::string format = "csv";

    // config-key overrides, applied on top of the config file
    std::optional<double> opt_a, opt_b, opt_V;
    std::optional<int> opt_n_even, opt_n_odd, opt_n_traj, opt_nx, opt_nt;
    std::optional<double> opt_tol_root, opt_tol_quad, opt_tol_ode, opt_floor;

    const auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON config file");
        cmd->add_option("--out", out_dir, "output directory (default: .)");
        cmd->add_option("--a", opt_a, "half box length");
        cmd->add_option("--b", opt_b, "half barrier length");
        cmd->add_option("--V", opt_V, "barrier height");
        cmd->add_option("--n-even", opt_n_even, "even branch index");
        cmd->add_option("--n-odd", opt_n_odd, "odd branch index");
        cmd->add_option("--n-trajectories", opt_n_traj, "ensemble size");
        cmd->add_option("--nx", opt_nx, "spatial grid points");
        cmd->add_option("--nt", opt_nt, "dump times between 0 and t_half");
        cmd->add_option("--tol-root", opt_tol_root, "root-finding tolerance");
        cmd->add_option("--tol-quad", opt_tol_quad, "quadrature tolerance");
        cmd->add_option("--tol-ode", opt_tol_ode, "ODE tolerance");
        cmd->add_option("--density-floor", opt_floor, "velocity density floor");
    };

    CLI::App* spectrum_cmd = app.add_subcommand("spectrum", "eigenvalues and half period");
    CLI::App* traj_cmd = app.add_subcommand("trajectories", "ensemble paths (CSV)");
    CLI::App* density_cmd = app.add_subcommand("density", "rho/j/v field dump (CSV)");
    CLI::App* report_cmd = app.add_subcommand("report", "full timing report (JSON)");
    for (CLI::App* cmd : {spectrum_cmd, traj_cmd, density_cmd, report_cmd}) add_common(cmd);
    traj_cmd->add_option("--format", format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    density_cmd->add_option("--format", format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        RunConfig cfg;
        if (!config_path.empty()) {
            std::ifstream f(config_path, std::ios::binary);
            if (!f) throw ConfigError("config: cannot read file " + config_path);
            std::ostringstream text;
            text << f.rdbuf();
            cfg = parse_config(text.str());
        }
        if (opt_a) cfg.geometry.a = *opt_a;
        if (opt_b) cfg.geometry.b = *opt_b;
        if (opt_V) cfg.geometry.V = *opt_V;
        if (opt_n_even) cfg.n_even = *opt_n_even;
        if (opt_n_odd) cfg.n_odd = *opt_n_odd;
        if (opt_n_traj) cfg.n_trajectories = *opt_n_traj;
        if (opt_nx) cfg.nx = *opt_nx;
        if (opt_nt) cfg.nt = *opt_nt;
        if (opt_tol_root) cfg.tol_root = *opt_tol_root;
        if (opt_tol_quad) cfg.tol_quad = *opt_tol_quad;
        if (opt_tol_ode) cfg.tol_ode = *opt_tol_ode;
        if (opt_floor) cfg.density_floor = *opt_floor;
        cfg.validate();

        std::filesystem::path out_path(out_dir);
        std::filesystem::create_directories(out_path);

        if (*spectrum_cmd) return cmd_spectrum(cfg, out_path);
        if (*traj_cmd) return cmd_trajectories(cfg, out_path, format);
        if (*density_cmd) return cmd_density(cfg, out_path, format);
        return cmd_report(cfg, out_path);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const NoBoundModeError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const DegenerateModesError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace dwell
