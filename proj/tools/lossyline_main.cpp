// lossyline command-line tool: config-driven runs of the line solvers with
// CSV/JSON table output.
//
// All module math runs in normalized units (positions are flight times,
// wave speed 1); this file owns every physical<->normalized conversion.
// Units at the boundary: ohm/cm, H/cm, F/cm, cm, s, V, Hz.
//
// Output is deterministic: floats are printed with 17 significant digits,
// row order is fixed, and identical configs produce byte-identical files.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "lossyline/lossyline.hpp"

using nlohmann::json;
using nlohmann::ordered_json;
using namespace lossyline;

namespace {

// ---------------------------------------------------------------- formatting

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct Table {
    std::vector<std::string> comments;  // emitted as leading '#' lines in CSV
    std::vector<std::string> columns;
    std::vector<std::vector<ordered_json>> rows;

    void add_row(std::initializer_list<ordered_json> cells) { rows.emplace_back(cells); }

    std::string to_csv() const {
        std::ostringstream out;
        for (const std::string& c : comments) out << "# " << c << "\n";
        for (std::size_t i = 0; i < columns.size(); ++i)
            out << columns[i] << (i + 1 < columns.size() ? "," : "");
        out << "\n";
        for (const auto& row : rows) {
            for (std::size_t i = 0; i < row.size(); ++i) {
                const ordered_json& cell = row[i];
                if (cell.is_number_float())
                    out << fmt17(cell.get<double>());
                else if (cell.is_string())
                    out << cell.get<std::string>();
                else
                    out << cell.dump();
                out << (i + 1 < row.size() ? "," : "");
            }
            out << "\n";
        }
        return out.str();
    }

    std::string to_json(const std::string& command, const ordered_json& meta) const {
        ordered_json doc;
        doc["command"] = command;
        if (!meta.is_null()) doc["meta"] = meta;
        doc["columns"] = columns;
        doc["rows"] = ordered_json::array();
        for (const auto& row : rows) {
            ordered_json r = ordered_json::array();
            for (const auto& cell : row) r.push_back(cell);
            doc["rows"].push_back(r);
        }
        return doc.dump(2) + "\n";
    }
};

// ------------------------------------------------------------- configuration

[[noreturn]] void config_error(const std::string& msg) {
    throw std::invalid_argument("config: " + msg);
}

void check_keys(const json& obj, const std::string& context,
                std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) ok = true;
        if (!ok) config_error("unknown key '" + it.key() + "' in " + context);
    }
}

double require_number(const json& obj, const std::string& context, const char* key) {
    if (!obj.contains(key)) config_error(std::string(context) + " needs '" + key + "'");
    if (!obj[key].is_number()) config_error(std::string(key) + " in " + context + " must be a number");
    return obj[key].get<double>();
}

double number_or(const json& obj, const char* key, double fallback) {
    if (!obj.contains(key)) return fallback;
    return obj[key].get<double>();
}

struct InputSpec {
    std::string kind = "step";
    double amplitude = 1.0;
    double onset = 0.0;
    double duration = 0.0;
    double width = 0.0;
    double frequency = 0.0;  // Hz, interpreted per frequency convention
    std::vector<double> samples;
    double sample_dt = 0.0;
    int drive_line = 1;
};

struct FdtdSpec {
    double dx = 0.0;  // normalized seconds; 0 = derive from the input
    double cfl = 0.9;
    std::string boundary = "absorbing";
    int points_per_width = 40;
};

struct AppConfig {
    std::optional<LineParams> line;
    bool has_network = false;
    int net_lines = 3;
    double net_c_grd = 0.0, net_c_m = 0.0, net_r = 0.0, net_v = 0.0;
    std::vector<std::vector<double>> net_ind;  // optional explicit H/cm

    InputSpec input;
    bool has_input = false;

    std::vector<double> positions_cm;
    double t_start = 0.0, t_stop = 0.0;
    int t_points = 0;
    bool has_time = false;

    double threshold_b = 0.5;
    std::string kernel = "consistent";
    double rel_tol = 1e-8;
    std::optional<double> line_length_cm;
    std::optional<double> term_gamma;
    std::optional<double> term_z_load;
    std::string umax_convention = "response";
    FdtdSpec fdtd;
    std::string frequency_convention = "angular";
    std::string out_format = "csv";
    std::string out_path = "-";
};

AppConfig parse_config(const json& doc) {
    if (!doc.is_object()) config_error("top level must be an object");
    check_keys(doc, "top level",
               {"line", "network", "input", "positions_cm", "time", "threshold_b", "kernel",
                "quadrature_rel_tol", "line_length_cm", "termination", "umax_convention",
                "fdtd", "frequency_convention", "output"});
    AppConfig cfg;

    if (doc.contains("line")) {
        const json& l = doc["line"];
        check_keys(l, "line", {"r", "ell", "c"});
        cfg.line = LineParams{require_number(l, "line", "r"), require_number(l, "line", "ell"),
                              require_number(l, "line", "c")};
    }
    if (doc.contains("network")) {
        const json& n = doc["network"];
        check_keys(n, "network", {"lines", "c_grd", "c_m", "r", "v", "ind_matrix"});
        cfg.has_network = true;
        cfg.net_lines = static_cast<int>(number_or(n, "lines", 3));
        cfg.net_c_grd = require_number(n, "network", "c_grd");
        cfg.net_c_m = number_or(n, "c_m", 0.0);
        cfg.net_r = require_number(n, "network", "r");
        cfg.net_v = number_or(n, "v", 0.0);
        if (n.contains("ind_matrix"))
            cfg.net_ind = n["ind_matrix"].get<std::vector<std::vector<double>>>();
        if (cfg.net_v <= 0.0 && cfg.net_ind.empty())
            config_error("network needs either 'v' or an explicit 'ind_matrix'");
    }
    if (doc.contains("input")) {
        const json& i = doc["input"];
        check_keys(i, "input",
                   {"kind", "amplitude", "onset", "duration", "width", "frequency", "samples",
                    "sample_dt", "drive_line"});
        cfg.has_input = true;
        cfg.input.kind = i.value("kind", std::string("step"));
        cfg.input.amplitude = number_or(i, "amplitude", 1.0);
        cfg.input.onset = number_or(i, "onset", 0.0);
        cfg.input.duration = number_or(i, "duration", 0.0);
        cfg.input.width = number_or(i, "width", 0.0);
        cfg.input.frequency = number_or(i, "frequency", 0.0);
        cfg.input.sample_dt = number_or(i, "sample_dt", 0.0);
        cfg.input.drive_line = static_cast<int>(number_or(i, "drive_line", 1));
        if (i.contains("samples")) cfg.input.samples = i["samples"].get<std::vector<double>>();
    }
    if (doc.contains("positions_cm")) {
        cfg.positions_cm = doc["positions_cm"].get<std::vector<double>>();
        if (cfg.positions_cm.empty()) config_error("positions_cm must not be empty");
    }
    if (doc.contains("time")) {
        const json& t = doc["time"];
        check_keys(t, "time", {"start", "stop", "points"});
        cfg.has_time = true;
        cfg.t_start = number_or(t, "start", 0.0);
        cfg.t_stop = require_number(t, "time", "stop");
        cfg.t_points = static_cast<int>(number_or(t, "points", 200));
        if (!(cfg.t_stop > cfg.t_start)) config_error("time.stop must exceed time.start");
        if (cfg.t_points < 2) config_error("time.points must be >= 2");
    }
    cfg.threshold_b = number_or(doc, "threshold_b", 0.5);
    if (doc.contains("kernel")) cfg.kernel = doc["kernel"].get<std::string>();
    cfg.rel_tol = number_or(doc, "quadrature_rel_tol", 1e-8);
    if (doc.contains("line_length_cm")) cfg.line_length_cm = doc["line_length_cm"].get<double>();
    if (doc.contains("termination")) {
        const json& term = doc["termination"];
        check_keys(term, "termination", {"gamma", "z_load"});
        if (term.contains("gamma")) cfg.term_gamma = term["gamma"].get<double>();
        if (term.contains("z_load")) cfg.term_z_load = term["z_load"].get<double>();
        if (!cfg.term_gamma && !cfg.term_z_load)
            config_error("termination needs 'gamma' or 'z_load'");
    }
    if (doc.contains("umax_convention"))
        cfg.umax_convention = doc["umax_convention"].get<std::string>();
    if (cfg.umax_convention != "response" && cfg.umax_convention != "input")
        config_error("umax_convention must be 'response' or 'input'");
    if (doc.contains("fdtd")) {
        const json& f = doc["fdtd"];
        check_keys(f, "fdtd", {"dx", "cfl", "boundary", "points_per_width"});
        cfg.fdtd.dx = number_or(f, "dx", 0.0);
        cfg.fdtd.cfl = number_or(f, "cfl", 0.9);
        cfg.fdtd.boundary = f.value("boundary", std::string("absorbing"));
        cfg.fdtd.points_per_width = static_cast<int>(number_or(f, "points_per_width", 40));
    }
    if (doc.contains("frequency_convention"))
        cfg.frequency_convention = doc["frequency_convention"].get<std::string>();
    if (cfg.frequency_convention != "angular" && cfg.frequency_convention != "cyclic")
        config_error("frequency_convention must be 'angular' or 'cyclic'");
    if (doc.contains("output")) {
        const json& o = doc["output"];
        check_keys(o, "output", {"format", "path"});
        cfg.out_format = o.value("format", std::string("csv"));
        cfg.out_path = o.value("path", std::string("-"));
    }
    if (cfg.out_format != "csv" && cfg.out_format != "json")
        config_error("output.format must be 'csv' or 'json'");
    return cfg;
}

// --------------------------------------------------------------- conversions

double angular_rate(const AppConfig& cfg, double frequency_hz) {
    return cfg.frequency_convention == "angular" ? 2.0 * M_PI * frequency_hz : frequency_hz;
}

Waveform build_waveform(const AppConfig& cfg) {
    const InputSpec& in = cfg.input;
    if (!cfg.has_input) config_error("this subcommand needs an 'input' section");
    double duration = in.duration;
    if (duration <= 0.0 && cfg.has_time) duration = cfg.t_stop;  // source on all window
    if (in.kind == "step") return Waveform::step(in.amplitude, duration, in.onset);
    if (in.kind == "ramp") {
        if (!(in.width > 0.0)) config_error("ramp input needs 'width'");
        return Waveform::ramp(in.amplitude, in.width, duration, in.onset);
    }
    if (in.kind == "sine") {
        if (!(in.frequency > 0.0)) config_error("sine input needs 'frequency'");
        return Waveform::sine_burst(in.amplitude, angular_rate(cfg, in.frequency), duration,
                                    in.onset);
    }
    if (in.kind == "gauss") {
        if (!(in.width > 0.0)) config_error("gauss input needs 'width'");
        const double center = in.onset > 0.0 ? in.onset : 4.0 * in.width;
        if (duration <= 0.0) duration = center + 4.0 * in.width;
        return Waveform::gaussian_pulse(in.amplitude, in.width, center, duration);
    }
    if (in.kind == "sampled") {
        if (in.samples.size() < 2 || !(in.sample_dt > 0.0))
            config_error("sampled input needs 'samples' and 'sample_dt'");
        return Waveform::sampled(in.samples, in.sample_dt);
    }
    config_error("unknown input kind '" + in.kind + "'");
}

std::vector<double> time_grid(const AppConfig& cfg) {
    if (!cfg.has_time) config_error("this subcommand needs a 'time' section");
    std::vector<double> t(cfg.t_points);
    for (int i = 0; i < cfg.t_points; ++i)
        t[i] = cfg.t_start + (cfg.t_stop - cfg.t_start) * i / (cfg.t_points - 1);
    return t;
}

struct ResolvedKernel {
    KernelConfig config;
    std::string source;  // "paper" | "consistent" | "calibrated"
};

ResolvedKernel resolve_kernel(const std::string& choice) {
    if (choice == "paper") return {{KernelVariant::PaperLiteral, 1.0, +1}, "paper"};
    if (choice == "consistent")
        return {{KernelVariant::DerivativeConsistent, 1.0, +1}, "consistent"};
    if (choice == "calibrated") {
        const char* path = std::getenv("LOSSYLINE_CALIBRATION");
        if (path == nullptr)
            config_error("kernel 'calibrated' needs LOSSYLINE_CALIBRATION to point at a "
                         "calibration report");
        std::ifstream in(path);
        if (!in) config_error(std::string("cannot read calibration report at ") + path);
        json rep = json::parse(in);
        const json& k = rep.at("kernel");
        return {{variant_from_name(k.at("variant").get<std::string>()),
                 k.at("scale").get<double>(), k.at("sign").get<int>()},
                "calibrated"};
    }
    config_error("kernel must be 'paper', 'consistent' or 'calibrated'");
}

ordered_json kernel_meta(const ResolvedKernel& k) {
    ordered_json m;
    m["variant"] = variant_name(k.config.variant);
    m["scale"] = k.config.scale;
    m["sign"] = k.config.sign;
    m["source"] = k.source;
    return m;
}

std::string kernel_comment(const ResolvedKernel& k) {
    return std::string("kernel variant=") + variant_name(k.config.variant) +
           " scale=" + fmt17(k.config.scale) + " sign=" + (k.config.sign > 0 ? "+1" : "-1") +
           " source=" + k.source;
}

// ----------------------------------------------------------------- commands

struct CommandContext {
    AppConfig cfg;
    ResolvedKernel kernel;
    std::string command;
    bool compare = false;
    std::string dump_path;
    int dump_every = 0;
};

DerivedParams require_line(const AppConfig& cfg) {
    if (!cfg.line) config_error("this subcommand needs a 'line' section");
    return derive_params(*cfg.line);
}

double resolve_gamma(const AppConfig& cfg, double z0) {
    if (cfg.term_gamma) {
        if (std::abs(*cfg.term_gamma) > 1.0) config_error("termination.gamma must be in [-1, 1]");
        return *cfg.term_gamma;
    }
    if (cfg.term_z_load) return reflection_coefficient(*cfg.term_z_load, z0);
    config_error("this subcommand needs a 'termination' section");
}

Table run_params(const CommandContext& ctx) {
    const DerivedParams d = require_line(ctx.cfg);
    const LineParams& p = *ctx.cfg.line;
    Table t;
    t.columns = {"quantity", "value", "unit", "note"};
    t.add_row({"r", p.r, "ohm_per_cm", ""});
    t.add_row({"ell", p.ell, "H_per_cm", ""});
    t.add_row({"c", p.c, "F_per_cm", ""});
    t.add_row({"v", d.v, "cm_per_s", ""});
    t.add_row({"m", d.m, "1_per_s", ""});
    t.add_row({"z0", d.z0, "ohm", ""});
    const bool lossless = d.m == 0.0;
    t.add_row({"decay_length", lossless ? std::numeric_limits<double>::infinity() : d.v / d.m,
               "cm", lossless ? "lossless: no decay" : ""});
    if (ctx.cfg.line_length_cm) {
        const double xbar = normalize_position(*ctx.cfg.line_length_cm, d.v);
        const ReflectionBudget budget = reflection_budget(xbar, d.m);
        t.add_row({"line_length", *ctx.cfg.line_length_cm, "cm", ""});
        t.add_row({"xbar", xbar, "s", ""});
        t.add_row({"reflection_count", static_cast<double>(budget.n_r), "1",
                   budget.capped ? "capped: lossless budget is unbounded" : ""});
    }
    return t;
}

Table run_calibrate(const CommandContext&) {
    const CalibrationReport rep = calibrate_kernel();
    // table form of the report; the JSON writer below mirrors it
    Table t;
    t.comments.push_back("winner " + std::string(variant_name(rep.winner.variant)) +
                         " scale=" + fmt17(rep.winner.scale) +
                         " sign=" + (rep.winner.sign > 0 ? std::string("+1") : std::string("-1")) +
                         " l2_error=" + fmt17(rep.l2_error));
    t.columns = {"record", "variant", "scale", "sign", "m", "x", "l2_error"};
    t.add_row({"winner", variant_name(rep.winner.variant), rep.winner.scale,
               static_cast<double>(rep.winner.sign), "", "", rep.l2_error});
    for (const auto& c : rep.candidates)
        t.add_row({"candidate", variant_name(c.config.variant), c.config.scale,
                   static_cast<double>(c.config.sign), "", "", c.l2_error});
    for (const auto& cs : rep.cases)
        t.add_row({"case_winner", variant_name(cs.winner.variant), cs.winner.scale,
                   static_cast<double>(cs.winner.sign), cs.m, cs.x, cs.l2_error});
    return t;
}

ordered_json calibration_report_json() {
    const CalibrationReport rep = calibrate_kernel();
    ordered_json doc;
    doc["kernel"] = {{"variant", variant_name(rep.winner.variant)},
                     {"scale", rep.winner.scale},
                     {"sign", rep.winner.sign}};
    doc["l2_error"] = rep.l2_error;
    doc["runner_up_l2"] = rep.runner_up_l2;
    doc["candidates"] = ordered_json::array();
    for (const auto& c : rep.candidates)
        doc["candidates"].push_back({{"variant", variant_name(c.config.variant)},
                                     {"scale", c.config.scale},
                                     {"sign", c.config.sign},
                                     {"l2_error", c.l2_error}});
    doc["cases"] = ordered_json::array();
    for (const auto& cs : rep.cases)
        doc["cases"].push_back({{"m", cs.m},
                                {"x", cs.x},
                                {"variant", variant_name(cs.winner.variant)},
                                {"scale", cs.winner.scale},
                                {"sign", cs.winner.sign},
                                {"l2_error", cs.l2_error}});
    return doc;
}

Table run_response(const CommandContext& ctx) {
    const DerivedParams d = require_line(ctx.cfg);
    const Waveform u0 = build_waveform(ctx.cfg);
    const std::vector<double> times = time_grid(ctx.cfg);
    if (ctx.cfg.positions_cm.empty()) config_error("response needs 'positions_cm'");

    Table t;
    t.comments.push_back(kernel_comment(ctx.kernel));
    t.columns = {"time_s", "position_cm", "voltage_v", "quad_error", "converged"};
    for (double time : times)
        for (double pos : ctx.cfg.positions_cm) {
            const double x = normalize_position(pos, d.v);
            const ResponseSample s =
                response_value(x, time, d.m, u0, ctx.kernel.config, ctx.cfg.rel_tol);
            t.add_row({time, pos, s.value, s.quad_error, s.converged ? 1.0 : 0.0});
        }
    return t;
}

Table run_delay(const CommandContext& ctx) {
    const DerivedParams d = require_line(ctx.cfg);
    const Waveform u0 = build_waveform(ctx.cfg);
    if (!ctx.cfg.has_time) config_error("delay needs a 'time' section for the search window");
    if (ctx.cfg.positions_cm.empty()) config_error("delay needs 'positions_cm'");
    if (!(ctx.cfg.threshold_b > 0.0 && ctx.cfg.threshold_b < 1.0))
        config_error("threshold_b must be in (0, 1)");

    const bool finite = ctx.cfg.line_length_cm && (ctx.cfg.term_gamma || ctx.cfg.term_z_load);
    DelaySearch opts;
    opts.t_end = ctx.cfg.t_stop;
    opts.umax = ctx.cfg.umax_convention == "input" ? UmaxConvention::InputMax
                                                   : UmaxConvention::ResponseMax;

    Table t;
    t.comments.push_back(kernel_comment(ctx.kernel));
    t.columns = {"position_cm", "delay_s",       "threshold_b", "uncertainty_floor_s",
                 "bracket_lo_s", "bracket_hi_s", "u_max_v"};
    for (double pos : ctx.cfg.positions_cm) {
        const double x = normalize_position(pos, d.v);
        DelayResult r;
        if (finite) {
            const FiniteLine line{normalize_position(*ctx.cfg.line_length_cm, d.v),
                                  resolve_gamma(ctx.cfg, d.z0)};
            r = reflected_delay(line, x, ctx.cfg.threshold_b, u0, d.m, opts, ctx.kernel.config,
                                ctx.cfg.rel_tol);
        } else {
            r = delay_time(x, ctx.cfg.threshold_b, u0, d.m, opts, ctx.kernel.config,
                           ctx.cfg.rel_tol);
        }
        t.add_row({pos, r.delay, r.threshold_b, r.uncertainty_floor, r.bracket_lo, r.bracket_hi,
                   r.u_max});
    }
    return t;
}

Table run_reflect(const CommandContext& ctx) {
    const DerivedParams d = require_line(ctx.cfg);
    const Waveform u0 = build_waveform(ctx.cfg);
    const std::vector<double> times = time_grid(ctx.cfg);
    if (!ctx.cfg.line_length_cm) config_error("reflect needs 'line_length_cm'");
    if (ctx.cfg.positions_cm.empty()) config_error("reflect needs 'positions_cm'");

    const FiniteLine line{normalize_position(*ctx.cfg.line_length_cm, d.v),
                          resolve_gamma(ctx.cfg, d.z0)};
    const ReflectionBudget budget = reflection_budget(line.xbar, d.m);

    Table t;
    t.comments.push_back(kernel_comment(ctx.kernel));
    t.comments.push_back("reflection budget n_r=" + std::to_string(budget.n_r) +
                         (budget.capped ? " (capped)" : ""));
    t.columns = {"time_s", "position_cm", "voltage_v", "quad_error", "converged"};
    for (double time : times)
        for (double pos : ctx.cfg.positions_cm) {
            const double x = normalize_position(pos, d.v);
            if (x > line.xbar) config_error("positions_cm must lie on the finite line");
            const ResponseSample s = reflected_response_value(
                line, x, time, u0, d.m, budget, ctx.kernel.config, ctx.cfg.rel_tol);
            t.add_row({time, pos, s.value, s.quad_error, s.converged ? 1.0 : 0.0});
        }
    return t;
}

NetworkSpec build_network_spec(const AppConfig& cfg) {
    if (!cfg.has_network) config_error("this subcommand needs a 'network' section");
    Matrix cap = build_tridiagonal_cap(cfg.net_c_grd, cfg.net_c_m, cfg.net_lines);
    if (!cfg.net_ind.empty()) {
        const int n = cfg.net_lines;
        if (static_cast<int>(cfg.net_ind.size()) != n)
            config_error("ind_matrix must be lines x lines");
        Matrix ind(n);
        for (int i = 0; i < n; ++i) {
            if (static_cast<int>(cfg.net_ind[i].size()) != n)
                config_error("ind_matrix must be lines x lines");
            for (int j = 0; j < n; ++j) ind(i, j) = cfg.net_ind[i][j];
        }
        return make_network(std::move(cap), std::move(ind), cfg.net_r);
    }
    return make_network_from_cap(std::move(cap), cfg.net_r, cfg.net_v);
}

Table run_network(const CommandContext& ctx) {
    const NetworkSpec spec = build_network_spec(ctx.cfg);
    const double v = std::sqrt(spec.v2);
    const Waveform drive = build_waveform(ctx.cfg);
    const std::vector<double> times = time_grid(ctx.cfg);
    if (ctx.cfg.positions_cm.empty()) config_error("network needs 'positions_cm'");
    const int k = ctx.cfg.input.drive_line;
    if (k < 1 || k > spec.n) config_error("input.drive_line out of range");

    std::vector<Waveform> inputs;
    for (int j = 0; j < spec.n; ++j)
        inputs.push_back(j == k - 1 ? drive : Waveform::step(0.0, drive.duration()));

    Table t;
    t.comments.push_back(kernel_comment(ctx.kernel));
    t.columns = {"time_s", "position_cm", "line", "voltage_v", "quad_error", "converged"};
    for (double pos : ctx.cfg.positions_cm) {
        const double x = normalize_position(pos, v);
        const auto samples =
            network_response(spec, x, times, inputs, ctx.kernel.config, ctx.cfg.rel_tol);
        for (std::size_t ti = 0; ti < times.size(); ++ti)
            for (int line = 0; line < spec.n; ++line) {
                const ResponseSample& s = samples[line][ti];
                t.add_row({times[ti], pos, static_cast<double>(line + 1), s.value, s.quad_error,
                           s.converged ? 1.0 : 0.0});
            }
    }
    return t;
}

FdtdBoundary boundary_from_name(const std::string& name) {
    if (name == "absorbing") return FdtdBoundary::AbsorbingRight;
    if (name == "open") return FdtdBoundary::ReflectingOpen;
    if (name == "short") return FdtdBoundary::ReflectingShort;
    if (name == "matched") return FdtdBoundary::Matched;
    config_error("fdtd.boundary must be absorbing|open|short|matched");
}

double derive_dx(const AppConfig& cfg, const Waveform& u0) {
    if (cfg.fdtd.dx > 0.0) return cfg.fdtd.dx;
    double sharpest = 0.0;
    if (cfg.input.kind == "gauss" || cfg.input.kind == "ramp") sharpest = cfg.input.width;
    if (cfg.input.kind == "sine" && cfg.input.frequency > 0.0)
        sharpest = 0.25 * 2.0 * M_PI / angular_rate(cfg, cfg.input.frequency);
    if (cfg.input.kind == "sampled") sharpest = cfg.input.sample_dt * 4.0;
    if (sharpest > 0.0) return sharpest / cfg.fdtd.points_per_width;
    return (u0.duration() + cfg.t_stop) / 4000.0;  // step input: window-based default
}

Table run_oracle(const CommandContext& ctx, ordered_json& summary) {
    const DerivedParams d = require_line(ctx.cfg);
    const Waveform u0 = build_waveform(ctx.cfg);
    if (!ctx.cfg.has_time) config_error("oracle needs a 'time' section");
    if (ctx.cfg.positions_cm.empty()) config_error("oracle needs 'positions_cm'");

    std::vector<double> probes;
    double max_x = 0.0;
    for (double pos : ctx.cfg.positions_cm) {
        probes.push_back(normalize_position(pos, d.v));
        max_x = std::max(max_x, probes.back());
    }

    const double dx = derive_dx(ctx.cfg, u0);
    const FdtdBoundary bc = boundary_from_name(ctx.cfg.fdtd.boundary);
    // a reflecting far end sits at the physical line end; the absorbing
    // condition emulates the infinite line and wants padding instead
    const bool reflecting =
        bc == FdtdBoundary::ReflectingOpen || bc == FdtdBoundary::ReflectingShort;
    double domain;
    if (reflecting) {
        if (!ctx.cfg.line_length_cm)
            config_error("a reflecting fdtd boundary needs 'line_length_cm'");
        domain = normalize_position(*ctx.cfg.line_length_cm, d.v);
        if (max_x > domain) config_error("positions_cm must lie on the finite line");
    } else {
        domain = safe_domain_length(ctx.cfg.t_stop, max_x, 40.0 * dx);
    }
    const FdtdGrid grid = make_grid(domain, dx, ctx.cfg.fdtd.cfl, bc);

    FdtdObserver observer;
    std::ofstream dump;
    if (!ctx.dump_path.empty()) {
        dump.open(ctx.dump_path);
        if (!dump) config_error("cannot open dump path " + ctx.dump_path);
        dump << "time_s,position_cm,voltage_v\n";
        observer.stride = ctx.dump_every > 0 ? ctx.dump_every : 16;
        observer.callback = [&](double time, const std::vector<double>& field) {
            for (std::size_t j = 0; j < field.size(); ++j)
                dump << fmt17(time) << ',' << fmt17(static_cast<double>(j) * grid.dx * d.v)
                     << ',' << fmt17(field[j]) << '\n';
        };
    }

    const FdtdResult result = fdtd_solve(grid, d.m, u0, ctx.cfg.t_stop, probes, observer);

    Table t;
    t.comments.push_back("fdtd dx=" + fmt17(grid.dx) + " dt=" + fmt17(grid.dt) +
                         " boundary=" + ctx.cfg.fdtd.boundary);
    if (ctx.compare) t.comments.push_back(kernel_comment(ctx.kernel));
    t.columns = {"time_s", "position_cm", "voltage_fdtd_v"};
    if (ctx.compare) t.columns.push_back("voltage_analytic_v");

    std::vector<std::vector<double>> analytic(probes.size());
    if (ctx.compare)
        for (std::size_t p = 0; p < probes.size(); ++p) {
            analytic[p].reserve(result.times.size());
            for (double time : result.times)
                analytic[p].push_back(response_value(result.probe_positions[p], time, d.m, u0,
                                                     ctx.kernel.config, ctx.cfg.rel_tol)
                                          .value);
        }

    for (std::size_t i = 0; i < result.times.size(); ++i)
        for (std::size_t p = 0; p < probes.size(); ++p) {
            std::vector<ordered_json> row{result.times[i], ctx.cfg.positions_cm[p],
                                          result.probes[p][i]};
            if (ctx.compare) row.push_back(analytic[p][i]);
            t.rows.push_back(std::move(row));
        }

    if (ctx.compare) {
        summary = ordered_json::array();
        for (std::size_t p = 0; p < probes.size(); ++p) {
            double d2 = 0.0, r2 = 0.0;
            for (std::size_t i = 0; i < result.times.size(); ++i) {
                const double diff = analytic[p][i] - result.probes[p][i];
                d2 += diff * diff;
                r2 += result.probes[p][i] * result.probes[p][i];
            }
            const double rel = r2 > 0.0 ? std::sqrt(d2 / r2) : std::sqrt(d2);
            summary.push_back(
                {{"position_cm", ctx.cfg.positions_cm[p]}, {"rel_l2", rel}});
            t.comments.push_back("rel_l2 position_cm=" + fmt17(ctx.cfg.positions_cm[p]) + " " +
                                 fmt17(rel));
        }
    }
    return t;
}

void write_output(const AppConfig& cfg, const std::string& text) {
    if (cfg.out_path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(cfg.out_path, std::ios::binary);
    if (!out) config_error("cannot open output path " + cfg.out_path);
    out << text;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"lossyline: transient signals, delays and reflections on lossy "
                 "distributed-RLC lines"};
    app.require_subcommand(1);

    std::string config_path;
    std::string output_override;
    std::string format_override;
    std::string kernel_override;
    app.add_option("--config", config_path, "JSON run configuration")->required(false);
    app.add_option("--output", output_override, "output path ('-' = stdout)");
    app.add_option("--format", format_override, "csv or json");
    app.add_option("--kernel", kernel_override, "paper | consistent | calibrated");

    CommandContext ctx;
    auto* cmd_params = app.add_subcommand("params", "derived line parameters and budgets");
    auto* cmd_calibrate =
        app.add_subcommand("calibrate", "select kernel variant and normalization against the "
                                        "FDTD oracle; emits the machine-readable report");
    auto* cmd_response = app.add_subcommand("response", "transient response table");
    auto* cmd_delay = app.add_subcommand("delay", "threshold-crossing delay per position");
    auto* cmd_reflect = app.add_subcommand("reflect", "finite-line response with reflections");
    auto* cmd_network = app.add_subcommand("network", "coupled multiconductor response");
    auto* cmd_oracle = app.add_subcommand("oracle", "FDTD reference solution");
    for (CLI::App* sub : {cmd_params, cmd_calibrate, cmd_response, cmd_delay, cmd_reflect,
                          cmd_network, cmd_oracle})
        sub->fallthrough();  // global flags may follow the subcommand name
    cmd_oracle->add_flag("--compare", ctx.compare, "add analytic columns and a rel-L2 summary");
    cmd_oracle->add_option("--dump-fields", ctx.dump_path,
                           "CSV snapshot series time_s,position_cm,voltage_v");
    cmd_oracle->add_option("--dump-every", ctx.dump_every,
                           "steps between snapshots (default 16)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        json doc = json::object();
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) config_error("cannot read config file " + config_path);
            doc = json::parse(in);
        }
        ctx.cfg = parse_config(doc);
        if (!output_override.empty()) ctx.cfg.out_path = output_override;
        if (!format_override.empty()) ctx.cfg.out_format = format_override;
        if (!kernel_override.empty()) ctx.cfg.kernel = kernel_override;
        if (ctx.cfg.out_format != "csv" && ctx.cfg.out_format != "json")
            config_error("format must be 'csv' or 'json'");
        ctx.kernel = resolve_kernel(ctx.cfg.kernel);

        Table table;
        ordered_json meta = kernel_meta(ctx.kernel);
        ordered_json summary;
        if (cmd_params->parsed()) {
            ctx.command = "params";
            table = run_params(ctx);
            meta = ordered_json();  // no kernel involved
        } else if (cmd_calibrate->parsed()) {
            ctx.command = "calibrate";
            // the calibrate report is always the machine-readable JSON document
            write_output(ctx.cfg, calibration_report_json().dump(2) + "\n");
            return 0;
        } else if (cmd_response->parsed()) {
            ctx.command = "response";
            table = run_response(ctx);
        } else if (cmd_delay->parsed()) {
            ctx.command = "delay";
            table = run_delay(ctx);
        } else if (cmd_reflect->parsed()) {
            ctx.command = "reflect";
            table = run_reflect(ctx);
        } else if (cmd_network->parsed()) {
            ctx.command = "network";
            table = run_network(ctx);
        } else if (cmd_oracle->parsed()) {
            ctx.command = "oracle";
            table = run_oracle(ctx, summary);
        }

        std::string text;
        if (ctx.cfg.out_format == "csv") {
            text = table.to_csv();
        } else {
            if (!summary.is_null()) meta["summary"] = summary;
            text = table.to_json(ctx.command, meta);
        }
        write_output(ctx.cfg, text);
        return 0;
    } catch (const json::exception& e) {
        std::cerr << "lossyline: config error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "lossyline: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "lossyline: numerical failure: " << e.what() << "\n";
        return 2;
    }
}
