// crncalc: compile arithmetic/transcendental expressions into reaction
// networks, integrate them, and certify convergence rates.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "crncalc/analysis.hpp"
#include "crncalc/compiler.hpp"
#include "crncalc/simulate.hpp"
#include "crncalc/verify.hpp"

using namespace crncalc;

namespace {

// whole-file atomic write (temp + rename)
void write_file(const std::string& path, const std::string& content) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorKind::Invalid, "cannot write " + tmp);
        out << content;
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw Error(ErrorKind::Invalid, "cannot rename " + tmp + " to " + path);
}

std::map<std::string, InputDecl> parse_decls(const std::vector<std::string>& texts) {
    std::map<std::string, InputDecl> decls;
    for (const auto& t : texts) {
        InputDecl d = parse_input_decl(t);
        decls[d.name] = d;
    }
    return decls;
}

std::pair<std::string, double> parse_assignment(const std::string& text) {
    auto eq = text.find('=');
    if (eq == std::string::npos || eq == 0)
        throw Error(ErrorKind::Syntax, "expected name=value, got '" + text + "'");
    try {
        return {text.substr(0, eq), std::stod(text.substr(eq + 1))};
    } catch (const std::exception&) {
        throw Error(ErrorKind::Syntax, "bad number in '" + text + "'");
    }
}

struct IntegratorFlags {
    IntegratorConfig cfg;

    void attach(CLI::App* cmd) {
        if (const char* env = std::getenv("CRNCALC_TOL")) {
            try {
                cfg.rel_tol = std::stod(env);
            } catch (const std::exception&) {
                throw CLI::ValidationError("CRNCALC_TOL", "must be a number");
            }
        }
        cmd->add_option("--rel-tol", cfg.rel_tol, "relative tolerance");
        cmd->add_option("--abs-tol", cfg.abs_tol, "absolute tolerance");
        cmd->add_option("--t-end", cfg.t_end, "integration horizon");
        cmd->add_option("--max-step", cfg.max_step, "largest step size");
        cmd->add_option("--samples", cfg.sample_count, "number of output samples");
    }
};

CompileOptions compile_options(const std::string& log_system, const std::string& e_mode) {
    CompileOptions opts;
    if (log_system == "auto") opts.log_system = kLogSystemAuto;
    else if (log_system == "1r") opts.log_system = kLogSystem1r;
    else {
        try {
            opts.log_system = std::stoi(log_system);
        } catch (const std::exception&) {
            throw Error(ErrorKind::Domain, "bad --log-system '" + log_system + "'");
        }
        if (opts.log_system < 1 || opts.log_system > 6)
            throw Error(ErrorKind::Domain, "--log-system must be 1..6, 1r, or auto");
    }
    opts.const_e = e_mode == "synthesized" ? ConstEMode::Synthesized : ConstEMode::Static;
    return opts;
}

void print_circuit_summary(const CircuitInstance& c) {
    std::printf("expression      %s\n", c.expression.c_str());
    std::printf("species         %zu\n", c.ode.size());
    std::printf("mass action     %s\n", c.mass_action ? "yes" : "no");
    std::printf("predicted rate  %s\n", c.predicted.text.c_str());
    std::printf("roster:\n");
    for (const auto& m : c.roster)
        std::printf("  %-18s %-14s flags=%s rate=%s\n",
                    m.instance.empty() ? "-" : m.instance.c_str(), m.kind.c_str(),
                    to_string(m.flags).c_str(), m.stated.text.c_str());
}

int cmd_compile(const std::string& expr, const std::vector<std::string>& decl_texts,
                const std::string& log_system, const std::string& e_mode,
                const std::string& out_base) {
    CircuitInstance c = compile(expr, parse_decls(decl_texts),
                                compile_options(log_system, e_mode));
    write_file(out_base + ".ode", format_ode(c.ode));
    write_file(out_base + ".meta", format_metadata(c));
    if (c.mass_action) {
        write_file(out_base + ".crn", format_network(network_from_ode(c.ode)));
    } else {
        std::fprintf(stderr,
                     "note: circuit is not mass-action; %s.crn not written\n",
                     out_base.c_str());
    }
    print_circuit_summary(c);
    return 0;
}

int cmd_simulate(const std::string& expr, const std::vector<std::string>& decl_texts,
                 const std::vector<std::string>& sets,
                 const std::vector<std::string>& perturbs, const std::string& network_path,
                 const std::vector<std::string>& inits, const std::string& log_system,
                 const std::string& e_mode, const IntegratorConfig& cfg,
                 const std::string& out_csv) {
    if (!network_path.empty()) {
        // raw network mode: integrate the file's mass-action dynamics
        std::ifstream in(network_path, std::ios::binary);
        if (!in) throw Error(ErrorKind::Invalid, "cannot read " + network_path);
        std::ostringstream text;
        text << in.rdbuf();
        ReactionNetwork net = parse_network(text.str());
        PolynomialODE ode = derive_ode(net);
        std::vector<double> init(ode.size(), 0.0);
        for (const auto& s : inits) {
            auto [name, value] = parse_assignment(s);
            init[ode.index_of(name)] = value;
        }
        Trajectory traj = integrate(ode, init, cfg);
        if (!out_csv.empty()) write_file(out_csv, to_csv(traj));
        std::printf("final state at t=%g:\n", cfg.t_end);
        for (size_t j = 0; j < traj.cols(); ++j)
            std::printf("  %-20s %.17g\n", traj.species[j].c_str(),
                        traj.at(traj.rows() - 1, j));
        return 0;
    }

    CircuitInstance c = compile(expr, parse_decls(decl_texts),
                                compile_options(log_system, e_mode));
    std::map<std::string, double> values;
    for (const auto& s : sets) values.insert(parse_assignment(s));
    std::map<SpeciesId, double> overrides;
    for (const auto& s : perturbs) overrides.insert(parse_assignment(s));

    Trajectory traj =
        simulate_circuit(c, values, cfg, overrides, /*allow=*/!overrides.empty());
    if (!out_csv.empty()) write_file(out_csv, to_csv(traj));

    double final_value = traj.value(c.output, traj.rows() - 1);
    std::printf("final output    %.17g\n", final_value);
    if (c.output.dual) {
        size_t last = traj.rows() - 1;
        std::printf("  rails         %s=%.17g  %s=%.17g\n", c.output.pos.c_str(),
                    traj.at(last, traj.index_of(c.output.pos)), c.output.neg.c_str(),
                    traj.at(last, traj.index_of(c.output.neg)));
    }
    std::printf("estimated limit %.17g\n", estimate_limit(traj, c.output));
    for (const Monitor& m : c.monitors)
        std::printf("drift %-24s %.3e\n", m.label.c_str(), check_conservation(traj, m));
    return 0;
}

int cmd_verify(const std::string& selector, bool quick, const std::string& csv_path) {
    auto results = verify::run_checks(selector, quick);
    int failures = 0;
    for (const auto& r : results) {
        std::printf("%s %-20s %s\n", r.passed ? "PASS" : "FAIL", r.name.c_str(),
                    r.detail.c_str());
        if (!r.passed) ++failures;
    }
    if (!csv_path.empty()) write_file(csv_path, verify::results_csv(results));
    if (failures) {
        for (const auto& r : results)
            if (!r.passed) {
                std::fprintf(stderr, "first failing check: %s\n", r.name.c_str());
                break;
            }
        return 1;
    }
    return 0;
}

int cmd_export(const std::string& module_name, const std::string& expr,
               const std::vector<std::string>& decl_texts, const std::string& log_system,
               const std::string& e_mode, const std::string& format, bool list,
               const std::string& out_path) {
    if (list) {
        for (const auto& name : module_catalog()) {
            ModuleSpec spec = make_module(name);
            std::printf("%-15s flags=%-45s rate=%s\n", name.c_str(),
                        to_string(spec.flags).c_str(), spec.rate.text.c_str());
        }
        return 0;
    }
    if (format != "crn" && format != "ode")
        throw Error(ErrorKind::Domain, "unknown export format '" + format + "'");

    PolynomialODE ode;
    std::string meta;
    if (!module_name.empty()) {
        ModuleSpec spec = make_module(module_name);
        ode = spec.ode;
        meta = format_metadata(spec);
    } else {
        CircuitInstance c = compile(expr, parse_decls(decl_texts),
                                    compile_options(log_system, e_mode));
        ode = c.ode;
        meta = format_metadata(c);
    }
    std::string body =
        format == "crn" ? format_network(network_from_ode(ode)) : format_ode(ode);
    write_file(out_path, body);
    write_file(out_path + ".meta", meta);
    std::printf("wrote %s and %s.meta\n", out_path.c_str(), out_path.c_str());
    return 0;
}

int cmd_sweep(const std::string& expr, const std::vector<std::string>& decl_texts,
              const std::vector<double>& grid, double threshold, bool serial,
              const IntegratorConfig& cfg, const std::string& out_csv,
              const std::string& plot_dir) {
    auto decls = parse_decls(decl_texts);
    CircuitInstance c = compile(expr, decls);
    if (c.inputs.size() != 1)
        throw Error(ErrorKind::Domain, "sweep needs exactly one input variable");
    const std::string input = c.inputs[0].name;

    std::vector<SweepPoint> points;
    for (double v : grid) {
        // pin the expected limit with a high-accuracy oracle run
        Trajectory ref = oracle(c.ode, resolve_init(c, {{input, v}}), cfg.t_end,
                                std::max(cfg.sample_count / 4, 100));
        double limit = estimate_limit(ref, c.output);
        points.push_back(sweep_point(c, input, v, limit, cfg));
    }
    SweepReport report = sweep(points, threshold, !serial);

    std::printf("%s", sweep_csv(report).c_str());
    if (!out_csv.empty()) write_file(out_csv, sweep_csv(report));
    if (!plot_dir.empty()) {
        for (size_t i = 0; i < points.size(); ++i) {
            Trajectory traj = integrate(points[i].ode, points[i].init, points[i].cfg);
            write_file(plot_dir + "/" + points[i].label + ".dat",
                       error_decay_data(traj, points[i].output, points[i].true_limit));
        }
    }
    return 0; // the verdict is data, not an error
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"reaction-network calculator: compile, simulate, certify"};
    app.require_subcommand(1);
    app.set_config("--config");

    std::string expr, out_base = "circuit", out_path, out_csv, csv_path, plot_dir;
    std::string network_path, module_name, format = "crn";
    std::string log_system = "auto", e_mode = "static", selector = "all";
    std::vector<std::string> decl_texts, sets, perturbs, inits;
    std::vector<double> grid;
    double threshold = 0.9;
    bool quick = false, list_modules = false, serial = false;
    IntegratorFlags sim_flags, sweep_flags;

    auto* compile_cmd = app.add_subcommand("compile", "translate an expression");
    compile_cmd->add_option("expression", expr)->required();
    compile_cmd->add_option("--in", decl_texts, "input declaration name:real|nonneg(lo,hi)");
    compile_cmd->add_option("--log-system", log_system, "1..6, 1r, or auto");
    compile_cmd->add_option("--const-e", e_mode, "static or synthesized");
    compile_cmd->add_option("-o,--output", out_base, "output base name");

    auto* simulate_cmd = app.add_subcommand("simulate", "integrate a circuit");
    simulate_cmd->add_option("expression", expr);
    simulate_cmd->add_option("--in", decl_texts);
    simulate_cmd->add_option("--set", sets, "input value name=v");
    simulate_cmd->add_option("--perturb-init", perturbs,
                             "species=value, skipping compatibility checks");
    simulate_cmd->add_option("--network", network_path, "simulate a .crn file instead");
    simulate_cmd->add_option("--init", inits, "initial value species=v (network mode)");
    simulate_cmd->add_option("--log-system", log_system);
    simulate_cmd->add_option("--const-e", e_mode);
    simulate_cmd->add_option("-o,--output", out_csv, "trajectory CSV path");
    sim_flags.attach(simulate_cmd);

    auto* verify_cmd = app.add_subcommand("verify", "run the claim checks");
    verify_cmd->add_option("selector", selector, "check name or 'all'");
    verify_cmd->add_flag("--quick", quick, "trim grids to their endpoints");
    verify_cmd->add_option("--csv", csv_path, "machine-readable results");

    auto* export_cmd = app.add_subcommand("export", "write a network or ODE file");
    export_cmd->add_option("expression", expr);
    export_cmd->add_option("--in", decl_texts);
    export_cmd->add_option("--module", module_name, "export a library module");
    export_cmd->add_option("--format", format, "crn or ode");
    export_cmd->add_option("--log-system", log_system);
    export_cmd->add_option("--const-e", e_mode);
    export_cmd->add_flag("--list", list_modules, "list the module catalog");
    export_cmd->add_option("-o,--output", out_path, "output file");

    auto* sweep_cmd = app.add_subcommand("sweep", "input-independence sweep");
    sweep_cmd->add_option("expression", expr)->required();
    sweep_cmd->add_option("--in", decl_texts);
    sweep_cmd->add_option("--grid", grid, "input values")->required()->delimiter(',');
    sweep_cmd->add_option("--threshold", threshold, "rate threshold for the verdict");
    sweep_cmd->add_flag("--serial", serial, "disable the parallel sweep");
    sweep_cmd->add_option("-o,--output", out_csv, "report CSV path");
    sweep_cmd->add_option("--plot-dir", plot_dir, "write log-error data files here");
    sweep_flags.attach(sweep_cmd);

    CLI11_PARSE(app, argc, argv);

    try {
        if (compile_cmd->parsed())
            return cmd_compile(expr, decl_texts, log_system, e_mode, out_base);
        if (simulate_cmd->parsed())
            return cmd_simulate(expr, decl_texts, sets, perturbs, network_path, inits,
                                log_system, e_mode, sim_flags.cfg, out_csv);
        if (verify_cmd->parsed()) return cmd_verify(selector, quick, csv_path);
        if (export_cmd->parsed())
            return cmd_export(module_name, expr, decl_texts, log_system, e_mode, format,
                              list_modules, out_path);
        if (sweep_cmd->parsed())
            return cmd_sweep(expr, decl_texts, grid, threshold, serial, sweep_flags.cfg,
                             out_csv, plot_dir);
    } catch (const Error& e) {
        std::fprintf(stderr, "error [%s]: %s\n", to_string(e.kind()), e.what());
        if (e.kind() == ErrorKind::NonFinite)
            std::fprintf(stderr,
                         "hint: exponentials overflow doubles near e^709; reduce the "
                         "input magnitude or t_end\n");
        return e.is_build_error() ? 2 : 3;
    }
    return 0;
}
