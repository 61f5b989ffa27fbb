// Command-line front end: parses one subcommand into a RunConfig, dispatches
// it through the library, and emits the report. Exit status is nonzero iff
// any certificate or invariant in the run failed.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "hardylab/report.hpp"

namespace {

using hardylab::cli::Report;
using hardylab::cli::RunConfig;

struct Pending {
    RunConfig cfg;
    bool selected = false;
};

void emit(const Report& rep, const RunConfig& cfg) {
    std::string format = cfg.format;
    // a .csv output path implies the tabular format unless overridden
    if (format == "json" && cfg.out.size() > 4 &&
        cfg.out.substr(cfg.out.size() - 4) == ".csv")
        format = "csv";
    const std::string text = rep.serialize(format);
    if (cfg.out.empty()) {
        std::cout << text;
    } else {
        std::ofstream os(cfg.out);
        if (!os) {
            std::cerr << "cannot open output path: " << cfg.out << "\n";
            std::exit(2);
        }
        os << text;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for sharp Hardy constants with boundary singularities"};
    app.require_subcommand(1);

    std::map<std::string, Pending> pending;
    std::string batch_path;
    int batch_jobs = 1;
    std::string batch_format = "json";
    std::string batch_out;

    auto add = [&](const std::string& name, const std::string& desc) -> CLI::App* {
        CLI::App* sub = app.add_subcommand(name, desc);
        auto& p = pending[name];
        p.cfg.command = name;
        sub->callback([&p]() { p.selected = true; });
        sub->add_option("--out", p.cfg.out, "write the report to this path");
        sub->add_option("--format", p.cfg.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
        return sub;
    };
    auto opt_num = [](CLI::App* sub, Pending& p, const std::string& key, const std::string& desc) {
        auto setter = [&p, key](const std::string& v) {
            p.cfg.params[key] = std::stod(v);
            return true;
        };
        sub->add_option_function<std::string>("--" + key, setter, desc);
    };
    auto opt_int = [](CLI::App* sub, Pending& p, const std::string& key, const std::string& desc) {
        auto setter = [&p, key](const std::string& v) {
            p.cfg.params[key] = std::stol(v);
            return true;
        };
        sub->add_option_function<std::string>("--" + key, setter, desc);
    };
    auto opt_str = [](CLI::App* sub, Pending& p, const std::string& key, const std::string& desc) {
        auto setter = [&p, key](const std::string& v) {
            p.cfg.params[key] = v;
            return true;
        };
        sub->add_option_function<std::string>("--" + key, setter, desc);
    };

    {
        auto* s = add("kappa", "solve the quarter equation for the log-series normalization");
        opt_num(s, pending["kappa"], "tol", "residual tolerance");
    }
    {
        auto* s = add("speclog", "iterated-logarithm evaluations");
        auto& p = pending["speclog"];
        s->require_subcommand(1);
        for (const char* op : {"eval", "prod", "eta", "bigb", "kappa"}) {
            CLI::App* sub = s->add_subcommand(op, "");
            sub->callback([&p, op]() { p.cfg.params["op"] = std::string(op); });
            opt_int(sub, p, "k", "depth");
            opt_num(sub, p, "t", "argument in (0,1]");
            opt_num(sub, p, "tol", "tolerance");
        }
    }
    {
        auto* s = add("conformal", "Moebius/Kelvin identity and energy-invariance report");
        auto& p = pending["conformal"];
        opt_int(s, p, "n", "dimension");
        opt_int(s, p, "samples", "random samples");
        opt_int(s, p, "seed", "random seed");
    }
    {
        auto* s = add("cap-eig", "spherical-cap eigenvalues");
        auto& p = pending["cap-eig"];
        opt_int(s, p, "n", "dimension");
        opt_num(s, p, "theta", "cap angle");
        opt_str(s, p, "variant", "cone | example");
        opt_int(s, p, "k", "eigenvalue index");
        opt_int(s, p, "resolution", "base grid size");
    }
    {
        auto* s = add("annulus-1d", "radial annulus constant, closed form vs eigensolve");
        auto& p = pending["annulus-1d"];
        opt_int(s, p, "n", "dimension");
        opt_num(s, p, "a", "inner radius");
        opt_num(s, p, "b", "outer radius");
        opt_int(s, p, "resolution", "base grid size");
    }
    {
        auto* s = add("annulus", "certified FEM upper bounds for the annulus Hardy constant");
        auto& p = pending["annulus"];
        opt_int(s, p, "n", "dimension");
        opt_num(s, p, "tau", "width ratio");
        opt_int(s, p, "levels", "refinement levels");
        opt_num(s, p, "h0", "base mesh pitch");
        opt_num(s, p, "grading", "grading factor toward the singularity");
        opt_num(s, p, "tol", "eigensolver residual");
        opt_str(s, p, "dump_mesh", "write the level-0 meridian mesh to this path");
    }
    {
        auto* s = add("sharpness", "near-extremal half-ball Hardy quotient");
        auto& p = pending["sharpness"];
        opt_int(s, p, "n", "dimension");
        opt_num(s, p, "eps", "profile exponent offset");
    }
    {
        auto* s = add("verify", "randomized remainder suite for a built-in inequality");
        auto& p = pending["verify"];
        opt_str(s, p, "inequality", "inequality id");
        opt_int(s, p, "n", "dimension");
        opt_int(s, p, "trials", "trial count");
        opt_int(s, p, "seed", "random seed");
        opt_int(s, p, "m", "log depth (mlogs id)");
        opt_num(s, p, "R", "half-ball radius");
        opt_num(s, p, "rho", "exterior-ball radius");
        opt_num(s, p, "D", "domain size");
        opt_num(s, p, "c", "Sobolev coefficient to test");
        s->add_flag_callback("--probe-c", [&p]() { p.cfg.params["probe_c"] = 1; },
                             "report the largest admissible Sobolev coefficient");
    }
    {
        auto* s = add("tau-bounds", "certified bracket for the annulus threshold");
        opt_int(s, pending["tau-bounds"], "n", "dimension");
    }
    {
        auto* s = add("counterexample", "upper bound for the small-exterior-ball domain");
        auto& p = pending["counterexample"];
        opt_int(s, p, "n", "dimension");
        opt_num(s, p, "theta", "cone half-angle");
        opt_num(s, p, "rho", "exterior-ball radius");
    }
    {
        auto* s = add("divcheck", "divergence-field identity check");
        auto& p = pending["divcheck"];
        opt_int(s, p, "n", "dimension");
        opt_num(s, p, "R", "half-ball radius");
        opt_int(s, p, "samples", "sample count");
        opt_int(s, p, "seed", "random seed");
    }
    {
        auto* s = add("subcritical", "subcriticality integral test for a potential family");
        auto& p = pending["subcritical"];
        opt_str(s, p, "family", "logweighted | power");
        opt_num(s, p, "alpha", "logweighted exponent");
        opt_num(s, p, "s", "power exponent");
        opt_int(s, p, "n", "dimension");
        opt_num(s, p, "D", "domain size");
        opt_num(s, p, "tol", "quadrature tolerance");
    }
    {
        auto* s = add("crv", "local improvement constant upper bounds");
        auto& p = pending["crv"];
        opt_str(s, p, "family", "logweighted | power");
        opt_num(s, p, "alpha", "logweighted exponent");
        opt_num(s, p, "s", "power exponent");
        opt_int(s, p, "n", "dimension");
        opt_num(s, p, "D", "domain size");
        opt_num(s, p, "r", "ball radius");
        opt_num(s, p, "rho", "exterior-ball radius");
        opt_int(s, p, "levels", "refinement levels");
        opt_num(s, p, "lambda", "zeroth-order term");
        opt_num(s, p, "tol", "eigensolver residual");
    }
    {
        auto* s = add("cone-sobolev", "Sobolev-constant bounds for cones");
        auto& p = pending["cone-sobolev"];
        opt_int(s, p, "n", "dimension");
        opt_num(s, p, "theta", "cap angle");
        opt_int(s, p, "resolution", "cap eigensolver grid");
    }
    {
        auto* s = add("groundstate-check", "ground-state substitution identity");
        auto& p = pending["groundstate-check"];
        opt_int(s, p, "n", "dimension");
        opt_num(s, p, "rho", "exterior-ball radius");
        opt_num(s, p, "a", "shell inner radius");
        opt_num(s, p, "b", "shell outer radius");
        opt_num(s, p, "amplitude", "trial amplitude");
        opt_int(s, p, "level", "quadrature level");
    }
    {
        CLI::App* s = app.add_subcommand("batch", "run a JSON list of configs");
        s->add_option("file", batch_path, "path to a JSON array of run configs")->required();
        s->add_option("--jobs", batch_jobs, "parallel workers");
        s->add_option("--format", batch_format, "json or csv")
            ->check(CLI::IsMember({"json", "csv"}));
        s->add_option("--out", batch_out, "write combined reports to this path");
    }

    CLI11_PARSE(app, argc, argv);

    try {
        if (!batch_path.empty()) {
            std::ifstream is(batch_path);
            if (!is) {
                std::cerr << "cannot read batch file: " << batch_path << "\n";
                return 2;
            }
            std::string text((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
            auto reports = hardylab::cli::run_batch(text, batch_jobs);
            bool all_pass = true;
            nlohmann::json combined = nlohmann::json::array();
            std::string csv;
            for (const auto& r : reports) {
                combined.push_back(r.doc);
                csv += r.csv;
                all_pass = all_pass && r.pass;
            }
            const std::string text_out = batch_format == "csv" ? csv : combined.dump(2) + "\n";
            if (batch_out.empty()) {
                std::cout << text_out;
            } else {
                std::ofstream os(batch_out);
                os << text_out;
            }
            return all_pass ? 0 : 1;
        }
        for (auto& [name, p] : pending) {
            if (!p.selected) continue;
            Report rep = hardylab::cli::dispatch(p.cfg);
            emit(rep, p.cfg);
            return rep.pass ? 0 : 1;
        }
    } catch (const hardylab::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
