// conslaw: conservation-law multipliers and fluxes for PDE systems.
//
// Subcommands: multipliers | fluxes | verify. The JSON report goes to
// stdout (or --out); diagnostics go to stderr, as text or, with --json,
// as one JSON array.

#include <climits>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "conslaw/run.hpp"

namespace {

struct CommonArgs {
    std::string path;
    std::vector<std::string> methods;
    int degree = INT_MIN;
    std::string deps;
    std::string base_point;
    std::string weights;
    bool latex = false;
    bool json_diagnostics = false;
    std::string out;
};

void add_common(CLI::App* cmd, CommonArgs& a) {
    cmd->add_option("problem", a.path, "problem file, JSON or line format")->required();
    cmd->add_option("--method", a.methods,
                    "flux method(s): direct, homotopy1, homotopy2, scaling, pair, or all")
        ->delimiter(',');
    cmd->add_option("--degree", a.degree, "total degree cap for the multiplier ansatz");
    cmd->add_option("--deps", a.deps,
                    "comma-separated ansatz atoms, e.g. t,x,u,u_x,u_xx");
    cmd->add_option("--base-point", a.base_point,
                    "homotopy2 base point, e.g. u=x (default: zero)");
    cmd->add_option("--weights", a.weights, "scaling weights, e.g. x=1,t=3,u=-2");
    cmd->add_flag("--latex", a.latex, "also print LaTeX display lines as diagnostics");
    cmd->add_flag("--json", a.json_diagnostics,
                  "print diagnostics as a JSON array on stderr");
    cmd->add_option("--out", a.out, "write the report to this file instead of stdout");
}

conslaw::RunOptions to_options(const CommonArgs& a) {
    conslaw::RunOptions o;
    o.problem_path = a.path;
    o.methods = a.methods;
    if (a.degree != INT_MIN) o.degree = a.degree;
    if (!a.deps.empty()) o.deps = a.deps;
    if (!a.base_point.empty()) o.base_point = a.base_point;
    if (!a.weights.empty()) o.weights = a.weights;
    o.latex = a.latex;
    return o;
}

int emit(const conslaw::RunResult& res, const CommonArgs& a) {
    if (a.json_diagnostics) {
        nlohmann::ordered_json diags = nlohmann::ordered_json::array();
        for (const auto& d : res.diagnostics)
            diags.push_back(nlohmann::ordered_json{
                {"severity", d.severity}, {"context", d.context}, {"message", d.message}});
        std::cerr << diags.dump(2) << "\n";
    } else {
        for (const auto& d : res.diagnostics) {
            std::cerr << d.severity;
            if (!d.context.empty()) std::cerr << " [" << d.context << "]";
            std::cerr << ": " << d.message << "\n";
        }
    }
    if (!res.report.empty()) {
        if (!a.out.empty()) {
            std::ofstream f(a.out, std::ios::binary);
            if (!f) {
                std::cerr << "error: cannot write report to '" << a.out << "'\n";
                return conslaw::exit_error;
            }
            f << res.report;
        } else {
            std::cout << res.report;
        }
    }
    return res.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"conservation-law multipliers and flux reconstruction for PDE systems "
                 "in solved form"};
    app.require_subcommand(1);

    CommonArgs margs, fargs, vargs;
    CLI::App* m = app.add_subcommand(
        "multipliers", "solve the determining equations over a multiplier ansatz");
    add_common(m, margs);
    CLI::App* f = app.add_subcommand(
        "fluxes", "reconstruct fluxes for each multiplier by the selected methods");
    add_common(f, fargs);
    CLI::App* v = app.add_subcommand(
        "verify", "reconstruct fluxes, then run the independent exactness checks");
    add_common(v, vargs);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : conslaw::exit_parse;  // keep 0 for --help
    }

    try {
        if (m->parsed()) return emit(conslaw::run_multipliers(to_options(margs)), margs);
        if (f->parsed()) return emit(conslaw::run_fluxes(to_options(fargs)), fargs);
        return emit(conslaw::run_verify(to_options(vargs)), vargs);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return conslaw::exit_error;
    }
}
