#include "conslaw/run.hpp"

#include <algorithm>
#include <utility>

#include "json.hpp"

#include "conslaw/calculus.hpp"
#include "conslaw/errors.hpp"
#include "conslaw/flux.hpp"
#include "conslaw/multipliers.hpp"
#include "conslaw/parse.hpp"
#include "conslaw/render.hpp"
#include "conslaw/verify.hpp"

namespace conslaw {
namespace {

using nlohmann::ordered_json;

int exit_for(ErrorCode c) {
    switch (c) {
        case ErrorCode::parse:
        case ErrorCode::validation:
            return exit_parse;
        case ErrorCode::empty_result:
            return exit_empty;
        case ErrorCode::inapplicable:
            return exit_inapplicable;
        case ErrorCode::verification:
            return exit_verification;
        case ErrorCode::internal:
            return exit_error;
    }
    return exit_error;
}

std::string code_name(ErrorCode c) {
    switch (c) {
        case ErrorCode::parse:
            return "parse";
        case ErrorCode::validation:
            return "validation";
        case ErrorCode::empty_result:
            return "empty-result";
        case ErrorCode::inapplicable:
            return "inapplicable";
        case ErrorCode::verification:
            return "verification";
        case ErrorCode::internal:
            return "internal";
    }
    return "internal";
}

std::string status_name(VerifyStatus s) {
    switch (s) {
        case VerifyStatus::unverified:
            return "unverified";
        case VerifyStatus::characteristic_identity:
            return "characteristic-identity";
        case VerifyStatus::on_solutions:
            return "on-solutions";
    }
    return "unverified";
}

Method method_from_name(const std::string& name) {
    if (name == "direct") return Method::direct;
    if (name == "homotopy1") return Method::homotopy1;
    if (name == "homotopy2") return Method::homotopy2;
    if (name == "scaling") return Method::scaling;
    if (name == "pair") return Method::pair;
    throw ValidationError("unknown method '" + name +
                          "' (expected direct, homotopy1, homotopy2, scaling, pair, or all)");
}

ordered_json expr_json(const DiffExpr& e, const SymbolTable& sym) {
    return ordered_json{{"text", render_expr(e, sym)}, {"latex", render_latex(e, sym)}};
}

ordered_json expr_list_json(const std::vector<DiffExpr>& es, const SymbolTable& sym) {
    ordered_json out = ordered_json::array();
    for (const auto& e : es) out.push_back(expr_json(e, sym));
    return out;
}

/// Everything resolved before any flux work: the problem, the solved
/// multiplier basis, and the CLI-overridable weights/base point.
struct Workspace {
    Problem problem;
    std::vector<std::string> ansatz_warnings;
    std::vector<std::string> solver_assumptions;
    std::vector<MultiplierSet> sets;
    std::optional<ScalingSymmetry> weights;
    std::vector<DiffExpr> base;  // empty = zero base point
};

Workspace prepare(const RunOptions& opts, std::vector<Diagnostic>& diags) {
    Workspace ws;
    ws.problem = parse_problem_file(opts.problem_path);
    const PDESystem& sys = ws.problem.system;
    const SymbolTable& sym = sys.symbols;

    if (opts.weights)
        ws.weights = parse_weights_spec(*opts.weights, sym);
    else
        ws.weights = ws.problem.scaling;
    if (opts.base_point)
        ws.base = parse_base_point_spec(*opts.base_point, sym);
    else if (ws.problem.base_point)
        ws.base = *ws.problem.base_point;

    if (!ws.problem.multipliers.empty() && !opts.deps && !opts.degree) {
        // Declared multiplier tuples: validate each against the determining
        // equations exactly instead of solving an ansatz.
        for (std::size_t t = 0; t < ws.problem.multipliers.size(); ++t) {
            const auto& tuple = ws.problem.multipliers[t];
            DiffExpr chr;
            for (std::size_t s = 0; s < sys.equations.size(); ++s)
                chr += tuple[s] * sys.equations[s].residual();
            for (std::size_t d = 0; d < sym.dependents.size(); ++d)
                if (!is_zero_modulo_rules(euler(chr, static_cast<int>(d)),
                                          &ws.solver_assumptions))
                    throw ValidationError(
                        "declared multiplier tuple " + std::to_string(t + 1) +
                        " does not satisfy the determining equations (the variational "
                        "derivative with respect to " +
                        sym.dependents[d] + " does not vanish)");
            ws.sets.push_back(MultiplierSet{tuple, {}});
        }
        diags.push_back({"note", "multipliers",
                         std::to_string(ws.sets.size()) +
                             " declared multiplier tuple(s) validated against the "
                             "determining equations"});
        return ws;
    }

    AnsatzSpec spec;
    if (opts.deps) {
        spec.atoms = parse_atom_list(*opts.deps, sym);
        if (ws.problem.ansatz) {
            spec.degree_total = ws.problem.ansatz->degree_total;
            spec.degree_each = ws.problem.ansatz->degree_each;
        }
    } else if (ws.problem.ansatz) {
        spec = *ws.problem.ansatz;
    } else {
        throw ValidationError(
            "no multiplier ansatz: add an ansatz section to the problem or pass --deps "
            "(with --degree)");
    }
    if (opts.degree) spec.degree_total = *opts.degree;

    Ansatz basis = generate_ansatz(sys, spec);
    ws.ansatz_warnings = basis.warnings;
    for (const auto& w : ws.ansatz_warnings) diags.push_back({"warning", "ansatz", w});

    MultiplierAnsatz mans = replicate_ansatz(basis, sys.equations.size());
    ws.sets = solve_multipliers(sys, mans, &ws.solver_assumptions);
    diags.push_back({"note", "multipliers",
                     std::to_string(ws.sets.size()) + " multiplier set(s) in a basis of " +
                         std::to_string(basis.monomials.size()) + " monomial(s)"});
    return ws;
}

/// The method list for one multiplier set: explicit request, "all"
/// expansion, or the documented auto-selection.
std::vector<Method> methods_for(const Workspace& ws, const std::vector<std::string>& requested,
                                std::size_t set_index, std::vector<Diagnostic>& diags) {
    const PDESystem& sys = ws.problem.system;
    const MultiplierSet& set = ws.sets[set_index];
    bool all = std::find(requested.begin(), requested.end(), "all") != requested.end();
    std::vector<Method> out;
    auto push = [&out](Method m) {
        if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
    };
    if (all) {
        push(Method::direct);
        push(Method::homotopy1);
        push(Method::homotopy2);
        if (ws.weights) {
            push(Method::scaling);
            push(Method::pair);
        }
        return out;
    }
    if (!requested.empty()) {
        for (const auto& name : requested) push(method_from_name(name));
        return out;
    }
    // Auto-selection: arbitrary functions force the direct method; a
    // declared, applicable, noncritical scaling symmetry is cheapest;
    // otherwise the second homotopy formula.
    DiffExpr chr;
    for (std::size_t s = 0; s < sys.equations.size(); ++s)
        chr += set.multipliers[s] * sys.equations[s].residual();
    std::string context = "multiplier " + std::to_string(set_index);
    if (contains_arbitrary_function(chr)) {
        diags.push_back({"note", context,
                         "auto-selected the direct method (the characteristic expression "
                         "contains an arbitrary function)"});
        return {Method::direct};
    }
    if (ws.weights) {
        try {
            WeightReport wr = scaling_weights(sys, set.multipliers, *ws.weights);
            bool critical = std::find(wr.critical.begin(), wr.critical.end(), true) !=
                            wr.critical.end();
            if (!critical) {
                diags.push_back({"note", context, "auto-selected the scaling method"});
                return {Method::scaling};
            }
            diags.push_back({"note", context,
                             "scaling symmetry is critical for this multiplier; "
                             "auto-selected homotopy2 instead"});
        } catch (const Error& e) {
            diags.push_back({"note", context,
                             std::string("scaling weights do not apply (") + e.what() +
                                 "); auto-selected homotopy2 instead"});
        }
    } else {
        diags.push_back({"note", context, "auto-selected the homotopy2 method"});
    }
    return {Method::homotopy2};
}

ConservationLaw build_law(const Workspace& ws, Method m, const MultiplierSet& set) {
    const PDESystem& sys = ws.problem.system;
    switch (m) {
        case Method::direct:
            return flux_direct(sys, set.multipliers);
        case Method::homotopy1:
            return flux_homotopy1(sys, set.multipliers);
        case Method::homotopy2:
            return flux_homotopy2(sys, set.multipliers, ws.base);
        case Method::scaling:
            if (!ws.weights)
                throw ValidationError(
                    "the scaling method needs weights: add a scaling section or pass "
                    "--weights");
            return flux_scaling(sys, set.multipliers, *ws.weights);
        case Method::pair:
            if (!ws.weights)
                throw ValidationError(
                    "the pair method uses the scaling characteristic; add a scaling "
                    "section or pass --weights");
            return flux_symmetry_pair(sys, evolutionary_characteristic(sys, *ws.weights),
                                      set.multipliers);
    }
    throw InternalError("unhandled method");
}

struct LawEntry {
    std::size_t set_index = 0;
    Method method = Method::direct;
    std::optional<ConservationLaw> law;
    ErrorCode error_code = ErrorCode::internal;
    std::string error_message;
};

std::vector<LawEntry> build_laws(const Workspace& ws, const std::vector<std::string>& requested,
                                 std::vector<Diagnostic>& diags) {
    std::vector<LawEntry> out;
    for (std::size_t i = 0; i < ws.sets.size(); ++i) {
        for (Method m : methods_for(ws, requested, i, diags)) {
            LawEntry entry;
            entry.set_index = i;
            entry.method = m;
            std::string context = method_name(m) + ", multiplier " + std::to_string(i);
            try {
                entry.law = build_law(ws, m, ws.sets[i]);
            } catch (const Error& e) {
                entry.error_code = e.code();
                entry.error_message = e.what();
                diags.push_back({"error", context, e.what()});
            }
            out.push_back(std::move(entry));
        }
    }
    return out;
}

ordered_json weights_json(const Workspace& ws) {
    const PDESystem& sys = ws.problem.system;
    const SymbolTable& sym = sys.symbols;
    const ScalingSymmetry& sc = *ws.weights;
    ordered_json p = ordered_json::object(), q = ordered_json::object();
    for (std::size_t i = 0; i < sym.independents.size(); ++i)
        p[sym.independents[i]] = rat_str(sc.p[i]);
    for (std::size_t d = 0; d < sym.dependents.size(); ++d)
        q[sym.dependents[d]] = rat_str(sc.q[d]);
    ordered_json reports = ordered_json::array();
    for (const auto& set : ws.sets) {
        try {
            WeightReport wr = scaling_weights(sys, set.multipliers, *ws.weights);
            ordered_json entry;
            auto rats = [](const std::vector<Rational>& v) {
                ordered_json a = ordered_json::array();
                for (const auto& r : v) a.push_back(rat_str(r));
                return a;
            };
            entry["r"] = rats(wr.r);
            entry["s"] = rats(wr.s);
            entry["chi"] = rats(wr.chi);
            ordered_json crit = ordered_json::array();
            for (bool b : wr.critical) crit.push_back(b);
            entry["critical"] = crit;
            reports.push_back(std::move(entry));
        } catch (const Error& e) {
            reports.push_back(ordered_json{{"error", e.what()}});
        }
    }
    return ordered_json{{"p", std::move(p)}, {"q", std::move(q)},
                        {"per_multiplier", std::move(reports)}};
}

ordered_json law_json(const Workspace& ws, const LawEntry& entry) {
    const SymbolTable& sym = ws.problem.system.symbols;
    ordered_json j;
    j["multiplier_index"] = entry.set_index;
    j["method"] = method_name(entry.method);
    if (!entry.law) {
        j["error"] = ordered_json{{"kind", code_name(entry.error_code)},
                                  {"message", entry.error_message}};
        return j;
    }
    const ConservationLaw& law = *entry.law;
    j["fluxes"] = expr_list_json(law.fluxes, sym);
    j["status"] = status_name(law.status);
    j["assumptions"] = law.assumptions;
    if (law.critical) j["critical"] = true;
    return j;
}

/// Cross-method comparison: for each multiplier, classify the difference of
/// every later law against the first successful one.
ordered_json agreement_json(const Workspace& ws, const std::vector<LawEntry>& entries,
                            bool* all_agree) {
    const PDESystem& sys = ws.problem.system;
    ordered_json out = ordered_json::array();
    for (std::size_t i = 0; i < ws.sets.size(); ++i) {
        const LawEntry* baseline = nullptr;
        for (const auto& e : entries) {
            if (e.set_index != i || !e.law) continue;
            if (!baseline) {
                baseline = &e;
                continue;
            }
            ConservationLaw diff;
            for (std::size_t k = 0; k < baseline->law->fluxes.size(); ++k)
                diff.fluxes.push_back(baseline->law->fluxes[k] - e.law->fluxes[k]);
            Triviality t = triviality_heuristic(sys, diff);
            bool agree = t != Triviality::unknown || verify_on_solutions(sys, diff).pass;
            if (all_agree) *all_agree = *all_agree && agree;
            out.push_back(ordered_json{{"multiplier_index", i},
                                       {"baseline", method_name(baseline->method)},
                                       {"method", method_name(e.method)},
                                       {"flux_difference", triviality_name(t)},
                                       {"divergences_agree_on_solutions", agree}});
        }
    }
    return out;
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

ordered_json empty_report() {
    return ordered_json{{"multipliers", ordered_json::array()},
                        {"laws", ordered_json::array()},
                        {"assumptions", ordered_json::array()},
                        {"warnings", ordered_json::array()}};
}

ordered_json base_report(const Workspace& ws) {
    const SymbolTable& sym = ws.problem.system.symbols;
    ordered_json rep;
    ordered_json multipliers = ordered_json::array();
    for (const auto& set : ws.sets) multipliers.push_back(expr_list_json(set.multipliers, sym));
    rep["multipliers"] = std::move(multipliers);
    rep["laws"] = ordered_json::array();
    rep["assumptions"] = ws.solver_assumptions;
    rep["warnings"] = ws.ansatz_warnings;
    return rep;
}

void latex_displays(const Workspace& ws, const std::vector<LawEntry>* entries,
                    std::vector<Diagnostic>& diags) {
    const SymbolTable& sym = ws.problem.system.symbols;
    for (std::size_t i = 0; i < ws.sets.size(); ++i) {
        std::string line;
        for (std::size_t s = 0; s < ws.sets[i].multipliers.size(); ++s) {
            if (s) line += ", ";
            line += "\\Lambda_{" + std::to_string(s + 1) + "} = " +
                    render_latex(ws.sets[i].multipliers[s], sym);
        }
        diags.push_back({"display", "multiplier " + std::to_string(i), line});
    }
    if (!entries) return;
    for (const auto& e : *entries) {
        if (!e.law) continue;
        std::string line;
        for (std::size_t k = 0; k < e.law->fluxes.size(); ++k) {
            if (k) line += ", ";
            line += "\\Phi^{" + sym.independents[k] + "} = " +
                    render_latex(e.law->fluxes[k], sym);
        }
        diags.push_back(
            {"display", method_name(e.method) + ", multiplier " + std::to_string(e.set_index),
             line});
    }
}

/// Shared wrapper: parse/solve, then hand off; every Error becomes a
/// diagnostic plus the contract exit code, with an empty-but-valid report
/// for empty results.
template <typename Body>
RunResult guarded(const RunOptions& opts, Body body) {
    RunResult res;
    Workspace ws;
    try {
        ws = prepare(opts, res.diagnostics);
    } catch (const Error& e) {
        res.diagnostics.push_back({"error", "", e.what()});
        res.exit_code = exit_for(e.code());
        if (e.code() == ErrorCode::empty_result) res.report = dump(empty_report());
        return res;
    }
    if (ws.sets.empty()) {
        res.diagnostics.push_back(
            {"note", "multipliers", "no multipliers within this ansatz"});
        res.report = dump(empty_report());
        res.exit_code = exit_empty;
        return res;
    }
    try {
        body(ws, res);
    } catch (const Error& e) {
        res.diagnostics.push_back({"error", "", e.what()});
        res.exit_code = exit_for(e.code());
    }
    return res;
}

int failure_exit(const std::vector<LawEntry>& entries) {
    for (const auto& e : entries)
        if (!e.law && e.error_code != ErrorCode::inapplicable) return exit_for(e.error_code);
    return exit_inapplicable;
}

}  // namespace

RunResult run_multipliers(const RunOptions& opts) {
    return guarded(opts, [&](Workspace& ws, RunResult& res) {
        res.report = dump(base_report(ws));
        if (opts.latex) latex_displays(ws, nullptr, res.diagnostics);
    });
}

RunResult run_fluxes(const RunOptions& opts) {
    return guarded(opts, [&](Workspace& ws, RunResult& res) {
        std::vector<std::string> requested =
            !opts.methods.empty() ? opts.methods : ws.problem.methods;
        std::vector<LawEntry> entries = build_laws(ws, requested, res.diagnostics);
        ordered_json rep = base_report(ws);
        ordered_json laws = ordered_json::array();
        std::size_t produced = 0;
        for (const auto& e : entries) {
            laws.push_back(law_json(ws, e));
            produced += e.law.has_value();
        }
        rep["laws"] = std::move(laws);
        if (ws.weights) rep["weights"] = weights_json(ws);
        bool compare = std::count_if(entries.begin(), entries.end(), [&](const LawEntry& e) {
                           return e.set_index == entries.front().set_index;
                       }) > 1;
        if (compare) rep["agreement"] = agreement_json(ws, entries, nullptr);
        res.report = dump(rep);
        if (opts.latex) latex_displays(ws, &entries, res.diagnostics);
        if (produced == 0) res.exit_code = failure_exit(entries);
    });
}

RunResult run_verify(const RunOptions& opts) {
    return guarded(opts, [&](Workspace& ws, RunResult& res) {
        const PDESystem& sys = ws.problem.system;
        std::vector<std::string> requested =
            !opts.methods.empty() ? opts.methods : ws.problem.methods;
        std::vector<LawEntry> entries = build_laws(ws, requested, res.diagnostics);
        ordered_json rep = base_report(ws);
        ordered_json laws = ordered_json::array();
        std::size_t produced = 0;
        bool all_pass = true;
        for (const auto& e : entries) {
            ordered_json j = law_json(ws, e);
            if (e.law) {
                ++produced;
                const ConservationLaw& law = *e.law;
                bool law_ok = true;
                if (law.status == VerifyStatus::characteristic_identity &&
                    !law.multipliers.empty()) {
                    VerificationReport vr = verify_characteristic(sys, law);
                    j["characteristic"] = vr.pass;
                    law_ok = law_ok && vr.pass;
                } else {
                    j["characteristic"] = nullptr;
                }
                VerificationReport vo = verify_on_solutions(sys, law);
                j["on_solutions"] = vo.pass;
                law_ok = law_ok && vo.pass;
                DiffExpr div;
                for (std::size_t k = 0; k < law.fluxes.size(); ++k)
                    div += total_derivative(law.fluxes[k], static_cast<int>(k));
                bool euler_ok = euler_annihilation(div);
                j["euler_annihilation"] = euler_ok;
                law_ok = law_ok && euler_ok;
                j["triviality"] = triviality_name(triviality_heuristic(sys, law));
                if (!law_ok) {
                    all_pass = false;
                    res.diagnostics.push_back(
                        {"error",
                         method_name(e.method) + ", multiplier " + std::to_string(e.set_index),
                         "verification failed"});
                }
            }
            laws.push_back(std::move(j));
        }
        rep["laws"] = std::move(laws);
        if (ws.weights) rep["weights"] = weights_json(ws);
        bool compare = std::count_if(entries.begin(), entries.end(), [&](const LawEntry& e) {
                           return e.set_index == entries.front().set_index;
                       }) > 1;
        if (compare) {
            bool agree = true;
            rep["agreement"] = agreement_json(ws, entries, &agree);
            all_pass = all_pass && agree;
        }
        res.report = dump(rep);
        if (opts.latex) latex_displays(ws, &entries, res.diagnostics);
        if (!all_pass)
            res.exit_code = exit_verification;
        else if (produced == 0)
            res.exit_code = failure_exit(entries);
    });
}

}  // namespace conslaw
