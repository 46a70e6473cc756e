#include "conslaw/system.hpp"

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <set>
#include <sstream>

#include "conslaw/calculus.hpp"
#include "conslaw/errors.hpp"

namespace conslaw {

int SymbolTable::indep_index(const std::string& name) const {
    auto it = std::find(independents.begin(), independents.end(), name);
    return it == independents.end() ? -1 : static_cast<int>(it - independents.begin());
}

int SymbolTable::dep_index(const std::string& name) const {
    auto it = std::find(dependents.begin(), dependents.end(), name);
    return it == dependents.end() ? -1 : static_cast<int>(it - dependents.begin());
}

std::shared_ptr<const FunctionDef> SymbolTable::function(const std::string& name) const {
    for (const auto& def : functions)
        if (def->name == name) return def;
    return nullptr;
}

DiffExpr Equation::lhs() const { return DiffExpr::atom(Atom::jet(lead_dep, lead_index)); }

DiffExpr Equation::residual() const { return lhs() - rhs; }

std::string jet_label(const SymbolTable& symbols, int dep, const MultiIndex& index) {
    std::ostringstream os;
    os << symbols.dependents.at(dep);
    if (!index.empty()) {
        os << "_{";
        for (auto& [v, c] : index.counts())
            for (int i = 0; i < c; ++i) os << symbols.independents.at(v);
        os << "}";
    }
    return os.str();
}

namespace {

bool is_consequence_jet(const PDESystem& sys, int dep, const MultiIndex& index) {
    for (const Equation& eq : sys.equations)
        if (dep == eq.lead_dep && index.contains(eq.lead_index)) return true;
    return false;
}

void check_declared(const PDESystem& sys, const DiffExpr& e, const std::string& where,
                    ValidationReport& report) {
    for_each_atom(e, [&](const Atom& a) {
        switch (a.kind()) {
            case AtomKind::indep:
                if (a.index() < 0 || a.index() >= static_cast<int>(sys.symbols.independents.size()))
                    report.problems.push_back(where + ": undeclared independent variable index " +
                                              std::to_string(a.index()));
                break;
            case AtomKind::jet:
                if (a.index() < 0 || a.index() >= static_cast<int>(sys.symbols.dependents.size()))
                    report.problems.push_back(where + ": undeclared dependent variable index " +
                                              std::to_string(a.index()));
                break;
            case AtomKind::func:
                if (!sys.symbols.function(a.fn().def->name))
                    report.problems.push_back(where + ": undeclared function " + a.fn().def->name);
                break;
            default:
                break;
        }
    });
}

}  // namespace

ValidationReport validate_solved_form(const PDESystem& sys) {
    ValidationReport report;
    const auto& eqs = sys.equations;
    for (std::size_t s = 0; s < eqs.size(); ++s) {
        for (std::size_t t = s + 1; t < eqs.size(); ++t) {
            if (eqs[s].lead_dep != eqs[t].lead_dep) continue;
            if (eqs[s].lead_index == eqs[t].lead_index) {
                report.problems.push_back(
                    "equations " + std::to_string(s + 1) + " and " + std::to_string(t + 1) +
                    " are solved for the same derivative " +
                    jet_label(sys.symbols, eqs[s].lead_dep, eqs[s].lead_index));
            } else if (eqs[s].lead_index.contains(eqs[t].lead_index) ||
                       eqs[t].lead_index.contains(eqs[s].lead_index)) {
                report.warnings.push_back(
                    "leading derivatives " +
                    jet_label(sys.symbols, eqs[s].lead_dep, eqs[s].lead_index) + " and " +
                    jet_label(sys.symbols, eqs[t].lead_dep, eqs[t].lead_index) +
                    " overlap; reduction modulo the system may depend on equation order");
            }
        }
    }
    for (std::size_t t = 0; t < eqs.size(); ++t) {
        std::string where = "equation " + std::to_string(t + 1);
        check_declared(sys, eqs[t].rhs, where, report);
        for_each_atom(eqs[t].rhs, [&](const Atom& a) {
            if (a.kind() != AtomKind::jet) return;
            if (is_consequence_jet(sys, a.index(), a.jet_index()))
                report.problems.push_back(
                    where + ": right-hand side contains " +
                    jet_label(sys.symbols, a.index(), a.jet_index()) +
                    ", a leading derivative of the system or a differential consequence of one");
        });
    }
    report.ok = report.problems.empty();
    return report;
}

void require_solved_form(const PDESystem& sys) {
    ValidationReport report = validate_solved_form(sys);
    if (report.ok) return;
    std::string msg = "system is not in solved form";
    for (const std::string& p : report.problems) msg += "\n  " + p;
    throw ValidationError(msg);
}

bool is_leading_consequence(const PDESystem& sys, const Atom& a) {
    if (a.kind() == AtomKind::jet) return is_consequence_jet(sys, a.index(), a.jet_index());
    if (a.kind() == AtomKind::func)
        for (const DiffExpr& arg : a.fn().args)
            if (contains_leading_consequence(sys, arg)) return true;
    return false;
}

bool contains_leading_consequence(const PDESystem& sys, const DiffExpr& e) {
    bool found = false;
    for_each_atom(e, [&](const Atom& a) {
        if (a.kind() == AtomKind::jet && is_consequence_jet(sys, a.index(), a.jet_index()))
            found = true;
    });
    return found;
}

ValidationReport check_ck_form(const PDESystem& sys, int var) {
    ValidationReport report;
    const std::string dir = sys.symbols.independents.at(var);
    if (sys.equations.size() != sys.symbols.dependents.size())
        report.problems.push_back("system has " + std::to_string(sys.equations.size()) +
                                  " equations for " + std::to_string(sys.symbols.dependents.size()) +
                                  " dependent variables");
    std::map<int, int> solved_order;
    for (const Equation& eq : sys.equations) {
        const MultiIndex& lead = eq.lead_index;
        if (lead.order() == 0 || lead.count(var) != lead.order()) {
            report.problems.push_back("leading derivative " +
                                      jet_label(sys.symbols, eq.lead_dep, lead) +
                                      " is not a pure " + dir + "-derivative");
            continue;
        }
        if (!solved_order.emplace(eq.lead_dep, lead.order()).second)
            report.problems.push_back("dependent variable " +
                                      sys.symbols.dependents.at(eq.lead_dep) +
                                      " is solved for twice");
    }
    if (report.problems.empty()) {
        for (std::size_t t = 0; t < sys.equations.size(); ++t) {
            for_each_atom(sys.equations[t].rhs, [&](const Atom& a) {
                if (a.kind() != AtomKind::jet) return;
                auto it = solved_order.find(a.index());
                if (it == solved_order.end()) return;
                if (a.jet_index().count(var) >= it->second)
                    report.problems.push_back(
                        "equation " + std::to_string(t + 1) + ": right-hand side contains " +
                        jet_label(sys.symbols, a.index(), a.jet_index()) + " with " + dir +
                        "-order not below the solved order of " +
                        sys.symbols.dependents.at(a.index()));
            });
        }
    }
    report.ok = report.problems.empty();
    return report;
}

DiffExpr reduce_on_solutions(const PDESystem& sys, const DiffExpr& e, int max_sweeps) {
    if (max_sweeps <= 0) {
        if (const char* env = std::getenv("CONSLAW_MAX_SWEEPS")) {
            char* end = nullptr;
            long v = std::strtol(env, &end, 10);
            if (end && *end == '\0' && v > 0) max_sweeps = static_cast<int>(v);
        }
    }
    int bound = max_sweeps > 0 ? max_sweeps : 10 * std::max(1, max_jet_order(e));
    std::map<std::pair<std::size_t, MultiIndex>, DiffExpr> cache;
    std::function<std::optional<DiffExpr>(const Atom&)> image =
        [&](const Atom& a) -> std::optional<DiffExpr> {
        if (a.kind() != AtomKind::jet) return std::nullopt;
        for (std::size_t s = 0; s < sys.equations.size(); ++s) {
            const Equation& eq = sys.equations[s];
            if (a.index() != eq.lead_dep || !a.jet_index().contains(eq.lead_index)) continue;
            MultiIndex diff = a.jet_index().minus(eq.lead_index);
            auto key = std::make_pair(s, diff);
            auto hit = cache.find(key);
            if (hit == cache.end()) hit = cache.emplace(key, total_derivative(eq.rhs, diff)).first;
            return hit->second;
        }
        return std::nullopt;
    };
    DiffExpr cur = e;
    for (int sweep = 0; sweep < bound; ++sweep) {
        if (!contains_leading_consequence(sys, cur)) return cur;
        try {
            cur = map_atoms(cur, image);
        } catch (const ValidationError& err) {
            throw ValidationError(std::string("reducing modulo the system: ") + err.what());
        }
    }
    if (!contains_leading_consequence(sys, cur)) return cur;
    std::set<std::string> names;
    for_each_atom(cur, [&](const Atom& a) {
        if (a.kind() == AtomKind::jet && is_leading_consequence(sys, a))
            names.insert(jet_label(sys.symbols, a.index(), a.jet_index()));
    });
    std::string pending;
    for (const std::string& name : names) {
        if (pending.size() > 120) break;
        if (!pending.empty()) pending += ", ";
        pending += name;
    }
    throw ReductionLimitError("reduction modulo the system did not reach a fixpoint within " +
                              std::to_string(bound) + " sweeps; still reducible: " + pending);
}

std::vector<DiffExpr> enumerate_monomials(const AnsatzSpec& spec) {
    std::vector<DiffExpr> out;
    std::vector<Atom> atoms;
    std::vector<long> caps;
    for (std::size_t i = 0; i < spec.atoms.size(); ++i) {
        const Atom& a = spec.atoms[i];
        bool dup = false;
        for (const Atom& b : atoms)
            if (cmp(a, b) == 0) dup = true;
        if (dup) continue;
        auto it = spec.atom_degree.find(static_cast<int>(i));
        int cap = it != spec.atom_degree.end() ? it->second : spec.degree_each;
        if (cap < 0 && spec.degree_total < 0)
            throw ValidationError("ansatz degree caps leave the monomial basis unbounded");
        atoms.push_back(a);
        caps.push_back(cap < 0 ? spec.degree_total : cap);
    }
    std::vector<int> degs(atoms.size(), 0);
    // Distinct exponent tuples can canonicalize to the same monomial once
    // algebraic rules rewrite powers, so emitted monomials are deduped; the
    // keyed set keeps that check logarithmic.
    auto expr_less = [](const DiffExpr& a, const DiffExpr& b) { return cmp(a, b) < 0; };
    std::set<DiffExpr, decltype(expr_less)> seen(expr_less);
    std::function<void(std::size_t, long)> emit = [&](std::size_t pos, long budget) {
        if (pos == atoms.size()) {
            DiffExpr m = DiffExpr::constant(1);
            for (std::size_t i = 0; i < atoms.size(); ++i)
                if (degs[i] > 0) m = m * DiffExpr::atom(atoms[i], degs[i]);
            if (seen.insert(m).second) out.push_back(std::move(m));
            return;
        }
        long cap = caps[pos];
        if (budget >= 0 && cap > budget) cap = budget;
        for (int d = 0; d <= cap; ++d) {
            degs[pos] = d;
            emit(pos + 1, budget < 0 ? budget : budget - d);
        }
        degs[pos] = 0;
    };
    emit(0, spec.degree_total);
    return out;
}

Ansatz generate_ansatz(const PDESystem& sys, const AnsatzSpec& spec) {
    Ansatz out;
    AnsatzSpec kept = spec;
    kept.atoms.clear();
    kept.atom_degree.clear();
    for (std::size_t i = 0; i < spec.atoms.size(); ++i) {
        const Atom& a = spec.atoms[i];
        if (is_leading_consequence(sys, a)) {
            std::string label = a.kind() == AtomKind::jet
                                    ? jet_label(sys.symbols, a.index(), a.jet_index())
                                    : a.fn().def->name + "(...)";
            out.warnings.push_back(label +
                                   " is a leading derivative of the system (or involves a "
                                   "consequence of one); dropped from the ansatz");
            continue;
        }
        auto it = spec.atom_degree.find(static_cast<int>(i));
        if (it != spec.atom_degree.end())
            kept.atom_degree.emplace(static_cast<int>(kept.atoms.size()), it->second);
        kept.atoms.push_back(a);
    }
    out.monomials = enumerate_monomials(kept);
    if (out.monomials.empty()) throw EmptyResultError("ansatz contains no monomials");
    return out;
}

}  // namespace conslaw
