#include <algorithm>

#include "conslaw/calculus.hpp"
#include "conslaw/errors.hpp"
#include "conslaw/flux.hpp"
#include "conslaw/multipliers.hpp"

namespace conslaw {

std::string method_name(Method m) {
    switch (m) {
        case Method::direct: return "direct";
        case Method::homotopy1: return "homotopy1";
        case Method::homotopy2: return "homotopy2";
        case Method::scaling: return "scaling";
        case Method::pair: return "pair";
    }
    return "?";
}

namespace {

std::vector<MultiIndex> all_indices_to_order(int n, int r) {
    std::vector<MultiIndex> out;
    std::function<void(int, int, MultiIndex)> rec = [&](int v, int rem, MultiIndex cur) {
        if (v == n) {
            out.push_back(cur);
            return;
        }
        for (int c = 0; c <= rem; ++c) rec(v + 1, rem - c, c ? cur.plus(v, c) : cur);
    };
    rec(0, r, MultiIndex{});
    return out;
}

long expr_degree(const DiffExpr& e) {
    long d = 0;
    for (const Term& t : e.terms()) {
        long td = 0;
        for (auto& [a, k] : t.factors) td += std::max(k, 0);
        d = std::max(d, td);
    }
    return d;
}

/// A monomial is "good" for flux component i when it depends on more than
/// the independent variables and every jet in it is differentiated in
/// direction i only. All identically-divergence-free tuples have a bad
/// ("junk") monomial somewhere, so good-only solutions carry no gauge
/// freedom.
bool good_for_component(const DiffExpr& monomial, int i) {
    bool has_non_indep = false, bad_jet = false;
    for_each_atom(monomial, [&](const Atom& a) {
        if (a.kind() != AtomKind::indep) has_non_indep = true;
        if (a.kind() == AtomKind::jet) {
            const MultiIndex& K = a.jet_index();
            if (K.count(i) != K.order()) bad_jet = true;
        }
    });
    return has_non_indep && !bad_jet;
}

struct DirectAttempt {
    bool consistent = false;
    std::vector<DiffExpr> fluxes;
    std::vector<std::string> conflicts;
    std::vector<std::string> assumptions;
};

/// Gauge-carrying (junk) monomials get the globally last parameter ids, so
/// natural column order pivots on good monomials first and the
/// free-unknowns-zero particular solution suppresses the gauge freedom.
DirectAttempt attempt(const PDESystem& sys, const DiffExpr& chr,
                      const std::vector<std::vector<DiffExpr>>& good,
                      const std::vector<std::vector<DiffExpr>>& junk) {
    const int n = static_cast<int>(sys.symbols.independents.size());
    DirectAttempt res;
    std::vector<std::vector<std::pair<int, const DiffExpr*>>> parts(n);
    int next = 0;
    for (int i = 0; i < n; ++i)
        for (const DiffExpr& m : good[i]) parts[i].push_back({next++, &m});
    for (int i = 0; i < n; ++i)
        for (const DiffExpr& m : junk[i]) parts[i].push_back({next++, &m});
    DiffExpr divergence = -chr;
    for (int i = 0; i < n; ++i) {
        std::vector<Term> phi_terms;
        for (auto& [id, m] : parts[i]) {
            DiffExpr piece = DiffExpr::atom(Atom::param(id)) * *m;
            phi_terms.insert(phi_terms.end(), piece.terms().begin(), piece.terms().end());
        }
        divergence += total_derivative(DiffExpr::sum(std::move(phi_terms)), i);
    }
    LinearSystem ls = split_linear_system({divergence}, next, &res.assumptions);
    LinearSolution sol = solve_linear(ls);
    if (!sol.consistent) {
        res.conflicts = sol.conflicts;
        return res;
    }
    res.consistent = true;
    for (int i = 0; i < n; ++i) {
        DiffExpr phi;
        for (auto& [id, m] : parts[i]) {
            const Rational& c = sol.particular[id];
            if (!is_zero(c)) phi += m->scaled(c);
        }
        res.fluxes.push_back(std::move(phi));
    }
    return res;
}

}  // namespace

ConservationLaw flux_direct(const PDESystem& sys, const std::vector<DiffExpr>& multipliers,
                            const FluxAnsatzOptions& opts) {
    require_solved_form(sys);
    const int n = static_cast<int>(sys.symbols.independents.size());
    if (multipliers.size() != sys.equations.size())
        throw ValidationError("expected one multiplier per equation");
    DiffExpr chr;
    for (std::size_t s = 0; s < sys.equations.size(); ++s)
        chr += multipliers[s] * sys.equations[s].residual();

    AnsatzSpec spec;
    if (opts.spec) {
        spec = *opts.spec;
        if (opts.extra_degree > 0 && spec.degree_total >= 0) spec.degree_total += opts.extra_degree;
    } else {
        int l = 0;
        for (const DiffExpr& lam : multipliers) l = std::max(l, max_jet_order(lam));
        int k = 0;
        for (const Equation& eq : sys.equations)
            k = std::max({k, eq.lead_index.order(), max_jet_order(eq.rhs)});
        int r = std::max(l, k);
        bool linear_top = true;
        for (const Term& t : chr.terms()) {
            int cnt = 0;
            for (auto& [a, kk] : t.factors)
                if (a.kind() == AtomKind::jet && a.jet_index().order() == r) cnt += kk;
            if (cnt > 1) linear_top = false;
        }
        if (linear_top && r > 0) r -= 1;
        r = std::max(0, r + opts.extra_order);
        for (int i = 0; i < n; ++i) spec.atoms.push_back(Atom::indep(i));
        for (std::size_t dep = 0; dep < sys.symbols.dependents.size(); ++dep)
            for (const MultiIndex& K : all_indices_to_order(n, r))
                spec.atoms.push_back(Atom::jet(static_cast<int>(dep), K));
        auto add_atom = [&](const Atom& a) {
            for (const Atom& b : spec.atoms)
                if (cmp(a, b) == 0) return;
            spec.atoms.push_back(a);
        };
        for_each_atom(chr, [&](const Atom& a) {
            if (a.kind() == AtomKind::func) add_atom(a);
        });
        // Antiderivative closure: a declared defined function (one whose
        // derivative is another expression in the problem, like A with
        // A' = c^2) can be required by the fluxes even though it never
        // appears in the characteristic expression itself. Offer each such
        // function, applied to every argument tuple some function atom of
        // matching arity already uses, as an extra candidate atom.
        std::vector<Atom> seen = spec.atoms;
        for (const auto& fd : sys.symbols.functions) {
            if (!fd || fd->kind != FuncKind::defined) continue;
            for (const Atom& a : seen) {
                if (a.kind() != AtomKind::func) continue;
                const FuncData& data = a.fn();
                if (static_cast<int>(data.args.size()) != fd->arity) continue;
                DiffExpr cand = make_func(fd, data.args);
                if (cand.terms().size() == 1 && cand.terms()[0].factors.size() == 1 &&
                    cand.terms()[0].factors[0].second == 1)
                    add_atom(cand.terms()[0].factors[0].first);
            }
        }
        spec.degree_each = -1;
        spec.degree_total = static_cast<int>(expr_degree(chr)) + 1 + opts.extra_degree;
    }

    std::vector<DiffExpr> pool = enumerate_monomials(spec);
    if (static_cast<long>(pool.size()) * n > opts.max_unknowns)
        throw NoSolutionError(
            "the direct flux ansatz needs " + std::to_string(pool.size() * n) +
            " unknown coefficients (limit " + std::to_string(opts.max_unknowns) +
            "); restrict the ansatz or choose another reconstruction method");
    std::vector<std::vector<DiffExpr>> good(n), junk(n);
    for (int i = 0; i < n; ++i)
        for (const DiffExpr& m : pool)
            (good_for_component(m, i) ? good[i] : junk[i]).push_back(m);

    ConservationLaw law;
    law.method = Method::direct;
    law.multipliers = multipliers;
    DirectAttempt first = attempt(sys, chr, good, std::vector<std::vector<DiffExpr>>(n));
    if (first.consistent) {
        law.fluxes = std::move(first.fluxes);
        law.assumptions = std::move(first.assumptions);
    } else {
        DirectAttempt second = attempt(sys, chr, good, junk);
        if (!second.consistent) {
            std::string msg =
                "no flux tuple in the ansatz matches the characteristic expression; "
                "enlarge the flux ansatz (jet order / total degree)";
            for (std::size_t c = 0; c < second.conflicts.size() && c < 5; ++c)
                msg += "\n  unmatched: " + second.conflicts[c];
            throw NoSolutionError(msg);
        }
        law.fluxes = std::move(second.fluxes);
        law.assumptions = std::move(second.assumptions);
    }

    DiffExpr check = -chr;
    for (int i = 0; i < n; ++i) check += total_derivative(law.fluxes[i], i);
    if (!is_zero_modulo_rules(check, &law.assumptions))
        throw InternalError("direct-method fluxes fail the characteristic identity");
    law.status = VerifyStatus::characteristic_identity;
    return law;
}

}  // namespace conslaw
