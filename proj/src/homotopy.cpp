#include <set>
#include <string>
#include <vector>

#include "conslaw/calculus.hpp"
#include "conslaw/errors.hpp"
#include "conslaw/flux.hpp"
#include "conslaw/multipliers.hpp"

namespace conslaw {

namespace {

void absorb(std::vector<Term>& out, const DiffExpr& e) {
    out.insert(out.end(), e.terms().begin(), e.terms().end());
}

bool term_has_jet(const Term& t) {
    bool found = false;
    for_each_atom(DiffExpr::sum({t}), [&](const Atom& a) {
        if (a.kind() == AtomKind::jet) found = true;
    });
    return found;
}

bool contains_param(const DiffExpr& e, int id) {
    bool found = false;
    for_each_atom(e, [&](const Atom& a) {
        if (a.kind() == AtomKind::param && a.index() == id) found = true;
    });
    return found;
}

/// Integrates a polynomial in the deformation parameter over [0,1]: a term
/// carrying the parameter to the power e contributes itself with the
/// parameter factor replaced by 1/(e+1).
DiffExpr integrate_deformation(const DiffExpr& integrand) {
    std::vector<Term> out;
    for (const Term& t : integrand.terms()) {
        Term r;
        r.coeff = t.coeff;
        int e = 0;
        for (auto& [a, k] : t.factors) {
            if (a.kind() == AtomKind::param && a.index() == kLambdaParam) {
                e = k;
                continue;
            }
            if (a.kind() == AtomKind::func) {
                for (const DiffExpr& arg : a.fn().args)
                    if (contains_param(arg, kLambdaParam))
                        throw DivergentIntegralError(
                            "the flux integrand is not polynomial in the deformation parameter "
                            "(the function " +
                            a.fn().def->name +
                            " depends on it); use the direct method instead");
            }
            r.factors.emplace_back(a, k);
        }
        if (e < 0)
            throw DivergentIntegralError(
                "the flux integrand has a pole at the base point (negative power of the "
                "deformation parameter); choose a nonzero base point, for example the first "
                "independent variable");
        r.coeff /= Rational(e + 1);
        out.push_back(std::move(r));
    }
    return DiffExpr::sum(std::move(out));
}

}  // namespace

DiffExpr homotopy1_integrand(const DiffExpr& f, int var) {
    // Dependents present and, per dependent, the offset candidates s with
    // s + e_var below some jet of f.
    std::set<int> deps;
    std::set<std::pair<int, MultiIndex>> offsets;
    for (const Atom& jet : jets_in(f)) {
        deps.insert(jet.index());
        const MultiIndex& K = jet.jet_index();
        if (K.count(var) == 0) continue;
        for (const MultiIndex& s : multi_index_box(K.minus(MultiIndex::unit(var))))
            offsets.insert({jet.index(), s});
    }
    std::vector<Term> collected;
    for (int j : deps) {
        DiffExpr uj = DiffExpr::atom(Atom::jet(j, MultiIndex{}));
        for (auto& [dep, s] : offsets) {
            if (dep != j) continue;
            DiffExpr eu = higher_euler(f, j, s.plus(var));
            if (eu.is_zero()) continue;
            Rational weight = rat(1 + s.count(var), 1 + s.order());
            absorb(collected, total_derivative(uj * eu, s).scaled(weight));
        }
    }
    return DiffExpr::sum(std::move(collected));
}

std::vector<DiffExpr> homotopy1_fluxes(const PDESystem& sys, const DiffExpr& f) {
    std::string bad = first_arbitrary_function(f);
    if (!bad.empty())
        throw ArbitraryFunctionError("the expression to invert contains the arbitrary function " +
                                     bad + "; use the direct method instead");
    for (const Term& t : f.terms())
        if (!term_has_jet(t))
            throw NonvanishingAtZeroError(
                "the expression to invert has a term free of the dependent variables, so it "
                "does not vanish at the zero base point; use a method with a movable base "
                "point");
    const int n = static_cast<int>(sys.symbols.independents.size());
    std::vector<DiffExpr> fluxes;
    for (int i = 0; i < n; ++i) {
        DiffExpr integrand = homotopy1_integrand(f, i);
        std::vector<Term> out;
        for (const Term& t : integrand.terms()) {
            Rational d = term_scaling_degree(t);
            if (sgn(d) <= 0)
                throw DivergentIntegralError(
                    "the flux integral diverges: an integrand term has dependent-variable "
                    "scaling degree " +
                    rat_str(d) + "; use a method with a movable base point");
            Term r = t;
            r.coeff /= d;
            out.push_back(std::move(r));
        }
        fluxes.push_back(DiffExpr::sum(std::move(out)));
    }
    return fluxes;
}

ConservationLaw flux_homotopy1(const PDESystem& sys, const std::vector<DiffExpr>& multipliers) {
    require_solved_form(sys);
    if (multipliers.size() != sys.equations.size())
        throw ValidationError("expected one multiplier per equation");
    DiffExpr f;
    for (std::size_t s = 0; s < multipliers.size(); ++s)
        f += multipliers[s] * sys.equations[s].residual();
    ConservationLaw law;
    law.method = Method::homotopy1;
    law.multipliers = multipliers;
    law.fluxes = homotopy1_fluxes(sys, f);
    DiffExpr check = -f;
    for (std::size_t i = 0; i < law.fluxes.size(); ++i)
        check += total_derivative(law.fluxes[i], static_cast<int>(i));
    if (!is_zero_modulo_rules(check, &law.assumptions))
        throw VerificationError(
            "the reconstructed fluxes fail the exact divergence identity; the multiplier "
            "tuple does not satisfy the determining equations");
    law.status = VerifyStatus::characteristic_identity;
    return law;
}

DiffExpr bilinear_s(const std::vector<DiffExpr>& v, const std::vector<DiffExpr>& w,
                    const std::vector<DiffExpr>& f, int var,
                    const std::function<DiffExpr(const DiffExpr&)>& transform_partial) {
    if (v.empty() || w.size() != f.size())
        throw ValidationError("bilinear boundary operator needs matching tuple sizes");
    std::vector<Term> collected;
    for (std::size_t sigma = 0; sigma < f.size(); ++sigma) {
        for (const Atom& jet : jets_in(f[sigma])) {
            const MultiIndex& J = jet.jet_index();
            const int c = J.count(var);
            if (J.order() < 1 || c == 0) continue;
            const int rho = jet.index();
            if (rho < 0 || rho >= static_cast<int>(v.size()))
                throw ValidationError("bilinear boundary operator: dependent index out of range");
            DiffExpr partial = partial_jet(f[sigma], rho, J);
            if (transform_partial) partial = transform_partial(partial);
            if (partial.is_zero()) continue;
            DiffExpr wp = w[sigma] * partial;
            MultiIndex lower_base, upper_base;
            for (auto& [vv, k] : J.counts()) {
                if (vv < var) lower_base = lower_base.plus(vv, k);
                if (vv > var) upper_base = upper_base.plus(vv, k);
            }
            for (int a = 0; a + 1 <= c; ++a) {
                MultiIndex lower = a > 0 ? lower_base.plus(var, a) : lower_base;
                int b = c - 1 - a;
                MultiIndex upper = b > 0 ? upper_base.plus(var, b) : upper_base;
                int sign = lower.order() % 2 == 0 ? 1 : -1;
                absorb(collected, (total_derivative(v[rho], upper) * total_derivative(wp, lower))
                                      .scaled(Rational(sign)));
            }
        }
    }
    return DiffExpr::sum(std::move(collected));
}

std::vector<DiffExpr> base_point_fluxes(const PDESystem& sys,
                                        const std::vector<DiffExpr>& multipliers,
                                        const std::vector<DiffExpr>& base) {
    require_solved_form(sys);
    if (multipliers.size() != sys.equations.size())
        throw ValidationError("expected one multiplier per equation");
    if (base.size() != sys.symbols.dependents.size())
        throw ValidationError("expected one base-point expression per dependent variable");
    std::map<int, DiffExpr> repl;
    for (std::size_t j = 0; j < base.size(); ++j) repl[static_cast<int>(j)] = base[j];
    DiffExpr chr;
    for (std::size_t s = 0; s < multipliers.size(); ++s)
        chr += multipliers[s] * sys.equations[s].residual();
    DiffExpr at_base = substitute_dependents(chr, repl);
    for (const Term& t : at_base.terms())
        for (auto& [a, k] : t.factors)
            if (a.kind() != AtomKind::indep || k < 0)
                throw ValidationError(
                    "the multiplier-residual product at the base point is not polynomial in "
                    "the independent variables; choose a simpler base point");
    // Termwise antiderivative with respect to the first variable carries the
    // whole base-point contribution; the remaining components vanish.
    std::vector<Term> anti;
    for (const Term& t : at_base.terms()) {
        Term r;
        r.coeff = t.coeff;
        bool seen = false;
        for (auto& [a, k] : t.factors) {
            if (a.kind() == AtomKind::indep && a.index() == 0) {
                r.coeff /= Rational(k + 1);
                r.factors.emplace_back(a, k + 1);
                seen = true;
            } else {
                r.factors.emplace_back(a, k);
            }
        }
        if (!seen) r.factors.emplace_back(Atom::indep(0), 1);
        anti.push_back(std::move(r));
    }
    std::vector<DiffExpr> fluxes(sys.symbols.independents.size());
    fluxes[0] = DiffExpr::sum(std::move(anti));
    return fluxes;
}

ConservationLaw flux_homotopy2(const PDESystem& sys, const std::vector<DiffExpr>& multipliers,
                               const std::vector<DiffExpr>& base) {
    require_solved_form(sys);
    if (multipliers.size() != sys.equations.size())
        throw ValidationError("expected one multiplier per equation");
    const int n = static_cast<int>(sys.symbols.independents.size());
    const std::size_t m = sys.symbols.dependents.size();
    std::vector<DiffExpr> base_exprs = base;
    if (base_exprs.empty()) base_exprs.resize(m);
    if (base_exprs.size() != m)
        throw ValidationError("expected one base-point expression per dependent variable");
    for (const DiffExpr& b : base_exprs)
        if (!jets_in(b).empty())
            throw ValidationError(
                "base-point expressions may depend on the independent variables only");

    // Deformation path: every dependent U^j is replaced by
    // lambda U^j + (1-lambda) base^j, with lambda a reserved parameter.
    DiffExpr lam = DiffExpr::atom(Atom::param(kLambdaParam));
    std::map<int, DiffExpr> path;
    std::vector<DiffExpr> displacement;
    for (std::size_t j = 0; j < m; ++j) {
        DiffExpr uj = DiffExpr::atom(Atom::jet(static_cast<int>(j), MultiIndex{}));
        path[static_cast<int>(j)] = lam * uj + (DiffExpr::constant(1) - lam) * base_exprs[j];
        displacement.push_back(uj - base_exprs[j]);
    }
    auto on_path = [&](const DiffExpr& e) { return substitute_dependents(e, path); };

    std::vector<DiffExpr> residuals, multipliers_on_path, residuals_on_path;
    for (const Equation& eq : sys.equations) residuals.push_back(eq.residual());
    for (const DiffExpr& lambda_sigma : multipliers)
        multipliers_on_path.push_back(on_path(lambda_sigma));
    for (const DiffExpr& r : residuals) residuals_on_path.push_back(on_path(r));

    // The integrand is assembled and integrated before the base-point term is
    // evaluated: a pole in the deformation parameter is the actionable
    // failure and must win over a singular base-point evaluation.
    std::vector<DiffExpr> integrated(n);
    for (int i = 0; i < n; ++i) {
        DiffExpr integrand = bilinear_s(displacement, multipliers_on_path, residuals, i, on_path) +
                             bilinear_s(displacement, residuals_on_path, multipliers, i, on_path);
        integrated[i] = integrate_deformation(integrand);
    }
    std::vector<DiffExpr> at_base = base_point_fluxes(sys, multipliers, base_exprs);

    ConservationLaw law;
    law.method = Method::homotopy2;
    law.multipliers = multipliers;
    for (int i = 0; i < n; ++i) law.fluxes.push_back(at_base[i] + integrated[i]);
    DiffExpr check;
    for (std::size_t s = 0; s < multipliers.size(); ++s)
        check -= multipliers[s] * residuals[s];
    for (int i = 0; i < n; ++i) check += total_derivative(law.fluxes[i], i);
    if (!is_zero_modulo_rules(check, &law.assumptions))
        throw VerificationError(
            "the reconstructed fluxes fail the exact divergence identity; the multiplier "
            "tuple does not satisfy the determining equations");
    law.status = VerifyStatus::characteristic_identity;
    return law;
}

}  // namespace conslaw
