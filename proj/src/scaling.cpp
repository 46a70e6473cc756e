#include <string>
#include <vector>

#include "conslaw/calculus.hpp"
#include "conslaw/errors.hpp"
#include "conslaw/flux.hpp"

namespace conslaw {

namespace {

/// Scaling weight of one atom; throws NonHomogeneousError when no weight can
/// be assigned (an argument-carrying function with no rewrite rule whose
/// arguments do not all have weight zero).
Rational atom_weight(const PDESystem& sys, const ScalingSymmetry& sym, const Atom& a) {
    switch (a.kind()) {
        case AtomKind::indep:
            return sym.p.at(a.index());
        case AtomKind::jet: {
            Rational w = sym.q.at(a.index());
            for (auto& [v, c] : a.jet_index().counts()) w -= sym.p.at(v) * Rational(c);
            return w;
        }
        case AtomKind::param:
        case AtomKind::slot:
            return Rational(0);
        case AtomKind::func: {
            const FunctionDef& def = *a.fn().def;
            if (def.has_algebraic_rule()) {
                DiffExpr repl = substitute_slots(def.rule_replacement.front(), a.fn().args);
                auto w = homogeneous_weight(sys, sym, repl);
                if (!w)
                    throw NonHomogeneousError("the rewrite rule of " + def.name +
                                              " collapses to zero; no scaling weight exists");
                return *w / Rational(def.rule_power);
            }
            for (const DiffExpr& arg : a.fn().args) {
                auto w = homogeneous_weight(sys, sym, arg);
                if (w && !is_zero(*w))
                    throw NonHomogeneousError(
                        "the function " + def.name +
                        " cannot be assigned a scaling weight: its argument has nonzero "
                        "weight " +
                        rat_str(*w));
            }
            return Rational(0);
        }
    }
    throw InternalError("unhandled atom kind in weight computation");
}

}  // namespace

std::optional<Rational> homogeneous_weight(const PDESystem& sys, const ScalingSymmetry& sym,
                                           const DiffExpr& e) {
    if (sym.p.size() != sys.symbols.independents.size() ||
        sym.q.size() != sys.symbols.dependents.size())
        throw ValidationError("scaling symmetry needs one weight per variable");
    std::optional<Rational> weight;
    for (const Term& t : e.terms()) {
        Rational w(0);
        for (auto& [a, k] : t.factors) w += atom_weight(sys, sym, a) * Rational(k);
        if (!weight)
            weight = w;
        else if (*weight != w)
            throw NonHomogeneousError("expression is not scaling-homogeneous: terms of weight " +
                                      rat_str(*weight) + " and " + rat_str(w) + " are mixed");
    }
    return weight;
}

std::vector<DiffExpr> evolutionary_characteristic(const PDESystem& sys,
                                                  const ScalingSymmetry& sym) {
    if (sym.p.size() != sys.symbols.independents.size() ||
        sym.q.size() != sys.symbols.dependents.size())
        throw ValidationError("scaling symmetry needs one weight per variable");
    std::vector<DiffExpr> eta;
    for (std::size_t rho = 0; rho < sys.symbols.dependents.size(); ++rho) {
        DiffExpr u = DiffExpr::atom(Atom::jet(static_cast<int>(rho), MultiIndex{}));
        DiffExpr e = u.scaled(sym.q[rho]);
        for (std::size_t i = 0; i < sym.p.size(); ++i) {
            if (is_zero(sym.p[i])) continue;
            DiffExpr xi = DiffExpr::atom(Atom::indep(static_cast<int>(i)));
            DiffExpr ui = DiffExpr::atom(
                Atom::jet(static_cast<int>(rho), MultiIndex::unit(static_cast<int>(i))));
            e -= (xi * ui).scaled(sym.p[i]);
        }
        eta.push_back(std::move(e));
    }
    return eta;
}

WeightReport scaling_weights(const PDESystem& sys, const std::vector<DiffExpr>& multipliers,
                             const ScalingSymmetry& sym) {
    require_solved_form(sys);
    if (multipliers.size() != sys.equations.size())
        throw ValidationError("expected one multiplier per equation");
    WeightReport rep;
    rep.p_sum = 0;
    for (const Rational& p : sym.p) rep.p_sum += p;
    for (std::size_t s = 0; s < sys.equations.size(); ++s) {
        auto r = homogeneous_weight(sys, sym, sys.equations[s].residual());
        if (!r)
            throw NonHomogeneousError("equation residual collapses to zero; no weight exists");
        auto w = homogeneous_weight(sys, sym, multipliers[s]);
        rep.r.push_back(*r);
        rep.s.push_back(w.value_or(Rational(0)));
        rep.chi.push_back(rep.s.back() + rep.r.back() + rep.p_sum);
        rep.critical.push_back(!multipliers[s].is_zero() && is_zero(rep.chi.back()));
    }
    return rep;
}

namespace {

/// Shared flux assembly and on-solutions verification for the two
/// integration-free formulas built on the bilinear boundary operator.
ConservationLaw pair_fluxes(const PDESystem& sys, const std::vector<DiffExpr>& characteristic,
                            const std::vector<DiffExpr>& cofactors, Method method,
                            const std::string& failure) {
    std::vector<DiffExpr> neg, residuals;
    for (const DiffExpr& c : characteristic) neg.push_back(-c);
    for (const Equation& eq : sys.equations) residuals.push_back(eq.residual());
    ConservationLaw law;
    law.method = method;
    const int n = static_cast<int>(sys.symbols.independents.size());
    for (int i = 0; i < n; ++i) law.fluxes.push_back(bilinear_s(neg, cofactors, residuals, i));
    DiffExpr div;
    for (int i = 0; i < n; ++i) div += total_derivative(law.fluxes[i], i);
    if (!is_zero_modulo_rules(reduce_on_solutions(sys, div), &law.assumptions))
        throw VerificationError(failure);
    law.status = VerifyStatus::on_solutions;
    return law;
}

}  // namespace

ConservationLaw flux_scaling(const PDESystem& sys, const std::vector<DiffExpr>& multipliers,
                             const ScalingSymmetry& sym) {
    WeightReport rep = scaling_weights(sys, multipliers, sym);
    ConservationLaw law = pair_fluxes(
        sys, evolutionary_characteristic(sys, sym), multipliers, Method::scaling,
        "the scaling-symmetry fluxes fail the divergence identity on solutions; the "
        "multiplier tuple is not valid for this system");
    law.multipliers = multipliers;
    for (bool c : rep.critical) law.critical = law.critical || c;
    return law;
}

ConservationLaw flux_symmetry_pair(const PDESystem& sys, const std::vector<DiffExpr>& symmetry,
                                   const std::vector<DiffExpr>& adjoint) {
    require_solved_form(sys);
    if (symmetry.size() != sys.symbols.dependents.size())
        throw ValidationError("expected one symmetry characteristic per dependent variable");
    if (adjoint.size() != sys.equations.size())
        throw ValidationError("expected one adjoint-symmetry component per equation");
    return pair_fluxes(sys, symmetry, adjoint, Method::pair,
                       "the symmetry and adjoint-symmetry tuples do not form a valid pair "
                       "for this system: the assembled divergence does not vanish on "
                       "solutions");
}

}  // namespace conslaw
