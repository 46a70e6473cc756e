#include "conslaw/verify.hpp"

#include <set>

#include "conslaw/calculus.hpp"
#include "conslaw/errors.hpp"

namespace conslaw {

namespace {

DiffExpr flux_divergence(const PDESystem& sys, const ConservationLaw& cl) {
    if (cl.fluxes.size() != sys.symbols.independents.size())
        throw ValidationError("expected one flux component per independent variable");
    DiffExpr div;
    for (std::size_t i = 0; i < cl.fluxes.size(); ++i)
        div += total_derivative(cl.fluxes[i], static_cast<int>(i));
    return div;
}

}  // namespace

VerificationReport verify_characteristic(const PDESystem& sys, const ConservationLaw& cl) {
    require_solved_form(sys);
    if (cl.multipliers.size() != sys.equations.size())
        throw ValidationError("characteristic check needs one multiplier per equation");
    VerificationReport rep;
    rep.assumptions = cl.assumptions;
    DiffExpr residual = -flux_divergence(sys, cl);
    for (std::size_t s = 0; s < cl.multipliers.size(); ++s)
        residual += cl.multipliers[s] * sys.equations[s].residual();
    rep.residual = clear_ruled_denominators(std::move(residual), &rep.assumptions);
    rep.pass = rep.residual.is_zero();
    return rep;
}

VerificationReport verify_on_solutions(const PDESystem& sys, const ConservationLaw& cl) {
    require_solved_form(sys);
    VerificationReport rep;
    rep.assumptions = cl.assumptions;
    rep.residual = clear_ruled_denominators(reduce_on_solutions(sys, flux_divergence(sys, cl)),
                                            &rep.assumptions);
    rep.pass = rep.residual.is_zero();
    return rep;
}

bool euler_annihilation(const DiffExpr& f) {
    std::set<int> deps;
    for (const Atom& jet : jets_in(f)) deps.insert(jet.index());
    for (int dep : deps)
        if (!is_zero_modulo_rules(euler(f, dep))) return false;
    return true;
}

std::string triviality_name(Triviality t) {
    switch (t) {
        case Triviality::trivial_first_kind:
            return "trivial-first-kind";
        case Triviality::identically_divergence_free:
            return "identically-divergence-free";
        case Triviality::unknown:
            return "unknown";
    }
    throw InternalError("unhandled triviality value");
}

Triviality triviality_heuristic(const PDESystem& sys, const ConservationLaw& cl) {
    require_solved_form(sys);
    if (cl.fluxes.size() != sys.symbols.independents.size())
        throw ValidationError("expected one flux component per independent variable");
    bool first_kind = true;
    for (const DiffExpr& phi : cl.fluxes)
        if (!is_zero_modulo_rules(reduce_on_solutions(sys, phi))) {
            first_kind = false;
            break;
        }
    if (first_kind) return Triviality::trivial_first_kind;
    if (is_zero_modulo_rules(flux_divergence(sys, cl)))
        return Triviality::identically_divergence_free;
    return Triviality::unknown;
}

Triviality equivalence_heuristic(const PDESystem& sys, const ConservationLaw& a,
                                 const ConservationLaw& b) {
    if (a.fluxes.size() != b.fluxes.size())
        throw ValidationError("cannot compare laws with different numbers of flux components");
    ConservationLaw diff;
    for (std::size_t i = 0; i < a.fluxes.size(); ++i)
        diff.fluxes.push_back(a.fluxes[i] - b.fluxes[i]);
    return triviality_heuristic(sys, diff);
}

}  // namespace conslaw
