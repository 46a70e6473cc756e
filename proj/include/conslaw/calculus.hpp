#pragma once

#include <map>
#include <optional>

#include "conslaw/expr.hpp"

namespace conslaw {

/// Rebuilds e, replacing every atom for which `image` returns a value by that
/// value raised to the atom's exponent. Unmapped function atoms are rebuilt
/// with mapped arguments, so replacements reach inside argument lists.
DiffExpr map_atoms(const DiffExpr& e,
                   const std::function<std::optional<DiffExpr>(const Atom&)>& image);

/// Partial derivative with respect to one atom coordinate, treating all other
/// atoms as independent; applies the chain rule through function arguments.
DiffExpr partial_atom(const DiffExpr& e, const Atom& x);

inline DiffExpr partial_jet(const DiffExpr& e, int dep, const MultiIndex& index) {
    return partial_atom(e, Atom::jet(dep, index));
}

/// Total derivative D_i: explicit x^i dependence plus promotion of every jet
/// coordinate one derivative up.
DiffExpr total_derivative(const DiffExpr& e, int var);
DiffExpr total_derivative(const DiffExpr& e, const MultiIndex& index);

/// Replaces each dependent variable in the map by its expression; jets become
/// total derivatives of the replacement. Other dependents stay untouched.
DiffExpr substitute_dependents(const DiffExpr& e, const std::map<int, DiffExpr>& repl);

/// Variational derivative with respect to dependent `dep`. Annihilates total
/// divergences and nothing else, which makes it the workhorse both of the
/// determining equations and of the divergence test.
DiffExpr euler(const DiffExpr& e, int dep);

/// Higher Euler operator with offset multi-index s:
///   sum over jets K >= s of [prod_i C(K_i, s_i)] (-D)^(K-s) d/dU_K.
/// The offset zero case is the ordinary Euler operator.
DiffExpr higher_euler(const DiffExpr& e, int dep, const MultiIndex& s);

/// Applies the prolonged evolutionary vector field with characteristic
/// eta[mu] per dependent: sum of D_J(eta[mu]) * d(e)/dU^mu_J.
DiffExpr apply_prolonged_symmetry(const DiffExpr& e, const std::vector<DiffExpr>& eta);

/// Exact degree d such that the term scales as lambda^d when every dependent
/// is replaced by lambda times itself. Function atoms scale only through a
/// root-style algebraic rule or by having dependent-free arguments; anything
/// else throws ArbitraryFunctionError.
Rational term_scaling_degree(const Term& t);

/// Decides e == 0 modulo the declared algebraic rules: multiplies through by
/// rule-bearing atoms until no negative powers of them remain (recording the
/// nonvanishing assumptions used), then tests structural zero.
bool is_zero_modulo_rules(DiffExpr e, std::vector<std::string>* assumptions = nullptr);

/// Multiplies e by positive powers of any rule-carrying function atoms that
/// occur to negative powers, until none remain; each cleared atom is
/// recorded as a nonvanishing assumption. Distinct canonical monomials of
/// the result are linearly independent, which makes both zero tests and
/// coefficient splitting sound in the presence of algebraic rules.
DiffExpr clear_ruled_denominators(DiffExpr e, std::vector<std::string>* assumptions = nullptr);

}  // namespace conslaw
