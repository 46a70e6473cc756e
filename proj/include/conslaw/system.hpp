#pragma once
/// PDE systems in solved form: declaration, validation, leading-derivative
/// bookkeeping, reduction modulo the system, and ansatz generation.

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "conslaw/expr.hpp"

namespace conslaw {

/// Declared names for a problem: independent variables (indexed 0..n-1),
/// dependent variables (indexed 0..m-1), and function atoms.
struct SymbolTable {
    std::vector<std::string> independents;
    std::vector<std::string> dependents;
    std::vector<std::shared_ptr<const FunctionDef>> functions;

    int indep_index(const std::string& name) const;  ///< -1 if undeclared
    int dep_index(const std::string& name) const;    ///< -1 if undeclared
    std::shared_ptr<const FunctionDef> function(const std::string& name) const;
};

/// One equation U^{dep}_{index} = rhs, solved for its leading derivative.
struct Equation {
    int lead_dep = 0;
    MultiIndex lead_index;
    DiffExpr rhs;
    std::optional<Rational> weight;  ///< cached scaling weight of the residual

    DiffExpr lhs() const;       ///< the leading jet as an expression
    DiffExpr residual() const;  ///< lhs - rhs
};

struct PDESystem {
    SymbolTable symbols;
    std::vector<Equation> equations;
};

struct ValidationReport {
    bool ok = true;
    std::vector<std::string> problems;
    std::vector<std::string> warnings;
};

/// "u_{tx}" style label for error messages and reports.
std::string jet_label(const SymbolTable& symbols, int dep, const MultiIndex& index);

/// Checks the solved-form exclusion property: leading jets pairwise
/// distinct, no rhs containing any equation's leading jet or a differential
/// consequence of one (a jet of the same dependent whose multi-index
/// contains the leading multi-index), and every symbol declared. A leading
/// jet that is itself a consequence of another equation's leading jet is
/// reported as a warning (reduction order becomes ambiguous).
ValidationReport validate_solved_form(const PDESystem& sys);

/// validate_solved_form, throwing ValidationError on any hard violation.
void require_solved_form(const PDESystem& sys);

/// True iff `a` is a jet that some equation's leading jet divides
/// (same dependent, componentwise <= multi-index), or a function atom
/// with such a jet in an argument.
bool is_leading_consequence(const PDESystem& sys, const Atom& a);
bool contains_leading_consequence(const PDESystem& sys, const DiffExpr& e);

/// Cauchy-Kovalevskaya form with respect to independent variable `var`:
/// as many equations as dependents, each dependent solved for a pure
/// x^var-derivative, and every jet in every rhs carrying strictly fewer
/// x^var-derivatives than the solved order of that jet's dependent.
ValidationReport check_ck_form(const PDESystem& sys, int var);

/// Rewrites every leading-consequence jet by the matching total derivative
/// of its equation's rhs, iterated to a fixpoint; the result is 0 iff e
/// vanishes on all solutions of the system. `max_sweeps` <= 0 selects the
/// CONSLAW_MAX_SWEEPS environment override when set, otherwise the default
/// bound 10 x (jet order of e); exceeding the bound throws
/// ReductionLimitError naming the jets still pending.
DiffExpr reduce_on_solutions(const PDESystem& sys, const DiffExpr& e, int max_sweeps = 0);

/// Degree-capped monomial basis request. `atom_degree` overrides the
/// default per-atom cap by position in `atoms`; -1 caps mean "no cap".
struct AnsatzSpec {
    std::vector<Atom> atoms;
    std::map<int, int> atom_degree;
    int degree_each = -1;
    int degree_total = 3;
};

struct Ansatz {
    std::vector<DiffExpr> monomials;
    std::vector<std::string> warnings;
};

/// Enumerates all monomials over the spec's atoms within the degree caps,
/// in a deterministic order starting from the constant monomial 1. Throws
/// ValidationError if the caps leave the basis unbounded. No filtering:
/// flux ansatz spaces legitimately contain leading derivatives.
std::vector<DiffExpr> enumerate_monomials(const AnsatzSpec& spec);

/// enumerate_monomials over the spec with atoms that are leading
/// consequences dropped first (with a warning) -- the multiplier ansatz.
Ansatz generate_ansatz(const PDESystem& sys, const AnsatzSpec& spec);

}  // namespace conslaw
