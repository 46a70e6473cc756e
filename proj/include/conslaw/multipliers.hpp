#pragma once
/// Multiplier determining equations and their exact solution: for an ansatz
/// with unknown coefficients, build the Euler-operator conditions that make
/// sum(Lambda_sigma * R^sigma) a total divergence for arbitrary U, split
/// them into a homogeneous rational linear system, and return a basis of
/// multiplier sets.

#include <functional>
#include <string>
#include <vector>

#include "conslaw/linalg.hpp"
#include "conslaw/system.hpp"

namespace conslaw {

/// One monomial basis per equation; unknown coefficient c_alpha for
/// equation sigma, basis position alpha gets parameter id
/// offset(sigma) + alpha.
struct MultiplierAnsatz {
    std::vector<Ansatz> per_equation;

    int offset(std::size_t sigma) const;
    int num_unknowns() const;
    /// Lambda_sigma as an expression in the parameter atoms.
    DiffExpr lambda(std::size_t sigma) const;
};

/// The same basis for every equation of the system.
MultiplierAnsatz replicate_ansatz(const Ansatz& basis, std::size_t num_equations);

struct MultiplierSet {
    std::vector<DiffExpr> multipliers;   ///< one per equation
    std::vector<Rational> coefficients;  ///< originating nullspace vector
};

/// E_{U^j}(sum_sigma Lambda_sigma R^sigma) for each dependent variable j,
/// linear in the unknown parameter atoms.
std::vector<DiffExpr> determining_equations(const PDESystem& sys, const MultiplierAnsatz& ansatz);

/// Splits expressions that are linear in the parameter atoms into one row
/// per distinct monomial in the remaining atoms. Expressions are first
/// multiplied through by function atoms carrying algebraic rules that
/// appear to negative powers (the nonvanishing assumptions are recorded);
/// distinct canonical monomials are then linearly independent, so each
/// coefficient must vanish separately. `label` renders row provenance.
LinearSystem split_linear_system(const std::vector<DiffExpr>& eqs, int num_unknowns,
                                 std::vector<std::string>* assumptions = nullptr,
                                 const std::function<std::string(const Term&)>& label = nullptr);

/// End to end: determining equations, split, exact nullspace; every
/// returned set is re-checked by applying each Euler operator to
/// sum(Lambda_sigma R^sigma) and demanding identical vanishing.
std::vector<MultiplierSet> solve_multipliers(const PDESystem& sys, const MultiplierAnsatz& ansatz,
                                             std::vector<std::string>* assumptions = nullptr);

}  // namespace conslaw
