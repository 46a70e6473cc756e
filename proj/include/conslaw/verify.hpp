#pragma once
/// Independent exact checks on conservation laws: the characteristic
/// divergence identity, vanishing on solutions, Euler-operator annihilation,
/// and a conservative triviality classification.

#include <string>
#include <vector>

#include "conslaw/flux.hpp"
#include "conslaw/system.hpp"

namespace conslaw {

struct VerificationReport {
    bool pass = false;
    DiffExpr residual;  ///< normalized residual; structurally zero on pass
    std::vector<std::string> assumptions;  ///< echoed from the law, plus any new ones
};

/// Exact identity check sum(Lambda_sigma R^sigma) == D_i Phi^i in jet space,
/// valid for arbitrary functions. Requires the law to carry multipliers.
VerificationReport verify_characteristic(const PDESystem& sys, const ConservationLaw& cl);

/// Weaker check: D_i Phi^i reduces to zero after eliminating the leading
/// derivatives and their differential consequences.
VerificationReport verify_on_solutions(const PDESystem& sys, const ConservationLaw& cl);

/// True iff every variational derivative of f vanishes identically -- the
/// definitive test for f being a total divergence.
bool euler_annihilation(const DiffExpr& f);

enum class Triviality { trivial_first_kind, identically_divergence_free, unknown };
std::string triviality_name(Triviality t);

/// Conservative classification: trivial-first-kind when every flux component
/// itself reduces to zero on solutions; identically-divergence-free when
/// D_i Phi^i vanishes in jet space; otherwise unknown (no attempt is made to
/// decide general triviality).
Triviality triviality_heuristic(const PDESystem& sys, const ConservationLaw& cl);

/// Equivalence up to the heuristic: classifies the componentwise difference
/// of the two flux tuples. `unknown` means "inspect manually", not "distinct".
Triviality equivalence_heuristic(const PDESystem& sys, const ConservationLaw& a,
                                 const ConservationLaw& b);

}  // namespace conslaw
