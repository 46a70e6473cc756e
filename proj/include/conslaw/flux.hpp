#pragma once
/// Flux reconstruction for conservation laws: direct ansatz matching, two
/// homotopy formulas, the scaling-symmetry formula, and the
/// symmetry/adjoint-symmetry pair formula.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "conslaw/system.hpp"

namespace conslaw {

enum class Method { direct, homotopy1, homotopy2, scaling, pair };
std::string method_name(Method m);

enum class VerifyStatus { unverified, characteristic_identity, on_solutions };

struct ConservationLaw {
    std::vector<DiffExpr> multipliers;  ///< one per equation; empty for the pair method
    std::vector<DiffExpr> fluxes;       ///< one per independent variable
    Method method = Method::direct;
    VerifyStatus status = VerifyStatus::unverified;
    std::vector<std::string> assumptions;
    bool critical = false;  ///< scaling method: some chi vanished; law is trivial
};

/// Options for the direct method's flux ansatz. Without an explicit spec the
/// ansatz uses all jets to order max(multiplier order, system order) --
/// lowered by one when the characteristic expression is linear in the
/// top-order jets -- every function atom occurring in it, and total degree
/// (degree of the characteristic expression) + 1.
struct FluxAnsatzOptions {
    std::optional<AnsatzSpec> spec;
    int extra_degree = 0;
    int extra_order = 0;
    /// Upper bound on the total number of unknown flux coefficients; a
    /// larger ansatz is rejected with NoSolutionError instead of being
    /// solved, since the dense elimination behind it would be impractical.
    long max_unknowns = 20000;
};

/// Matches D_i Phi^i against sum(Lambda_sigma R^sigma) over a finite flux
/// ansatz and returns the canonical particular solution: monomials mixing
/// derivative directions or depending on independent variables alone carry
/// the gauge freedom, so they are tried last and their free coefficients
/// are pinned to zero. Throws NoSolutionError when the ansatz cannot
/// represent any flux tuple.
ConservationLaw flux_direct(const PDESystem& sys, const std::vector<DiffExpr>& multipliers,
                            const FluxAnsatzOptions& opts = {});

/// The order-truncated homotopy integrand for direction `var`:
/// sum over dependents j and multi-indices s of
/// (1+s_var)/(1+|s|) * D^s( U^j * E^{(s+e_var)}_{U^j}(f) ),
/// where E^{(s)} is the signed higher Euler operator.
DiffExpr homotopy1_integrand(const DiffExpr& f, int var);

/// First homotopy formula: scale the jets of each integrand term by the
/// deformation parameter and integrate the parameter over [0,1] by the
/// power rule (a term of jet degree d contributes itself divided by d).
/// Requires f free of arbitrary-function atoms and vanishing at zero jets;
/// terms of jet degree <= 0 make the integral divergent.
std::vector<DiffExpr> homotopy1_fluxes(const PDESystem& sys, const DiffExpr& f);
ConservationLaw flux_homotopy1(const PDESystem& sys, const std::vector<DiffExpr>& multipliers);

/// The bilinear boundary operator: for each component F^sigma, each jet
/// atom U^rho_J of F^sigma with J containing `var`, and each split of the
/// J-copies of `var` around the distinguished one, contributes
/// (-1)^|lower| * D^upper(v^rho) * D^lower(w_sigma * dF^sigma/dU^rho_J);
/// `lower` collects indices before `var` plus a of its remaining copies,
/// `upper` the rest. `transform_partial` post-processes each partial
/// derivative (used to evaluate it along a deformation path).
DiffExpr bilinear_s(const std::vector<DiffExpr>& v, const std::vector<DiffExpr>& w,
                    const std::vector<DiffExpr>& f, int var,
                    const std::function<DiffExpr(const DiffExpr&)>& transform_partial = nullptr);

/// Fluxes of the base point: F(x) = sum(Lambda_sigma R^sigma) evaluated on
/// U = base must be polynomial in the independent variables; the first
/// component is its antiderivative in x^1, all others zero.
std::vector<DiffExpr> base_point_fluxes(const PDESystem& sys,
                                        const std::vector<DiffExpr>& multipliers,
                                        const std::vector<DiffExpr>& base);

/// Second homotopy formula along U_lambda = lambda*U + (1-lambda)*base:
/// Phi^i = Phi^i[base] + integral over [0,1] of
/// S^i[U-base, Lambda[U_lambda]; R[U_lambda]]
/// + S~^i[U-base, R[U_lambda]; Lambda[U_lambda]],
/// with every partial derivative computed first and evaluated on U_lambda
/// afterwards. An empty `base` means the zero base point.
ConservationLaw flux_homotopy2(const PDESystem& sys, const std::vector<DiffExpr>& multipliers,
                               const std::vector<DiffExpr>& base = {});

/// One-parameter scaling: x^i scales with weight p[i], U^rho with q[rho].
struct ScalingSymmetry {
    std::vector<Rational> p;
    std::vector<Rational> q;
};

struct WeightReport {
    std::vector<Rational> r;          ///< residual weight per equation
    std::vector<Rational> s;          ///< multiplier weight per equation (0 for zero multiplier)
    std::vector<Rational> chi;        ///< s + r + sum(p)
    std::vector<bool> critical;       ///< chi == 0 with nonzero multiplier
    Rational p_sum;
};

/// Weight of a scaling-homogeneous expression: atoms weigh p[i] for x^i,
/// q[rho] - sum_J p for U^rho_J, rule-carrying function atoms by their
/// rule, and other function atoms 0 provided all arguments have weight 0.
/// Returns nothing for the zero expression; throws NonHomogeneousError
/// when terms disagree or a function atom cannot be assigned a weight.
std::optional<Rational> homogeneous_weight(const PDESystem& sys, const ScalingSymmetry& sym,
                                           const DiffExpr& e);

/// The evolutionary characteristic of the scaling symmetry:
/// eta^rho = q[rho] U^rho - sum_i p[i] x^i U^rho_{x^i}.
std::vector<DiffExpr> evolutionary_characteristic(const PDESystem& sys,
                                                  const ScalingSymmetry& sym);

WeightReport scaling_weights(const PDESystem& sys, const std::vector<DiffExpr>& multipliers,
                             const ScalingSymmetry& sym);

/// Integration-free flux formula for a noncritical scaling symmetry:
/// Phi^i = S^i[-eta, Lambda; R], verified on solutions. A critical
/// multiplier set still produces output but the law is flagged trivial.
ConservationLaw flux_scaling(const PDESystem& sys, const std::vector<DiffExpr>& multipliers,
                             const ScalingSymmetry& sym);

/// Fluxes from a symmetry characteristic and an adjoint-symmetry tuple
/// (any multiplier set qualifies): Phi^i = S^i[-eta, omega; R], verified
/// on solutions; an invalid pair is rejected with VerificationError.
ConservationLaw flux_symmetry_pair(const PDESystem& sys, const std::vector<DiffExpr>& symmetry,
                                   const std::vector<DiffExpr>& adjoint);

}  // namespace conslaw
