#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

using namespace conslaw;
using testsupport::in_span;
using testsupport::indep;
using testsupport::jet;

namespace {

/// Independent check that a multiplier tuple satisfies the determining
/// equations: every variational derivative of sum(Lambda_sigma R^sigma)
/// vanishes identically in jet space.
bool satisfies_determining_equations(const PDESystem& sys,
                                     const std::vector<DiffExpr>& multipliers) {
    DiffExpr chr;
    for (std::size_t s = 0; s < sys.equations.size(); ++s)
        chr += multipliers[s] * sys.equations[s].residual();
    for (std::size_t d = 0; d < sys.symbols.dependents.size(); ++d)
        if (!is_zero_modulo_rules(euler(chr, static_cast<int>(d)))) return false;
    return true;
}

std::vector<MultiplierSet> solve_with_atoms(const PDESystem& sys, std::vector<Atom> atoms,
                                            int degree) {
    AnsatzSpec spec;
    spec.atoms = std::move(atoms);
    spec.degree_total = degree;
    Ansatz basis = generate_ansatz(sys, spec);
    MultiplierAnsatz mans = replicate_ansatz(basis, sys.equations.size());
    return solve_multipliers(sys, mans);
}

}  // namespace

TEST_CASE("KdV multipliers to degree 2 span the four classical ones") {
    PDESystem sys = testsupport::kdv();
    MultiIndex ex = MultiIndex::unit(1);
    std::vector<Atom> atoms = {Atom::indep(0), Atom::indep(1), Atom::jet(0, MultiIndex{}),
                               Atom::jet(0, ex), Atom::jet(0, ex.plus(1))};
    std::vector<MultiplierSet> sets = solve_with_atoms(sys, atoms, 2);
    REQUIRE(sets.size() == 4);  // nullspace dimension is exactly four

    std::vector<DiffExpr> found;
    for (const MultiplierSet& s : sets) {
        REQUIRE(s.multipliers.size() == 1);
        CHECK(satisfies_determining_equations(sys, s.multipliers));
        found.push_back(s.multipliers[0]);
    }
    DiffExpr u = jet(0, MultiIndex{});
    DiffExpr t = indep(0), x = indep(1);
    DiffExpr uxx = jet(0, ex.plus(1));
    std::vector<DiffExpr> expected = {DiffExpr::constant(Rational(1)), u, x - t * u,
                                      u.pow(2).scaled(rat(1, 2)) + uxx};
    for (const DiffExpr& e : expected) CHECK(in_span(e, found));
    for (const DiffExpr& f : found) CHECK(in_span(f, expected));
}

TEST_CASE("KdV multipliers at degree 0 reduce to the constant") {
    PDESystem sys = testsupport::kdv();
    MultiIndex ex = MultiIndex::unit(1);
    std::vector<Atom> atoms = {Atom::indep(0), Atom::indep(1), Atom::jet(0, MultiIndex{}),
                               Atom::jet(0, ex), Atom::jet(0, ex.plus(1))};
    std::vector<MultiplierSet> sets = solve_with_atoms(sys, atoms, 0);
    REQUIRE(sets.size() == 1);
    CHECK(sets[0].multipliers[0] == DiffExpr::constant(Rational(1)));
}

TEST_CASE("wave multipliers of degree <= 2 in (x,t,U) span {1, x, t, xt}") {
    testsupport::WaveFixture w = testsupport::wave();
    std::vector<Atom> atoms = {Atom::indep(0), Atom::indep(1), Atom::jet(0, MultiIndex{})};
    std::vector<MultiplierSet> sets = solve_with_atoms(w.sys, atoms, 2);
    REQUIRE(sets.size() == 4);
    std::vector<DiffExpr> found;
    for (const MultiplierSet& s : sets) {
        CHECK(satisfies_determining_equations(w.sys, s.multipliers));
        found.push_back(s.multipliers[0]);
    }
    DiffExpr x = indep(0), t = indep(1);
    std::vector<DiffExpr> expected = {DiffExpr::constant(Rational(1)), x, t, x * t};
    for (const DiffExpr& e : expected) CHECK(in_span(e, found));
    for (const DiffExpr& f : found) CHECK(in_span(f, expected));
}

TEST_CASE("declared G-equation multipliers satisfy the determining equations") {
    testsupport::GeqFixture f = testsupport::geq();
    CHECK(satisfies_determining_equations(f.sys, f.lambda1));
    CHECK(satisfies_determining_equations(f.sys, f.lambda2));
    // a perturbed tuple does not
    std::vector<DiffExpr> broken = {f.lambda1[0] + jet(0, MultiIndex::unit(1))};
    CHECK_FALSE(satisfies_determining_equations(f.sys, broken));
}

TEST_CASE("determining equations are produced per dependent and split linearly") {
    PDESystem sys = testsupport::kdv();
    AnsatzSpec spec;
    spec.atoms = {Atom::jet(0, MultiIndex{})};
    spec.degree_total = 1;
    Ansatz basis = generate_ansatz(sys, spec);
    MultiplierAnsatz mans = replicate_ansatz(basis, 1);
    CHECK(mans.num_unknowns() == 2);
    std::vector<DiffExpr> dets = determining_equations(sys, mans);
    CHECK(dets.size() == 1);
    LinearSystem ls = split_linear_system(dets, mans.num_unknowns());
    CHECK(ls.num_cols == 2);
    LinearSolution sol = solve_linear(ls);
    CHECK(sol.consistent);
    CHECK(sol.nullspace.size() == 2);  // both 1 and u are multipliers
}

TEST_CASE("split_linear_system rejects nonlinear unknown occurrences") {
    DiffExpr p = DiffExpr::atom(Atom::param(0));
    CHECK_THROWS_AS(split_linear_system({p * p}, 1), ValidationError);
    CHECK_THROWS_AS(split_linear_system({p * DiffExpr::atom(Atom::param(1))}, 2),
                    ValidationError);
}

TEST_CASE("linear solver produces exact rational nullspaces") {
    // rows: a + 2b = 0, 3a + 6b = 0 -> one-dimensional nullspace (a, b) = (-2, 1)
    LinearSystem ls;
    ls.num_cols = 2;
    ls.add_row({{0, Rational(1)}, {1, Rational(2)}}, Rational(0), "r1");
    ls.add_row({{0, Rational(3)}, {1, Rational(6)}}, Rational(0), "r2");
    LinearSolution sol = solve_linear(ls);
    REQUIRE(sol.consistent);
    REQUIRE(sol.nullspace.size() == 1);
    const auto& v = sol.nullspace[0];
    CHECK(v[0] * Rational(1) + v[1] * Rational(2) == Rational(0));
    // inconsistent affine system is reported, not solved
    LinearSystem bad;
    bad.num_cols = 1;
    bad.add_row({{0, Rational(1)}}, Rational(1), "eq1");
    bad.add_row({{0, Rational(1)}}, Rational(2), "eq2");
    LinearSolution s2 = solve_linear(bad);
    CHECK_FALSE(s2.consistent);
    CHECK_FALSE(s2.conflicts.empty());
}
