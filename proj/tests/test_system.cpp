#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>

#include "support.hpp"

using namespace conslaw;
using testsupport::indep;
using testsupport::jet;

TEST_CASE("solved form is validated") {
    PDESystem sys = testsupport::kdv();
    CHECK_NOTHROW(require_solved_form(sys));
    // rhs mentioning the lead jet breaks solved form
    PDESystem bad = testsupport::kdv();
    bad.equations[0].rhs += jet(0, MultiIndex::unit(0));
    CHECK_THROWS_AS(require_solved_form(bad), ValidationError);
    // rhs mentioning a differential consequence of the lead jet too
    PDESystem bad2 = testsupport::kdv();
    bad2.equations[0].rhs += jet(0, MultiIndex::unit(0).plus(1));
    CHECK_THROWS_AS(require_solved_form(bad2), ValidationError);
}

TEST_CASE("leading consequences are recognized") {
    PDESystem sys = testsupport::kdv();
    MultiIndex et = MultiIndex::unit(0), ex = MultiIndex::unit(1);
    CHECK(is_leading_consequence(sys, Atom::jet(0, et)));
    CHECK(is_leading_consequence(sys, Atom::jet(0, et.plus(1))));
    CHECK(is_leading_consequence(sys, Atom::jet(0, et.plus(0))));
    CHECK_FALSE(is_leading_consequence(sys, Atom::jet(0, ex)));
    CHECK_FALSE(is_leading_consequence(sys, Atom::jet(0, ex.plus(1))));
    CHECK(contains_leading_consequence(sys, jet(0, et) * jet(0, ex)));
    CHECK_FALSE(contains_leading_consequence(sys, jet(0, ex).pow(3)));
}

TEST_CASE("reduction on solutions reaches a fixpoint") {
    PDESystem sys = testsupport::kdv();
    MultiIndex et = MultiIndex::unit(0), ex = MultiIndex::unit(1);
    DiffExpr u = jet(0, MultiIndex{});
    DiffExpr ut = jet(0, et), ux = jet(0, ex);
    DiffExpr uxxx = jet(0, ex.plus(1).plus(1));
    CHECK(reduce_on_solutions(sys, ut) == -(u * ux) - uxxx);
    CHECK(reduce_on_solutions(sys, ut + u * ux + uxxx).is_zero());
    // differential consequence u_tx reduces to D_x of the rhs
    DiffExpr redtx = reduce_on_solutions(sys, jet(0, et.plus(1)));
    CHECK(redtx == total_derivative(-(u * ux) - uxxx, 1));
    // already-reduced expressions are fixed points
    DiffExpr poly = u.pow(2) * ux + indep(1);
    CHECK(reduce_on_solutions(sys, poly) == poly);
}

TEST_CASE("reduction sweep limit throws with the offending jets") {
    PDESystem sys = testsupport::kdv();
    MultiIndex et = MultiIndex::unit(0);
    // u_tt needs two sweeps: one to u_t-consequences, one more to clear them
    DiffExpr utt = jet(0, et.plus(0));
    CHECK_THROWS_AS(reduce_on_solutions(sys, utt, 1), ReductionLimitError);
    CHECK_NOTHROW(reduce_on_solutions(sys, utt, 3));
    // regression: convergence exactly at the sweep bound is success, not error
    DiffExpr ut = jet(0, et);
    CHECK_NOTHROW(reduce_on_solutions(sys, ut, 1));
    try {
        reduce_on_solutions(sys, utt, 1);
        CHECK(false);
    } catch (const ReductionLimitError& e) {
        CHECK(std::string(e.what()).find("u_{t") != std::string::npos);
    }
}

TEST_CASE("reduction honours CONSLAW_MAX_SWEEPS") {
    PDESystem sys = testsupport::kdv();
    MultiIndex et = MultiIndex::unit(0);
    DiffExpr utt = jet(0, et.plus(0));
    setenv("CONSLAW_MAX_SWEEPS", "1", 1);
    CHECK_THROWS_AS(reduce_on_solutions(sys, utt), ReductionLimitError);
    setenv("CONSLAW_MAX_SWEEPS", "8", 1);
    CHECK_NOTHROW(reduce_on_solutions(sys, utt));
    unsetenv("CONSLAW_MAX_SWEEPS");
    CHECK_NOTHROW(reduce_on_solutions(sys, utt));
}

TEST_CASE("monomial enumeration respects caps and has no duplicates") {
    AnsatzSpec spec;
    spec.atoms = {Atom::indep(0), Atom::indep(1), Atom::jet(0, MultiIndex{})};
    spec.degree_total = 2;
    std::vector<DiffExpr> mono = enumerate_monomials(spec);
    CHECK(mono.size() == 10);  // C(3+2,2) multisets of size <= 2 over 3 atoms
    for (std::size_t i = 0; i < mono.size(); ++i)
        for (std::size_t j = i + 1; j < mono.size(); ++j) CHECK_FALSE(mono[i] == mono[j]);

    AnsatzSpec capped = spec;
    capped.atom_degree[2] = 0;  // exclude the jet atom entirely
    std::vector<DiffExpr> only_xy = enumerate_monomials(capped);
    CHECK(only_xy.size() == 6);
    for (const DiffExpr& m : only_xy) CHECK(jets_in(m).empty());

    AnsatzSpec each = spec;
    each.degree_each = 1;
    each.degree_total = 3;
    std::vector<DiffExpr> sq = enumerate_monomials(each);
    for (const DiffExpr& m : sq)
        for (const auto& [a, k] : m.terms()[0].factors) CHECK(k <= 1);
}

TEST_CASE("ansatz generation rejects leading consequences with a warning") {
    PDESystem sys = testsupport::kdv();
    MultiIndex et = MultiIndex::unit(0), ex = MultiIndex::unit(1);
    AnsatzSpec spec;
    spec.atoms = {Atom::jet(0, MultiIndex{}), Atom::jet(0, et), Atom::jet(0, ex)};
    spec.degree_total = 1;
    Ansatz a = generate_ansatz(sys, spec);
    CHECK(a.warnings.size() == 1);
    for (const DiffExpr& m : a.monomials)
        CHECK_FALSE(contains_leading_consequence(sys, m));
    // 1, u, u_x survive
    CHECK(a.monomials.size() == 3);
}

TEST_CASE("jet labels use declaration order") {
    PDESystem sys = testsupport::kdv();
    MultiIndex et = MultiIndex::unit(0), ex = MultiIndex::unit(1);
    CHECK(jet_label(sys.symbols, 0, MultiIndex{}) == "u");
    CHECK(jet_label(sys.symbols, 0, et.plus(1).plus(1)) == "u_{txx}");
}
