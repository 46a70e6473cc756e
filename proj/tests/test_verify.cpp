#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

using namespace conslaw;
using testsupport::indep;
using testsupport::jet;

namespace {

PDESystem sys = testsupport::kdv();
const MultiIndex et = MultiIndex::unit(0), ex = MultiIndex::unit(1);
const DiffExpr u = jet(0, MultiIndex{});
const DiffExpr ut = jet(0, et), ux = jet(0, ex);
const DiffExpr uxx = jet(0, ex.plus(1));
const DiffExpr t = indep(0), x = indep(1);

ConservationLaw law_with(std::vector<DiffExpr> multipliers, std::vector<DiffExpr> fluxes) {
    ConservationLaw cl;
    cl.multipliers = std::move(multipliers);
    cl.fluxes = std::move(fluxes);
    return cl;
}

}  // namespace

TEST_CASE("characteristic verification accepts exact laws and flags tampering") {
    ConservationLaw mass = law_with({DiffExpr::constant(Rational(1))},
                                    {u, u.pow(2).scaled(rat(1, 2)) + uxx});
    VerificationReport rep = verify_characteristic(sys, mass);
    CHECK(rep.pass);
    CHECK(rep.residual.is_zero());

    ConservationLaw tampered = mass;
    tampered.fluxes[0] += u;  // adds D_t U to the divergence
    VerificationReport bad = verify_characteristic(sys, tampered);
    CHECK_FALSE(bad.pass);
    CHECK(bad.residual == -ut);

    // the pair method produces laws without multipliers; the characteristic
    // check cannot apply to them
    ConservationLaw pair = law_with({}, {u, DiffExpr()});
    CHECK_THROWS_AS(verify_characteristic(sys, pair), ValidationError);
    ConservationLaw short_fluxes = law_with({u}, {u});
    CHECK_THROWS_AS(verify_characteristic(sys, short_fluxes), ValidationError);
}

TEST_CASE("on-solutions verification reduces the divergence") {
    // the mass law passes outright
    VerificationReport rep = verify_on_solutions(
        sys, law_with({}, {u, u.pow(2).scaled(rat(1, 2)) + uxx}));
    CHECK(rep.pass);

    // a single-component density is not conserved
    VerificationReport bad = verify_on_solutions(sys, law_with({}, {u, DiffExpr()}));
    CHECK_FALSE(bad.pass);
    CHECK_FALSE(bad.residual.is_zero());

    // laws from the scaling formula only close on solutions, never identically
    ScalingSymmetry sc;
    sc.p = {Rational(3), Rational(1)};
    sc.q = {Rational(-2)};
    ConservationLaw scaled = flux_scaling(sys, {u}, sc);
    CHECK(verify_on_solutions(sys, scaled).pass);
    CHECK_FALSE(verify_characteristic(sys, scaled).pass);

    // square-root rules and their nonvanishing assumptions are honored
    testsupport::GeqFixture g = testsupport::geq();
    ConservationLaw glaw = flux_scaling(g.sys, g.lambda1, g.x2);
    CHECK(verify_on_solutions(g.sys, glaw).pass);
}

TEST_CASE("Euler operators annihilate exactly the total divergences") {
    std::vector<Atom> pool = {Atom::indep(0), Atom::indep(1),
                              Atom::jet(0, MultiIndex{}), Atom::jet(0, et),
                              Atom::jet(0, ex), Atom::jet(0, ex.plus(1))};
    std::mt19937 rng(4242);
    for (int trial = 0; trial < 60; ++trial) {
        std::vector<DiffExpr> fluxes = {testsupport::random_expr(pool, rng),
                                        testsupport::random_expr(pool, rng)};
        CHECK(euler_annihilation(testsupport::divergence(fluxes)));
    }
    // exact divergences by hand
    CHECK(euler_annihilation(u * ux));
    CHECK(euler_annihilation(ux * uxx));
    CHECK(euler_annihilation(DiffExpr()));
    // and expressions that are not divergences
    CHECK_FALSE(euler_annihilation(ux.pow(2)));
    CHECK_FALSE(euler_annihilation(u * uxx));
    CHECK_FALSE(euler_annihilation(u));

    // a derivative of the square root is recognized modulo its algebraic rule
    testsupport::GeqFixture g = testsupport::geq();
    CHECK(euler_annihilation(total_derivative(g.sys.equations[0].rhs, 1)));
}

TEST_CASE("triviality classification") {
    // flux components proportional to the residual vanish on solutions
    ConservationLaw first_kind = law_with({}, {sys.equations[0].residual(), DiffExpr()});
    CHECK(triviality_heuristic(sys, first_kind) == Triviality::trivial_first_kind);

    // a curl tuple is divergence-free in the whole jet space
    ConservationLaw curl = law_with({}, {ux, -ut});
    CHECK(triviality_heuristic(sys, curl) == Triviality::identically_divergence_free);

    // a genuine law is neither
    ConservationLaw mass = law_with({}, {u, u.pow(2).scaled(rat(1, 2)) + uxx});
    CHECK(triviality_heuristic(sys, mass) == Triviality::unknown);

    CHECK(triviality_name(Triviality::trivial_first_kind) == "trivial-first-kind");
    CHECK(triviality_name(Triviality::identically_divergence_free) ==
          "identically-divergence-free");
    CHECK(triviality_name(Triviality::unknown) == "unknown");
}

TEST_CASE("equivalence of reconstructions for the same multiplier") {
    // two exact flux tuples for one multiplier differ by an identically
    // divergence-free tuple, so the heuristic never reports unknown
    ConservationLaw direct = flux_direct(sys, {u});
    ConservationLaw hom = flux_homotopy1(sys, {u});
    CHECK(equivalence_heuristic(sys, direct, hom) != Triviality::unknown);
    CHECK(equivalence_heuristic(sys, direct, direct) == Triviality::trivial_first_kind);

    // laws of different multipliers are genuinely distinct
    ConservationLaw mass = flux_homotopy1(sys, {DiffExpr::constant(Rational(1))});
    CHECK(equivalence_heuristic(sys, mass, hom) == Triviality::unknown);

    ConservationLaw three = law_with({}, {u, u, u});
    CHECK_THROWS_AS(equivalence_heuristic(sys, direct, three), ValidationError);
}
