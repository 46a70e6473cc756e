#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

using namespace conslaw;
using testsupport::indep;
using testsupport::jet;

namespace {

DiffExpr characteristic(const PDESystem& sys, const std::vector<DiffExpr>& multipliers) {
    DiffExpr chr;
    for (std::size_t s = 0; s < sys.equations.size(); ++s)
        chr += multipliers[s] * sys.equations[s].residual();
    return chr;
}

/// Oracle: D_i Phi^i equals the characteristic expression, identically.
bool divergence_matches(const PDESystem& sys, const ConservationLaw& law) {
    DiffExpr check = testsupport::divergence(law.fluxes) - characteristic(sys, law.multipliers);
    return is_zero_modulo_rules(check);
}

}  // namespace

TEST_CASE("wave equation: all four multipliers give the classical flux displays") {
    testsupport::WaveFixture w = testsupport::wave();
    MultiIndex ex = MultiIndex::unit(0), et = MultiIndex::unit(1);
    DiffExpr u = jet(0, MultiIndex{});
    DiffExpr ux = jet(0, ex), ut = jet(0, et);
    DiffExpr x = indep(0), t = indep(1);

    struct Case {
        DiffExpr lambda, phi_x, phi_t;
    };
    std::vector<Case> cases = {
        {DiffExpr::constant(Rational(1)), -(w.c.pow(2) * ux), ut},
        {x, -(x * w.c.pow(2) * ux) + w.A, x * ut},
        {t, -(t * w.c.pow(2) * ux), t * ut - u},
        {x * t, -(x * t * w.c.pow(2) * ux) + t * w.A, x * t * ut - x * u},
    };
    for (const Case& cs : cases) {
        ConservationLaw law = flux_direct(w.sys, {cs.lambda});
        REQUIRE(law.fluxes.size() == 2);
        CHECK(law.status == VerifyStatus::characteristic_identity);
        CHECK(law.fluxes[0] == cs.phi_x);
        CHECK(law.fluxes[1] == cs.phi_t);
        CHECK(divergence_matches(w.sys, law));
    }
}

TEST_CASE("the antiderivative atom enters the default ansatz only via closure") {
    // The characteristic expression never mentions A, yet the x-multiplier
    // flux needs it; the default ansatz must still find the flux tuple.
    testsupport::WaveFixture w = testsupport::wave();
    ConservationLaw law = flux_direct(w.sys, {indep(0)});
    bool mentions_A = false;
    for (const DiffExpr& f : law.fluxes)
        for_each_atom(f, [&](const Atom& a) {
            if (a.kind() == AtomKind::func && a.fn().def->name == "A") mentions_A = true;
        });
    CHECK(mentions_A);
}

TEST_CASE("KdV direct fluxes satisfy the characteristic identity") {
    PDESystem sys = testsupport::kdv();
    MultiIndex ex = MultiIndex::unit(1);
    DiffExpr u = jet(0, MultiIndex{});
    DiffExpr uxx = jet(0, ex.plus(1));
    DiffExpr t = indep(0), x = indep(1);
    std::vector<DiffExpr> lams = {DiffExpr::constant(Rational(1)), u, x - t * u,
                                  u.pow(2).scaled(rat(1, 2)) + uxx};
    for (const DiffExpr& lam : lams) {
        ConservationLaw law = flux_direct(sys, {lam});
        CHECK(law.status == VerifyStatus::characteristic_identity);
        CHECK(divergence_matches(sys, law));
    }
}

TEST_CASE("gauge fixing prefers fluxes without junk monomials") {
    // For Lambda = 1 on KdV the canonical answer (u, u^2/2 + u_xx) contains no
    // monomial depending on independent variables alone and no mixed-direction
    // derivatives.
    PDESystem sys = testsupport::kdv();
    ConservationLaw law = flux_direct(sys, {DiffExpr::constant(Rational(1))});
    MultiIndex ex = MultiIndex::unit(1);
    DiffExpr u = jet(0, MultiIndex{});
    CHECK(law.fluxes[0] == u);
    CHECK(law.fluxes[1] == u.pow(2).scaled(rat(1, 2)) + jet(0, ex.plus(1)));
}

TEST_CASE("an undersized explicit ansatz is rejected with a conflict report") {
    PDESystem sys = testsupport::kdv();
    FluxAnsatzOptions opts;
    AnsatzSpec spec;
    spec.atoms = {Atom::jet(0, MultiIndex{})};
    spec.degree_total = 1;
    opts.spec = spec;
    DiffExpr u = jet(0, MultiIndex{});
    CHECK_THROWS_AS(flux_direct(sys, {u}, opts), NoSolutionError);
}

TEST_CASE("an oversized ansatz is rejected before solving") {
    testsupport::GeqFixture f = testsupport::geq();
    try {
        flux_direct(f.sys, f.lambda2);
        CHECK(false);
    } catch (const NoSolutionError& e) {
        CHECK(std::string(e.what()).find("limit") != std::string::npos);
    }
    // raising the cap is possible but the KdV case never needs it
    PDESystem kdv = testsupport::kdv();
    FluxAnsatzOptions small;
    small.max_unknowns = 10;
    CHECK_THROWS_AS(flux_direct(kdv, {DiffExpr::constant(Rational(1))}, small),
                    NoSolutionError);
}

TEST_CASE("multiplier count must match the system") {
    PDESystem sys = testsupport::kdv();
    CHECK_THROWS_AS(flux_direct(sys, {}), ValidationError);
}
