#pragma once
/// Shared fixtures and independent oracles for the test suite.
///
/// The oracles here are deliberately built from first principles (partial
/// derivatives, total derivatives, random evaluation) rather than from the
/// higher-level library routines they are used to check.

#include <cstdlib>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "conslaw/calculus.hpp"
#include "conslaw/errors.hpp"
#include "conslaw/expr.hpp"
#include "conslaw/flux.hpp"
#include "conslaw/linalg.hpp"
#include "conslaw/multipliers.hpp"
#include "conslaw/system.hpp"

namespace testsupport {

using namespace conslaw;

// ---------------------------------------------------------------------------
// Fixture systems
// ---------------------------------------------------------------------------

/// Korteweg-de Vries u_t = -u u_x - u_xxx with independents (t, x).
inline PDESystem kdv() {
    PDESystem sys;
    sys.symbols.independents = {"t", "x"};
    sys.symbols.dependents = {"u"};
    MultiIndex et = MultiIndex::unit(0), ex = MultiIndex::unit(1);
    DiffExpr u = DiffExpr::atom(Atom::jet(0, MultiIndex{}));
    DiffExpr ux = DiffExpr::atom(Atom::jet(0, ex));
    DiffExpr uxxx = DiffExpr::atom(Atom::jet(0, ex.plus(1).plus(1)));
    sys.equations.push_back({0, et, -(u * ux) - uxxx, {}});
    return sys;
}

struct WaveFixture {
    PDESystem sys;
    std::shared_ptr<FunctionDef> cdef, adef;
    DiffExpr c, cp, A;  ///< c(u), c'(u), and the antiderivative A(u) of c(u)^2
};

/// Nonlinear wave u_tt = c(u)^2 u_xx + 2 c c' u_x^2 with independents (x, t)
/// and an arbitrary wave speed c(u); A is declared with A'(u) = c(u)^2.
inline WaveFixture wave() {
    WaveFixture w;
    w.sys.symbols.independents = {"x", "t"};
    w.sys.symbols.dependents = {"u"};
    w.cdef = std::make_shared<FunctionDef>();
    w.cdef->name = "c";
    w.cdef->arity = 1;
    w.cdef->kind = FuncKind::arbitrary;
    w.adef = std::make_shared<FunctionDef>();
    w.adef->name = "A";
    w.adef->arity = 1;
    w.adef->kind = FuncKind::defined;
    w.adef->slot_derivatives = {make_func(w.cdef, {DiffExpr::atom(Atom::slot(1))}).pow(2)};
    w.sys.symbols.functions = {w.cdef, w.adef};
    MultiIndex ex = MultiIndex::unit(0), et = MultiIndex::unit(1);
    DiffExpr u = DiffExpr::atom(Atom::jet(0, MultiIndex{}));
    DiffExpr ux = DiffExpr::atom(Atom::jet(0, ex));
    DiffExpr uxx = DiffExpr::atom(Atom::jet(0, ex.plus(0)));
    w.c = make_func(w.cdef, {u});
    w.cp = make_func(w.cdef, {u}, {1});
    w.A = make_func(w.adef, {u});
    w.sys.equations.push_back(
        {0, et.plus(1), w.c.pow(2) * uxx + (w.c * w.cp * ux.pow(2)).scaled(Rational(2)), {}});
    return w;
}

struct GeqFixture {
    PDESystem sys;
    std::shared_ptr<FunctionDef> sdef, hdef;
    std::vector<DiffExpr> lambda1;  ///< (g_x g_yy - g_y g_xy) / g_y^3
    std::vector<DiffExpr> lambda2;  ///< H(g_x, g_y) (g_xx g_yy - g_xy^2)
    ScalingSymmetry x1;             ///< q = 1, p = 0 (critical for lambda1)
    ScalingSymmetry x2;             ///< q = 0, p = (1,1,1)
};

/// Flame-front equation g_t = s(g_x^2 + g_y^2) with independents (t, x, y),
/// where s is the square root: s(w)^2 = w and s'(w) = 1/(2 s(w)).
inline GeqFixture geq() {
    GeqFixture f;
    f.sys.symbols.independents = {"t", "x", "y"};
    f.sys.symbols.dependents = {"g"};
    f.sdef = std::make_shared<FunctionDef>();
    f.sdef->name = "s";
    f.sdef->arity = 1;
    f.sdef->kind = FuncKind::defined;
    f.sdef->slot_derivatives = {
        make_func(f.sdef, {DiffExpr::atom(Atom::slot(1))}).pow(-1).scaled(rat(1, 2))};
    f.sdef->rule_power = 2;
    f.sdef->rule_replacement = {DiffExpr::atom(Atom::slot(1))};
    f.hdef = std::make_shared<FunctionDef>();
    f.hdef->name = "H";
    f.hdef->arity = 2;
    f.hdef->kind = FuncKind::arbitrary;
    f.sys.symbols.functions = {f.sdef, f.hdef};
    MultiIndex et = MultiIndex::unit(0), ex = MultiIndex::unit(1), ey = MultiIndex::unit(2);
    DiffExpr gx = DiffExpr::atom(Atom::jet(0, ex));
    DiffExpr gy = DiffExpr::atom(Atom::jet(0, ey));
    f.sys.equations.push_back(
        {0, et, make_func(f.sdef, {gx.pow(2) + gy.pow(2)}), {}});
    DiffExpr gxx = DiffExpr::atom(Atom::jet(0, ex.plus(1)));
    DiffExpr gxy = DiffExpr::atom(Atom::jet(0, ex.plus(2)));
    DiffExpr gyy = DiffExpr::atom(Atom::jet(0, ey.plus(2)));
    f.lambda1 = {(gx * gyy - gy * gxy) * DiffExpr::atom(Atom::jet(0, ey), -3)};
    f.lambda2 = {make_func(f.hdef, {gx, gy}) * (gxx * gyy - gxy.pow(2))};
    f.x1.p = {Rational(0), Rational(0), Rational(0)};
    f.x1.q = {Rational(1)};
    f.x2.p = {Rational(1), Rational(1), Rational(1)};
    f.x2.q = {Rational(0)};
    return f;
}

// ---------------------------------------------------------------------------
// Expression shorthands
// ---------------------------------------------------------------------------

inline DiffExpr jet(int dep, const MultiIndex& K) { return DiffExpr::atom(Atom::jet(dep, K)); }
inline DiffExpr indep(int i) { return DiffExpr::atom(Atom::indep(i)); }

// ---------------------------------------------------------------------------
// Independent linearization oracles (acceptance criterion: the bilinear
// identity). L is the linearization (Frechet derivative) of F; L* is its
// formal adjoint, written directly from the definition:
//   (L V)^sigma   = sum_{rho,J} dF^sigma/dU^rho_J D_J V^rho
//   (L* W)_rho    = sum_{sigma,J} (-D)_J ( dF^sigma/dU^rho_J * W_sigma )
// ---------------------------------------------------------------------------

inline std::vector<DiffExpr> frechet(const PDESystem& sys, const std::vector<DiffExpr>& F,
                                     const std::vector<DiffExpr>& V) {
    std::vector<DiffExpr> out;
    out.reserve(F.size());
    for (const DiffExpr& f : F) out.push_back(apply_prolonged_symmetry(f, V));
    return out;
}

inline std::vector<DiffExpr> adjoint(const PDESystem& sys, const std::vector<DiffExpr>& F,
                                     const std::vector<DiffExpr>& W) {
    const std::size_t num_dep = sys.symbols.dependents.size();
    std::vector<DiffExpr> out(num_dep);
    for (std::size_t rho = 0; rho < num_dep; ++rho) {
        std::vector<Term> acc;
        for (std::size_t sigma = 0; sigma < F.size(); ++sigma) {
            for (const Atom& a : jets_in(F[sigma], static_cast<int>(rho))) {
                const MultiIndex& J = a.jet_index();
                DiffExpr piece = total_derivative(
                    partial_jet(F[sigma], static_cast<int>(rho), J) * W[sigma], J);
                if (J.order() % 2 == 1) piece = -piece;
                acc.insert(acc.end(), piece.terms().begin(), piece.terms().end());
            }
        }
        out[rho] = DiffExpr::sum(std::move(acc));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Random rational evaluation: an independent, purely numeric check that two
// polynomial jet expressions agree. Function atoms are not supported.
// ---------------------------------------------------------------------------

struct AtomLess {
    bool operator()(const Atom& a, const Atom& b) const { return cmp(a, b) < 0; }
};
using Point = std::map<Atom, Rational, AtomLess>;

inline Rational eval_at(const DiffExpr& e, const Point& pt) {
    Rational total(0);
    for (const Term& t : e.terms()) {
        Rational prod = t.coeff;
        for (const auto& [a, k] : t.factors) {
            auto it = pt.find(a);
            if (it == pt.end()) throw std::runtime_error("eval_at: unassigned atom");
            Rational base = it->second;
            int n = k < 0 ? -k : k;
            Rational p(1);
            for (int i = 0; i < n; ++i) p *= base;
            if (k < 0) {
                if (is_zero(p)) throw std::runtime_error("eval_at: division by zero");
                p = Rational(1) / p;
            }
            prod *= p;
        }
        total += prod;
    }
    return total;
}

/// Assign a random nonzero rational to every atom of the given expressions.
inline Point random_point(const std::vector<DiffExpr>& exprs, std::mt19937& rng) {
    Point pt;
    std::uniform_int_distribution<int> num(-9, 9), den(1, 7);
    for (const DiffExpr& e : exprs)
        for_each_atom(e, [&](const Atom& a) {
            if (pt.count(a)) return;
            int n = num(rng);
            if (n == 0) n = 1;
            pt.emplace(a, rat(n, den(rng)));
        });
    return pt;
}

// ---------------------------------------------------------------------------
// Random polynomial jet expressions over a fixed atom pool.
// ---------------------------------------------------------------------------

struct RandomExprOptions {
    int max_terms = 4;
    int max_factors = 3;
    int max_exp = 2;
    bool allow_negative_coeff = true;
    bool require_jet_factor = false;  ///< every term contains a jet atom
};

inline DiffExpr random_expr(const std::vector<Atom>& pool, std::mt19937& rng,
                            const RandomExprOptions& opt = {}) {
    std::uniform_int_distribution<int> nterms(1, opt.max_terms);
    std::uniform_int_distribution<int> nfac(1, opt.max_factors);
    std::uniform_int_distribution<int> pick(0, static_cast<int>(pool.size()) - 1);
    std::uniform_int_distribution<int> ex(1, opt.max_exp);
    std::uniform_int_distribution<int> num(1, 6), den(1, 4);
    DiffExpr out;
    int terms = nterms(rng);
    for (int t = 0; t < terms; ++t) {
        int n = num(rng);
        if (opt.allow_negative_coeff && rng() % 2) n = -n;
        DiffExpr term = DiffExpr::constant(rat(n, den(rng)));
        int facs = nfac(rng);
        bool has_jet = false;
        for (int fc = 0; fc < facs; ++fc) {
            const Atom& a = pool[static_cast<std::size_t>(pick(rng))];
            if (a.kind() == AtomKind::jet) has_jet = true;
            term = term * DiffExpr::atom(a, ex(rng));
        }
        if (opt.require_jet_factor && !has_jet) {
            for (const Atom& a : pool)
                if (a.kind() == AtomKind::jet) {
                    term = term * DiffExpr::atom(a);
                    break;
                }
        }
        out += term;
    }
    return out;
}

/// Jet-space divergence of a flux tuple.
inline DiffExpr divergence(const std::vector<DiffExpr>& fluxes) {
    DiffExpr out;
    for (std::size_t i = 0; i < fluxes.size(); ++i)
        out += total_derivative(fluxes[i], static_cast<int>(i));
    return out;
}

/// True when `candidate` lies in the rational span of `basis` (all expressions
/// over the same jet space). Decided exactly by splitting candidate - sum of
/// unknown-scaled basis elements into a linear system.
inline bool in_span(const DiffExpr& candidate, const std::vector<DiffExpr>& basis) {
    DiffExpr combo = -candidate;
    for (std::size_t i = 0; i < basis.size(); ++i)
        combo += DiffExpr::atom(Atom::param(static_cast<int>(i))) * basis[i];
    LinearSystem ls = split_linear_system({combo}, static_cast<int>(basis.size()));
    LinearSolution sol = solve_linear(ls);
    return sol.consistent;
}

}  // namespace testsupport
