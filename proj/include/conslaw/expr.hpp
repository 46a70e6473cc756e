#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "conslaw/atom.hpp"
#include "conslaw/rational.hpp"

namespace conslaw {

class DiffExpr;

enum class FuncKind { arbitrary, defined };

/// Declaration of a function symbol. Arbitrary functions stay undetermined
/// and acquire derivative-marked atoms on differentiation; defined functions
/// differentiate through explicit per-slot rules.
struct FunctionDef {
    std::string name;
    int arity = 0;
    FuncKind kind = FuncKind::arbitrary;
    // Defined functions only. slot_derivatives[k] is d(f)/d(arg k) written in
    // slot atoms; it may mention f itself.
    std::vector<DiffExpr> slot_derivatives;
    // Power rewrite f(args)^rule_power -> replacement (in slot atoms), e.g. a
    // declared square root s has rule_power 2 and replacement slot 1.
    int rule_power = 0;  // 0 means no algebraic rule
    std::vector<DiffExpr> rule_replacement;  // size 1 when rule_power > 0

    bool has_algebraic_rule() const { return rule_power > 0; }
};

/// Instance of a function symbol: definition, argument expressions, and for
/// arbitrary functions the per-slot derivative marks (c'' has deriv = {2}).
struct FuncData {
    std::shared_ptr<const FunctionDef> def;
    std::vector<DiffExpr> args;
    std::vector<int> deriv;
};

/// One product of atom powers with a rational coefficient. Factors are sorted
/// by the canonical atom order with nonzero integer exponents; exponents may
/// be negative.
struct Term {
    Rational coeff;
    std::vector<std::pair<Atom, int>> factors;

    int degree() const {
        int d = 0;
        for (auto& [a, e] : factors) d += e;
        return d;
    }
};

int cmp(const Term& a, const Term& b);

/// Canonical sum of terms. The invariant, maintained by every operation:
/// terms are sorted, monomials are distinct, no coefficient is zero, and all
/// defined-function rewrite rules have been applied. Structural equality of
/// two DiffExpr values therefore decides algebraic equality within the free
/// part of the term algebra.
class DiffExpr {
public:
    DiffExpr() = default;

    static DiffExpr constant(const Rational& q);
    static DiffExpr atom(const Atom& a, int exp = 1);
    /// Build from raw terms, canonicalizing.
    static DiffExpr sum(std::vector<Term> terms);

    bool is_zero() const { return terms_.empty(); }
    /// Nonempty and free of atoms.
    bool is_constant() const;
    /// Defined only when is_zero() or is_constant().
    Rational constant_value() const;
    /// True iff the expression is a single term.
    bool is_monomial() const { return terms_.size() == 1; }

    const std::vector<Term>& terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }

    DiffExpr operator-() const;
    DiffExpr& operator+=(const DiffExpr& o);
    DiffExpr& operator-=(const DiffExpr& o);
    friend DiffExpr operator+(DiffExpr a, const DiffExpr& b) { return a += b; }
    friend DiffExpr operator-(DiffExpr a, const DiffExpr& b) { return a -= b; }
    friend DiffExpr operator*(const DiffExpr& a, const DiffExpr& b);

    DiffExpr scaled(const Rational& q) const;
    /// Integer power; negative exponents require a monomial base.
    DiffExpr pow(int k) const;
    /// Division by a monomial (single-term) expression.
    DiffExpr divided_by(const DiffExpr& divisor) const;

    friend int cmp(const DiffExpr& a, const DiffExpr& b);
    bool operator==(const DiffExpr& o) const { return cmp(*this, o) == 0; }

private:
    std::vector<Term> terms_;
};

/// Constructs a function atom: normalizes arguments, rejects nested function
/// atoms, and for rule-bearing definitions extracts perfect-power monomial
/// content from the argument (so s(l^2 w) becomes l * s(w)).
DiffExpr make_func(const std::shared_ptr<const FunctionDef>& def, std::vector<DiffExpr> args,
                   std::vector<int> deriv = {});

/// Replaces slot atoms in a rule expression by the actual arguments.
DiffExpr substitute_slots(const DiffExpr& rule, const std::vector<DiffExpr>& args);

/// Visits every atom in the expression, descending into function arguments.
void for_each_atom(const DiffExpr& e, const std::function<void(const Atom&)>& fn);

/// Distinct jet atoms of dependent `dep` occurring anywhere in e (inside
/// function arguments included); dep < 0 collects all dependents.
std::vector<Atom> jets_in(const DiffExpr& e, int dep = -1);

int max_jet_order(const DiffExpr& e);

/// True if any arbitrary function atom occurs anywhere in e.
bool contains_arbitrary_function(const DiffExpr& e);

/// Name of some arbitrary function atom in e, empty if none.
std::string first_arbitrary_function(const DiffExpr& e);

}  // namespace conslaw
