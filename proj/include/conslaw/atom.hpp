#pragma once

#include <memory>

#include "conslaw/multi_index.hpp"

namespace conslaw {

struct FuncData;

enum class AtomKind {
    indep,  // independent variable x^i
    jet,    // jet coordinate: a dependent variable or one of its derivatives
    func,   // function atom applied to argument expressions
    param,  // scalar parameter (homotopy parameter, ansatz unknowns)
    slot,   // formal argument placeholder, valid only inside function rules
};

/// Reserved parameter id for the homotopy parameter.
inline constexpr int kLambdaParam = -1;

/// One multiplicative symbol. Atoms are the variables of the term algebra;
/// two atoms compare equal exactly when they denote the same symbol.
class Atom {
public:
    static Atom indep(int var);
    static Atom jet(int dep, MultiIndex index);
    static Atom func(std::shared_ptr<const FuncData> data);
    static Atom param(int id);
    static Atom slot(int pos);

    AtomKind kind() const { return kind_; }
    int index() const { return index_; }
    const MultiIndex& jet_index() const { return jet_index_; }
    const FuncData& fn() const { return *fn_; }
    const std::shared_ptr<const FuncData>& fn_ptr() const { return fn_; }

    bool is_jet_of(int dep) const { return kind_ == AtomKind::jet && index_ == dep; }

private:
    AtomKind kind_ = AtomKind::indep;
    int index_ = 0;
    MultiIndex jet_index_;
    std::shared_ptr<const FuncData> fn_;
};

/// Three-way comparison defining the canonical atom order; implemented in
/// atom.cpp because function atoms compare through their argument expressions.
int cmp(const Atom& a, const Atom& b);

inline bool operator==(const Atom& a, const Atom& b) { return cmp(a, b) == 0; }
inline bool operator<(const Atom& a, const Atom& b) { return cmp(a, b) < 0; }

}  // namespace conslaw
