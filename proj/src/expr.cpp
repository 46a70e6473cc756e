#include "conslaw/expr.hpp"

#include <algorithm>

#include "conslaw/errors.hpp"

namespace conslaw {

namespace {

/// Guards against nonterminating rewrite rules such as f^2 -> f.
struct DepthGuard {
    static thread_local int depth;
    DepthGuard() {
        if (++depth > 256) throw ValidationError("rewrite rules do not terminate");
    }
    ~DepthGuard() { --depth; }
};
thread_local int DepthGuard::depth = 0;

bool factor_less(const std::pair<Atom, int>& a, const std::pair<Atom, int>& b) {
    return cmp(a.first, b.first) < 0;
}

int cmp_monomial(const std::vector<std::pair<Atom, int>>& a,
                 const std::vector<std::pair<Atom, int>>& b) {
    std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (int c = cmp(a[i].first, b[i].first)) return c;
        if (a[i].second != b[i].second) return a[i].second < b[i].second ? -1 : 1;
    }
    if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
    return 0;
}

/// True when the rule of `def` is the root form f(arg)^p -> arg, which is the
/// only rule shape that licenses pulling monomial content out of the argument.
bool is_root_rule(const FunctionDef& def) {
    if (!def.has_algebraic_rule() || def.arity != 1) return false;
    const DiffExpr& r = def.rule_replacement.front();
    if (!r.is_monomial()) return false;
    const Term& t = r.terms().front();
    return t.coeff == 1 && t.factors.size() == 1 && t.factors[0].second == 1 &&
           t.factors[0].first.kind() == AtomKind::slot && t.factors[0].first.index() == 1;
}

}  // namespace

int cmp(const Term& a, const Term& b) {
    if (int c = cmp_monomial(a.factors, b.factors)) return c;
    return ::cmp(a.coeff, b.coeff);
}

DiffExpr DiffExpr::constant(const Rational& q) {
    DiffExpr e;
    if (!conslaw::is_zero(q)) e.terms_.push_back(Term{q, {}});
    return e;
}

DiffExpr DiffExpr::atom(const Atom& a, int exp) {
    if (exp == 0) return constant(1);
    return sum({Term{Rational(1), {{a, exp}}}});
}

bool DiffExpr::is_constant() const {
    return terms_.size() == 1 && terms_.front().factors.empty();
}

Rational DiffExpr::constant_value() const {
    if (is_zero()) return Rational(0);
    if (!is_constant()) throw InternalError("constant_value on a nonconstant expression");
    return terms_.front().coeff;
}

namespace {

void expand_term(const Term& t, std::vector<Term>& out);

/// Multiplies every term of `acc` by every term of `e`, expanding rules.
void cross_multiply(std::vector<Term>& acc, const DiffExpr& e) {
    std::vector<Term> next;
    for (const Term& a : acc) {
        for (const Term& b : e.terms()) {
            Term prod;
            prod.coeff = a.coeff * b.coeff;
            prod.factors = a.factors;
            prod.factors.insert(prod.factors.end(), b.factors.begin(), b.factors.end());
            expand_term(prod, next);
        }
    }
    acc = std::move(next);
}

/// Canonicalizes one raw term: sorts and merges factors, then applies the
/// power rewrite of any defined function whose merged exponent reaches the
/// rule power. Rule application can expand the term into a sum.
void expand_term(const Term& t, std::vector<Term>& out) {
    if (conslaw::is_zero(t.coeff)) return;
    Term w;
    w.coeff = t.coeff;
    w.factors = t.factors;
    std::stable_sort(w.factors.begin(), w.factors.end(), factor_less);
    std::vector<std::pair<Atom, int>> merged;
    for (auto& f : w.factors) {
        if (f.second == 0) continue;
        if (!merged.empty() && cmp(merged.back().first, f.first) == 0)
            merged.back().second += f.second;
        else
            merged.push_back(f);
    }
    std::erase_if(merged, [](auto& f) { return f.second == 0; });

    for (std::size_t i = 0; i < merged.size(); ++i) {
        const Atom& a = merged[i].first;
        int e = merged[i].second;
        if (a.kind() != AtomKind::func) continue;
        const FunctionDef& def = *a.fn().def;
        if (!def.has_algebraic_rule() || e < def.rule_power) continue;

        DepthGuard guard;
        int q = e / def.rule_power;
        int r = e % def.rule_power;
        DiffExpr repl = substitute_slots(def.rule_replacement.front(), a.fn().args);
        Term rest;
        rest.coeff = w.coeff;
        for (std::size_t j = 0; j < merged.size(); ++j) {
            if (j == i) continue;
            rest.factors.push_back(merged[j]);
        }
        if (r != 0) rest.factors.emplace_back(a, r);
        std::vector<Term> acc{rest};
        cross_multiply(acc, repl.pow(q));
        for (auto& u : acc) out.push_back(std::move(u));
        return;
    }

    w.factors = std::move(merged);
    out.push_back(std::move(w));
}

}  // namespace

DiffExpr DiffExpr::sum(std::vector<Term> terms) {
    std::vector<Term> flat;
    for (const Term& t : terms) expand_term(t, flat);
    std::sort(flat.begin(), flat.end(),
              [](const Term& a, const Term& b) { return cmp_monomial(a.factors, b.factors) < 0; });
    DiffExpr e;
    for (auto& t : flat) {
        if (!e.terms_.empty() && cmp_monomial(e.terms_.back().factors, t.factors) == 0) {
            e.terms_.back().coeff += t.coeff;
            if (conslaw::is_zero(e.terms_.back().coeff)) e.terms_.pop_back();
        } else if (!conslaw::is_zero(t.coeff)) {
            e.terms_.push_back(std::move(t));
        }
    }
    return e;
}

DiffExpr DiffExpr::operator-() const { return scaled(Rational(-1)); }

DiffExpr& DiffExpr::operator+=(const DiffExpr& o) {
    std::vector<Term> all = terms_;
    all.insert(all.end(), o.terms_.begin(), o.terms_.end());
    *this = sum(std::move(all));
    return *this;
}

DiffExpr& DiffExpr::operator-=(const DiffExpr& o) {
    *this += -o;
    return *this;
}

DiffExpr operator*(const DiffExpr& a, const DiffExpr& b) {
    std::vector<Term> out;
    out.reserve(a.terms_.size() * b.terms_.size());
    for (const Term& x : a.terms_)
        for (const Term& y : b.terms_) {
            Term p;
            p.coeff = x.coeff * y.coeff;
            p.factors = x.factors;
            p.factors.insert(p.factors.end(), y.factors.begin(), y.factors.end());
            out.push_back(std::move(p));
        }
    return DiffExpr::sum(std::move(out));
}

DiffExpr DiffExpr::scaled(const Rational& q) const {
    if (conslaw::is_zero(q)) return DiffExpr{};
    DiffExpr e = *this;
    for (auto& t : e.terms_) t.coeff *= q;
    return e;
}

DiffExpr DiffExpr::pow(int k) const {
    if (k == 0) return constant(1);
    if (is_zero()) {
        if (k < 0) throw ValidationError("division by zero");
        return DiffExpr{};
    }
    if (is_monomial()) {
        const Term& t = terms_.front();
        Term p;
        if (k < 0 && conslaw::is_zero(t.coeff)) throw ValidationError("division by zero");
        p.coeff = 1;
        Rational base = t.coeff;
        int n = k < 0 ? -k : k;
        for (int i = 0; i < n; ++i) p.coeff *= base;
        if (k < 0) p.coeff = Rational(1) / p.coeff;
        for (auto& [a, e] : t.factors) p.factors.emplace_back(a, e * k);
        return sum({std::move(p)});
    }
    if (k < 0) throw ValidationError("cannot invert a sum of terms");
    DiffExpr acc = constant(1);
    for (int i = 0; i < k; ++i) acc = acc * *this;
    return acc;
}

DiffExpr DiffExpr::divided_by(const DiffExpr& divisor) const {
    return *this * divisor.pow(-1);
}

int cmp(const DiffExpr& a, const DiffExpr& b) {
    std::size_t n = std::min(a.terms().size(), b.terms().size());
    for (std::size_t i = 0; i < n; ++i)
        if (int c = cmp(a.terms()[i], b.terms()[i])) return c;
    if (a.terms().size() != b.terms().size()) return a.terms().size() < b.terms().size() ? -1 : 1;
    return 0;
}

DiffExpr make_func(const std::shared_ptr<const FunctionDef>& def, std::vector<DiffExpr> args,
                   std::vector<int> deriv) {
    if (static_cast<int>(args.size()) != def->arity)
        throw ValidationError("function " + def->name + " expects " + std::to_string(def->arity) +
                              " argument(s)");
    deriv.resize(def->arity, 0);
    bool marked = false;
    for (int d : deriv) {
        if (d < 0) throw InternalError("negative derivative mark");
        if (d > 0) marked = true;
    }
    if (marked && def->kind == FuncKind::defined)
        throw InternalError("defined function " + def->name + " cannot carry derivative marks");
    for (const DiffExpr& a : args) {
        bool nested = false;
        for_each_atom(a, [&](const Atom& at) {
            if (at.kind() == AtomKind::func) nested = true;
        });
        if (nested)
            throw ValidationError("nested function atoms are unsupported (argument of " +
                                  def->name + ")");
    }

    Term prefix;
    prefix.coeff = 1;
    if (is_root_rule(*def)) {
        DiffExpr& arg = args.front();
        if (arg.is_zero()) return DiffExpr{};
        // Pull perfect p-th power monomial content out of the argument:
        // f(B^p * w) = B * f(w) for a declared p-th root f.
        int p = def->rule_power;
        std::vector<std::pair<Atom, int>> content;
        bool first = true;
        for (const Term& t : arg.terms()) {
            if (first) {
                content = t.factors;
                first = false;
                continue;
            }
            std::vector<std::pair<Atom, int>> next;
            for (auto& [a, e] : content) {
                int other = 0;
                bool present = false;
                for (auto& [b, f] : t.factors)
                    if (cmp(a, b) == 0) {
                        other = f;
                        present = true;
                        break;
                    }
                int m = std::min(e, present ? other : 0);
                if (m != 0) next.emplace_back(a, m);
            }
            // Atoms appearing with negative exponent only in later terms.
            for (auto& [b, f] : t.factors) {
                if (f >= 0) continue;
                bool seen = false;
                for (auto& [a, e] : next)
                    if (cmp(a, b) == 0) seen = true;
                for (auto& [a, e] : content)
                    if (cmp(a, b) == 0) seen = true;
                if (!seen) next.emplace_back(b, f);
            }
            content = std::move(next);
        }
        Term shrink;
        shrink.coeff = 1;
        for (auto& [a, e] : content) {
            int b = floordiv(static_cast<long>(e), p);
            if (b != 0) {
                prefix.factors.emplace_back(a, b);
                shrink.factors.emplace_back(a, -b * p);
            }
        }
        if (!shrink.factors.empty()) arg = arg * DiffExpr::sum({shrink});
    }

    auto data = std::make_shared<FuncData>();
    data->def = def;
    data->args = std::move(args);
    data->deriv = std::move(deriv);
    prefix.factors.emplace_back(Atom::func(std::move(data)), 1);
    return DiffExpr::sum({std::move(prefix)});
}

DiffExpr substitute_slots(const DiffExpr& rule, const std::vector<DiffExpr>& args) {
    std::vector<Term> collected;
    for (const Term& t : rule.terms()) {
        DiffExpr acc = DiffExpr::constant(t.coeff);
        for (auto& [a, e] : t.factors) {
            DiffExpr piece;
            switch (a.kind()) {
                case AtomKind::slot: {
                    int k = a.index();
                    if (k < 1 || k > static_cast<int>(args.size()))
                        throw InternalError("slot index out of range in rule");
                    piece = args[k - 1];
                    break;
                }
                case AtomKind::func: {
                    std::vector<DiffExpr> sub;
                    sub.reserve(a.fn().args.size());
                    for (const DiffExpr& x : a.fn().args) sub.push_back(substitute_slots(x, args));
                    piece = make_func(a.fn().def, std::move(sub), a.fn().deriv);
                    break;
                }
                default:
                    piece = DiffExpr::atom(a);
                    break;
            }
            acc = acc * piece.pow(e);
        }
        collected.insert(collected.end(), acc.terms().begin(), acc.terms().end());
    }
    return DiffExpr::sum(std::move(collected));
}

void for_each_atom(const DiffExpr& e, const std::function<void(const Atom&)>& fn) {
    for (const Term& t : e.terms())
        for (auto& [a, exp] : t.factors) {
            fn(a);
            if (a.kind() == AtomKind::func)
                for (const DiffExpr& arg : a.fn().args) for_each_atom(arg, fn);
        }
}

std::vector<Atom> jets_in(const DiffExpr& e, int dep) {
    std::vector<Atom> out;
    for_each_atom(e, [&](const Atom& a) {
        if (a.kind() != AtomKind::jet) return;
        if (dep >= 0 && a.index() != dep) return;
        for (const Atom& seen : out)
            if (cmp(seen, a) == 0) return;
        out.push_back(a);
    });
    std::sort(out.begin(), out.end(), [](const Atom& a, const Atom& b) { return cmp(a, b) < 0; });
    return out;
}

int max_jet_order(const DiffExpr& e) {
    int m = 0;
    for_each_atom(e, [&](const Atom& a) {
        if (a.kind() == AtomKind::jet) m = std::max(m, a.jet_index().order());
    });
    return m;
}

bool contains_arbitrary_function(const DiffExpr& e) {
    return !first_arbitrary_function(e).empty();
}

std::string first_arbitrary_function(const DiffExpr& e) {
    std::string found;
    for_each_atom(e, [&](const Atom& a) {
        if (found.empty() && a.kind() == AtomKind::func && a.fn().def->kind == FuncKind::arbitrary)
            found = a.fn().def->name;
    });
    return found;
}

}  // namespace conslaw
