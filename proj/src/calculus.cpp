#include "conslaw/calculus.hpp"

#include <algorithm>

#include "conslaw/errors.hpp"

namespace conslaw {

namespace {

Rational binom(int n, int k) {
    if (k < 0 || k > n) return Rational(0);
    Rational r(1);
    for (int i = 0; i < k; ++i) r *= rat(n - i, i + 1);
    return r;
}

/// d(atom)/d(slot s), as an expression: a derivative-marked atom for
/// arbitrary functions, the declared rule for defined ones.
DiffExpr slot_derivative(const Atom& a, int s) {
    const FuncData& f = a.fn();
    if (f.def->kind == FuncKind::arbitrary) {
        std::vector<int> deriv = f.deriv;
        deriv[s] += 1;
        return make_func(f.def, f.args, std::move(deriv));
    }
    return substitute_slots(f.def->slot_derivatives.at(s), f.args);
}

/// Term without factor i, as an expression.
DiffExpr cofactor(const Term& t, std::size_t skip) {
    Term r;
    r.coeff = t.coeff;
    for (std::size_t j = 0; j < t.factors.size(); ++j)
        if (j != skip) r.factors.push_back(t.factors[j]);
    return DiffExpr::sum({r});
}

/// Appends the terms of `e` to a batch destined for one final DiffExpr::sum.
/// Accumulating per-term results this way keeps the cost linear in the output
/// size; repeated operator+= would re-canonicalize the whole sum each time.
void absorb(std::vector<Term>& out, const DiffExpr& e) {
    out.insert(out.end(), e.terms().begin(), e.terms().end());
}

}  // namespace

DiffExpr map_atoms(const DiffExpr& e,
                   const std::function<std::optional<DiffExpr>(const Atom&)>& image) {
    std::vector<Term> collected;
    for (const Term& t : e.terms()) {
        DiffExpr acc = DiffExpr::constant(t.coeff);
        for (auto& [a, k] : t.factors) {
            if (auto img = image(a)) {
                acc = acc * img->pow(k);
            } else if (a.kind() == AtomKind::func) {
                std::vector<DiffExpr> args;
                args.reserve(a.fn().args.size());
                for (const DiffExpr& arg : a.fn().args) args.push_back(map_atoms(arg, image));
                acc = acc * make_func(a.fn().def, std::move(args), a.fn().deriv).pow(k);
            } else {
                acc = acc * DiffExpr::atom(a, k);
            }
        }
        absorb(collected, acc);
    }
    return DiffExpr::sum(std::move(collected));
}

DiffExpr partial_atom(const DiffExpr& e, const Atom& x) {
    std::vector<Term> collected;
    for (const Term& t : e.terms()) {
        for (std::size_t i = 0; i < t.factors.size(); ++i) {
            const auto& [a, k] = t.factors[i];
            DiffExpr da;
            if (cmp(a, x) == 0) {
                da = DiffExpr::constant(1);
            } else if (a.kind() == AtomKind::func) {
                for (std::size_t s = 0; s < a.fn().args.size(); ++s) {
                    DiffExpr darg = partial_atom(a.fn().args[s], x);
                    if (!darg.is_zero()) da += slot_derivative(a, static_cast<int>(s)) * darg;
                }
            }
            if (da.is_zero()) continue;
            absorb(collected, cofactor(t, i) * DiffExpr::atom(a, k - 1).scaled(Rational(k)) * da);
        }
    }
    return DiffExpr::sum(std::move(collected));
}

DiffExpr total_derivative(const DiffExpr& e, int var) {
    std::vector<Term> collected;
    for (const Term& t : e.terms()) {
        for (std::size_t i = 0; i < t.factors.size(); ++i) {
            const auto& [a, k] = t.factors[i];
            DiffExpr da;
            switch (a.kind()) {
                case AtomKind::indep:
                    if (a.index() == var) da = DiffExpr::constant(1);
                    break;
                case AtomKind::jet:
                    da = DiffExpr::atom(Atom::jet(a.index(), a.jet_index().plus(var)));
                    break;
                case AtomKind::func:
                    for (std::size_t s = 0; s < a.fn().args.size(); ++s) {
                        DiffExpr darg = total_derivative(a.fn().args[s], var);
                        if (!darg.is_zero()) da += slot_derivative(a, static_cast<int>(s)) * darg;
                    }
                    break;
                case AtomKind::param:
                    break;
                case AtomKind::slot:
                    throw InternalError("total derivative applied to an uninstantiated rule");
            }
            if (da.is_zero()) continue;
            absorb(collected, cofactor(t, i) * DiffExpr::atom(a, k - 1).scaled(Rational(k)) * da);
        }
    }
    return DiffExpr::sum(std::move(collected));
}

DiffExpr total_derivative(const DiffExpr& e, const MultiIndex& index) {
    DiffExpr out = e;
    for (auto& [v, c] : index.counts())
        for (int i = 0; i < c; ++i) out = total_derivative(out, v);
    return out;
}

DiffExpr substitute_dependents(const DiffExpr& e, const std::map<int, DiffExpr>& repl) {
    std::map<std::pair<int, MultiIndex>, DiffExpr> cache;
    std::function<std::optional<DiffExpr>(const Atom&)> image =
        [&](const Atom& a) -> std::optional<DiffExpr> {
        if (a.kind() != AtomKind::jet) return std::nullopt;
        auto it = repl.find(a.index());
        if (it == repl.end()) return std::nullopt;
        auto key = std::make_pair(a.index(), a.jet_index());
        auto hit = cache.find(key);
        if (hit != cache.end()) return hit->second;
        DiffExpr value = total_derivative(it->second, a.jet_index());
        cache.emplace(std::move(key), value);
        return value;
    };
    return map_atoms(e, image);
}

DiffExpr euler(const DiffExpr& e, int dep) {
    std::vector<Term> collected;
    for (const Atom& jet : jets_in(e, dep)) {
        DiffExpr p = partial_jet(e, dep, jet.jet_index());
        if (p.is_zero()) continue;
        int sign = jet.jet_index().order() % 2 == 0 ? 1 : -1;
        absorb(collected, total_derivative(p, jet.jet_index()).scaled(Rational(sign)));
    }
    return DiffExpr::sum(std::move(collected));
}

DiffExpr higher_euler(const DiffExpr& e, int dep, const MultiIndex& s) {
    std::vector<Term> collected;
    for (const Atom& jet : jets_in(e, dep)) {
        const MultiIndex& K = jet.jet_index();
        if (!K.contains(s)) continue;
        DiffExpr p = partial_jet(e, dep, K);
        if (p.is_zero()) continue;
        Rational c(1);
        for (auto& [v, k] : K.counts()) c *= binom(k, s.count(v));
        MultiIndex rest = K.minus(s);
        int sign = rest.order() % 2 == 0 ? 1 : -1;
        absorb(collected, total_derivative(p, rest).scaled(c * sign));
    }
    return DiffExpr::sum(std::move(collected));
}

DiffExpr apply_prolonged_symmetry(const DiffExpr& e, const std::vector<DiffExpr>& eta) {
    std::vector<Term> collected;
    for (std::size_t mu = 0; mu < eta.size(); ++mu) {
        for (const Atom& jet : jets_in(e, static_cast<int>(mu))) {
            DiffExpr p = partial_jet(e, static_cast<int>(mu), jet.jet_index());
            if (p.is_zero()) continue;
            absorb(collected, total_derivative(eta[mu], jet.jet_index()) * p);
        }
    }
    return DiffExpr::sum(std::move(collected));
}

Rational term_scaling_degree(const Term& t) {
    Rational d(0);
    for (auto& [a, k] : t.factors) {
        Rational ad(0);
        switch (a.kind()) {
            case AtomKind::indep:
            case AtomKind::param:
            case AtomKind::slot:
                break;
            case AtomKind::jet:
                ad = 1;
                break;
            case AtomKind::func: {
                bool args_have_jets = false;
                for (const DiffExpr& arg : a.fn().args)
                    if (!jets_in(arg).empty()) args_have_jets = true;
                if (!args_have_jets) break;
                const FunctionDef& def = *a.fn().def;
                if (def.kind == FuncKind::arbitrary || !def.has_algebraic_rule())
                    throw ArbitraryFunctionError(
                        "function atom " + def.name +
                        " has no scaling law; the homotopy integral cannot be formed");
                DiffExpr repl = substitute_slots(def.rule_replacement.front(), a.fn().args);
                std::optional<Rational> common;
                for (const Term& rt : repl.terms()) {
                    Rational rd = term_scaling_degree(rt);
                    if (!common)
                        common = rd;
                    else if (*common != rd)
                        throw ArbitraryFunctionError(
                            "argument of " + def.name +
                            " is not scaling-homogeneous; the homotopy integral cannot be formed");
                }
                ad = common.value_or(Rational(0)) / Rational(def.rule_power);
                break;
            }
        }
        d += ad * Rational(k);
    }
    return d;
}

DiffExpr clear_ruled_denominators(DiffExpr e, std::vector<std::string>* assumptions) {
    for (int round = 0; round < 64; ++round) {
        std::optional<Atom> worst;
        int min_exp = 0;
        for (const Term& t : e.terms())
            for (auto& [a, k] : t.factors)
                if (k < 0 && a.kind() == AtomKind::func && a.fn().def->has_algebraic_rule() &&
                    k < min_exp) {
                    min_exp = k;
                    worst = a;
                }
        if (!worst) return e;
        if (assumptions) {
            std::string note = worst->fn().def->name + "(...) != 0";
            if (std::find(assumptions->begin(), assumptions->end(), note) == assumptions->end())
                assumptions->push_back(note);
        }
        // The factor is appended term by term: canonicalizing atom^(-min_exp)
        // on its own would fire the rewrite rule first and the negative
        // powers would survive the product.
        std::vector<Term> scaled;
        for (const Term& t : e.terms()) {
            Term r = t;
            r.factors.emplace_back(*worst, -min_exp);
            scaled.push_back(std::move(r));
        }
        e = DiffExpr::sum(std::move(scaled));
    }
    throw InternalError("denominator clearing did not terminate");
}

bool is_zero_modulo_rules(DiffExpr e, std::vector<std::string>* assumptions) {
    return clear_ruled_denominators(std::move(e), assumptions).is_zero();
}

}  // namespace conslaw
