#include "conslaw/multipliers.hpp"

#include <map>

#include "conslaw/calculus.hpp"
#include "conslaw/errors.hpp"

namespace conslaw {

int MultiplierAnsatz::offset(std::size_t sigma) const {
    int off = 0;
    for (std::size_t s = 0; s < sigma && s < per_equation.size(); ++s)
        off += static_cast<int>(per_equation[s].monomials.size());
    return off;
}

int MultiplierAnsatz::num_unknowns() const { return offset(per_equation.size()); }

DiffExpr MultiplierAnsatz::lambda(std::size_t sigma) const {
    DiffExpr l;
    const int off = offset(sigma);
    const auto& mons = per_equation.at(sigma).monomials;
    for (std::size_t a = 0; a < mons.size(); ++a)
        l += DiffExpr::atom(Atom::param(off + static_cast<int>(a))) * mons[a];
    return l;
}

MultiplierAnsatz replicate_ansatz(const Ansatz& basis, std::size_t num_equations) {
    MultiplierAnsatz ma;
    ma.per_equation.assign(num_equations, basis);
    return ma;
}

std::vector<DiffExpr> determining_equations(const PDESystem& sys, const MultiplierAnsatz& ansatz) {
    if (ansatz.per_equation.size() != sys.equations.size())
        throw ValidationError("ansatz provides " + std::to_string(ansatz.per_equation.size()) +
                              " bases for " + std::to_string(sys.equations.size()) + " equations");
    DiffExpr f;
    for (std::size_t s = 0; s < sys.equations.size(); ++s)
        f += ansatz.lambda(s) * sys.equations[s].residual();
    std::vector<DiffExpr> eqs;
    for (std::size_t j = 0; j < sys.symbols.dependents.size(); ++j)
        eqs.push_back(euler(f, static_cast<int>(j)));
    return eqs;
}

LinearSystem split_linear_system(const std::vector<DiffExpr>& eqs, int num_unknowns,
                                 std::vector<std::string>* assumptions,
                                 const std::function<std::string(const Term&)>& label) {
    LinearSystem out;
    out.num_cols = num_unknowns;
    struct TermLess {
        bool operator()(const Term& a, const Term& b) const { return cmp(a, b) < 0; }
    };
    for (const DiffExpr& raw : eqs) {
        DiffExpr eq = clear_ruled_denominators(raw, assumptions);
        std::map<Term, std::pair<std::map<int, Rational>, Rational>, TermLess> rows;
        for (const Term& t : eq.terms()) {
            Term ctx;
            ctx.coeff = 1;
            int pid = -1;
            for (auto& [a, k] : t.factors) {
                if (a.kind() == AtomKind::param && a.index() != kLambdaParam) {
                    if (pid >= 0 || k != 1)
                        throw ValidationError(
                            "expression is not linear in the unknown coefficients");
                    pid = a.index();
                } else {
                    ctx.factors.push_back({a, k});
                }
            }
            auto& row = rows[ctx];
            if (pid < 0)
                row.second -= t.coeff;
            else
                row.first[pid] += t.coeff;
        }
        for (auto& [ctx, row] : rows) {
            for (auto it = row.first.begin(); it != row.first.end();)
                it = is_zero(it->second) ? row.first.erase(it) : std::next(it);
            if (row.first.empty() && is_zero(row.second)) continue;
            out.add_row(std::move(row.first), row.second, label ? label(ctx) : std::string());
        }
    }
    return out;
}

std::vector<MultiplierSet> solve_multipliers(const PDESystem& sys, const MultiplierAnsatz& ansatz,
                                             std::vector<std::string>* assumptions) {
    require_solved_form(sys);
    std::vector<DiffExpr> eqs = determining_equations(sys, ansatz);
    LinearSystem ls = split_linear_system(eqs, ansatz.num_unknowns(), assumptions);
    LinearSolution sol = solve_linear(ls);
    std::vector<MultiplierSet> out;
    for (const auto& v : sol.nullspace) {
        MultiplierSet ms;
        ms.coefficients = v;
        DiffExpr f;
        for (std::size_t s = 0; s < sys.equations.size(); ++s) {
            DiffExpr l;
            const int off = ansatz.offset(s);
            const auto& mons = ansatz.per_equation[s].monomials;
            for (std::size_t a = 0; a < mons.size(); ++a)
                if (!is_zero(v[off + a])) l += mons[a].scaled(v[off + a]);
            f += l * sys.equations[s].residual();
            ms.multipliers.push_back(std::move(l));
        }
        for (std::size_t j = 0; j < sys.symbols.dependents.size(); ++j)
            if (!is_zero_modulo_rules(euler(f, static_cast<int>(j)), assumptions))
                throw InternalError("solved multiplier set fails the Euler-operator recheck");
        out.push_back(std::move(ms));
    }
    return out;
}

}  // namespace conslaw
