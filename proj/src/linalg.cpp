#include "conslaw/linalg.hpp"

#include <deque>
#include <numeric>

#include "conslaw/errors.hpp"

namespace conslaw {

void LinearSystem::add_row(std::map<int, Rational> row, Rational b, std::string label) {
    for (auto it = row.begin(); it != row.end();)
        it = is_zero(it->second) ? row.erase(it) : std::next(it);
    rows.push_back(std::move(row));
    rhs.push_back(std::move(b));
    row_labels.push_back(std::move(label));
}

void normalize_primitive(std::vector<Rational>& v) {
    Integer lcm_den(1);
    for (const Rational& q : v) {
        if (is_zero(q)) continue;
        Integer den = q.get_den();
        mpz_lcm(lcm_den.get_mpz_t(), lcm_den.get_mpz_t(), den.get_mpz_t());
    }
    Integer gcd_num(0);
    for (Rational& q : v) {
        q *= Rational(lcm_den);
        Integer num = q.get_num();
        mpz_gcd(gcd_num.get_mpz_t(), gcd_num.get_mpz_t(), num.get_mpz_t());
    }
    if (gcd_num != 0)
        for (Rational& q : v) q /= Rational(gcd_num);
    for (const Rational& q : v) {
        if (is_zero(q)) continue;
        if (q < 0)
            for (Rational& w : v) w = -w;
        break;
    }
}

LinearSolution solve_linear(const LinearSystem& input, const std::vector<int>* col_order) {
    const int n = input.num_cols;
    LinearSolution sol;
    std::vector<std::map<int, Rational>> rows = input.rows;
    std::vector<Rational> rhs = input.rhs;
    auto label_of = [&](std::size_t r) {
        return r < input.row_labels.size() && !input.row_labels[r].empty()
                   ? input.row_labels[r]
                   : "row " + std::to_string(r + 1);
    };

    // Singleton propagation: a row with one unknown pins its value; cascade.
    std::vector<char> assigned(n, 0);
    std::vector<Rational> value(n, Rational(0));
    std::vector<std::vector<int>> adj(n);
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (auto& [c, q] : rows[r]) adj[c].push_back(static_cast<int>(r));
    std::deque<int> queue;
    std::vector<char> queued(rows.size(), 0), flagged(rows.size(), 0);
    auto flag_conflict = [&](int r) {
        sol.consistent = false;
        if (!flagged[r]) {
            flagged[r] = 1;
            sol.conflicts.push_back(label_of(r));
        }
    };
    auto enqueue_if_small = [&](int r) {
        if (!queued[r] && rows[r].size() <= 1) {
            queued[r] = 1;
            queue.push_back(r);
        }
    };
    for (std::size_t r = 0; r < rows.size(); ++r) enqueue_if_small(static_cast<int>(r));
    while (!queue.empty()) {
        int r = queue.front();
        queue.pop_front();
        queued[r] = 0;
        if (rows[r].empty()) {
            if (!is_zero(rhs[r])) flag_conflict(r);
            continue;
        }
        if (rows[r].size() != 1) continue;
        const int c = rows[r].begin()->first;
        Rational v = rhs[r] / rows[r].begin()->second;
        rows[r].clear();
        rhs[r] = 0;
        if (assigned[c]) {
            if (v != value[c]) flag_conflict(r);
            continue;
        }
        assigned[c] = 1;
        value[c] = v;
        for (int r2 : adj[c]) {
            auto it = rows[r2].find(c);
            if (it == rows[r2].end()) continue;
            rhs[r2] -= it->second * v;
            rows[r2].erase(it);
            enqueue_if_small(r2);
        }
        adj[c].clear();
    }

    // Reduced row echelon form on what survives. Pivot rule: columns in the
    // requested order, then smallest rational height, then lowest row.
    std::vector<int> order;
    if (col_order) {
        order = *col_order;
    } else {
        order.resize(n);
        std::iota(order.begin(), order.end(), 0);
    }
    std::vector<int> pivot_row_of(n, -1);
    std::vector<char> used(rows.size(), 0);
    std::vector<int> free_cols;
    for (int c : order) {
        if (c < 0 || c >= n) throw InternalError("column order is not a permutation");
        if (assigned[c]) continue;
        int best = -1;
        Integer best_height;
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (used[r] || rows[r].empty()) continue;
            auto it = rows[r].find(c);
            if (it == rows[r].end()) continue;
            Integer h = rat_height(it->second);
            if (best < 0 || h < best_height) {
                best = static_cast<int>(r);
                best_height = h;
            }
        }
        if (best < 0) {
            free_cols.push_back(c);
            continue;
        }
        used[best] = 1;
        pivot_row_of[c] = best;
        sol.pivot_cols.push_back(c);
        Rational lead = rows[best][c];
        for (auto& [cc, q] : rows[best]) q /= lead;
        rhs[best] /= lead;
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (static_cast<int>(r) == best) continue;
            auto it = rows[r].find(c);
            if (it == rows[r].end()) continue;
            Rational f = it->second;
            rows[r].erase(it);
            for (auto& [cc, q] : rows[best]) {
                if (cc == c) continue;
                auto jt = rows[r].find(cc);
                if (jt == rows[r].end()) {
                    Rational nv = -f * q;
                    if (!is_zero(nv)) rows[r].emplace(cc, std::move(nv));
                } else {
                    jt->second -= f * q;
                    if (is_zero(jt->second)) rows[r].erase(jt);
                }
            }
            rhs[r] -= f * rhs[best];
        }
    }
    for (std::size_t r = 0; r < rows.size(); ++r)
        if (!used[r] && rows[r].empty() && !is_zero(rhs[r])) flag_conflict(static_cast<int>(r));

    for (int f : free_cols) {
        std::vector<Rational> x(n, Rational(0));
        x[f] = 1;
        for (int c : sol.pivot_cols) {
            auto it = rows[pivot_row_of[c]].find(f);
            if (it != rows[pivot_row_of[c]].end()) x[c] = -it->second;
        }
        normalize_primitive(x);
        sol.nullspace.push_back(std::move(x));
    }
    if (sol.consistent) {
        sol.particular.assign(n, Rational(0));
        for (int c = 0; c < n; ++c)
            if (assigned[c]) sol.particular[c] = value[c];
        for (int c : sol.pivot_cols) sol.particular[c] = rhs[pivot_row_of[c]];
    }
    return sol;
}

}  // namespace conslaw
