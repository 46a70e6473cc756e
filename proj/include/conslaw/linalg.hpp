#pragma once
/// Exact sparse linear algebra over the rationals: singleton presolve,
/// reduced row echelon form with a deterministic pivot rule, nullspace
/// bases, and canonical particular solutions.

#include <map>
#include <string>
#include <vector>

#include "conslaw/rational.hpp"

namespace conslaw {

struct LinearSystem {
    int num_cols = 0;
    std::vector<std::map<int, Rational>> rows;
    std::vector<Rational> rhs;
    std::vector<std::string> row_labels;  ///< optional provenance, parallel to rows

    void add_row(std::map<int, Rational> row, Rational b = Rational(0), std::string label = {});
};

struct LinearSolution {
    bool consistent = true;
    std::vector<std::string> conflicts;  ///< labels/descriptions of violated rows
    std::vector<int> pivot_cols;
    /// Basis of the homogeneous solution space, each vector dense of length
    /// num_cols, integer-primitive with positive leading entry.
    std::vector<std::vector<Rational>> nullspace;
    /// One solution of the inhomogeneous system with every free unknown 0;
    /// empty when inconsistent.
    std::vector<Rational> particular;
};

/// Scale to coprime integers with the first nonzero entry positive.
void normalize_primitive(std::vector<Rational>& v);

/// Solves sys exactly. Columns are eliminated in the order given by
/// `col_order` (a permutation of 0..num_cols-1; nullptr means natural
/// order); within a column the pivot row minimizes rational height, ties
/// to the lowest row index. Free unknowns are the non-pivot columns; the
/// nullspace basis has one vector per free unknown, unit in that unknown.
LinearSolution solve_linear(const LinearSystem& sys, const std::vector<int>* col_order = nullptr);

}  // namespace conslaw
