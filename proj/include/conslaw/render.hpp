#pragma once
/// Deterministic rendering of expressions, in the input grammar and in LaTeX.

#include <string>

#include "conslaw/system.hpp"

namespace conslaw {

/// Renders e in the expression grammar. The output re-parses to exactly e:
/// parse_expression(render_expr(e, sym), sym) == e. Jets use subscript form
/// (u_{tx}) when the independent-variable names form a prefix-free set and
/// the spelled-out diff(u, t, x) form otherwise; derivative-marked
/// arbitrary-function atoms use the D[...] form.
std::string render_expr(const DiffExpr& e, const SymbolTable& symbols);

/// LaTeX form of the same expression (display only; not re-parsed).
std::string render_latex(const DiffExpr& e, const SymbolTable& symbols);

}  // namespace conslaw
