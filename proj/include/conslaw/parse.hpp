#pragma once
/// Expression grammar and problem-document parsing.
///
/// Expression grammar:
///   expr   := ['-'] term (('+'|'-') term)*
///   term   := factor (('*'|'/') factor)*
///   factor := base ('^' ['-'] integer)?
///   base   := integer | '(' expr ')' | name | name '_{' subscript '}'
///           | name '(' expr (',' expr)* ')'
///           | 'diff(' expr (',' name)+ ')'
///           | 'D[' integer (',' integer)* ']' '(' name ')' '(' args ')'
/// Subscripts are sequences of independent-variable names (u_{xxt});
/// diff() accepts independent variables (total derivatives) and dependent
/// variables (derivative of a function atom with respect to its argument);
/// the D[...] form spells out derivative orders of a multi-argument
/// function atom per slot. Division requires a monomial divisor.
///
/// Problem documents come in two equivalent formats, distinguished by the
/// first nonblank byte: a JSON object ('{') or a line-oriented text format
/// ("key: value" lines, '#' comments). Sections: independents, dependents,
/// function (one per declaration), equation (one per line), ansatz,
/// multiplier (an explicit tuple per line), scaling, base_point, method.

#include <optional>
#include <string>
#include <vector>

#include "conslaw/flux.hpp"
#include "conslaw/system.hpp"

namespace conslaw {

/// A parsed problem document: the PDE system plus optional job settings.
struct Problem {
    PDESystem system;
    std::optional<AnsatzSpec> ansatz;                ///< multiplier ansatz
    /// Explicitly declared multiplier tuples (one expression per equation);
    /// used instead of ansatz solving, after an exact determining-equation
    /// check.
    std::vector<std::vector<DiffExpr>> multipliers;
    std::vector<std::string> methods;                ///< requested flux methods
    std::optional<ScalingSymmetry> scaling;          ///< declared scaling weights
    std::optional<std::vector<DiffExpr>> base_point; ///< aligned with dependents
};

/// Parses one expression over the declared symbols; throws ParseError with
/// line/column on grammar violations or undeclared identifiers.
DiffExpr parse_expression(const std::string& src, const SymbolTable& symbols);

/// Parses a complete problem document (format auto-detected) and validates
/// the system's solved form.
Problem parse_problem(const std::string& src);

/// parse_problem over the contents of a file.
Problem parse_problem_file(const std::string& path);

/// Parses a "x=1,t=3,u=-2" weight list (rationals like 1/2 allowed); every
/// declared variable must be covered.
ScalingSymmetry parse_weights_spec(const std::string& spec, const SymbolTable& symbols);

/// Parses a "u=x,v=0" base-point list; omitted dependents default to zero,
/// and values may use independent variables only.
std::vector<DiffExpr> parse_base_point_spec(const std::string& spec, const SymbolTable& symbols);

/// Parses a comma-separated atom list like "t,x,u,u_x,u_xx"; the braceless
/// subscript shorthand u_xx is accepted here.
std::vector<Atom> parse_atom_list(const std::string& spec, const SymbolTable& symbols);

}  // namespace conslaw
