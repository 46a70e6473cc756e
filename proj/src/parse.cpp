#include "conslaw/parse.hpp"

#include <cctype>
#include <fstream>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <utility>

#include "json.hpp"

#include "conslaw/calculus.hpp"
#include "conslaw/errors.hpp"

namespace conslaw {
namespace {

// ---------------------------------------------------------------------------
// Lexing
// ---------------------------------------------------------------------------

enum class Tok {
    number,
    ident,
    plus,
    minus,
    star,
    slash,
    caret,
    lparen,
    rparen,
    comma,
    lbracket,
    rbracket,
    end,
};

struct Token {
    Tok kind = Tok::end;
    std::string text;       // identifier name or number digits
    std::string subscript;  // nonempty for name_{...}
    int line = 1;
    int col = 1;
};

std::string token_desc(const Token& t) {
    switch (t.kind) {
        case Tok::number:
            return "number '" + t.text + "'";
        case Tok::ident:
            return "identifier '" + t.text +
                   (t.subscript.empty() ? std::string() : "_{" + t.subscript + "}") + "'";
        case Tok::end:
            return "end of input";
        default:
            return "'" + t.text + "'";
    }
}

class Lexer {
public:
    explicit Lexer(std::string src) : src_(std::move(src)) {}

    Token next() {
        skip_space();
        Token t;
        t.line = line_;
        t.col = col_;
        if (pos_ >= src_.size()) {
            t.kind = Tok::end;
            return t;
        }
        char c = src_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            t.kind = Tok::number;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
                t.text.push_back(take());
            return t;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            t.kind = Tok::ident;
            while (pos_ < src_.size() &&
                   std::isalnum(static_cast<unsigned char>(src_[pos_])))
                t.text.push_back(take());
            if (pos_ < src_.size() && src_[pos_] == '_') {
                take();
                if (pos_ >= src_.size() || src_[pos_] != '{')
                    fail(t, "expected '{' after '_' (subscripts are written u_{tx})");
                take();
                while (pos_ < src_.size() && src_[pos_] != '}') {
                    char s = src_[pos_];
                    if (!std::isalnum(static_cast<unsigned char>(s)))
                        fail(t, std::string("invalid character '") + s + "' in subscript");
                    t.subscript.push_back(take());
                }
                if (pos_ >= src_.size()) fail(t, "unterminated subscript (missing '}')");
                take();  // '}'
                if (t.subscript.empty()) fail(t, "empty subscript");
            }
            return t;
        }
        switch (c) {
            case '+': t.kind = Tok::plus; break;
            case '-': t.kind = Tok::minus; break;
            case '*': t.kind = Tok::star; break;
            case '/': t.kind = Tok::slash; break;
            case '^': t.kind = Tok::caret; break;
            case '(': t.kind = Tok::lparen; break;
            case ')': t.kind = Tok::rparen; break;
            case ',': t.kind = Tok::comma; break;
            case '[': t.kind = Tok::lbracket; break;
            case ']': t.kind = Tok::rbracket; break;
            default:
                fail(t, std::string("unexpected character '") + c + "'");
        }
        t.text.push_back(take());
        return t;
    }

    [[noreturn]] static void fail(const Token& at, const std::string& msg) {
        throw ParseError("line " + std::to_string(at.line) + ", column " +
                         std::to_string(at.col) + ": " + msg);
    }

private:
    char take() {
        char c = src_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }

    void skip_space() {
        while (pos_ < src_.size() &&
               std::isspace(static_cast<unsigned char>(src_[pos_])))
            take();
    }

    std::string src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

// ---------------------------------------------------------------------------
// Expression parsing
// ---------------------------------------------------------------------------

/// Name resolution context: the declared symbols, plus (inside a function
/// definition) the formal arguments, which shadow global names and resolve
/// to slot atoms.
struct Scope {
    const SymbolTable* symbols = nullptr;
    const std::map<std::string, int>* slots = nullptr;  // formal name -> 0-based position
};

class ExprParser {
public:
    ExprParser(const std::string& src, Scope scope) : lex_(src), scope_(scope) {
        cur_ = lex_.next();
    }

    DiffExpr parse_full() {
        DiffExpr e = expr();
        if (cur_.kind != Tok::end)
            fail(cur_, "expected end of expression, found " + token_desc(cur_));
        return e;
    }

private:
    void advance() { cur_ = lex_.next(); }

    bool accept(Tok k) {
        if (cur_.kind != k) return false;
        advance();
        return true;
    }

    Token expect(Tok k, const char* what) {
        if (cur_.kind != k)
            fail(cur_, std::string("expected ") + what + ", found " + token_desc(cur_));
        Token t = cur_;
        advance();
        return t;
    }

    [[noreturn]] static void fail(const Token& at, const std::string& msg) {
        Lexer::fail(at, msg);
    }

    int small_int(const Token& t) {
        if (t.text.size() > 6) fail(t, "integer '" + t.text + "' is too large here");
        return std::stoi(t.text);
    }

    DiffExpr expr() {
        bool neg = accept(Tok::minus);
        DiffExpr e = term();
        if (neg) e = -e;
        for (;;) {
            if (accept(Tok::plus))
                e += term();
            else if (accept(Tok::minus))
                e -= term();
            else
                return e;
        }
    }

    DiffExpr term() {
        DiffExpr e = factor();
        for (;;) {
            if (accept(Tok::star)) {
                e = e * factor();
            } else if (cur_.kind == Tok::slash) {
                Token op = cur_;
                advance();
                DiffExpr d = factor();
                try {
                    e = e * d.pow(-1);
                } catch (const ValidationError& ve) {
                    fail(op, std::string("division requires a nonzero monomial divisor (") +
                                 ve.what() + ")");
                }
            } else {
                return e;
            }
        }
    }

    DiffExpr factor() {
        DiffExpr e = base();
        if (accept(Tok::caret)) {
            bool neg = accept(Tok::minus);
            Token n = expect(Tok::number, "an integer exponent");
            int k = small_int(n);
            try {
                return e.pow(neg ? -k : k);
            } catch (const ValidationError& ve) {
                fail(n, std::string("cannot raise this base to the power (") + ve.what() + ")");
            }
        }
        return e;
    }

    DiffExpr base() {
        if (cur_.kind == Tok::number) {
            Token n = cur_;
            advance();
            return DiffExpr::constant(Rational(Integer(n.text)));
        }
        if (accept(Tok::lparen)) {
            DiffExpr e = expr();
            expect(Tok::rparen, "')'");
            return e;
        }
        if (cur_.kind == Tok::ident) {
            Token t = cur_;
            advance();
            if (t.subscript.empty() && t.text == "diff" && cur_.kind == Tok::lparen)
                return diff_call(t);
            if (t.subscript.empty() && t.text == "D" && cur_.kind == Tok::lbracket)
                return d_form(t);
            return ident_base(t);
        }
        fail(cur_, "expected an expression, found " + token_desc(cur_));
    }

    /// Subscript like "xxt": greedy longest match against the declared
    /// independent-variable names.
    MultiIndex parse_subscript(const Token& t) {
        const auto& names = scope_.symbols->independents;
        MultiIndex index;
        std::size_t i = 0;
        while (i < t.subscript.size()) {
            int best = -1;
            std::size_t best_len = 0;
            for (std::size_t v = 0; v < names.size(); ++v) {
                const std::string& nm = names[v];
                if (nm.size() > best_len && t.subscript.compare(i, nm.size(), nm) == 0) {
                    best = static_cast<int>(v);
                    best_len = nm.size();
                }
            }
            if (best < 0)
                fail(t, "subscript of '" + t.text + "' contains '" + t.subscript.substr(i) +
                            "', which does not start with an independent variable");
            index = index.plus(best);
            i += best_len;
        }
        return index;
    }

    DiffExpr ident_base(const Token& t) {
        const SymbolTable& sym = *scope_.symbols;
        if (!t.subscript.empty()) {
            int dep = sym.dep_index(t.text);
            if (dep < 0)
                fail(t, "'" + t.text + "' is not a dependent variable; only dependent "
                        "variables take derivative subscripts");
            return DiffExpr::atom(Atom::jet(dep, parse_subscript(t)));
        }
        if (scope_.slots) {
            auto it = scope_.slots->find(t.text);
            if (it != scope_.slots->end())
                return DiffExpr::atom(Atom::slot(it->second + 1));
        }
        if (int i = sym.indep_index(t.text); i >= 0) return DiffExpr::atom(Atom::indep(i));
        if (int d = sym.dep_index(t.text); d >= 0)
            return DiffExpr::atom(Atom::jet(d, MultiIndex{}));
        if (auto def = sym.function(t.text)) {
            if (cur_.kind != Tok::lparen)
                fail(t, "function '" + t.text + "' must be applied to arguments");
            advance();
            std::vector<DiffExpr> args;
            args.push_back(expr());
            while (accept(Tok::comma)) args.push_back(expr());
            expect(Tok::rparen, "')'");
            try {
                return make_func(def, std::move(args));
            } catch (const ValidationError& ve) {
                fail(t, ve.what());
            }
        }
        fail(t, "undeclared identifier '" + t.text + "'");
    }

    DiffExpr diff_call(const Token& kw) {
        expect(Tok::lparen, "'(' after diff");
        DiffExpr e = expr();
        expect(Tok::comma, "',' and a differentiation variable");
        for (;;) {
            Token v = expect(Tok::ident, "a differentiation variable");
            e = differentiate(e, v);
            if (!accept(Tok::comma)) break;
        }
        expect(Tok::rparen, "')'");
        (void)kw;
        return e;
    }

    DiffExpr differentiate(const DiffExpr& e, const Token& v) {
        const SymbolTable& sym = *scope_.symbols;
        if (v.subscript.empty()) {
            if (int i = sym.indep_index(v.text); i >= 0) return total_derivative(e, i);
        }
        int dep = sym.dep_index(v.text);
        if (dep < 0)
            fail(v, "differentiation variable '" + v.text + "' is not declared");
        Atom target = Atom::jet(dep, v.subscript.empty() ? MultiIndex{} : parse_subscript(v));
        return func_arg_derivative(e, target, v);
    }

    /// diff(c(u), u): derivative of a single function atom with respect to
    /// the named argument. Arbitrary functions gain a derivative mark;
    /// defined functions differentiate through their slot rules.
    DiffExpr func_arg_derivative(const DiffExpr& e, const Atom& target, const Token& v) {
        if (!e.is_monomial() || e.terms()[0].factors.size() != 1 ||
            e.terms()[0].factors[0].second != 1 ||
            e.terms()[0].factors[0].first.kind() != AtomKind::func)
            fail(v, "differentiation with respect to '" + v.text +
                        "' needs a single function application on the left, like diff(c(u),u)");
        const Term& tm = e.terms()[0];
        const FuncData& data = tm.factors[0].first.fn();
        const DiffExpr target_expr = DiffExpr::atom(target);
        int slot = -1;
        for (std::size_t k = 0; k < data.args.size(); ++k) {
            if (data.args[k] == target_expr) {
                if (slot >= 0)
                    fail(v, "ambiguous derivative: '" + v.text +
                                "' appears as more than one argument of '" + data.def->name +
                                "'; use the D[...] form instead");
                slot = static_cast<int>(k);
            }
        }
        if (slot < 0)
            fail(v, "'" + v.text + "' is not an argument of '" + data.def->name + "' here");
        DiffExpr result;
        if (data.def->kind == FuncKind::arbitrary) {
            std::vector<int> deriv = data.deriv;
            if (deriv.empty()) deriv.assign(data.args.size(), 0);
            deriv[slot] += 1;
            result = make_func(data.def, data.args, std::move(deriv));
        } else {
            result = substitute_slots(data.def->slot_derivatives[slot], data.args);
        }
        return result.scaled(tm.coeff);
    }

    /// D[k1,...,kn](name)(args): an arbitrary-function atom with explicit
    /// per-argument derivative orders.
    DiffExpr d_form(const Token& kw) {
        expect(Tok::lbracket, "'['");
        std::vector<int> marks;
        marks.push_back(small_int(expect(Tok::number, "a derivative order")));
        while (accept(Tok::comma))
            marks.push_back(small_int(expect(Tok::number, "a derivative order")));
        expect(Tok::rbracket, "']'");
        expect(Tok::lparen, "'(' and a function name");
        Token name = expect(Tok::ident, "a function name");
        expect(Tok::rparen, "')'");
        auto def = scope_.symbols->function(name.text);
        if (!def) fail(name, "undeclared function '" + name.text + "'");
        if (def->kind != FuncKind::arbitrary)
            fail(name, "derivative marks D[...] apply to arbitrary functions only; '" +
                           name.text + "' is defined and can be differentiated with diff()");
        if (static_cast<int>(marks.size()) != def->arity)
            fail(kw, "D[...] needs one derivative order per argument of '" + name.text +
                         "' (" + std::to_string(def->arity) + " expected)");
        expect(Tok::lparen, "'(' and the argument list");
        std::vector<DiffExpr> args;
        args.push_back(expr());
        while (accept(Tok::comma)) args.push_back(expr());
        expect(Tok::rparen, "')'");
        try {
            return make_func(def, std::move(args), std::move(marks));
        } catch (const ValidationError& ve) {
            fail(name, ve.what());
        }
    }

    Lexer lex_;
    Token cur_;
    Scope scope_;
};

DiffExpr parse_in_scope(const std::string& src, Scope scope, const std::string& context) {
    try {
        return ExprParser(src, scope).parse_full();
    } catch (const ParseError& pe) {
        if (context.empty()) throw;
        throw ParseError(context + ": " + pe.what());
    }
}

// ---------------------------------------------------------------------------
// Problem documents: shared lowering
// ---------------------------------------------------------------------------

/// A function declaration lifted out of either document format, still as
/// source strings.
struct FunctionSource {
    std::string name;
    std::vector<std::string> formals;
    bool arbitrary = true;
    std::vector<std::string> derivatives;  // aligned with formals when defined
    int rule_power = 0;
    std::string rule_replacement;
    std::string where;  // context label for error messages
};

/// A whole problem document lifted to source strings, independent of the
/// concrete input syntax.
struct ProblemSource {
    std::vector<std::string> independents;
    std::vector<std::string> dependents;
    std::vector<FunctionSource> functions;
    std::vector<std::pair<std::string, std::string>> equations;  // lhs = rhs

    bool has_ansatz = false;
    std::vector<std::string> ansatz_atoms;
    std::optional<int> degree_total;
    std::optional<int> degree_each;
    std::vector<int> caps;  // per-atom caps, empty or aligned with atoms

    std::vector<std::vector<std::string>> multiplier_tuples;

    std::vector<std::string> methods;

    bool has_scaling = false;
    std::vector<std::pair<std::string, std::string>> scaling_weights;  // name = value

    bool has_base = false;
    std::vector<std::pair<std::string, std::string>> base_point;  // dep = expr
};

bool valid_ident(const std::string& s) {
    if (s.empty() || !std::isalpha(static_cast<unsigned char>(s[0]))) return false;
    for (char c : s)
        if (!std::isalnum(static_cast<unsigned char>(c))) return false;
    return true;
}

void check_name(const std::string& name, const std::string& role) {
    if (!valid_ident(name))
        throw ParseError("invalid " + role + " name '" + name +
                         "': names are letters followed by letters or digits");
    if (name == "diff" || name == "D")
        throw ParseError("the name '" + name + "' is reserved and cannot be declared");
}

Rational parse_rational_string(const std::string& s, const std::string& where) {
    std::string t;
    for (char c : s)
        if (!std::isspace(static_cast<unsigned char>(c))) t.push_back(c);
    try {
        auto slash = t.find('/');
        if (slash == std::string::npos) return Rational(Integer(t));
        Integer num(t.substr(0, slash));
        Integer den(t.substr(slash + 1));
        if (sgn(den) == 0) throw ParseError(where + ": zero denominator in '" + s + "'");
        Rational q(num, den);
        q.canonicalize();
        return q;
    } catch (const std::invalid_argument&) {
        throw ParseError(where + ": '" + s + "' is not a rational number (write 3, -2, or 1/2)");
    }
}

/// The single required lhs shape of an equation: one jet coordinate.
std::pair<int, MultiIndex> require_single_jet(const DiffExpr& e, const std::string& src,
                                              const std::string& where) {
    if (e.is_monomial() && e.terms()[0].factors.size() == 1) {
        const Term& t = e.terms()[0];
        const auto& [a, exp] = t.factors[0];
        if (a.kind() == AtomKind::jet && exp == 1 && t.coeff == Rational(1))
            return {a.index(), a.jet_index()};
    }
    throw ValidationError(where + ": left-hand side '" + src +
                          "' must be a single derivative of a dependent variable "
                          "(solved form, like u_{t} = ...)");
}

ScalingSymmetry build_scaling(const std::vector<std::pair<std::string, std::string>>& pairs,
                              const SymbolTable& sym) {
    ScalingSymmetry sc;
    sc.p.assign(sym.independents.size(), Rational(0));
    sc.q.assign(sym.dependents.size(), Rational(0));
    std::set<std::string> seen;
    for (const auto& [name, value] : pairs) {
        if (!seen.insert(name).second)
            throw ParseError("scaling weight for '" + name + "' is given twice");
        Rational w = parse_rational_string(value, "scaling weight for '" + name + "'");
        if (int i = sym.indep_index(name); i >= 0)
            sc.p[i] = w;
        else if (int d = sym.dep_index(name); d >= 0)
            sc.q[d] = w;
        else
            throw ParseError("scaling weight for undeclared variable '" + name + "'");
    }
    for (const auto& n : sym.independents)
        if (!seen.count(n))
            throw ParseError("scaling weights must cover every variable; '" + n +
                             "' is missing");
    for (const auto& n : sym.dependents)
        if (!seen.count(n))
            throw ParseError("scaling weights must cover every variable; '" + n +
                             "' is missing");
    return sc;
}

std::vector<DiffExpr> build_base(const std::vector<std::pair<std::string, std::string>>& pairs,
                                 const SymbolTable& sym) {
    std::vector<DiffExpr> base(sym.dependents.size());  // zero by default
    Scope scope{&sym, nullptr};
    std::set<std::string> seen;
    for (const auto& [name, src] : pairs) {
        int d = sym.dep_index(name);
        if (d < 0)
            throw ParseError("base point for '" + name +
                             "', which is not a dependent variable");
        if (!seen.insert(name).second)
            throw ParseError("base point for '" + name + "' is given twice");
        DiffExpr e = parse_in_scope(src, scope, "base point for '" + name + "'");
        for_each_atom(e, [&, nm = name](const Atom& a) {
            if (a.kind() != AtomKind::indep)
                throw ParseError("base point for '" + nm +
                                 "' must be an expression in the independent "
                                 "variables only");
        });
        base[d] = std::move(e);
    }
    return base;
}

/// The single-atom requirement shared by ansatz atoms and --deps entries.
Atom require_atom(const DiffExpr& e, const std::string& src) {
    if (e.is_monomial() && e.terms()[0].factors.size() == 1 &&
        e.terms()[0].factors[0].second == 1 && e.terms()[0].coeff == Rational(1))
        return e.terms()[0].factors[0].first;
    throw ParseError("ansatz atom '" + src +
                     "' must be a single variable, derivative, or function atom");
}

Problem build_problem(const ProblemSource& ps) {
    // Symbol declarations, with global uniqueness.
    SymbolTable sym;
    std::set<std::string> taken;
    auto declare = [&taken](const std::string& name, const std::string& role) {
        check_name(name, role);
        if (!taken.insert(name).second)
            throw ParseError("the name '" + name + "' is declared more than once");
    };
    if (ps.independents.empty())
        throw ParseError("a problem needs at least one independent variable");
    if (ps.dependents.empty())
        throw ParseError("a problem needs at least one dependent variable");
    for (const auto& n : ps.independents) {
        declare(n, "independent variable");
        sym.independents.push_back(n);
    }
    for (const auto& n : ps.dependents) {
        declare(n, "dependent variable");
        sym.dependents.push_back(n);
    }

    // Function symbols: register every definition first so derivative rules
    // may reference other functions, then fill in the rules.
    std::vector<std::shared_ptr<FunctionDef>> defs;
    for (const auto& fs : ps.functions) {
        declare(fs.name, "function");
        if (fs.formals.empty())
            throw ParseError(fs.where + ": function '" + fs.name +
                             "' must take at least one argument");
        std::set<std::string> formal_seen;
        for (const auto& f : fs.formals) {
            check_name(f, "function argument");
            if (!formal_seen.insert(f).second)
                throw ParseError(fs.where + ": duplicate argument name '" + f + "'");
        }
        auto def = std::make_shared<FunctionDef>();
        def->name = fs.name;
        def->arity = static_cast<int>(fs.formals.size());
        def->kind = fs.arbitrary ? FuncKind::arbitrary : FuncKind::defined;
        defs.push_back(def);
        sym.functions.push_back(def);
    }
    for (std::size_t fi = 0; fi < ps.functions.size(); ++fi) {
        const FunctionSource& fs = ps.functions[fi];
        FunctionDef& def = *defs[fi];
        if (fs.arbitrary) {
            if (!fs.derivatives.empty() || fs.rule_power != 0)
                throw ParseError(fs.where + ": arbitrary function '" + fs.name +
                                 "' cannot declare derivatives or algebraic rules");
            continue;
        }
        std::map<std::string, int> slots;
        for (std::size_t k = 0; k < fs.formals.size(); ++k)
            slots[fs.formals[k]] = static_cast<int>(k);
        Scope scope{&sym, &slots};
        // The algebraic rule first: derivative expressions referencing the
        // function should see the completed rule.
        if (fs.rule_power != 0) {
            if (fs.rule_power < 2)
                throw ParseError(fs.where + ": the rule power for '" + fs.name +
                                 "' must be at least 2");
            def.rule_power = fs.rule_power;
            def.rule_replacement.push_back(parse_in_scope(
                fs.rule_replacement, scope, fs.where + ", rule for '" + fs.name + "'"));
        }
        if (fs.derivatives.size() != fs.formals.size())
            throw ParseError(fs.where + ": defined function '" + fs.name +
                             "' needs exactly one derivative per argument (" +
                             std::to_string(fs.formals.size()) + " expected, " +
                             std::to_string(fs.derivatives.size()) + " given)");
        for (std::size_t k = 0; k < fs.derivatives.size(); ++k)
            def.slot_derivatives.push_back(
                parse_in_scope(fs.derivatives[k], scope,
                               fs.where + ", derivative of '" + fs.name + "' in '" +
                                   fs.formals[k] + "'"));
    }

    // Equations.
    Problem out;
    out.system.symbols = sym;
    if (ps.equations.empty()) throw ParseError("a problem needs at least one equation");
    Scope scope{&sym, nullptr};
    int eqno = 0;
    for (const auto& [lhs_src, rhs_src] : ps.equations) {
        ++eqno;
        std::string where = "equation " + std::to_string(eqno);
        DiffExpr lhs = parse_in_scope(lhs_src, scope, where);
        auto [dep, index] = require_single_jet(lhs, lhs_src, where);
        Equation eq;
        eq.lead_dep = dep;
        eq.lead_index = index;
        eq.rhs = parse_in_scope(rhs_src, scope, where);
        out.system.equations.push_back(std::move(eq));
    }
    require_solved_form(out.system);

    // Ansatz.
    if (ps.has_ansatz) {
        AnsatzSpec spec;
        if (ps.ansatz_atoms.empty())
            throw ParseError("the ansatz section needs at least one atom");
        for (const auto& a : ps.ansatz_atoms)
            spec.atoms.push_back(require_atom(parse_in_scope(a, scope, "ansatz atom '" + a + "'"), a));
        if (!ps.caps.empty()) {
            if (ps.caps.size() != spec.atoms.size())
                throw ParseError("the ansatz 'caps' list must give one cap per atom");
            for (std::size_t i = 0; i < ps.caps.size(); ++i)
                spec.atom_degree[static_cast<int>(i)] = ps.caps[i];
        }
        if (ps.degree_each) spec.degree_each = *ps.degree_each;
        if (ps.degree_total) spec.degree_total = *ps.degree_total;
        out.ansatz = std::move(spec);
    }

    // Declared multiplier tuples.
    for (std::size_t t = 0; t < ps.multiplier_tuples.size(); ++t) {
        const auto& tuple = ps.multiplier_tuples[t];
        std::string where = "multiplier tuple " + std::to_string(t + 1);
        if (tuple.size() != out.system.equations.size())
            throw ParseError(where + " has " + std::to_string(tuple.size()) +
                             " component(s); the system has " +
                             std::to_string(out.system.equations.size()) + " equation(s)");
        std::vector<DiffExpr> exprs;
        for (const auto& src : tuple) exprs.push_back(parse_in_scope(src, scope, where));
        out.multipliers.push_back(std::move(exprs));
    }

    // Methods.
    static const std::set<std::string> known_methods = {"direct",  "homotopy1", "homotopy2",
                                                       "scaling", "pair",      "all"};
    for (const auto& m : ps.methods) {
        if (!known_methods.count(m))
            throw ParseError("unknown method '" + m +
                             "' (expected direct, homotopy1, homotopy2, scaling, pair, or all)");
        out.methods.push_back(m);
    }

    if (ps.has_scaling) out.scaling = build_scaling(ps.scaling_weights, sym);
    if (ps.has_base) out.base_point = build_base(ps.base_point, sym);
    return out;
}

// ---------------------------------------------------------------------------
// Line-oriented document format
// ---------------------------------------------------------------------------

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

/// Splits on `sep` at parenthesis/bracket depth zero.
std::vector<std::string> split_top(const std::string& s, char sep) {
    std::vector<std::string> out;
    int depth = 0;
    std::string cur;
    for (char c : s) {
        if (c == '(' || c == '[' || c == '{') ++depth;
        if (c == ')' || c == ']' || c == '}') --depth;
        if (c == sep && depth == 0) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

std::vector<std::string> split_csv(const std::string& s, const std::string& where) {
    std::vector<std::string> out;
    for (const std::string& piece : split_top(s, ',')) {
        std::string t = trim(piece);
        if (t.empty()) throw ParseError(where + ": empty entry in comma-separated list");
        out.push_back(t);
    }
    return out;
}

std::pair<std::string, std::string> split_equation(const std::string& s,
                                                   const std::string& where) {
    int depth = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        char c = s[i];
        if (c == '(' || c == '[') ++depth;
        if (c == ')' || c == ']') --depth;
        if (c == '=' && depth == 0) {
            std::string lhs = trim(s.substr(0, i));
            std::string rhs = trim(s.substr(i + 1));
            if (lhs.empty() || rhs.empty())
                throw ParseError(where + ": expected 'lhs = rhs'");
            return {lhs, rhs};
        }
    }
    throw ParseError(where + ": expected '=' between left- and right-hand sides");
}

/// Splits "name=value,name=value" into pairs.
std::vector<std::pair<std::string, std::string>> split_assignments(const std::string& spec,
                                                                   const std::string& where) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& piece : split_csv(spec, where)) out.push_back(split_equation(piece, where));
    return out;
}

int parse_small_int(const std::string& s, const std::string& where) {
    std::string t = trim(s);
    bool neg = false;
    std::size_t i = 0;
    if (i < t.size() && (t[i] == '-' || t[i] == '+')) neg = t[i++] == '-';
    if (i >= t.size() || t.size() - i > 6)
        throw ParseError(where + ": '" + s + "' is not a small integer");
    int v = 0;
    for (; i < t.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(t[i])))
            throw ParseError(where + ": '" + s + "' is not an integer");
        v = v * 10 + (t[i] - '0');
    }
    return neg ? -v : v;
}

/// Parses `name(formals)` off the front of a declaration; returns the rest.
std::string parse_head(const std::string& s, const std::string& where, std::string& name,
                       std::vector<std::string>& formals) {
    auto open = s.find('(');
    if (open == std::string::npos)
        throw ParseError(where + ": expected 'name(arguments)'");
    name = trim(s.substr(0, open));
    auto close = s.find(')', open);
    if (close == std::string::npos) throw ParseError(where + ": missing ')'");
    formals = split_csv(s.substr(open + 1, close - open - 1), where);
    return trim(s.substr(close + 1));
}

/// Classifies a rule left-hand side inside a function declaration:
/// diff(name(formals), formal) or name(formals)^power.
struct RuleLhs {
    enum Kind { deriv_rule, power_rule } kind = deriv_rule;
    int slot = 0;   // derivative rule: which formal
    int power = 0;  // power rule: the exponent
};

RuleLhs classify_rule_lhs(const std::string& src, const std::string& name,
                          const std::vector<std::string>& formals, const std::string& where) {
    Lexer lex(src);
    std::vector<Token> toks;
    for (;;) {
        Token t = lex.next();
        toks.push_back(t);
        if (t.kind == Tok::end) break;
    }
    auto bad = [&]() -> RuleLhs {
        throw ParseError(where + ": a rule left-hand side must be diff(" + name +
                         "(arguments), argument) or " + name + "(arguments)^power, found '" +
                         src + "'");
    };
    std::size_t i = 0;
    auto is_ident = [&](const char* s) {
        return toks[i].kind == Tok::ident && toks[i].text == s && toks[i].subscript.empty();
    };
    auto eat = [&](Tok k) {
        if (toks[i].kind != k) bad();
        ++i;
    };
    bool is_diff = is_ident("diff");
    if (is_diff) {
        ++i;
        eat(Tok::lparen);
    }
    if (!is_ident(name.c_str())) bad();
    ++i;
    eat(Tok::lparen);
    for (std::size_t k = 0; k < formals.size(); ++k) {
        if (k > 0) eat(Tok::comma);
        if (!is_ident(formals[k].c_str())) bad();
        ++i;
    }
    eat(Tok::rparen);
    RuleLhs out;
    if (is_diff) {
        out.kind = RuleLhs::deriv_rule;
        eat(Tok::comma);
        out.slot = -1;
        for (std::size_t k = 0; k < formals.size(); ++k)
            if (is_ident(formals[k].c_str())) out.slot = static_cast<int>(k);
        if (out.slot < 0) bad();
        ++i;
        eat(Tok::rparen);
    } else {
        out.kind = RuleLhs::power_rule;
        eat(Tok::caret);
        if (toks[i].kind != Tok::number) bad();
        out.power = parse_small_int(toks[i].text, where);
        ++i;
    }
    if (toks[i].kind != Tok::end) bad();
    return out;
}

FunctionSource parse_function_decl(const std::string& value, const std::string& where) {
    FunctionSource fs;
    fs.where = where;
    std::vector<std::string> clauses = split_top(value, ';');
    std::string rest = parse_head(trim(clauses[0]), where, fs.name, fs.formals);
    if (rest == "arbitrary") {
        fs.arbitrary = true;
        if (clauses.size() > 1)
            throw ParseError(where + ": an arbitrary function declaration takes no rules");
        return fs;
    }
    if (rest != "defined")
        throw ParseError(where + ": expected 'arbitrary' or 'defined' after '" + fs.name +
                         "(...)', found '" + rest + "'");
    fs.arbitrary = false;
    fs.derivatives.assign(fs.formals.size(), std::string());
    std::vector<bool> have(fs.formals.size(), false);
    for (std::size_t c = 1; c < clauses.size(); ++c) {
        std::string clause = trim(clauses[c]);
        if (clause.empty()) continue;
        auto [lhs, rhs] = split_equation(clause, where);
        RuleLhs r = classify_rule_lhs(lhs, fs.name, fs.formals, where);
        if (r.kind == RuleLhs::deriv_rule) {
            if (have[r.slot])
                throw ParseError(where + ": derivative in '" + fs.formals[r.slot] +
                                 "' is given twice");
            have[r.slot] = true;
            fs.derivatives[r.slot] = rhs;
        } else {
            if (fs.rule_power != 0)
                throw ParseError(where + ": more than one power rule for '" + fs.name + "'");
            fs.rule_power = r.power;
            fs.rule_replacement = rhs;
        }
    }
    for (std::size_t k = 0; k < fs.formals.size(); ++k)
        if (!have[k])
            throw ParseError(where + ": defined function '" + fs.name +
                             "' is missing its derivative in '" + fs.formals[k] +
                             "' (declare diff(" + fs.name + "(...), " + fs.formals[k] +
                             ") = ...)");
    return fs;
}

ProblemSource dsl_source(const std::string& src) {
    ProblemSource ps;
    std::istringstream in(src);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = raw;
        if (auto hash = line.find('#'); hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        std::string where = "line " + std::to_string(lineno);
        auto colon = line.find(':');
        if (colon == std::string::npos)
            throw ParseError(where + ": expected 'section: content'");
        std::string key = trim(line.substr(0, colon));
        std::string value = trim(line.substr(colon + 1));
        if (value.empty()) throw ParseError(where + ": section '" + key + "' has no content");

        if (key == "independents" || key == "independent") {
            for (auto& n : split_csv(value, where)) ps.independents.push_back(n);
        } else if (key == "dependents" || key == "dependent") {
            for (auto& n : split_csv(value, where)) ps.dependents.push_back(n);
        } else if (key == "function") {
            ps.functions.push_back(parse_function_decl(value, where));
        } else if (key == "equation") {
            ps.equations.push_back(split_equation(value, where));
        } else if (key == "ansatz") {
            if (ps.has_ansatz) throw ParseError(where + ": ansatz given twice");
            ps.has_ansatz = true;
            std::vector<std::string> parts = split_top(value, ';');
            ps.ansatz_atoms = split_csv(parts[0], where);
            for (std::size_t p = 1; p < parts.size(); ++p) {
                std::string opt = trim(parts[p]);
                if (opt.rfind("degree_each", 0) == 0)
                    ps.degree_each = parse_small_int(opt.substr(11), where);
                else if (opt.rfind("degree", 0) == 0)
                    ps.degree_total = parse_small_int(opt.substr(6), where);
                else
                    throw ParseError(where + ": unknown ansatz option '" + opt +
                                     "' (expected 'degree N' or 'degree_each N')");
            }
        } else if (key == "multiplier") {
            ps.multiplier_tuples.push_back(split_csv(value, where));
        } else if (key == "method" || key == "methods") {
            for (auto& m : split_csv(value, where)) ps.methods.push_back(m);
        } else if (key == "scaling") {
            if (ps.has_scaling) throw ParseError(where + ": scaling given twice");
            ps.has_scaling = true;
            for (auto& pair : split_csv(value, where)) {
                auto [n, v] = split_equation(pair, where);
                ps.scaling_weights.emplace_back(n, v);
            }
        } else if (key == "base_point") {
            if (ps.has_base) throw ParseError(where + ": base_point given twice");
            ps.has_base = true;
            for (auto& pair : split_csv(value, where)) {
                auto [n, v] = split_equation(pair, where);
                ps.base_point.emplace_back(n, v);
            }
        } else {
            throw ParseError(where + ": unknown section '" + key +
                             "' (expected independents, dependents, function, equation, "
                             "ansatz, multiplier, method, scaling, or base_point)");
        }
    }
    return ps;
}

// ---------------------------------------------------------------------------
// JSON document format
// ---------------------------------------------------------------------------

using nlohmann::json;

[[noreturn]] void json_fail(const std::string& msg) { throw ParseError(msg); }

std::string need_string(const json& j, const std::string& where) {
    if (!j.is_string()) json_fail(where + " must be a string");
    return j.get<std::string>();
}

std::vector<std::string> need_string_array(const json& j, const std::string& where) {
    if (!j.is_array()) json_fail(where + " must be an array of strings");
    std::vector<std::string> out;
    for (const auto& el : j) out.push_back(need_string(el, where + " entries"));
    return out;
}

int need_int(const json& j, const std::string& where) {
    if (!j.is_number_integer()) json_fail(where + " must be an integer");
    return j.get<int>();
}

ProblemSource json_source(const std::string& src) {
    json doc;
    try {
        doc = json::parse(src);
    } catch (const json::parse_error& e) {
        json_fail(std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) json_fail("a JSON problem document must be an object");

    static const std::set<std::string> known = {"independents", "dependents", "functions",
                                               "equations",    "ansatz",     "multipliers",
                                               "methods",      "scaling",    "base_point"};
    for (const auto& [key, value] : doc.items()) {
        (void)value;
        if (!known.count(key))
            json_fail("unknown section '" + key +
                      "' (expected independents, dependents, functions, equations, ansatz, "
                      "multipliers, methods, scaling, or base_point)");
    }

    ProblemSource ps;
    if (!doc.contains("independents") || !doc.contains("dependents") ||
        !doc.contains("equations"))
        json_fail("a problem document needs 'independents', 'dependents', and 'equations'");
    ps.independents = need_string_array(doc["independents"], "'independents'");
    ps.dependents = need_string_array(doc["dependents"], "'dependents'");

    if (doc.contains("functions")) {
        if (!doc["functions"].is_array()) json_fail("'functions' must be an array");
        int n = 0;
        for (const auto& f : doc["functions"]) {
            ++n;
            std::string where = "function " + std::to_string(n);
            if (!f.is_object()) json_fail(where + " must be an object");
            for (const auto& [key, value] : f.items()) {
                (void)value;
                static const std::set<std::string> fkeys = {"name", "args", "kind",
                                                            "derivatives", "rule"};
                if (!fkeys.count(key)) json_fail(where + ": unknown key '" + key + "'");
            }
            FunctionSource fs;
            fs.where = where;
            if (!f.contains("name") || !f.contains("args") || !f.contains("kind"))
                json_fail(where + " needs 'name', 'args', and 'kind'");
            fs.name = need_string(f["name"], where + " 'name'");
            fs.formals = need_string_array(f["args"], where + " 'args'");
            std::string kind = need_string(f["kind"], where + " 'kind'");
            if (kind == "arbitrary") {
                fs.arbitrary = true;
                if (f.contains("derivatives") || f.contains("rule"))
                    json_fail(where + ": an arbitrary function takes no derivatives or rule");
            } else if (kind == "defined") {
                fs.arbitrary = false;
                if (!f.contains("derivatives"))
                    json_fail(where + ": a defined function needs 'derivatives'");
                fs.derivatives = need_string_array(f["derivatives"], where + " 'derivatives'");
                if (f.contains("rule")) {
                    const json& r = f["rule"];
                    if (!r.is_object() || !r.contains("power") || !r.contains("replacement"))
                        json_fail(where +
                                  ": 'rule' must be {\"power\": k, \"replacement\": \"...\"}");
                    fs.rule_power = need_int(r["power"], where + " rule 'power'");
                    fs.rule_replacement =
                        need_string(r["replacement"], where + " rule 'replacement'");
                }
            } else {
                json_fail(where + ": 'kind' must be \"arbitrary\" or \"defined\"");
            }
            ps.functions.push_back(std::move(fs));
        }
    }

    {
        int n = 0;
        if (!doc["equations"].is_array()) json_fail("'equations' must be an array");
        for (const auto& e : doc["equations"]) {
            ++n;
            std::string where = "equation " + std::to_string(n);
            ps.equations.push_back(split_equation(need_string(e, where), where));
        }
    }

    if (doc.contains("ansatz")) {
        const json& a = doc["ansatz"];
        if (!a.is_object() || !a.contains("atoms"))
            json_fail("'ansatz' must be an object with an 'atoms' array");
        for (const auto& [key, value] : a.items()) {
            (void)value;
            static const std::set<std::string> akeys = {"atoms", "degree", "degree_each",
                                                        "caps"};
            if (!akeys.count(key)) json_fail("'ansatz': unknown key '" + key + "'");
        }
        ps.has_ansatz = true;
        ps.ansatz_atoms = need_string_array(a["atoms"], "'ansatz' atoms");
        if (a.contains("degree")) ps.degree_total = need_int(a["degree"], "'ansatz' degree");
        if (a.contains("degree_each"))
            ps.degree_each = need_int(a["degree_each"], "'ansatz' degree_each");
        if (a.contains("caps")) {
            if (!a["caps"].is_array()) json_fail("'ansatz' caps must be an array of integers");
            for (const auto& c : a["caps"])
                ps.caps.push_back(need_int(c, "'ansatz' caps entries"));
        }
    }

    if (doc.contains("multipliers")) {
        const json& ms = doc["multipliers"];
        if (!ms.is_array()) json_fail("'multipliers' must be an array of tuples");
        int n = 0;
        for (const auto& tuple : ms) {
            ++n;
            std::string where = "multiplier tuple " + std::to_string(n);
            if (tuple.is_string())
                ps.multiplier_tuples.push_back({tuple.get<std::string>()});
            else
                ps.multiplier_tuples.push_back(need_string_array(tuple, where));
        }
    }

    if (doc.contains("methods")) {
        const json& m = doc["methods"];
        if (m.is_string())
            ps.methods.push_back(m.get<std::string>());
        else
            ps.methods = need_string_array(m, "'methods'");
    }

    if (doc.contains("scaling")) {
        const json& s = doc["scaling"];
        if (!s.is_object()) json_fail("'scaling' must be an object of name: weight pairs");
        ps.has_scaling = true;
        for (const auto& [name, value] : s.items()) {
            std::string text;
            if (value.is_number_integer())
                text = std::to_string(value.get<long long>());
            else if (value.is_string())
                text = value.get<std::string>();
            else
                json_fail("scaling weight for '" + name +
                          "' must be an integer or a rational string like \"1/2\"");
            ps.scaling_weights.emplace_back(name, text);
        }
    }

    if (doc.contains("base_point")) {
        const json& b = doc["base_point"];
        if (!b.is_object()) json_fail("'base_point' must be an object of dependent: expression");
        ps.has_base = true;
        for (const auto& [name, value] : b.items())
            ps.base_point.emplace_back(name, need_string(value, "base point for '" + name + "'"));
    }

    return ps;
}

}  // namespace

// ---------------------------------------------------------------------------
// Public entry points
// ---------------------------------------------------------------------------

DiffExpr parse_expression(const std::string& src, const SymbolTable& symbols) {
    return ExprParser(src, Scope{&symbols, nullptr}).parse_full();
}

Problem parse_problem(const std::string& src) {
    std::size_t i = 0;
    while (i < src.size() && std::isspace(static_cast<unsigned char>(src[i]))) ++i;
    if (i >= src.size()) throw ParseError("empty problem document");
    ProblemSource ps = src[i] == '{' ? json_source(src) : dsl_source(src);
    return build_problem(ps);
}

Problem parse_problem_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open problem file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_problem(buf.str());
}

ScalingSymmetry parse_weights_spec(const std::string& spec, const SymbolTable& symbols) {
    return build_scaling(split_assignments(spec, "weight list"), symbols);
}

std::vector<DiffExpr> parse_base_point_spec(const std::string& spec,
                                            const SymbolTable& symbols) {
    return build_base(split_assignments(spec, "base point list"), symbols);
}

std::vector<Atom> parse_atom_list(const std::string& spec, const SymbolTable& symbols) {
    std::vector<Atom> out;
    for (std::string piece : split_csv(spec, "atom list")) {
        // Accept the braceless shorthand u_xx for u_{xx}.
        if (auto us = piece.find('_');
            us != std::string::npos && piece.find('{') == std::string::npos)
            piece = piece.substr(0, us) + "_{" + piece.substr(us + 1) + "}";
        out.push_back(require_atom(parse_expression(piece, symbols), piece));
    }
    return out;
}

}  // namespace conslaw
