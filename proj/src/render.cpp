#include "conslaw/render.hpp"

#include <sstream>

#include "conslaw/errors.hpp"

namespace conslaw {
namespace {

bool prefix_free(const std::vector<std::string>& names) {
    for (std::size_t a = 0; a < names.size(); ++a)
        for (std::size_t b = 0; b < names.size(); ++b)
            if (a != b && names[b].compare(0, names[a].size(), names[a]) == 0) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Grammar form
// ---------------------------------------------------------------------------

struct TextRenderer {
    const SymbolTable& sym;
    bool subscripts_ok;

    explicit TextRenderer(const SymbolTable& s)
        : sym(s), subscripts_ok(prefix_free(s.independents)) {}

    std::string expr(const DiffExpr& e) const {
        if (e.is_zero()) return "0";
        std::string out;
        bool first = true;
        for (const Term& t : e.terms()) {
            bool neg = sgn(t.coeff) < 0;
            if (first)
                out += neg ? "-" : "";
            else
                out += neg ? " - " : " + ";
            out += term(t);
            first = false;
        }
        return out;
    }

    std::string term(const Term& t) const {
        Rational c = abs(t.coeff);
        std::vector<std::string> pieces;
        if (t.factors.empty() || c != Rational(1)) pieces.push_back(coefficient(c));
        for (const auto& [a, k] : t.factors) {
            std::string p = atom(a);
            if (k != 1) p += "^" + std::to_string(k);
            pieces.push_back(std::move(p));
        }
        std::string out;
        for (std::size_t i = 0; i < pieces.size(); ++i) {
            if (i) out += "*";
            out += pieces[i];
        }
        return out;
    }

    std::string coefficient(const Rational& c) const {
        std::string s = rat_str(c);
        return s.find('/') == std::string::npos ? s : "(" + s + ")";
    }

    std::string atom(const Atom& a) const {
        switch (a.kind()) {
            case AtomKind::indep:
                return sym.independents.at(a.index());
            case AtomKind::jet:
                return jet(a);
            case AtomKind::func:
                return func(a.fn());
            case AtomKind::param:
            case AtomKind::slot:
                throw InternalError(
                    "cannot render an internal parameter or slot atom as input text");
        }
        throw InternalError("unknown atom kind in renderer");
    }

    std::string jet(const Atom& a) const {
        const std::string& dep = sym.dependents.at(a.index());
        if (a.jet_index().empty()) return dep;
        if (subscripts_ok) {
            std::string out = dep + "_{";
            for (const auto& [var, count] : a.jet_index().counts())
                for (int c = 0; c < count; ++c) out += sym.independents.at(var);
            return out + "}";
        }
        std::string out = "diff(" + dep;
        for (const auto& [var, count] : a.jet_index().counts())
            for (int c = 0; c < count; ++c) out += "," + sym.independents.at(var);
        return out + ")";
    }

    std::string func(const FuncData& f) const {
        bool marked = false;
        for (int d : f.deriv) marked |= d != 0;
        std::string args;
        for (std::size_t i = 0; i < f.args.size(); ++i) {
            if (i) args += ",";
            args += expr(f.args[i]);
        }
        if (!marked) return f.def->name + "(" + args + ")";
        std::string marks;
        for (std::size_t i = 0; i < f.deriv.size(); ++i) {
            if (i) marks += ",";
            marks += std::to_string(f.deriv[i]);
        }
        return "D[" + marks + "](" + f.def->name + ")(" + args + ")";
    }
};

// ---------------------------------------------------------------------------
// LaTeX form
// ---------------------------------------------------------------------------

struct LatexRenderer {
    const SymbolTable& sym;

    explicit LatexRenderer(const SymbolTable& s) : sym(s) {}

    std::string expr(const DiffExpr& e) const {
        if (e.is_zero()) return "0";
        std::string out;
        bool first = true;
        for (const Term& t : e.terms()) {
            bool neg = sgn(t.coeff) < 0;
            if (first)
                out += neg ? "-" : "";
            else
                out += neg ? " - " : " + ";
            out += term(t);
            first = false;
        }
        return out;
    }

    std::string term(const Term& t) const {
        Rational c = abs(t.coeff);
        std::string out;
        if (t.factors.empty() || c != Rational(1)) out += coefficient(c);
        for (const auto& [a, k] : t.factors) {
            out += atom(a);
            if (k != 1) out += "^{" + std::to_string(k) + "}";
        }
        return out;
    }

    std::string coefficient(const Rational& c) const {
        Integer num = c.get_num(), den = c.get_den();
        if (den == 1) return num.get_str();
        return "\\tfrac{" + num.get_str() + "}{" + den.get_str() + "}";
    }

    std::string atom(const Atom& a) const {
        switch (a.kind()) {
            case AtomKind::indep:
                return sym.independents.at(a.index());
            case AtomKind::jet: {
                const std::string& dep = sym.dependents.at(a.index());
                if (a.jet_index().empty()) return dep;
                std::string out = dep + "_{";
                for (const auto& [var, count] : a.jet_index().counts())
                    for (int c = 0; c < count; ++c) out += sym.independents.at(var);
                return out + "}";
            }
            case AtomKind::func:
                return func(a.fn());
            case AtomKind::param:
            case AtomKind::slot:
                throw InternalError(
                    "cannot render an internal parameter or slot atom as LaTeX");
        }
        throw InternalError("unknown atom kind in renderer");
    }

    std::string func(const FuncData& f) const {
        std::string args;
        for (std::size_t i = 0; i < f.args.size(); ++i) {
            if (i) args += ", ";
            args += expr(f.args[i]);
        }
        int total = 0;
        for (int d : f.deriv) total += d;
        std::string head = f.def->name;
        if (total > 0) {
            if (f.deriv.size() == 1 && total <= 3)
                head += std::string(total, '\'');
            else {
                std::string marks;
                for (std::size_t i = 0; i < f.deriv.size(); ++i) {
                    if (i) marks += ",";
                    marks += std::to_string(f.deriv[i]);
                }
                head += "^{(" + marks + ")}";
            }
        }
        return head + "(" + args + ")";
    }
};

}  // namespace

std::string render_expr(const DiffExpr& e, const SymbolTable& symbols) {
    return TextRenderer(symbols).expr(e);
}

std::string render_latex(const DiffExpr& e, const SymbolTable& symbols) {
    return LatexRenderer(symbols).expr(e);
}

}  // namespace conslaw
