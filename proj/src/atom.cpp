#include "conslaw/atom.hpp"

#include "conslaw/expr.hpp"

namespace conslaw {

Atom Atom::indep(int var) {
    Atom a;
    a.kind_ = AtomKind::indep;
    a.index_ = var;
    return a;
}

Atom Atom::jet(int dep, MultiIndex index) {
    Atom a;
    a.kind_ = AtomKind::jet;
    a.index_ = dep;
    a.jet_index_ = std::move(index);
    return a;
}

Atom Atom::func(std::shared_ptr<const FuncData> data) {
    Atom a;
    a.kind_ = AtomKind::func;
    a.fn_ = std::move(data);
    return a;
}

Atom Atom::param(int id) {
    Atom a;
    a.kind_ = AtomKind::param;
    a.index_ = id;
    return a;
}

Atom Atom::slot(int pos) {
    Atom a;
    a.kind_ = AtomKind::slot;
    a.index_ = pos;
    return a;
}

namespace {

int cmp_int(int a, int b) { return a < b ? -1 : (a > b ? 1 : 0); }

}  // namespace

int cmp(const Atom& a, const Atom& b) {
    if (a.kind() != b.kind()) return static_cast<int>(a.kind()) < static_cast<int>(b.kind()) ? -1 : 1;
    switch (a.kind()) {
        case AtomKind::indep:
        case AtomKind::param:
        case AtomKind::slot:
            return cmp_int(a.index(), b.index());
        case AtomKind::jet: {
            if (int c = cmp_int(a.index(), b.index())) return c;
            auto o = a.jet_index() <=> b.jet_index();
            return o < 0 ? -1 : (o > 0 ? 1 : 0);
        }
        case AtomKind::func: {
            const FuncData& fa = a.fn();
            const FuncData& fb = b.fn();
            if (int c = fa.def->name.compare(fb.def->name)) return c < 0 ? -1 : 1;
            if (int c = cmp_int(static_cast<int>(fa.deriv.size()), static_cast<int>(fb.deriv.size())))
                return c;
            for (std::size_t i = 0; i < fa.deriv.size(); ++i)
                if (int c = cmp_int(fa.deriv[i], fb.deriv[i])) return c;
            if (int c = cmp_int(static_cast<int>(fa.args.size()), static_cast<int>(fb.args.size())))
                return c;
            for (std::size_t i = 0; i < fa.args.size(); ++i)
                if (int c = cmp(fa.args[i], fb.args[i])) return c;
            return 0;
        }
    }
    return 0;
}

}  // namespace conslaw
