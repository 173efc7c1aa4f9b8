#pragma once

#include <algorithm>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "lepage/lepage_forms.hpp"

namespace lepage {

enum class OutputFormat { text, latex, sexpr };
enum class OutputBasis { contact, coordinate };

namespace detail {

[[nodiscard]] inline std::string rational_text(const Rational& c) {
    std::ostringstream os;
    os << numerator(c);
    if (denominator(c) != 1) os << "/" << denominator(c);
    return os.str();
}

[[nodiscard]] inline std::string rational_latex(const Rational& c) {
    if (denominator(c) == 1) return rational_text(c);
    std::ostringstream os;
    bool neg = c < 0;
    os << (neg ? "-" : "") << "\\frac{" << boost::multiprecision::abs(numerator(c)) << "}{"
       << denominator(c) << "}";
    return os.str();
}

[[nodiscard]] inline std::string scalar_text(const ScalarExpr& e, OutputFormat fmt);

[[nodiscard]] inline std::string atom_text(const SpacePtr& sp, Atom a, OutputFormat fmt) {
    const bool latex = fmt == OutputFormat::latex;
    switch (a.kind()) {
        case AtomKind::base:
            return latex ? "x^{" + std::to_string(a.base_index()) + "}"
                         : "x" + std::to_string(a.base_index());
        case AtomKind::field: {
            MultiIndex j = a.index();
            if (latex) {
                std::string s = sp->has_field_labels()
                                    ? "{" + sp->field_label(a.sigma()) + "}"
                                    : "y^{" + std::to_string(a.sigma()) + "}";
                if (j.size() > 0) s += "_{" + j.to_digits() + "}";
                return s;
            }
            std::string head = sp->field_label(a.sigma());
            return j.size() > 0 ? head + "_" + j.to_digits() : head;
        }
        case AtomKind::opaque:
            return sp->opaque_name(a.opaque_id());
        case AtomKind::inverse: {
            ScalarExpr defn = ScalarExpr::from_terms(sp, sp->entry(a.reg_id()).defn);
            if (latex) return "\\left(" + scalar_text(defn, fmt) + "\\right)^{-1}";
            return "inv(" + scalar_text(defn, fmt) + ")";
        }
        case AtomKind::sqrt_of: {
            ScalarExpr defn = ScalarExpr::from_terms(sp, sp->entry(a.reg_id()).defn);
            if (latex) return "\\sqrt{" + scalar_text(defn, fmt) + "}";
            return "sqrt(" + scalar_text(defn, fmt) + ")";
        }
    }
    return "?";
}

/// One term without its sign; the magnitude of the coefficient is taken.
[[nodiscard]] inline std::string term_text(const SpacePtr& sp, const Term& t, OutputFormat fmt) {
    const bool latex = fmt == OutputFormat::latex;
    Rational mag = t.coeff < 0 ? Rational(-t.coeff) : t.coeff;
    std::vector<std::string> pieces;
    if (mag != 1 || t.mono.empty())
        pieces.push_back(latex ? rational_latex(mag) : rational_text(mag));
    for (const AtomPow& f : t.mono) {
        std::string p;
        if (latex && f.atom.kind() == AtomKind::inverse) {
            // fold the power into the exponent instead of stacking superscripts
            ScalarExpr defn = ScalarExpr::from_terms(sp, sp->entry(f.atom.reg_id()).defn);
            p = "\\left(" + scalar_text(defn, fmt) + "\\right)^{-" + std::to_string(f.pow) +
                "}";
        } else {
            p = atom_text(sp, f.atom, fmt);
            if (f.pow > 1)
                p += latex ? "^{" + std::to_string(f.pow) + "}" : "^" + std::to_string(f.pow);
        }
        pieces.push_back(std::move(p));
    }
    std::string out;
    for (size_t k = 0; k < pieces.size(); ++k) {
        if (k) out += latex ? " " : "*";
        out += pieces[k];
    }
    return out;
}

[[nodiscard]] inline std::string scalar_text(const ScalarExpr& e, OutputFormat fmt) {
    if (e.is_zero()) return "0";
    std::string out;
    bool first = true;
    for (const Term& t : e.terms()) {
        if (first)
            out += t.coeff < 0 ? "-" : "";
        else
            out += t.coeff < 0 ? " - " : " + ";
        out += term_text(e.space(), t, fmt);
        first = false;
    }
    return out;
}

[[nodiscard]] inline std::string scalar_sexpr(const ScalarExpr& e);

[[nodiscard]] inline std::string atom_sexpr(const SpacePtr& sp, Atom a) {
    switch (a.kind()) {
        case AtomKind::base:
            return "(x " + std::to_string(a.base_index()) + ")";
        case AtomKind::field: {
            std::string s = "(y " + std::to_string(a.sigma());
            MultiIndex j = a.index();
            for (int k = 0; k < j.size(); ++k) s += " " + std::to_string(j.at(k));
            return s + ")";
        }
        case AtomKind::opaque:
            return "(opaque " + sp->opaque_name(a.opaque_id()) + ")";
        case AtomKind::inverse:
            return "(inv " + scalar_sexpr(ScalarExpr::from_terms(sp, sp->entry(a.reg_id()).defn)) +
                   ")";
        case AtomKind::sqrt_of:
            return "(sqrt " + scalar_sexpr(ScalarExpr::from_terms(sp, sp->entry(a.reg_id()).defn)) +
                   ")";
    }
    return "?";
}

[[nodiscard]] inline std::string scalar_sexpr(const ScalarExpr& e) {
    std::string out = "(+";
    for (const Term& t : e.terms()) {
        out += " (* " + rational_text(t.coeff);
        for (const AtomPow& f : t.mono) {
            std::string a = atom_sexpr(e.space(), f.atom);
            out += f.pow > 1 ? " (^ " + a + " " + std::to_string(f.pow) + ")" : " " + a;
        }
        out += ")";
    }
    return out + ")";
}

/// Presentation covector: either dx^i or, in the contact basis, w^sigma_J; in
/// the coordinate basis dy^sigma_J is carried with contact = false.
struct PCov {
    bool is_dx;
    bool contact;
    int idx;       // base index when is_dx
    int sigma;     // field index otherwise
    MultiIndex j;  // derivative index otherwise

    friend bool operator<(const PCov& a, const PCov& b) {
        if (a.is_dx != b.is_dx) return !a.is_dx;  // field covectors first
        if (a.is_dx) return a.idx < b.idx;
        if (a.sigma != b.sigma) return a.sigma < b.sigma;
        return a.j.raw() < b.j.raw();
    }
    friend bool operator==(const PCov& a, const PCov& b) {
        return a.is_dx == b.is_dx && a.idx == b.idx && a.sigma == b.sigma && a.j == b.j;
    }
};

using PWedge = std::vector<PCov>;

struct PWedgeLess {
    bool operator()(const PWedge& a, const PWedge& b) const {
        size_t ca = 0, cb = 0;
        for (const PCov& c : a) ca += !c.is_dx;
        for (const PCov& c : b) cb += !c.is_dx;
        if (ca != cb) return ca < cb;  // fewer contact factors first
        if (a.size() != b.size()) return a.size() < b.size();
        for (size_t k = 0; k < a.size(); ++k) {
            if (a[k] == b[k]) continue;
            return a[k] < b[k];
        }
        return false;
    }
};

/// Sorts a presentation wedge, tracking the permutation sign; returns false
/// when a factor repeats (the term vanishes).
[[nodiscard]] inline bool sort_pwedge(PWedge& w, int& sign) {
    sign = 1;
    for (size_t i = 1; i < w.size(); ++i)
        for (size_t k = i; k > 0 && w[k] < w[k - 1]; --k) {
            std::swap(w[k], w[k - 1]);
            sign = -sign;
        }
    for (size_t i = 1; i < w.size(); ++i)
        if (w[i] == w[i - 1]) return false;
    return true;
}

/// Expands a stored form over the presentation basis: contact basis rewrites
/// dy^sigma_J = w^sigma_J + y^sigma_{Js} dx^s, coordinate basis keeps dy.
[[nodiscard]] inline std::map<PWedge, ScalarExpr, PWedgeLess> presentation_terms(
    const Form& f, OutputBasis basis) {
    const SpacePtr& sp = f.space();
    std::map<PWedge, ScalarExpr, PWedgeLess> out;
    auto add = [&](PWedge w, const ScalarExpr& c) {
        int sign = 0;
        if (!sort_pwedge(w, sign)) return;
        ScalarExpr inc = sign < 0 ? -c : c;
        auto it = out.find(w);
        if (it == out.end()) {
            out.emplace(std::move(w), std::move(inc));
        } else {
            it->second = it->second + inc;
            if (it->second.is_zero()) out.erase(it);
        }
    };
    for (const auto& [w, c] : f.terms()) {
        // each dy factor splits into a contact part and n horizontal parts
        std::vector<std::vector<std::pair<PCov, ScalarExpr>>> options;
        for (const Covector& cv : w) {
            std::vector<std::pair<PCov, ScalarExpr>> opt;
            if (!cv.is_dy()) {
                opt.push_back({PCov{true, false, cv.base_index(), 0, MultiIndex{}},
                               ScalarExpr::one(sp)});
            } else if (basis == OutputBasis::coordinate) {
                opt.push_back({PCov{false, false, 0, cv.sigma(), cv.index()},
                               ScalarExpr::one(sp)});
            } else {
                if (cv.index().size() >= sp->order_cap())
                    throw PreconditionError(
                        "contact-basis printing needs jet order below the order cap");
                opt.push_back({PCov{false, true, 0, cv.sigma(), cv.index()},
                               ScalarExpr::one(sp)});
                for (int s = 1; s <= sp->n(); ++s)
                    opt.push_back({PCov{true, false, s, 0, MultiIndex{}},
                                   y_coord(sp, cv.sigma(), cv.index().with(s))});
            }
            options.push_back(std::move(opt));
        }
        PWedge cur(w.size(), PCov{});
        auto rec = [&](auto&& self, size_t k, ScalarExpr coef) -> void {
            if (k == options.size()) {
                add(cur, coef);
                return;
            }
            for (const auto& [pc, factor] : options[k]) {
                ScalarExpr next = coef * factor;
                if (next.is_zero()) continue;
                cur[k] = pc;
                self(self, k + 1, std::move(next));
            }
        };
        rec(rec, 0, c);
    }
    return out;
}

[[nodiscard]] inline std::string pcov_text(const PCov& c, OutputFormat fmt) {
    const bool latex = fmt == OutputFormat::latex;
    if (c.is_dx)
        return latex ? "dx^{" + std::to_string(c.idx) + "}" : "dx" + std::to_string(c.idx);
    std::string head;
    if (latex) {
        head = (c.contact ? "\\omega^{" : "dy^{") + std::to_string(c.sigma) + "}";
        if (c.j.size() > 0) head += "_{" + c.j.to_digits() + "}";
        return head;
    }
    head = (c.contact ? "w" : "dy") + std::to_string(c.sigma);
    if (c.j.size() > 0) head += "_" + c.j.to_digits();
    return head;
}

[[nodiscard]] inline std::string pcov_sexpr(const PCov& c) {
    if (c.is_dx) return "(dx " + std::to_string(c.idx) + ")";
    std::string s = (c.contact ? "(w " : "(dy ") + std::to_string(c.sigma);
    for (int k = 0; k < c.j.size(); ++k) s += " " + std::to_string(c.j.at(k));
    return s + ")";
}

}  // namespace detail

/// Renders a scalar expression; the basis option is ignored for scalars.
[[nodiscard]] inline std::string print_expression(const ScalarExpr& e,
                                                  OutputFormat fmt = OutputFormat::text) {
    if (fmt == OutputFormat::sexpr) return detail::scalar_sexpr(e);
    return detail::scalar_text(e, fmt);
}

/// Renders a form over the requested presentation basis. Text terms are
/// ordered by ascending contact degree, so the horizontal part prints first.
[[nodiscard]] inline std::string print_form(const Form& f, OutputFormat fmt = OutputFormat::text,
                                            OutputBasis basis = OutputBasis::contact) {
    auto terms = detail::presentation_terms(f, basis);
    if (terms.empty()) return fmt == OutputFormat::sexpr ? "(form)" : "0";
    if (fmt == OutputFormat::sexpr) {
        std::string out = "(form";
        for (const auto& [w, c] : terms) {
            out += " (term " + detail::scalar_sexpr(c) + " (wedge";
            for (const detail::PCov& pc : w) out += " " + detail::pcov_sexpr(pc);
            out += "))";
        }
        return out + ")";
    }
    const bool latex = fmt == OutputFormat::latex;
    std::string out;
    bool first = true;
    for (const auto& [w, c] : terms) {
        // pull a leading sign out of single-term coefficients
        bool neg = c.terms().size() == 1 && c.terms()[0].coeff < 0;
        ScalarExpr mag = neg ? -c : c;
        if (first)
            out += neg ? "-" : "";
        else
            out += neg ? " - " : " + ";
        first = false;
        std::string coef;
        bool need_coef = true;
        if (mag.is_constant() && mag.constant_value() == 1 && !w.empty()) need_coef = false;
        if (need_coef) {
            coef = detail::scalar_text(mag, fmt);
            if (mag.terms().size() > 1) coef = latex ? "\\left(" + coef + "\\right)" : "(" + coef + ")";
        }
        std::string wtxt;
        for (size_t k = 0; k < w.size(); ++k) {
            if (k) wtxt += latex ? " \\wedge " : "^";
            wtxt += detail::pcov_text(w[k], fmt);
        }
        if (!need_coef) {
            out += wtxt;
        } else if (w.empty()) {
            out += coef;
        } else {
            out += coef + (latex ? " " : "*") + wtxt;
        }
    }
    return out;
}

/// Renders a decomposable product as prefactor and factor lines.
[[nodiscard]] inline std::string print_decomposable(const DecomposableForm& d,
                                                    OutputFormat fmt = OutputFormat::text,
                                                    OutputBasis basis = OutputBasis::contact) {
    std::string out = "prefactor: " + print_expression(d.prefactor, fmt) + "\n";
    for (size_t k = 0; k < d.factors.size(); ++k)
        out += "factor " + std::to_string(k + 1) + ": " + print_form(d.factors[k], fmt, basis) +
               "\n";
    return out;
}

}  // namespace lepage
