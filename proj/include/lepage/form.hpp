#pragma once

#include <functional>
#include <map>
#include <set>

#include "lepage/scalar_expr.hpp"

namespace lepage {

/// Basis covector of the storage basis: dx^i or dy^sigma_J. Packed so the raw
/// order is dx first (by base index), then dy by (sigma, multi-index).
class Covector {
public:
    [[nodiscard]] static Covector dx(int i) { return Covector(static_cast<uint64_t>(i)); }
    [[nodiscard]] static Covector dy(int sigma, MultiIndex j) {
        return Covector((1ull << 63) | (static_cast<uint64_t>(sigma) << 48) |
                        (static_cast<uint64_t>(j.raw()) << 16));
    }

    [[nodiscard]] bool is_dy() const { return bits_ >> 63; }
    [[nodiscard]] int base_index() const { return static_cast<int>(bits_ & 0xFFFFu); }
    [[nodiscard]] int sigma() const { return static_cast<int>((bits_ >> 48) & 0xFFFu); }
    [[nodiscard]] MultiIndex index() const {
        return MultiIndex::from_raw(static_cast<uint32_t>((bits_ >> 16) & 0xFFFFFFFFu));
    }
    [[nodiscard]] uint64_t raw() const { return bits_; }

    friend bool operator==(Covector a, Covector b) { return a.bits_ == b.bits_; }
    friend bool operator!=(Covector a, Covector b) { return a.bits_ != b.bits_; }
    friend bool operator<(Covector a, Covector b) { return a.bits_ < b.bits_; }

private:
    explicit Covector(uint64_t b) : bits_(b) {}
    uint64_t bits_;
};

/// Strictly increasing covector product; the canonical key of a form term.
using Wedge = boost::container::small_vector<Covector, 5>;

struct WedgeLess {
    bool operator()(const Wedge& a, const Wedge& b) const {
        size_t k = 0;
        for (; k < a.size() && k < b.size(); ++k)
            if (a[k] != b[k]) return a[k] < b[k];
        return a.size() < b.size();
    }
};

/// Sorts an arbitrary covector list into canonical order. Returns false (zero
/// form) when a covector repeats; sign collects the permutation parity.
[[nodiscard]] inline bool sort_wedge(Wedge& w, int& sign) {
    sign = 1;
    for (size_t i = 1; i < w.size(); ++i) {  // insertion sort, counting swaps
        Covector c = w[i];
        size_t j = i;
        while (j > 0 && c < w[j - 1]) {
            w[j] = w[j - 1];
            --j;
            sign = -sign;
        }
        w[j] = c;
    }
    for (size_t i = 1; i < w.size(); ++i)
        if (w[i] == w[i - 1]) return false;
    return true;
}

/// Differential q-form with ScalarExpr coefficients over the storage basis.
/// jet_order() reports the content order: the highest jet order carried by any
/// coefficient atom or basis covector.
class Form {
public:
    Form() = default;
    Form(SpacePtr sp, int degree) : space_(std::move(sp)), degree_(degree) {
        if (degree < 0 || degree > space_->n() + 1)
            throw PreconditionError("form degree must be 0..n+1");
    }

    [[nodiscard]] static Form from_scalar(const ScalarExpr& e) {
        Form f(e.space(), 0);
        f.accumulate(Wedge{}, e);
        return f;
    }

    [[nodiscard]] const SpacePtr& space() const { return space_; }
    [[nodiscard]] int degree() const { return degree_; }
    /// Jet order of the current content: covector indices and coefficients.
    [[nodiscard]] int jet_order() const {
        int jo = 0;
        for (const auto& [w, c] : terms_) {
            for (const Covector& cv : w)
                if (cv.is_dy()) jo = std::max(jo, cv.index().size());
            jo = std::max(jo, lepage::jet_order(c));
        }
        return jo;
    }
    [[nodiscard]] bool is_zero() const { return terms_.empty(); }
    [[nodiscard]] const std::map<Wedge, ScalarExpr, WedgeLess>& terms() const { return terms_; }

    [[nodiscard]] ScalarExpr coefficient(const Wedge& w) const {
        auto it = terms_.find(w);
        return it == terms_.end() ? ScalarExpr::zero(space_) : it->second;
    }

    /// Adds c * w, sorting w and folding signs; silently drops zero terms.
    void accumulate(Wedge w, const ScalarExpr& c) {
        if (c.is_zero()) return;
        if (static_cast<int>(w.size()) != degree_)
            throw PreconditionError("wedge length does not match form degree");
        int sign = 1;
        if (!sort_wedge(w, sign)) return;
        for (const Covector& cv : w)
            if (cv.is_dy())
                space_->check_field(cv.sigma(), cv.index());
            else
                space_->check_base_index(cv.base_index());
        auto it = terms_.find(w);
        if (it == terms_.end()) {
            terms_.emplace(std::move(w), sign < 0 ? -c : c);
        } else {
            it->second = sign < 0 ? it->second - c : it->second + c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

private:
    SpacePtr space_;
    int degree_ = 0;
    std::map<Wedge, ScalarExpr, WedgeLess> terms_;
};

inline void assert_same_space(const Form& a, const Form& b) {
    if (a.space() != b.space()) throw PreconditionError("forms live on different jet spaces");
}

inline Form operator+(const Form& a, const Form& b) {
    assert_same_space(a, b);
    if (a.degree() != b.degree()) throw PreconditionError("adding forms of different degree");
    Form out = a;
    Form& mut = out;
    for (const auto& kv : b.terms()) mut.accumulate(kv.first, kv.second);
    return out;
}

inline Form operator-(const Form& a, const Form& b) {
    Form out = a;
    for (const auto& kv : b.terms()) out.accumulate(kv.first, -kv.second);
    return out;
}

inline Form operator*(const ScalarExpr& c, const Form& f) {
    Form out(f.space(), f.degree());
    for (const auto& kv : f.terms()) out.accumulate(kv.first, c * kv.second);
    return out;
}

inline Form operator*(const Rational& c, const Form& f) {
    Form out(f.space(), f.degree());
    for (const auto& kv : f.terms()) out.accumulate(kv.first, kv.second * c);
    return out;
}

inline Form operator-(const Form& f) { return Rational(-1) * f; }

[[nodiscard]] inline Form wedge(const Form& a, const Form& b) {
    assert_same_space(a, b);
    if (a.degree() + b.degree() > a.space()->n() + 1)
        throw PreconditionError("wedge degree beyond n+1 is outside the engine's scope");
    Form out(a.space(), a.degree() + b.degree());
    for (const auto& ta : a.terms())
        for (const auto& tb : b.terms()) {
            Wedge w = ta.first;
            bool dup = false;
            for (const Covector& c : tb.first) {
                for (const Covector& e : ta.first)
                    if (e == c) {
                        dup = true;
                        break;
                    }
                if (dup) break;
                w.push_back(c);
            }
            if (dup) continue;
            out.accumulate(std::move(w), ta.second * tb.second);
        }
    return out;
}

[[nodiscard]] inline Form wedge_all(const std::vector<Form>& fs) {
    if (fs.empty()) throw PreconditionError("empty wedge product");
    Form out = fs[0];
    for (size_t k = 1; k < fs.size(); ++k) out = wedge(out, fs[k]);
    return out;
}

/// True iff every coefficient is identically zero on the declared domain.
[[nodiscard]] inline bool form_equals_zero(const Form& f) {
    for (const auto& kv : f.terms())
        if (!equals_zero(kv.second)) return false;
    return true;
}

[[nodiscard]] inline bool forms_equal(const Form& a, const Form& b) {
    // only the zero form lives in every degree
    if (a.degree() != b.degree()) return form_equals_zero(a) && form_equals_zero(b);
    return form_equals_zero(a - b);
}

// ---------------------------------------------------------------------------
// coordinate 1-forms and horizontal volume forms

[[nodiscard]] inline Form dx_form(const SpacePtr& sp, int i) {
    Form f(sp, 1);
    f.accumulate(Wedge{Covector::dx(i)}, ScalarExpr::one(sp));
    return f;
}

[[nodiscard]] inline Form dy_form(const SpacePtr& sp, int sigma, MultiIndex j = {}) {
    Form f(sp, 1);
    f.accumulate(Wedge{Covector::dy(sigma, j)}, ScalarExpr::one(sp));
    return f;
}

/// omega_0 = dx^1 ^ ... ^ dx^n.
[[nodiscard]] inline Form omega_0(const SpacePtr& sp) {
    Form f(sp, sp->n());
    Wedge w;
    for (int i = 1; i <= sp->n(); ++i) w.push_back(Covector::dx(i));
    f.accumulate(std::move(w), ScalarExpr::one(sp));
    return f;
}

/// omega_j = i_{d/dx^j} omega_0 = (-1)^{j-1} dx^1 ^ ... (no dx^j) ... ^ dx^n,
/// so that dx^k ^ omega_j = delta^k_j omega_0.
[[nodiscard]] inline Form omega_j(const SpacePtr& sp, int j) {
    sp->check_base_index(j);
    Form f(sp, sp->n() - 1);
    Wedge w;
    for (int i = 1; i <= sp->n(); ++i)
        if (i != j) w.push_back(Covector::dx(i));
    f.accumulate(std::move(w),
                 ScalarExpr::constant(sp, Rational((j - 1) % 2 == 0 ? 1 : -1)));
    return f;
}

// ---------------------------------------------------------------------------
// exterior derivative

namespace detail {

/// Base and field atoms the expression actually depends on, chaining through
/// registered radicands. Errors on opaque atoms unless flagged constant-like.
inline void primitive_dependencies(const ScalarExpr& e, std::set<Atom>& out) {
    const SpacePtr& sp = e.space();
    for (const Term& t : e.terms())
        for (const AtomPow& f : t.mono) switch (f.atom.kind()) {
                case AtomKind::base:
                case AtomKind::field:
                    out.insert(f.atom);
                    break;
                case AtomKind::inverse:
                case AtomKind::sqrt_of:
                    primitive_dependencies(
                        ScalarExpr::from_terms(sp, sp->entry(f.atom.reg_id()).defn), out);
                    break;
                case AtomKind::opaque:
                    if (!sp->opaque_constant_like(f.atom.opaque_id()))
                        throw PreconditionError(
                            "exterior derivative of a coefficient depending on opaque symbol '" +
                            sp->opaque_name(f.atom.opaque_id()) + "'");
                    break;
            }
}

[[nodiscard]] inline Covector covector_of_primitive(Atom a) {
    return a.kind() == AtomKind::base ? Covector::dx(a.base_index())
                                      : Covector::dy(a.sigma(), a.index());
}

}  // namespace detail

[[nodiscard]] inline Form exterior_derivative(const Form& f) {
    const SpacePtr& sp = f.space();
    if (f.degree() + 1 > sp->n() + 1)
        throw PreconditionError("exterior derivative beyond degree n+1 is outside scope");
    Form out(sp, f.degree() + 1);
    for (const auto& kv : f.terms()) {
        std::set<Atom> deps;
        detail::primitive_dependencies(kv.second, deps);
        for (Atom v : deps) {
            ScalarExpr dc = raw_partial(kv.second, v);
            if (dc.is_zero()) continue;
            Wedge w;
            w.push_back(detail::covector_of_primitive(v));
            for (const Covector& c : kv.first) w.push_back(c);
            out.accumulate(std::move(w), dc);
        }
    }
    return out;
}

/// d of a scalar as a 1-form.
[[nodiscard]] inline Form one_form_d(const ScalarExpr& e) {
    return exterior_derivative(Form::from_scalar(e));
}

// ---------------------------------------------------------------------------
// vector fields and contraction

/// Vector field with explicit components: the coefficient of d/dx^i is keyed
/// by dx(i), the coefficient of d/dy^sigma_J by dy(sigma, J).
struct VectorField {
    SpacePtr space;
    std::map<Covector, ScalarExpr, std::less<Covector>> components;

    [[nodiscard]] ScalarExpr component(Covector c) const {
        auto it = components.find(c);
        return it == components.end() ? ScalarExpr::zero(space) : it->second;
    }
};

/// Formal (total) derivative field d_i. Components are generated on demand:
/// 1 on d/dx^i and y^sigma_{J i} on d/dy^sigma_J, on the promoted space when J
/// is of top order (errors only if the order cap would be exceeded).
struct FormalField {
    SpacePtr space;
    int direction;

    [[nodiscard]] ScalarExpr component(Covector c) const {
        if (!c.is_dy())
            return c.base_index() == direction ? ScalarExpr::one(space)
                                               : ScalarExpr::zero(space);
        MultiIndex j = c.index();
        if (j.size() + 1 > space->order_cap())
            throw PreconditionError("contraction with d_i exceeds the order cap");
        return y_coord(space, c.sigma(), j.with(direction));
    }
};

template <typename ComponentFn>
[[nodiscard]] Form contract_with(const Form& f, ComponentFn&& comp) {
    if (f.degree() == 0) throw PreconditionError("contraction of a 0-form");
    Form out(f.space(), f.degree() - 1);
    for (const auto& kv : f.terms()) {
        for (size_t k = 0; k < kv.first.size(); ++k) {
            ScalarExpr xc = comp(kv.first[k]);
            if (xc.is_zero()) continue;
            Wedge rest;
            for (size_t j = 0; j < kv.first.size(); ++j)
                if (j != k) rest.push_back(kv.first[j]);
            ScalarExpr c = kv.second * xc;
            out.accumulate(std::move(rest), (k % 2 == 0) ? c : -c);
        }
    }
    return out;
}

[[nodiscard]] inline Form contract(const VectorField& x, const Form& f) {
    if (x.space != f.space()) throw PreconditionError("field and form on different spaces");
    return contract_with(f, [&](Covector c) { return x.component(c); });
}

[[nodiscard]] inline Form contract(const FormalField& x, const Form& f) {
    if (x.space != f.space()) throw PreconditionError("field and form on different spaces");
    return contract_with(f, [&](Covector c) { return x.component(c); });
}

[[nodiscard]] inline FormalField formal_field(const SpacePtr& sp, int i) {
    sp->check_base_index(i);
    return FormalField{sp, i};
}

/// Cartan formula; for 0-forms this is just X applied to the function.
template <typename Field>
[[nodiscard]] Form lie_derivative(const Field& x, const Form& f) {
    if (f.degree() == 0) return contract(x, exterior_derivative(f));
    if (f.degree() == f.space()->n() + 1)
        return exterior_derivative(contract(x, f));
    return contract(x, exterior_derivative(f)) + exterior_derivative(contract(x, f));
}

}  // namespace lepage
