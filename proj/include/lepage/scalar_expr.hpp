#pragma once

#include <map>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lepage/jet_space.hpp"

namespace lepage {

/// Exact scalar on a jet space: a rational linear combination of monomials in
/// coordinate, inverse, sqrt and opaque atoms. Always kept in normal form:
/// terms sorted by monomial, coefficients nonzero, sqrt powers at most one
/// (s^2 rewrites to the registered radicand), and whole registered monomials
/// cancelled against their inverse atoms. Rational functions stay as
/// numerator times inverse atoms; deciding zero is equals_zero's job.
class ScalarExpr {
public:
    ScalarExpr() = default;

    [[nodiscard]] static ScalarExpr zero(SpacePtr sp) { return ScalarExpr(std::move(sp), {}); }

    [[nodiscard]] static ScalarExpr constant(SpacePtr sp, Rational c) {
        TermList t;
        if (c != 0) t.push_back({Monomial{}, std::move(c)});
        return ScalarExpr(std::move(sp), std::move(t));
    }

    [[nodiscard]] static ScalarExpr one(SpacePtr sp) { return constant(std::move(sp), 1); }

    [[nodiscard]] static ScalarExpr from_atom(SpacePtr sp, Atom a) {
        TermList t;
        t.push_back({Monomial{AtomPow{a, 1}}, Rational(1)});
        return ScalarExpr(std::move(sp), std::move(t));
    }

    [[nodiscard]] static ScalarExpr from_terms(SpacePtr sp, TermList t) {
        return ScalarExpr(std::move(sp), std::move(t));
    }

    [[nodiscard]] const SpacePtr& space() const { return space_; }
    [[nodiscard]] const TermList& terms() const { return terms_; }
    [[nodiscard]] bool is_zero() const { return terms_.empty(); }

    [[nodiscard]] bool is_constant() const {
        return terms_.empty() || (terms_.size() == 1 && terms_[0].mono.empty());
    }
    [[nodiscard]] Rational constant_value() const {
        if (terms_.empty()) return Rational(0);
        return terms_[0].coeff;
    }

    friend ScalarExpr operator+(const ScalarExpr& a, const ScalarExpr& b);
    friend ScalarExpr operator-(const ScalarExpr& a, const ScalarExpr& b);
    friend ScalarExpr operator*(const ScalarExpr& a, const ScalarExpr& b);

private:
    ScalarExpr(SpacePtr sp, TermList t) : space_(std::move(sp)), terms_(std::move(t)) {}

    SpacePtr space_;
    TermList terms_;
};

// ---------------------------------------------------------------------------
// coordinate factories

[[nodiscard]] inline ScalarExpr x_coord(const SpacePtr& sp, int i) {
    sp->check_base_index(i);
    return ScalarExpr::from_atom(sp, Atom::base(i));
}

[[nodiscard]] inline ScalarExpr y_coord(const SpacePtr& sp, int sigma, MultiIndex j = {}) {
    sp->check_field(sigma, j);
    return ScalarExpr::from_atom(sp, Atom::field(sigma, j));
}

[[nodiscard]] inline Atom y_atom(const SpacePtr& sp, int sigma, MultiIndex j = {}) {
    sp->check_field(sigma, j);
    return Atom::field(sigma, j);
}

[[nodiscard]] inline ScalarExpr opaque_symbol(const SpacePtr& sp, const std::string& name,
                                              bool constant_like = false) {
    return ScalarExpr::from_atom(sp, Atom::opaque(sp->intern_opaque(name, constant_like)));
}

// ---------------------------------------------------------------------------
// normal-form internals

namespace detail {

inline void termlist_mul_into(const SpacePtr& sp, const TermList& a, const TermList& b,
                              std::unordered_map<Monomial, Rational, MonomialHash, MonomialEq>& acc);

/// Rewrites sqrt powers >= 2 through s^2 = P and cancels registered whole
/// monomials against their inverse atoms. May expand into several terms.
inline void reduce_monomial_into(
    const SpacePtr& sp, Monomial m, Rational c,
    std::unordered_map<Monomial, Rational, MonomialHash, MonomialEq>& acc) {
    // sqrt reduction: first factor with power >= 2 restarts the scan.
    for (size_t k = 0; k < m.size(); ++k) {
        if (m[k].atom.kind() == AtomKind::sqrt_of && m[k].pow >= 2) {
            const int q = m[k].pow / 2;
            const int rem = m[k].pow % 2;
            const auto& entry = sp->entry(m[k].atom.reg_id());
            Monomial rest = m;
            if (rem == 0)
                rest.erase(rest.begin() + static_cast<long>(k));
            else
                rest[k].pow = rem;
            // rest * defn^q
            TermList prod;
            prod.push_back({std::move(rest), std::move(c)});
            for (int t = 0; t < q; ++t) {
                std::unordered_map<Monomial, Rational, MonomialHash, MonomialEq> tmp;
                termlist_mul_into(sp, prod, entry.defn, tmp);
                prod.clear();
                for (auto& kv : tmp)
                    if (kv.second != 0) prod.push_back({kv.first, std::move(kv.second)});
            }
            for (auto& t : prod) {
                auto it = acc.find(t.mono);
                if (it == acc.end())
                    acc.emplace(std::move(t.mono), std::move(t.coeff));
                else
                    it->second += t.coeff;
            }
            return;
        }
    }
    // inverse-by-monomial cancellation: inv(P) with P = c0 * M eats copies of M.
    for (size_t k = 0; k < m.size(); ++k) {
        if (m[k].atom.kind() != AtomKind::inverse) continue;
        const auto& entry = sp->entry(m[k].atom.reg_id());
        if (!entry.defn_is_monomial) continue;
        const Monomial& pm = entry.defn[0].mono;
        if (pm.empty()) continue;  // constant radicand never registered
        int copies = m[k].pow;
        for (const AtomPow& need : pm) {
            int avail = 0;
            for (const AtomPow& have : m)
                if (have.atom == need.atom && (&have != &m[k])) avail = have.pow;
            copies = std::min(copies, avail / need.pow);
            if (copies == 0) break;
        }
        if (copies == 0) continue;
        Monomial out;
        for (const AtomPow& f : m) {
            int p = f.pow;
            if (f.atom == m[k].atom) p -= copies;
            for (const AtomPow& need : pm)
                if (need.atom == f.atom) p -= copies * need.pow;
            if (p < 0) throw PreconditionError("internal: negative power in cancellation");
            if (p > 0) out.push_back({f.atom, p});
        }
        c *= rational_pow(entry.defn[0].coeff, -copies);
        reduce_monomial_into(sp, std::move(out), std::move(c), acc);
        return;
    }
    auto it = acc.find(m);
    if (it == acc.end())
        acc.emplace(std::move(m), std::move(c));
    else
        it->second += c;
}

[[nodiscard]] inline Monomial merge_monomials(const Monomial& a, const Monomial& b) {
    Monomial out;
    size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i].atom == b[j].atom) {
            out.push_back({a[i].atom, a[i].pow + b[j].pow});
            ++i, ++j;
        } else if (a[i].atom < b[j].atom) {
            out.push_back(a[i++]);
        } else {
            out.push_back(b[j++]);
        }
    }
    for (; i < a.size(); ++i) out.push_back(a[i]);
    for (; j < b.size(); ++j) out.push_back(b[j]);
    return out;
}

inline void termlist_mul_into(
    const SpacePtr& sp, const TermList& a, const TermList& b,
    std::unordered_map<Monomial, Rational, MonomialHash, MonomialEq>& acc) {
    for (const Term& ta : a)
        for (const Term& tb : b)
            reduce_monomial_into(sp, merge_monomials(ta.mono, tb.mono), ta.coeff * tb.coeff, acc);
}

[[nodiscard]] inline TermList collect(
    std::unordered_map<Monomial, Rational, MonomialHash, MonomialEq>& acc) {
    TermList out;
    out.reserve(acc.size());
    for (auto& kv : acc)
        if (kv.second != 0) out.push_back({kv.first, std::move(kv.second)});
    std::sort(out.begin(), out.end(),
              [](const Term& s, const Term& t) { return monomial_less(s.mono, t.mono); });
    return out;
}

}  // namespace detail

inline void assert_same_space(const ScalarExpr& a, const ScalarExpr& b) {
    if (a.space() != b.space())
        throw PreconditionError("operands live on different jet spaces");
}

inline ScalarExpr operator+(const ScalarExpr& a, const ScalarExpr& b) {
    assert_same_space(a, b);
    TermList out;
    out.reserve(a.terms_.size() + b.terms_.size());
    size_t i = 0, j = 0;
    while (i < a.terms_.size() && j < b.terms_.size()) {
        const Term& s = a.terms_[i];
        const Term& t = b.terms_[j];
        if (monomial_eq(s.mono, t.mono)) {
            Rational c = s.coeff + t.coeff;
            if (c != 0) out.push_back({s.mono, std::move(c)});
            ++i, ++j;
        } else if (monomial_less(s.mono, t.mono)) {
            out.push_back(s);
            ++i;
        } else {
            out.push_back(t);
            ++j;
        }
    }
    for (; i < a.terms_.size(); ++i) out.push_back(a.terms_[i]);
    for (; j < b.terms_.size(); ++j) out.push_back(b.terms_[j]);
    return ScalarExpr::from_terms(a.space(), std::move(out));
}

inline ScalarExpr operator*(const ScalarExpr& a, const ScalarExpr& b) {
    assert_same_space(a, b);
    std::unordered_map<Monomial, Rational, MonomialHash, MonomialEq> acc;
    acc.reserve(a.terms_.size() * std::min<size_t>(b.terms_.size(), 64) + 8);
    detail::termlist_mul_into(a.space(), a.terms_, b.terms_, acc);
    return ScalarExpr::from_terms(a.space(), detail::collect(acc));
}

inline ScalarExpr operator*(const ScalarExpr& a, const Rational& c) {
    if (c == 0) return ScalarExpr::zero(a.space());
    TermList out = a.terms();
    for (Term& t : out) t.coeff *= c;
    return ScalarExpr::from_terms(a.space(), std::move(out));
}

inline ScalarExpr operator*(const Rational& c, const ScalarExpr& a) { return a * c; }

inline ScalarExpr operator-(const ScalarExpr& a) { return a * Rational(-1); }

inline ScalarExpr operator-(const ScalarExpr& a, const ScalarExpr& b) { return a + (-b); }

[[nodiscard]] inline ScalarExpr pow(const ScalarExpr& a, int e) {
    if (e < 0) throw PreconditionError("negative power: use a registered inverse atom");
    ScalarExpr acc = ScalarExpr::one(a.space());
    ScalarExpr b = a;
    while (e) {
        if (e & 1) acc = acc * b;
        if (e >>= 1) b = b * b;
    }
    return acc;
}

// ---------------------------------------------------------------------------
// jet order, dependency queries

/// Highest jet order any atom of e carries, counted through the defining
/// expressions of inverse and sqrt atoms.
[[nodiscard]] inline int jet_order(const ScalarExpr& e) {
    int best = 0;
    for (const Term& t : e.terms())
        for (const AtomPow& f : t.mono) {
            switch (f.atom.kind()) {
                case AtomKind::field:
                    best = std::max(best, f.atom.index().size());
                    break;
                case AtomKind::inverse:
                case AtomKind::sqrt_of:
                    best = std::max(best, e.space()->entry(f.atom.reg_id()).defn_jet_order);
                    break;
                default:
                    break;
            }
        }
    return best;
}

/// True if e contains an opaque atom; with skip_constant_like, atoms flagged
/// constant-like do not count.
[[nodiscard]] inline bool has_opaque(const ScalarExpr& e, bool skip_constant_like = false) {
    for (const Term& t : e.terms())
        for (const AtomPow& f : t.mono)
            if (f.atom.kind() == AtomKind::opaque &&
                !(skip_constant_like && e.space()->opaque_constant_like(f.atom.opaque_id())))
                return true;
    return false;
}

[[nodiscard]] inline bool contains_atom(const ScalarExpr& e, Atom a) {
    for (const Term& t : e.terms())
        for (const AtomPow& f : t.mono)
            if (f.atom == a) return true;
    return false;
}

// ---------------------------------------------------------------------------
// registration of inverse and sqrt atoms

namespace detail {

[[nodiscard]] inline int defn_order(const SpacePtr& sp, const TermList& defn) {
    int best = 0;
    for (const Term& t : defn)
        for (const AtomPow& f : t.mono) {
            if (f.atom.kind() == AtomKind::field) best = std::max(best, f.atom.index().size());
            if (f.atom.kind() == AtomKind::inverse || f.atom.kind() == AtomKind::sqrt_of)
                best = std::max(best, sp->entry(f.atom.reg_id()).defn_jet_order);
        }
    return best;
}

/// Shared constant-folding front end for registration: inverses of constants
/// become rationals, sqrt of a perfect rational square becomes rational.
[[nodiscard]] inline ScalarExpr find_or_register(const SpacePtr& sp, AtomKind kind,
                                                 const ScalarExpr& defn, bool allow_register) {
    if (defn.is_zero())
        throw PreconditionError(kind == AtomKind::inverse ? "inverse of the zero expression"
                                                          : "square root of the zero expression");
    if (defn.is_constant()) {
        Rational c = defn.constant_value();
        if (kind == AtomKind::inverse) return ScalarExpr::constant(defn.space(), Rational(1) / c);
        if (c < 0) throw PreconditionError("square root of a negative constant");
        Integer ns = boost::multiprecision::sqrt(numerator(c));
        Integer ds = boost::multiprecision::sqrt(denominator(c));
        if (ns * ns == numerator(c) && ds * ds == denominator(c))
            return ScalarExpr::constant(defn.space(), Rational(ns, ds));
        // fall through: irrational constant root stays an atom
    }
    int id = sp->find_entry(kind, defn.terms());
    if (id < 0) {
        if (!allow_register)
            throw PreconditionError("inverse/sqrt of an expression that was not registered "
                                    "as nonvanishing");
        id = sp->add_entry(kind, defn.terms(), defn_order(sp, defn.terms()));
    }
    return ScalarExpr::from_atom(sp, kind == AtomKind::inverse ? Atom::inverse(id)
                                                               : Atom::sqrt_of(id));
}

}  // namespace detail

/// Declares e nonvanishing and returns 1/e (an inverse atom, or a rational if
/// e is constant). Re-registering the same expression returns the same atom.
[[nodiscard]] inline ScalarExpr register_inverse(const ScalarExpr& e) {
    if (has_opaque(e)) throw PreconditionError("inverse of an opaque expression");
    return detail::find_or_register(e.space(), AtomKind::inverse, e, true);
}

/// Returns s with s^2 = e. Also registers 1/e so that s can be differentiated
/// (ds involves s/e); e is thereby declared nonvanishing.
[[nodiscard]] inline ScalarExpr register_sqrt(const ScalarExpr& e) {
    if (has_opaque(e)) throw PreconditionError("square root of an opaque expression");
    ScalarExpr s = detail::find_or_register(e.space(), AtomKind::sqrt_of, e, true);
    if (!s.is_constant()) (void)detail::find_or_register(e.space(), AtomKind::inverse, e, true);
    return s;
}

/// Lookup-only variants: fail unless the expression was already declared.
[[nodiscard]] inline ScalarExpr inverse_of(const ScalarExpr& e) {
    return detail::find_or_register(e.space(), AtomKind::inverse, e, false);
}
[[nodiscard]] inline ScalarExpr sqrt_of(const ScalarExpr& e) {
    return detail::find_or_register(e.space(), AtomKind::sqrt_of, e, false);
}

// ---------------------------------------------------------------------------
// derivatives

namespace detail {

/// da/dv without the power rule; v is a base or field atom. Chains through
/// inverse and sqrt definitions. Opaque atoms are independent symbols.
[[nodiscard]] inline ScalarExpr atom_partial(const SpacePtr& sp, Atom a, Atom v,
                                             std::unordered_map<uint64_t, ScalarExpr>& cache);

[[nodiscard]] inline ScalarExpr raw_partial_impl(const ScalarExpr& e, Atom v,
                                                 std::unordered_map<uint64_t, ScalarExpr>& cache) {
    const SpacePtr& sp = e.space();
    ScalarExpr out = ScalarExpr::zero(sp);
    for (const Term& t : e.terms()) {
        for (size_t k = 0; k < t.mono.size(); ++k) {
            const AtomPow& f = t.mono[k];
            ScalarExpr da = atom_partial(sp, f.atom, v, cache);
            if (da.is_zero()) continue;
            Monomial rest;
            for (size_t j = 0; j < t.mono.size(); ++j) {
                if (j == k) {
                    if (f.pow > 1) rest.push_back({f.atom, f.pow - 1});
                } else {
                    rest.push_back(t.mono[j]);
                }
            }
            ScalarExpr piece = ScalarExpr::from_terms(sp, TermList{{rest, t.coeff * f.pow}});
            out = out + piece * da;
        }
    }
    return out;
}

[[nodiscard]] inline ScalarExpr atom_partial(const SpacePtr& sp, Atom a, Atom v,
                                             std::unordered_map<uint64_t, ScalarExpr>& cache) {
    if (a == v) return ScalarExpr::one(sp);
    const AtomKind k = a.kind();
    if (k != AtomKind::inverse && k != AtomKind::sqrt_of) return ScalarExpr::zero(sp);
    auto it = cache.find(a.raw());
    if (it != cache.end()) return it->second;
    ScalarExpr defn = ScalarExpr::from_terms(sp, sp->entry(a.reg_id()).defn);
    ScalarExpr dd = raw_partial_impl(defn, v, cache);
    ScalarExpr res = ScalarExpr::zero(sp);
    if (!dd.is_zero()) {
        ScalarExpr self = ScalarExpr::from_atom(sp, a);
        if (k == AtomKind::inverse) {
            res = -(dd * self * self);
        } else {
            ScalarExpr invp = find_or_register(sp, AtomKind::inverse, defn, true);
            res = Rational(1, 2) * dd * self * invp;
        }
    }
    cache.emplace(a.raw(), res);
    return res;
}

}  // namespace detail

/// d e / d v for one canonical atom v, no symmetrization weight.
[[nodiscard]] inline ScalarExpr raw_partial(const ScalarExpr& e, Atom v) {
    std::unordered_map<uint64_t, ScalarExpr> cache;
    return detail::raw_partial_impl(e, v, cache);
}

/// Symmetrized partial with respect to y^sigma_K for an arbitrary (not
/// necessarily sorted) index tuple K: 1/multiplicity(sort K) times the raw
/// partial by the canonical variable. With these weights the chain rule
/// d e = sum over all tuples K of partial(e,sigma,K) dy^sigma_K holds.
[[nodiscard]] inline ScalarExpr partial(const ScalarExpr& e, int sigma, MultiIndex k_sorted) {
    ScalarExpr raw = raw_partial(e, y_atom(e.space(), sigma, k_sorted));
    return raw * Rational(1, k_sorted.multiplicity());
}

[[nodiscard]] inline ScalarExpr partial(const ScalarExpr& e, int sigma,
                                        const std::vector<int>& tuple) {
    return partial(e, sigma, MultiIndex::from_sorted_or_not(tuple));
}

/// Total derivative d_i: d_i x^j = delta, d_i y^sigma_J = y^sigma_{J i}, with
/// the chain rule through inverse and sqrt atoms. Errors on opaque atoms that
/// are not flagged constant-like and when the order cap would be exceeded.
[[nodiscard]] inline ScalarExpr formal_derivative(const ScalarExpr& e, int i) {
    const SpacePtr& sp = e.space();
    sp->check_base_index(i);
    std::unordered_map<uint64_t, ScalarExpr> cache;
    auto datom = [&](Atom a) -> ScalarExpr {
        auto it = cache.find(a.raw());
        if (it != cache.end()) return it->second;
        ScalarExpr res = ScalarExpr::zero(sp);
        switch (a.kind()) {
            case AtomKind::base:
                if (a.base_index() == i) res = ScalarExpr::one(sp);
                break;
            case AtomKind::field: {
                MultiIndex j = a.index();
                if (j.size() + 1 > sp->order_cap())
                    throw PreconditionError(
                        "formal derivative exceeds the order cap " +
                        std::to_string(sp->order_cap()));
                res = ScalarExpr::from_atom(sp, Atom::field(a.sigma(), j.with(i)));
                break;
            }
            case AtomKind::inverse:
            case AtomKind::sqrt_of: {
                ScalarExpr defn = ScalarExpr::from_terms(sp, sp->entry(a.reg_id()).defn);
                ScalarExpr dd = formal_derivative(defn, i);
                if (!dd.is_zero()) {
                    ScalarExpr self = ScalarExpr::from_atom(sp, a);
                    if (a.kind() == AtomKind::inverse)
                        res = -(dd * self * self);
                    else
                        res = Rational(1, 2) * dd * self *
                              detail::find_or_register(sp, AtomKind::inverse, defn, true);
                }
                break;
            }
            case AtomKind::opaque:
                if (!sp->opaque_constant_like(a.opaque_id()))
                    throw PreconditionError("formal derivative of opaque symbol '" +
                                            sp->opaque_name(a.opaque_id()) + "' is undefined");
                break;
        }
        cache.emplace(a.raw(), res);
        return res;
    };
    ScalarExpr out = ScalarExpr::zero(sp);
    for (const Term& t : e.terms()) {
        for (size_t k = 0; k < t.mono.size(); ++k) {
            const AtomPow& f = t.mono[k];
            ScalarExpr da = datom(f.atom);
            if (da.is_zero()) continue;
            Monomial rest;
            for (size_t j = 0; j < t.mono.size(); ++j) {
                if (j == k) {
                    if (f.pow > 1) rest.push_back({f.atom, f.pow - 1});
                } else {
                    rest.push_back(t.mono[j]);
                }
            }
            out = out + ScalarExpr::from_terms(sp, TermList{{rest, t.coeff * f.pow}}) * da;
        }
    }
    return out;
}

[[nodiscard]] inline ScalarExpr formal_derivative(const ScalarExpr& e,
                                                  const std::vector<int>& is) {
    ScalarExpr out = e;
    for (int i : is) out = formal_derivative(out, i);
    return out;
}

// ---------------------------------------------------------------------------
// zero decision

/// Exact zero test on the declared domain: inverse atoms are cleared by
/// cross-multiplication with their radicands (declared nonvanishing), largest
/// registry id first, and the result is zero iff the final polynomial normal
/// form is empty. Common inverse powers are cancelled up front to keep the
/// cross-multiplied form small.
[[nodiscard]] inline bool equals_zero(const ScalarExpr& e) {
    const SpacePtr& sp = e.space();
    TermList cur = e.terms();
    while (!cur.empty()) {
        int target = -1;
        for (const Term& t : cur)
            for (const AtomPow& f : t.mono)
                if (f.atom.kind() == AtomKind::inverse) target = std::max(target, f.atom.reg_id());
        if (target < 0) break;
        const Atom inv_atom = Atom::inverse(target);
        int mn = INT32_MAX, mx = 0;
        for (const Term& t : cur) {
            int p = 0;
            for (const AtomPow& f : t.mono)
                if (f.atom == inv_atom) p = f.pow;
            mn = std::min(mn, p);
            mx = std::max(mx, p);
        }
        ScalarExpr defn = ScalarExpr::from_terms(sp, sp->entry(target).defn);
        std::vector<ScalarExpr> defn_pow{ScalarExpr::one(sp)};
        for (int k = 1; k <= mx - mn; ++k) defn_pow.push_back(defn_pow.back() * defn);
        ScalarExpr acc = ScalarExpr::zero(sp);
        for (const Term& t : cur) {
            int p = 0;
            Monomial rest;
            for (const AtomPow& f : t.mono) {
                if (f.atom == inv_atom)
                    p = f.pow;
                else
                    rest.push_back(f);
            }
            ScalarExpr piece = ScalarExpr::from_terms(sp, TermList{{std::move(rest), t.coeff}});
            acc = acc + piece * defn_pow[static_cast<size_t>(mx - p)];
        }
        cur = acc.terms();
    }
    return cur.empty();
}

[[nodiscard]] inline bool identically_equal(const ScalarExpr& a, const ScalarExpr& b) {
    return equals_zero(a - b);
}

// ---------------------------------------------------------------------------
// substitution

enum class SubstPolicy {
    require_registered,  // transformed inverse/sqrt radicands must already exist
    auto_register,       // register transformed radicands on the fly
};

namespace detail {

struct SubstCtx {
    const std::map<Atom, ScalarExpr>* map;
    SubstPolicy policy;
    std::unordered_map<uint64_t, ScalarExpr> cache;
};

[[nodiscard]] inline ScalarExpr subst_expr(const ScalarExpr& e, SubstCtx& ctx);

[[nodiscard]] inline ScalarExpr subst_atom(const SpacePtr& sp, Atom a, SubstCtx& ctx) {
    auto hit = ctx.cache.find(a.raw());
    if (hit != ctx.cache.end()) return hit->second;
    ScalarExpr res = ScalarExpr::from_atom(sp, a);
    auto mapped = ctx.map->find(a);
    if (mapped != ctx.map->end()) {
        res = mapped->second;
    } else if (a.kind() == AtomKind::inverse || a.kind() == AtomKind::sqrt_of) {
        ScalarExpr defn = ScalarExpr::from_terms(sp, sp->entry(a.reg_id()).defn);
        ScalarExpr image = subst_expr(defn, ctx);
        if (!term_list_eq(image.terms(), defn.terms()))
            res = find_or_register(sp, a.kind(), image,
                                   ctx.policy == SubstPolicy::auto_register);
    }
    ctx.cache.emplace(a.raw(), res);
    return res;
}

[[nodiscard]] inline ScalarExpr subst_expr(const ScalarExpr& e, SubstCtx& ctx) {
    const SpacePtr& sp = e.space();
    ScalarExpr out = ScalarExpr::zero(sp);
    for (const Term& t : e.terms()) {
        ScalarExpr prod = ScalarExpr::constant(sp, t.coeff);
        for (const AtomPow& f : t.mono) prod = prod * pow(subst_atom(sp, f.atom, ctx), f.pow);
        out = out + prod;
    }
    return out;
}

}  // namespace detail

/// Simultaneously replaces mapped atoms by expressions. Unmapped inverse and
/// sqrt atoms whose radicands change are remapped to the atom of the
/// transformed radicand; under the default policy that radicand must already
/// be registered.
[[nodiscard]] inline ScalarExpr substitute(const ScalarExpr& e,
                                           const std::map<Atom, ScalarExpr>& map,
                                           SubstPolicy policy = SubstPolicy::require_registered) {
    for (const auto& kv : map) assert_same_space(e, kv.second);
    detail::SubstCtx ctx{&map, policy, {}};
    return detail::subst_expr(e, ctx);
}

// ---------------------------------------------------------------------------
// small symbolic matrices

using Matrix = std::vector<std::vector<ScalarExpr>>;

/// Leibniz determinant; rows must be square and nonempty.
[[nodiscard]] inline ScalarExpr determinant(const Matrix& a) {
    const size_t n = a.size();
    if (n == 0) throw PreconditionError("determinant of an empty matrix");
    for (const auto& row : a)
        if (row.size() != n) throw PreconditionError("determinant of a non-square matrix");
    const SpacePtr& sp = a[0][0].space();
    std::vector<size_t> p(n);
    for (size_t i = 0; i < n; ++i) p[i] = i;
    ScalarExpr det = ScalarExpr::zero(sp);
    do {
        int inv = 0;
        for (size_t i = 0; i < n; ++i)
            for (size_t j = i + 1; j < n; ++j)
                if (p[i] > p[j]) ++inv;
        ScalarExpr prod = ScalarExpr::one(sp);
        for (size_t i = 0; i < n && !prod.is_zero(); ++i) prod = prod * a[i][p[i]];
        det = inv % 2 == 0 ? det + prod : det - prod;
    } while (std::next_permutation(p.begin(), p.end()));
    return det;
}

struct MatrixInverse {
    Matrix inv;      // adjugate times the registered inverse of det
    ScalarExpr det;  // determinant, registered nonvanishing
};

/// Symbolic inverse via adjugate and a registered inverse determinant atom.
/// Declares det nonvanishing as a side effect; identically zero det errors.
[[nodiscard]] inline MatrixInverse inverse_matrix(const Matrix& a,
                                                  const char* singular_msg =
                                                      "matrix is not invertible") {
    const size_t n = a.size();
    ScalarExpr det = determinant(a);
    if (equals_zero(det)) throw PreconditionError(singular_msg);
    const SpacePtr& sp = det.space();
    ScalarExpr inv_det = register_inverse(det);
    MatrixInverse out{Matrix(n, std::vector<ScalarExpr>(n, ScalarExpr::zero(sp))), det};
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) {
            Matrix minor;
            minor.reserve(n - 1);
            for (size_t r = 0; r < n; ++r) {
                if (r == j) continue;
                std::vector<ScalarExpr> row;
                row.reserve(n - 1);
                for (size_t c = 0; c < n; ++c)
                    if (c != i) row.push_back(a[r][c]);
                minor.push_back(std::move(row));
            }
            ScalarExpr cof = n == 1 ? ScalarExpr::one(sp) : determinant(minor);
            if ((i + j) % 2 == 1) cof = -cof;
            out.inv[i][j] = cof * inv_det;
        }
    return out;
}

}  // namespace lepage
