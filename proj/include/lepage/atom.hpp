#pragma once

#include <boost/container/small_vector.hpp>
#include <cstdint>
#include <vector>

#include "lepage/multi_index.hpp"
#include "lepage/rational.hpp"

namespace lepage {

enum class AtomKind : uint8_t {
    base = 0,     // x^i
    field = 1,    // y^sigma_J
    inverse = 2,  // inv(P), P a registered nonvanishing expression
    sqrt_of = 3,  // s with s^2 = P, P registered
    opaque = 4,   // named symbol with no defining relation
};

/// One generator of the coordinate ring, packed into a single word so that the
/// raw integer order is the canonical atom order: kind, then (sigma, index) for
/// field atoms, base index for base atoms, registry id otherwise.
class Atom {
public:
    [[nodiscard]] static Atom base(int i) { return Atom(pack(AtomKind::base, 0, 0, i)); }
    [[nodiscard]] static Atom field(int sigma, MultiIndex j) {
        return Atom(pack(AtomKind::field, sigma, j.raw(), 0));
    }
    [[nodiscard]] static Atom inverse(int reg_id) {
        return Atom(pack(AtomKind::inverse, 0, 0, reg_id));
    }
    [[nodiscard]] static Atom sqrt_of(int reg_id) {
        return Atom(pack(AtomKind::sqrt_of, 0, 0, reg_id));
    }
    [[nodiscard]] static Atom opaque(int name_id) {
        return Atom(pack(AtomKind::opaque, 0, 0, name_id));
    }

    [[nodiscard]] AtomKind kind() const { return static_cast<AtomKind>(bits_ >> 60); }
    [[nodiscard]] int sigma() const { return static_cast<int>((bits_ >> 48) & 0xFFFu); }
    [[nodiscard]] MultiIndex index() const {
        return MultiIndex::from_raw(static_cast<uint32_t>((bits_ >> 16) & 0xFFFFFFFFu));
    }
    [[nodiscard]] int aux() const { return static_cast<int>(bits_ & 0xFFFFu); }

    [[nodiscard]] int base_index() const { return aux(); }
    [[nodiscard]] int reg_id() const { return aux(); }
    [[nodiscard]] int opaque_id() const { return aux(); }

    [[nodiscard]] uint64_t raw() const { return bits_; }

    friend bool operator==(Atom a, Atom b) { return a.bits_ == b.bits_; }
    friend bool operator!=(Atom a, Atom b) { return a.bits_ != b.bits_; }
    friend bool operator<(Atom a, Atom b) { return a.bits_ < b.bits_; }

private:
    explicit Atom(uint64_t b) : bits_(b) {}

    [[nodiscard]] static uint64_t pack(AtomKind k, int sigma, uint32_t idx, int aux) {
        return (static_cast<uint64_t>(k) << 60) | (static_cast<uint64_t>(sigma) << 48) |
               (static_cast<uint64_t>(idx) << 16) | static_cast<uint64_t>(aux);
    }

    uint64_t bits_;
};

struct AtomPow {
    Atom atom;
    int32_t pow;

    friend bool operator==(const AtomPow& a, const AtomPow& b) {
        return a.atom == b.atom && a.pow == b.pow;
    }
};

/// Power product of atoms, factors strictly increasing in atom order.
using Monomial = boost::container::small_vector<AtomPow, 4>;

[[nodiscard]] inline bool monomial_less(const Monomial& a, const Monomial& b) {
    size_t k = 0;
    for (; k < a.size() && k < b.size(); ++k) {
        if (a[k].atom != b[k].atom) return a[k].atom < b[k].atom;
        if (a[k].pow != b[k].pow) return a[k].pow < b[k].pow;
    }
    return a.size() < b.size();
}

[[nodiscard]] inline bool monomial_eq(const Monomial& a, const Monomial& b) {
    if (a.size() != b.size()) return false;
    for (size_t k = 0; k < a.size(); ++k)
        if (!(a[k] == b[k])) return false;
    return true;
}

struct MonomialHash {
    size_t operator()(const Monomial& m) const {
        uint64_t h = 0x9E3779B97F4A7C15ull;
        for (const AtomPow& f : m) {
            h ^= f.atom.raw() + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
            h ^= static_cast<uint64_t>(f.pow) + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
        }
        return static_cast<size_t>(h);
    }
};

struct MonomialEq {
    bool operator()(const Monomial& a, const Monomial& b) const { return monomial_eq(a, b); }
};

/// coefficient * monomial; a normalized expression is a sorted vector of these
/// with nonzero coefficients and pairwise distinct monomials.
struct Term {
    Monomial mono;
    Rational coeff;
};

using TermList = std::vector<Term>;

[[nodiscard]] inline bool term_list_eq(const TermList& a, const TermList& b) {
    if (a.size() != b.size()) return false;
    for (size_t k = 0; k < a.size(); ++k)
        if (!monomial_eq(a[k].mono, b[k].mono) || a[k].coeff != b[k].coeff) return false;
    return true;
}

}  // namespace lepage
