#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

#include "lepage/rational.hpp"

namespace lepage {

/// Symmetric derivative multi-index j1 <= j2 <= ... <= jk, k <= 7, entries 1..15.
/// Stored packed so that the raw integer order coincides with (length, entries)
/// lexicographic order; the sorted form is the canonical representative of the
/// unordered tuple.
class MultiIndex {
public:
    static constexpr int max_len = 7;

    constexpr MultiIndex() : bits_(0) {}

    MultiIndex(std::initializer_list<int> entries) : bits_(0) {
        for (int e : entries) *this = with(e);
    }

    [[nodiscard]] static MultiIndex from_sorted_or_not(const std::vector<int>& entries) {
        MultiIndex j;
        for (int e : entries) j = j.with(e);
        return j;
    }

    [[nodiscard]] int size() const { return static_cast<int>(bits_ >> 28); }
    [[nodiscard]] bool empty() const { return bits_ == 0; }

    [[nodiscard]] int at(int k) const {
        return static_cast<int>((bits_ >> (24 - 4 * k)) & 0xFu);
    }

    /// Sorted insertion of one more index; the result stays canonical.
    [[nodiscard]] MultiIndex with(int e) const {
        int n = size();
        if (n >= max_len) throw std::length_error("MultiIndex: more than 7 derivative indices");
        if (e < 1 || e > 15) throw std::out_of_range("MultiIndex: index out of range");
        std::array<int, max_len + 1> v{};
        int pos = 0;
        for (; pos < n && at(pos) <= e; ++pos) v[pos] = at(pos);
        v[pos] = e;
        for (int k = pos; k < n; ++k) v[k + 1] = at(k);
        return pack(v.data(), n + 1);
    }

    [[nodiscard]] MultiIndex without_position(int k) const {
        int n = size();
        if (k < 0 || k >= n) throw std::out_of_range("MultiIndex: bad position");
        std::array<int, max_len> v{};
        int w = 0;
        for (int t = 0; t < n; ++t)
            if (t != k) v[w++] = at(t);
        return pack(v.data(), w);
    }

    [[nodiscard]] int count_of(int e) const {
        int c = 0;
        for (int k = 0; k < size(); ++k) c += (at(k) == e);
        return c;
    }

    /// Number of distinct ordered tuples with this sorted representative,
    /// k! / prod(count_i!).
    [[nodiscard]] long long multiplicity() const {
        static constexpr long long fact[8] = {1, 1, 2, 6, 24, 120, 720, 5040};
        long long num = fact[size()];
        int k = 0;
        while (k < size()) {
            int run = 1;
            while (k + run < size() && at(k + run) == at(k)) ++run;
            num /= fact[run];
            k += run;
        }
        return num;
    }

    [[nodiscard]] std::vector<int> entries() const {
        std::vector<int> v(static_cast<size_t>(size()));
        for (int k = 0; k < size(); ++k) v[static_cast<size_t>(k)] = at(k);
        return v;
    }

    [[nodiscard]] std::string to_digits() const {
        std::string s;
        for (int k = 0; k < size(); ++k) s += static_cast<char>('0' + at(k));
        return s;
    }

    [[nodiscard]] uint32_t raw() const { return bits_; }
    [[nodiscard]] static MultiIndex from_raw(uint32_t b) {
        MultiIndex j;
        j.bits_ = b;
        return j;
    }

    friend bool operator==(MultiIndex a, MultiIndex b) { return a.bits_ == b.bits_; }
    friend bool operator!=(MultiIndex a, MultiIndex b) { return a.bits_ != b.bits_; }
    friend bool operator<(MultiIndex a, MultiIndex b) { return a.bits_ < b.bits_; }

private:
    [[nodiscard]] static MultiIndex pack(const int* v, int n) {
        uint32_t b = static_cast<uint32_t>(n) << 28;
        for (int k = 0; k < n; ++k) b |= static_cast<uint32_t>(v[k]) << (24 - 4 * k);
        MultiIndex j;
        j.bits_ = b;
        return j;
    }

    uint32_t bits_;
};

/// All sorted multi-indices of the given length over indices 1..n, in canonical order.
[[nodiscard]] inline std::vector<MultiIndex> sorted_multi_indices(int n, int len) {
    std::vector<MultiIndex> out;
    std::vector<int> cur;
    auto rec = [&](auto&& self, int minv) -> void {
        if (static_cast<int>(cur.size()) == len) {
            out.push_back(MultiIndex::from_sorted_or_not(cur));
            return;
        }
        for (int e = minv; e <= n; ++e) {
            cur.push_back(e);
            self(self, e);
            cur.pop_back();
        }
    };
    rec(rec, 1);
    return out;
}

/// All tuples in {1..n}^len (free index sums iterate over these).
[[nodiscard]] inline std::vector<std::vector<int>> index_tuples(int n, int len) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur(static_cast<size_t>(len), 1);
    if (len == 0) {
        out.emplace_back();
        return out;
    }
    while (true) {
        out.push_back(cur);
        int k = len - 1;
        while (k >= 0 && cur[static_cast<size_t>(k)] == n) {
            cur[static_cast<size_t>(k)] = 1;
            --k;
        }
        if (k < 0) break;
        ++cur[static_cast<size_t>(k)];
    }
    return out;
}

}  // namespace lepage
