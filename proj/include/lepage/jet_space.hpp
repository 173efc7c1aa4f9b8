#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "lepage/atom.hpp"

namespace lepage {

/// Problem-file or usage errors; maps to exit code 2 in the tool.
struct ParseError : std::runtime_error {
    int line = 0, column = 0;
    ParseError(const std::string& msg, int ln = 0, int col = 0)
        : std::runtime_error(ln ? msg + " (line " + std::to_string(ln) + ", column " +
                                      std::to_string(col) + ")"
                                : msg),
          line(ln),
          column(col) {}
};

/// Violated operation contract; maps to exit code 3 in the tool.
struct PreconditionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class JetSpace;
using SpacePtr = std::shared_ptr<JetSpace>;

/// Fibred coordinate context: base dimension n, fibre dimension m, and the
/// highest jet order any atom may carry. Also owns the registry of inverse and
/// square-root atoms (each entry records the defining expression and, by being
/// registered, the declaration that it is nonvanishing on the domain of
/// interest) plus the opaque-symbol table. Registration is append-only, so
/// previously built expressions never change meaning.
class JetSpace {
public:
    JetSpace(int n, int m, int order_cap) : n_(n), m_(m), cap_(order_cap) {
        if (n < 1 || n > 9) throw PreconditionError("base dimension must be 1..9");
        if (m < 1 || m > 2000) throw PreconditionError("fibre dimension must be 1..2000");
        if (order_cap < 1 || order_cap > MultiIndex::max_len)
            throw PreconditionError("order cap must be 1..7");
    }

    [[nodiscard]] int n() const { return n_; }
    [[nodiscard]] int m() const { return m_; }
    [[nodiscard]] int order_cap() const { return cap_; }

    struct RegEntry {
        AtomKind kind;       // inverse or sqrt_of
        TermList defn;       // normalized defining expression
        int defn_jet_order;  // jet order of defn, counted through nested entries
        bool defn_is_monomial;
    };

    [[nodiscard]] int find_entry(AtomKind kind, const TermList& defn) const {
        for (size_t k = 0; k < entries_.size(); ++k)
            if (entries_[k].kind == kind && term_list_eq(entries_[k].defn, defn))
                return static_cast<int>(k);
        return -1;
    }

    int add_entry(AtomKind kind, TermList defn, int defn_jet_order) {
        RegEntry e;
        e.kind = kind;
        e.defn_is_monomial = defn.size() == 1;
        e.defn = std::move(defn);
        e.defn_jet_order = defn_jet_order;
        entries_.push_back(std::move(e));
        if (entries_.size() > 0xFFFF) throw PreconditionError("registry overflow");
        return static_cast<int>(entries_.size()) - 1;
    }

    [[nodiscard]] const RegEntry& entry(int id) const {
        return entries_.at(static_cast<size_t>(id));
    }
    [[nodiscard]] int entry_count() const { return static_cast<int>(entries_.size()); }

    int intern_opaque(const std::string& name, bool constant_like) {
        for (size_t k = 0; k < opaque_.size(); ++k)
            if (opaque_[k].name == name) {
                if (opaque_[k].constant_like != constant_like)
                    throw PreconditionError("opaque symbol '" + name +
                                            "' reused with a different constant flag");
                return static_cast<int>(k);
            }
        opaque_.push_back({name, constant_like});
        if (opaque_.size() > 0xFFFF) throw PreconditionError("opaque table overflow");
        return static_cast<int>(opaque_.size()) - 1;
    }

    [[nodiscard]] const std::string& opaque_name(int id) const {
        return opaque_.at(static_cast<size_t>(id)).name;
    }
    [[nodiscard]] bool opaque_constant_like(int id) const {
        return opaque_.at(static_cast<size_t>(id)).constant_like;
    }

    /// Display name of the sigma-th fibre coordinate ("y<sigma>" unless a
    /// caller, e.g. the metric construction, installs labels like "g12").
    [[nodiscard]] std::string field_label(int sigma) const {
        if (!field_labels_.empty()) return field_labels_.at(static_cast<size_t>(sigma - 1));
        return "y" + std::to_string(sigma);
    }
    void set_field_labels(std::vector<std::string> labels) { field_labels_ = std::move(labels); }
    [[nodiscard]] bool has_field_labels() const { return !field_labels_.empty(); }

    void check_base_index(int i) const {
        if (i < 1 || i > n_) throw PreconditionError("base index out of range");
    }
    void check_field(int sigma, MultiIndex j) const {
        if (sigma < 1 || sigma > m_) throw PreconditionError("fibre index out of range");
        if (j.size() > cap_)
            throw PreconditionError("jet order " + std::to_string(j.size()) +
                                    " exceeds the order cap " + std::to_string(cap_));
        for (int k = 0; k < j.size(); ++k)
            if (j.at(k) > n_) throw PreconditionError("derivative index out of range");
    }

private:
    struct OpaqueSym {
        std::string name;
        bool constant_like;
    };

    int n_, m_, cap_;
    std::vector<RegEntry> entries_;
    std::vector<OpaqueSym> opaque_;
    std::vector<std::string> field_labels_;
};

[[nodiscard]] inline SpacePtr make_jet_space(int n, int m, int order_cap) {
    return std::make_shared<JetSpace>(n, m, order_cap);
}

}  // namespace lepage
