#pragma once

#include "lepage/form.hpp"

namespace lepage {

/// Contact 1-form omega^sigma_J = dy^sigma_J - y^sigma_{J s} dx^s, expressed
/// in the storage basis. Needs |J| + 1 within the order cap.
[[nodiscard]] inline Form contact_one_form(const SpacePtr& sp, int sigma, MultiIndex j = {}) {
    Form f = dy_form(sp, sigma, j);
    for (int s = 1; s <= sp->n(); ++s) {
        Form part(sp, 1);
        part.accumulate(Wedge{Covector::dx(s)}, -y_coord(sp, sigma, j.with(s)));
        f = f + part;
    }
    return f;
}

namespace detail {

using FactorOptions = std::vector<std::vector<std::pair<Covector, ScalarExpr>>>;

inline void expand_factors_into(Form& out, const FactorOptions& opts, size_t k, Wedge& w,
                                const ScalarExpr& c) {
    if (c.is_zero()) return;
    if (k == opts.size()) {
        out.accumulate(w, c);
        return;
    }
    for (const auto& [cov, weight] : opts[k]) {
        w.push_back(cov);
        expand_factors_into(out, opts, k + 1, w, c * weight);
        w.pop_back();
    }
}

}  // namespace detail

/// Horizontalization h: exterior-algebra morphism fixing coefficients and dx,
/// sending dy^sigma_J to y^sigma_{J s} dx^s. Raises content order by one; the
/// needed promoted coordinates must fit under the order cap.
[[nodiscard]] inline Form horizontalize(const Form& f) {
    const SpacePtr& sp = f.space();
    if (f.degree() == 0) return f;
    Form out(sp, f.degree());
    for (const auto& kv : f.terms()) {
        detail::FactorOptions opts;
        opts.reserve(kv.first.size());
        for (const Covector& c : kv.first) {
            if (!c.is_dy()) {
                opts.push_back({{c, ScalarExpr::one(sp)}});
            } else {
                std::vector<std::pair<Covector, ScalarExpr>> horiz;
                for (int s = 1; s <= sp->n(); ++s)
                    horiz.emplace_back(Covector::dx(s),
                                       y_coord(sp, c.sigma(), c.index().with(s)));
                opts.push_back(std::move(horiz));
            }
        }
        Wedge w;
        detail::expand_factors_into(out, opts, 0, w, kv.second);
    }
    return out;
}

/// k-contact component p_k of the canonical decomposition on the once-promoted
/// space: each dy^sigma_J splits as omega^sigma_J + y^sigma_{J s} dx^s and the
/// terms with exactly k contact factors are collected, re-expressed in the
/// storage basis. p_0 coincides with horizontalization and sum_k p_k with the
/// promoted form.
[[nodiscard]] inline Form contact_component(const Form& f, int k) {
    const SpacePtr& sp = f.space();
    if (k < 0 || k > f.degree()) return Form(sp, f.degree());
    if (f.degree() == 0) return k == 0 ? f : Form(sp, 0);
    Form out(sp, f.degree());
    for (const auto& kv : f.terms()) {
        std::vector<size_t> dy_pos;
        for (size_t t = 0; t < kv.first.size(); ++t)
            if (kv.first[t].is_dy()) dy_pos.push_back(t);
        if (static_cast<int>(dy_pos.size()) < k) continue;
        const uint32_t subsets = 1u << dy_pos.size();
        for (uint32_t mask = 0; mask < subsets; ++mask) {
            if (__builtin_popcount(mask) != k) continue;
            detail::FactorOptions opts;
            opts.reserve(kv.first.size());
            size_t dyk = 0;
            for (size_t t = 0; t < kv.first.size(); ++t) {
                const Covector& c = kv.first[t];
                if (!c.is_dy()) {
                    opts.push_back({{c, ScalarExpr::one(sp)}});
                    continue;
                }
                const bool contact = mask & (1u << dyk);
                ++dyk;
                std::vector<std::pair<Covector, ScalarExpr>> branch;
                if (contact) branch.emplace_back(c, ScalarExpr::one(sp));
                for (int s = 1; s <= sp->n(); ++s) {
                    ScalarExpr ys = y_coord(sp, c.sigma(), c.index().with(s));
                    branch.emplace_back(Covector::dx(s), contact ? -ys : ys);
                }
                opts.push_back(std::move(branch));
            }
            Wedge w;
            detail::expand_factors_into(out, opts, 0, w, kv.second);
        }
    }
    return out;
}

}  // namespace lepage
