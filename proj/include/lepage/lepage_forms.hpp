#pragma once

#include "lepage/contact.hpp"

namespace lepage {

/// Lagrangian of declared order r, lambda = L omega_0. The density may depend
/// on strictly fewer derivatives than r; it may not contain opaque atoms.
struct Lagrangian {
    SpacePtr space;
    int order;
    ScalarExpr density;
    bool nonvanishing = false;
};

[[nodiscard]] inline Lagrangian make_lagrangian(const SpacePtr& sp, int r, const ScalarExpr& L,
                                                bool nonvanishing = false) {
    if (r < 1) throw PreconditionError("Lagrangian order must be at least 1");
    if (r > sp->order_cap()) throw PreconditionError("Lagrangian order exceeds the order cap");
    if (L.space() != sp) throw PreconditionError("density lives on a different space");
    if (has_opaque(L)) throw PreconditionError("Lagrangian density contains opaque symbols");
    if (jet_order(L) > r)
        throw PreconditionError("density depends on derivatives above the declared order " +
                                std::to_string(r));
    if (nonvanishing) (void)register_inverse(L);  // declares the domain restriction
    return Lagrangian{sp, r, L, nonvanishing};
}

[[nodiscard]] inline Form lambda_form(const Lagrangian& lag) {
    return lag.density * omega_0(lag.space);
}

namespace detail {

/// Coefficient row shared by the principal component and the closed
/// Caratheodory factors:
///   sum_{l=0}^{limit} (-1)^l d_{p_1} ... d_{p_l} dhat L / dy^sigma_{J p_1..p_l i},
/// free sums over the tuples (p_1..p_l), symmetrized partials throughout.
[[nodiscard]] inline ScalarExpr lepage_row(const Lagrangian& lag, const std::vector<int>& j,
                                           int sigma, int i, int limit) {
    const SpacePtr& sp = lag.space;
    ScalarExpr acc = ScalarExpr::zero(sp);
    for (int l = 0; l <= limit; ++l) {
        for (const std::vector<int>& p : index_tuples(sp->n(), l)) {
            std::vector<int> full = j;
            full.insert(full.end(), p.begin(), p.end());
            full.push_back(i);
            ScalarExpr piece = partial(lag.density, sigma, full);
            if (piece.is_zero()) continue;
            piece = formal_derivative(piece, p);
            acc = (l % 2 == 0) ? acc + piece : acc - piece;
        }
    }
    return acc;
}

}  // namespace detail

/// Principal Lepage equivalent
///   Theta = L omega_0
///         + sum_{k=0}^{r-1} (sum_{l=0}^{r-1-k} (-1)^l d_{p_1}..d_{p_l}
///             dhat L / dy^sigma_{j_1..j_k p_1..p_l i}) omega^sigma_{j_1..j_k} ^ omega_i,
/// on jet order 2r-1. Free index sums with symmetrized partials; equivalently,
/// sorted multi-indices weighted by their multiplicity.
[[nodiscard]] inline Form principal_component(const Lagrangian& lag) {
    const SpacePtr& sp = lag.space;
    const int r = lag.order;
    if (sp->order_cap() < 2 * r - 1)
        throw PreconditionError("principal component needs order cap >= 2r-1");
    Form theta = lambda_form(lag);
    for (int k = 0; k <= r - 1; ++k) {
        for (const MultiIndex& j : sorted_multi_indices(sp->n(), k)) {
            const Rational weight(j.multiplicity());
            for (int sigma = 1; sigma <= sp->m(); ++sigma) {
                Form omega_sigma_j = contact_one_form(sp, sigma, j);
                for (int i = 1; i <= sp->n(); ++i) {
                    ScalarExpr c =
                        detail::lepage_row(lag, j.entries(), sigma, i, r - 1 - k);
                    if (c.is_zero()) continue;
                    theta = theta + (c * weight) * wedge(omega_sigma_j, omega_j(sp, i));
                }
            }
        }
    }
    return theta;
}

// ---------------------------------------------------------------------------
// fundamental form (first order)

/// Z = L omega_0 + sum_{k=1}^{n} 1/((n-k)! (k!)^2)
///       d^k L / dy^{s_1}_{j_1} .. dy^{s_k}_{j_k}
///       eps_{j_1..j_k i_{k+1}..i_n} omega^{s_1} ^..^ omega^{s_k} ^ dx^{i_{k+1}} ^..^ dx^{i_n}.
[[nodiscard]] inline Form fundamental_form(const Lagrangian& lag) {
    const SpacePtr& sp = lag.space;
    if (lag.order != 1) throw PreconditionError("fundamental form implemented for first order");
    const int n = sp->n(), m = sp->m();
    static constexpr long long fact[10] = {1, 1, 2, 6, 24, 120, 720, 5040, 40320, 362880};
    Form z = lambda_form(lag);
    // permutations of (1..n) supply the nonzero Levi-Civita slots
    std::vector<int> perm(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) perm[static_cast<size_t>(i)] = i + 1;
    std::vector<std::pair<std::vector<int>, int>> perms;
    {
        std::vector<int> p = perm;
        std::sort(p.begin(), p.end());
        do {
            int inv = 0;
            for (size_t a = 0; a < p.size(); ++a)
                for (size_t b = a + 1; b < p.size(); ++b)
                    if (p[a] > p[b]) ++inv;
            perms.emplace_back(p, inv % 2 == 0 ? 1 : -1);
        } while (std::next_permutation(p.begin(), p.end()));
    }
    for (int k = 1; k <= n; ++k) {
        const Rational norm(1, fact[n - k] * fact[k] * fact[k]);
        for (const std::vector<int>& sigmas : index_tuples(m, k)) {
            for (const auto& [p, eps] : perms) {
                // j-tuple = first k slots of the permutation, i-tuple the rest
                ScalarExpr c = lag.density;
                for (int t = 0; t < k && !c.is_zero(); ++t)
                    c = partial(c, sigmas[static_cast<size_t>(t)],
                                MultiIndex{p[static_cast<size_t>(t)]});
                if (c.is_zero()) continue;
                std::vector<Form> fs;
                fs.reserve(static_cast<size_t>(n));
                for (int t = 0; t < k; ++t)
                    fs.push_back(contact_one_form(sp, sigmas[static_cast<size_t>(t)]));
                for (int t = k; t < n; ++t)
                    fs.push_back(dx_form(sp, p[static_cast<size_t>(t)]));
                z = z + (c * (norm * eps)) * wedge_all(fs);
            }
        }
    }
    return z;
}

// ---------------------------------------------------------------------------
// Caratheodory equivalents

/// Decomposable n-form: prefactor * factor_1 ^ ... ^ factor_n with stored
/// 1-form factors.
struct DecomposableForm {
    ScalarExpr prefactor;
    std::vector<Form> factors;

    [[nodiscard]] Form expansion() const { return prefactor * wedge_all(factors); }
};

namespace detail {

[[nodiscard]] inline ScalarExpr caratheodory_prefactor(const Lagrangian& lag) {
    if (!lag.nonvanishing)
        throw PreconditionError("Caratheodory equivalent needs a nonvanishing Lagrangian");
    return pow(inverse_of(lag.density), lag.space->n() - 1);
}

}  // namespace detail

/// First-order Caratheodory form (1/L^{n-1}) Wedge_j (L dx^j + dL/dy^sigma_j omega^sigma).
[[nodiscard]] inline DecomposableForm caratheodory_first(const Lagrangian& lag) {
    const SpacePtr& sp = lag.space;
    if (lag.order != 1) throw PreconditionError("caratheodory_first needs a first-order Lagrangian");
    DecomposableForm out{detail::caratheodory_prefactor(lag), {}};
    for (int j = 1; j <= sp->n(); ++j) {
        Form factor = lag.density * dx_form(sp, j);
        for (int sigma = 1; sigma <= sp->m(); ++sigma) {
            ScalarExpr c = partial(lag.density, sigma, MultiIndex{j});
            if (!c.is_zero()) factor = factor + c * contact_one_form(sp, sigma);
        }
        out.factors.push_back(std::move(factor));
    }
    return out;
}

/// Caratheodory equivalent by iterated contraction of the principal component:
/// factor_j = (-1)^{n-j} i_{d_n} ... i_{d_{j+1}} i_{d_{j-1}} ... i_{d_1} Theta.
[[nodiscard]] inline DecomposableForm caratheodory_contraction(const Lagrangian& lag) {
    const SpacePtr& sp = lag.space;
    Form theta = principal_component(lag);
    DecomposableForm out{detail::caratheodory_prefactor(lag), {}};
    for (int j = 1; j <= sp->n(); ++j) {
        Form f = theta;
        for (int k = 1; k <= sp->n(); ++k) {
            if (k == j) continue;
            f = contract(formal_field(sp, k), f);
        }
        out.factors.push_back((sp->n() - j) % 2 == 0 ? f : -f);
    }
    return out;
}

/// Closed-formula Caratheodory equivalent: factor_j = L dx^j
///   + sum_{s=0}^{r-1} (sum_{k=0}^{r-1-s} (-1)^k d_{p_1}..d_{p_k}
///       dhat L / dy^sigma_{i_1..i_s p_1..p_k j}) omega^sigma_{i_1..i_s}.
[[nodiscard]] inline DecomposableForm caratheodory_closed(const Lagrangian& lag) {
    const SpacePtr& sp = lag.space;
    const int r = lag.order;
    if (sp->order_cap() < 2 * r - 1)
        throw PreconditionError("closed Caratheodory formula needs order cap >= 2r-1");
    DecomposableForm out{detail::caratheodory_prefactor(lag), {}};
    for (int j = 1; j <= sp->n(); ++j) {
        Form factor = lag.density * dx_form(sp, j);
        for (int s = 0; s <= r - 1; ++s) {
            for (const MultiIndex& k_idx : sorted_multi_indices(sp->n(), s)) {
                const Rational weight(k_idx.multiplicity());
                for (int sigma = 1; sigma <= sp->m(); ++sigma) {
                    ScalarExpr c =
                        detail::lepage_row(lag, k_idx.entries(), sigma, j, r - 1 - s);
                    if (c.is_zero()) continue;
                    factor = factor + (c * weight) * contact_one_form(sp, sigma, k_idx);
                }
            }
        }
        out.factors.push_back(std::move(factor));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Euler-Lagrange forms

/// E_lambda = p_1 d Theta_lambda, a source form of order 2r.
[[nodiscard]] inline Form euler_lagrange(const Lagrangian& lag) {
    if (lag.space->order_cap() < 2 * lag.order)
        throw PreconditionError("Euler-Lagrange form needs order cap >= 2r");
    return contact_component(exterior_derivative(principal_component(lag)), 1);
}

/// Classical expression sum_{l=0}^{r} (-1)^l d_{p_1}..d_{p_l} dhat L / dy^sigma_{p_1..p_l};
/// the independent route used as an oracle for euler_lagrange and by is_trivial.
[[nodiscard]] inline ScalarExpr classical_el_expression(const Lagrangian& lag, int sigma) {
    const SpacePtr& sp = lag.space;
    ScalarExpr acc = ScalarExpr::zero(sp);
    for (int l = 0; l <= lag.order; ++l) {
        for (const std::vector<int>& p : index_tuples(sp->n(), l)) {
            ScalarExpr piece = partial(lag.density, sigma, p);
            if (piece.is_zero()) continue;
            piece = formal_derivative(piece, p);
            acc = (l % 2 == 0) ? acc + piece : acc - piece;
        }
    }
    return acc;
}

[[nodiscard]] inline Form classical_euler_lagrange(const Lagrangian& lag) {
    const SpacePtr& sp = lag.space;
    if (sp->order_cap() < 2 * lag.order)
        throw PreconditionError("Euler-Lagrange expressions need order cap >= 2r");
    Form e(sp, sp->n() + 1);
    Form vol = omega_0(sp);
    for (int sigma = 1; sigma <= sp->m(); ++sigma) {
        ScalarExpr c = classical_el_expression(lag, sigma);
        if (!c.is_zero()) e = e + c * wedge(contact_one_form(sp, sigma), vol);
    }
    return e;
}

/// Variationally trivial Lagrangians are exactly those with vanishing
/// Euler-Lagrange expressions.
[[nodiscard]] inline bool is_trivial(const Lagrangian& lag) {
    for (int sigma = 1; sigma <= lag.space->m(); ++sigma)
        if (!equals_zero(classical_el_expression(lag, sigma))) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Lepage conditions

/// Field vertical over the total space: d/dy^sigma_J components for
/// 1 <= |J| <= max_order are fresh opaque symbols "<prefix><sigma>_<J>", all
/// dx and dy^sigma components vanish. Contraction keeps the components as
/// inert unknowns, which is what their arbitrariness requires.
[[nodiscard]] inline VectorField vertical_opaque_field(const SpacePtr& sp, int max_order,
                                                       const std::string& prefix = "xi") {
    VectorField xi{sp, {}};
    for (int k = 1; k <= max_order; ++k)
        for (const MultiIndex& j : sorted_multi_indices(sp->n(), k))
            for (int sigma = 1; sigma <= sp->m(); ++sigma) {
                std::string name = prefix + std::to_string(sigma) + "_" + j.to_digits();
                xi.components.emplace(Covector::dy(sigma, j), opaque_symbol(sp, name));
            }
    return xi;
}

struct LepageReport {
    bool horizontal_matches;  // h rho = lambda
    bool vertical_trivial;    // h i_xi d rho = 0 for arbitrary vertical xi
    Form residual;            // the checked h i_xi d rho

    [[nodiscard]] bool ok() const { return horizontal_matches && vertical_trivial; }
};

/// Decides whether rho is a Lepage equivalent of lambda: (i) h rho = lambda,
/// (ii) h i_xi d rho = 0 identically in the opaque components of an arbitrary
/// vertical field on rho's jet space.
[[nodiscard]] inline LepageReport check_lepage(const Form& rho, const Lagrangian& lag) {
    const SpacePtr& sp = lag.space;
    if (rho.space() != sp) throw PreconditionError("form and Lagrangian on different spaces");
    if (rho.degree() != sp->n()) throw PreconditionError("Lepage candidate must be an n-form");
    LepageReport rep{false, false, Form(sp, sp->n())};
    rep.horizontal_matches = form_equals_zero(horizontalize(rho) - lambda_form(lag));
    Form drho = exterior_derivative(rho);
    VectorField xi = vertical_opaque_field(sp, std::max(rho.jet_order(), drho.jet_order()));
    rep.residual = horizontalize(contract(xi, drho));
    rep.vertical_trivial = form_equals_zero(rep.residual);
    return rep;
}

}  // namespace lepage
