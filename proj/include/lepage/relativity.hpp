#pragma once

#include "lepage/charts.hpp"

namespace lepage {

enum class SignatureMode { riemannian, lorentzian };

/// Jet space of metric fields: one field coordinate g_ab per sorted pair
/// a <= b, derivative atoms g_ab,c.. with the usual symmetric-index handling.
/// det(g) is registered nonvanishing; s is the registered square root of
/// det(g) (riemannian) or of -det(g) (lorentzian), so s^2 rewrites
/// polynomially.
struct MetricSpace {
    SpacePtr space;
    int n = 0;
    SignatureMode mode = SignatureMode::riemannian;
    std::vector<std::pair<int, int>> pairs;  // sigma-1 -> (a, b), a <= b
    std::vector<std::vector<int>> sigma_of;  // [a-1][b-1] -> sigma
    Matrix g;                                // g[a-1][b-1], symmetric
    Matrix g_inv;                            // adjugate times registered inv(det)
    ScalarExpr det_g;
    ScalarExpr volume_scale;  // s = sqrt(det g) or sqrt(-det g)

    [[nodiscard]] int sigma(int a, int b) const {
        return sigma_of[static_cast<size_t>(a - 1)][static_cast<size_t>(b - 1)];
    }
    /// g_ab,J as an expression; (a, b) in any order.
    [[nodiscard]] ScalarExpr metric_coord(int a, int b, const MultiIndex& j = MultiIndex{}) const {
        return y_coord(space, sigma(a, b), j);
    }
};

[[nodiscard]] inline MetricSpace make_metric_space(int n,
                                                   SignatureMode mode = SignatureMode::riemannian,
                                                   int order_cap = 4) {
    if (n < 2 || n > 4) throw PreconditionError("metric spaces supported for n in 2..4");
    MetricSpace ms;
    ms.n = n;
    ms.mode = mode;
    ms.space = make_jet_space(n, n * (n + 1) / 2, order_cap);
    ms.sigma_of.assign(static_cast<size_t>(n), std::vector<int>(static_cast<size_t>(n), 0));
    std::vector<std::string> labels;
    for (int a = 1; a <= n; ++a)
        for (int b = a; b <= n; ++b) {
            ms.pairs.emplace_back(a, b);
            const int sigma = static_cast<int>(ms.pairs.size());
            ms.sigma_of[static_cast<size_t>(a - 1)][static_cast<size_t>(b - 1)] = sigma;
            ms.sigma_of[static_cast<size_t>(b - 1)][static_cast<size_t>(a - 1)] = sigma;
            labels.push_back("g" + std::to_string(a) + std::to_string(b));
        }
    ms.space->set_field_labels(labels);
    ms.g.assign(static_cast<size_t>(n), {});
    for (int a = 1; a <= n; ++a)
        for (int b = 1; b <= n; ++b)
            ms.g[static_cast<size_t>(a - 1)].push_back(ms.metric_coord(a, b));
    MatrixInverse gi = inverse_matrix(ms.g, "metric determinant vanishes identically");
    ms.det_g = gi.det;
    ms.g_inv = std::move(gi.inv);
    ms.volume_scale = register_sqrt(mode == SignatureMode::riemannian ? ms.det_g : -ms.det_g);
    return ms;
}

/// Christoffel symbols of the Levi-Civita connection,
/// C[i-1][j-1][k-1] = (1/2) g^{il} (g_lj,k + g_lk,j - g_jk,l).
[[nodiscard]] inline std::vector<Matrix> christoffel(const MetricSpace& ms) {
    const SpacePtr& sp = ms.space;
    const int n = ms.n;
    std::vector<Matrix> c(static_cast<size_t>(n),
                          Matrix(static_cast<size_t>(n),
                                 std::vector<ScalarExpr>(static_cast<size_t>(n),
                                                         ScalarExpr::zero(sp))));
    const Rational half(1, 2);
    for (int j = 1; j <= n; ++j)
        for (int k = j; k <= n; ++k) {
            // lowered symbol [l, jk] shared across i
            std::vector<ScalarExpr> lowered;
            lowered.reserve(static_cast<size_t>(n));
            for (int l = 1; l <= n; ++l)
                lowered.push_back(ms.metric_coord(l, j, MultiIndex{k}) +
                                  ms.metric_coord(l, k, MultiIndex{j}) -
                                  ms.metric_coord(j, k, MultiIndex{l}));
            for (int i = 1; i <= n; ++i) {
                ScalarExpr acc = ScalarExpr::zero(sp);
                for (int l = 1; l <= n; ++l)
                    acc = acc +
                          ms.g_inv[static_cast<size_t>(i - 1)][static_cast<size_t>(l - 1)] *
                              lowered[static_cast<size_t>(l - 1)];
                acc = half * acc;
                c[static_cast<size_t>(i - 1)][static_cast<size_t>(j - 1)]
                 [static_cast<size_t>(k - 1)] = acc;
                c[static_cast<size_t>(i - 1)][static_cast<size_t>(k - 1)]
                 [static_cast<size_t>(j - 1)] = std::move(acc);
            }
        }
    return c;
}

/// Ricci tensor R_jk = d_i C^i_jk - d_j C^i_ik + C^i_ip C^p_jk - C^i_jp C^p_ik.
[[nodiscard]] inline Matrix ricci(const MetricSpace& ms) {
    const SpacePtr& sp = ms.space;
    const int n = ms.n;
    std::vector<Matrix> c = christoffel(ms);
    auto at = [&](int i, int j, int k) -> const ScalarExpr& {
        return c[static_cast<size_t>(i - 1)][static_cast<size_t>(j - 1)]
                [static_cast<size_t>(k - 1)];
    };
    // contracted symbol C^i_ik
    std::vector<ScalarExpr> trace(static_cast<size_t>(n), ScalarExpr::zero(sp));
    for (int k = 1; k <= n; ++k)
        for (int i = 1; i <= n; ++i)
            trace[static_cast<size_t>(k - 1)] = trace[static_cast<size_t>(k - 1)] + at(i, i, k);
    Matrix r(static_cast<size_t>(n),
             std::vector<ScalarExpr>(static_cast<size_t>(n), ScalarExpr::zero(sp)));
    for (int j = 1; j <= n; ++j)
        for (int k = j; k <= n; ++k) {
            ScalarExpr acc = ScalarExpr::zero(sp);
            for (int i = 1; i <= n; ++i) acc = acc + formal_derivative(at(i, j, k), i);
            acc = acc - formal_derivative(trace[static_cast<size_t>(k - 1)], j);
            for (int p = 1; p <= n; ++p) {
                acc = acc + trace[static_cast<size_t>(p - 1)] * at(p, j, k);
                for (int i = 1; i <= n; ++i) acc = acc - at(i, j, p) * at(p, i, k);
            }
            r[static_cast<size_t>(j - 1)][static_cast<size_t>(k - 1)] = acc;
            r[static_cast<size_t>(k - 1)][static_cast<size_t>(j - 1)] = std::move(acc);
        }
    return r;
}

/// Scalar curvature R = g^{jk} R_jk; affine in the second-derivative atoms.
[[nodiscard]] inline ScalarExpr scalar_curvature(const MetricSpace& ms) {
    Matrix r = ricci(ms);
    ScalarExpr acc = ScalarExpr::zero(ms.space);
    for (int j = 1; j <= ms.n; ++j)
        for (int k = 1; k <= ms.n; ++k)
            acc = acc + ms.g_inv[static_cast<size_t>(j - 1)][static_cast<size_t>(k - 1)] *
                            r[static_cast<size_t>(j - 1)][static_cast<size_t>(k - 1)];
    return acc;
}

/// Curvature density R * s, the Lagrange function of the Hilbert Lagrangian.
[[nodiscard]] inline ScalarExpr curvature_density(const MetricSpace& ms) {
    return scalar_curvature(ms) * ms.volume_scale;
}

/// Hilbert Lagrangian: second order, density R * s, nonvanishing on the
/// working domain (scalar-flat metrics excluded).
[[nodiscard]] inline Lagrangian hilbert_lagrangian(const MetricSpace& ms) {
    return make_lagrangian(ms.space, 2, curvature_density(ms), /*nonvanishing=*/true);
}

/// Principal Lepage equivalent of the Hilbert Lagrangian; its coefficients
/// carry no second-derivative atoms, which makes it a first-order object.
[[nodiscard]] inline Form hilbert_theta(const MetricSpace& ms) {
    return principal_component(hilbert_lagrangian(ms));
}

/// Caratheodory equivalent of the Hilbert Lagrangian.
[[nodiscard]] inline DecomposableForm hilbert_caratheodory(const MetricSpace& ms) {
    return caratheodory_closed(hilbert_lagrangian(ms));
}

/// Euler-Lagrange form of the Hilbert Lagrangian (vacuum Einstein equations).
[[nodiscard]] inline Form einstein_el(const MetricSpace& ms) {
    return euler_lagrange(hilbert_lagrangian(ms));
}

/// Independent oracle for the Euler-Lagrange expressions: the Einstein-tensor
/// density -s (Ric^{ab} - (1/2) R g^{ab}) weighted by the sorted-pair
/// multiplicity (off-diagonal components represent two matrix slots).
[[nodiscard]] inline ScalarExpr einstein_density(const MetricSpace& ms, int a, int b) {
    Matrix ric = ricci(ms);
    ScalarExpr r_scalar = ScalarExpr::zero(ms.space);
    Matrix ric_up(static_cast<size_t>(ms.n),
                  std::vector<ScalarExpr>(static_cast<size_t>(ms.n), ScalarExpr::zero(ms.space)));
    for (int i = 1; i <= ms.n; ++i)
        for (int j = 1; j <= ms.n; ++j) {
            r_scalar = r_scalar +
                       ms.g_inv[static_cast<size_t>(i - 1)][static_cast<size_t>(j - 1)] *
                           ric[static_cast<size_t>(i - 1)][static_cast<size_t>(j - 1)];
            for (int p = 1; p <= ms.n; ++p)
                for (int q = 1; q <= ms.n; ++q)
                    ric_up[static_cast<size_t>(i - 1)][static_cast<size_t>(j - 1)] =
                        ric_up[static_cast<size_t>(i - 1)][static_cast<size_t>(j - 1)] +
                        ms.g_inv[static_cast<size_t>(i - 1)][static_cast<size_t>(p - 1)] *
                            ms.g_inv[static_cast<size_t>(j - 1)][static_cast<size_t>(q - 1)] *
                            ric[static_cast<size_t>(p - 1)][static_cast<size_t>(q - 1)];
        }
    ScalarExpr einstein_up =
        ric_up[static_cast<size_t>(a - 1)][static_cast<size_t>(b - 1)] -
        Rational(1, 2) * r_scalar * ms.g_inv[static_cast<size_t>(a - 1)][static_cast<size_t>(b - 1)];
    ScalarExpr density = -(einstein_up * ms.volume_scale);
    if (a != b) density = Rational(2) * density;
    return density;
}

/// Substitution map sending every metric jet atom to the corresponding formal
/// derivative of the given coordinate expressions (images may depend on base
/// coordinates only); used to evaluate curvature on explicit metrics.
[[nodiscard]] inline std::map<Atom, ScalarExpr> metric_substitution(const MetricSpace& ms,
                                                                    const Matrix& images,
                                                                    int max_order = 2) {
    std::map<Atom, ScalarExpr> amap;
    for (size_t s = 0; s < ms.pairs.size(); ++s) {
        const auto [a, b] = ms.pairs[s];
        const ScalarExpr& img = images[static_cast<size_t>(a - 1)][static_cast<size_t>(b - 1)];
        if (jet_order(img) > 0)
            throw PreconditionError("explicit metric entries may only depend on base coordinates");
        for (int len = 0; len <= max_order; ++len)
            for (const MultiIndex& j : sorted_multi_indices(ms.n, len)) {
                ScalarExpr val = img;
                for (int t = 0; t < j.size(); ++t) val = formal_derivative(val, j.at(t));
                amap.emplace(Atom::field(static_cast<int>(s) + 1, j), std::move(val));
            }
    }
    return amap;
}

}  // namespace lepage
