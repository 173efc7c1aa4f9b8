#include <lepage/relativity.hpp>

#include <catch2/catch_amalgamated.hpp>

using namespace lepage;

TEST_CASE("metric space indexing and exact inverse", "[relativity]") {
    auto ms = make_metric_space(2, SignatureMode::riemannian);
    const SpacePtr& sp = ms.space;
    CHECK(ms.pairs.size() == 3);
    CHECK(ms.sigma(1, 1) == 1);
    CHECK(ms.sigma(1, 2) == 2);
    CHECK(ms.sigma(2, 1) == 2);
    CHECK(ms.sigma(2, 2) == 3);
    CHECK(sp->field_label(2) == "g12");
    for (int i = 1; i <= 2; ++i)
        for (int j = 1; j <= 2; ++j) {
            ScalarExpr acc = ScalarExpr::zero(sp);
            for (int k = 1; k <= 2; ++k)
                acc = acc + ms.g[static_cast<size_t>(i - 1)][static_cast<size_t>(k - 1)] *
                                ms.g_inv[static_cast<size_t>(k - 1)][static_cast<size_t>(j - 1)];
            ScalarExpr expect = (i == j) ? ScalarExpr::one(sp) : ScalarExpr::zero(sp);
            CHECK(equals_zero(acc - expect));
        }
}

TEST_CASE("connection coefficients are symmetric in the lower pair", "[relativity]") {
    auto ms = make_metric_space(2, SignatureMode::riemannian);
    auto gamma = christoffel(ms);
    for (int i = 1; i <= 2; ++i)
        for (int j = 1; j <= 2; ++j)
            for (int k = 1; k <= 2; ++k)
                CHECK(identically_equal(
                    gamma[static_cast<size_t>(i - 1)][static_cast<size_t>(j - 1)]
                         [static_cast<size_t>(k - 1)],
                    gamma[static_cast<size_t>(i - 1)][static_cast<size_t>(k - 1)]
                         [static_cast<size_t>(j - 1)]));
}

TEST_CASE("scalar curvature matches explicit-metric oracles", "[relativity]") {
    auto ms = make_metric_space(2, SignatureMode::riemannian);
    const SpacePtr& sp = ms.space;
    ScalarExpr r = scalar_curvature(ms);
    ScalarExpr x1 = x_coord(sp, 1);
    ScalarExpr one = ScalarExpr::one(sp);
    ScalarExpr zero = ScalarExpr::zero(sp);
    {
        Matrix flat = {{one, zero}, {zero, one}};
        CHECK(equals_zero(substitute(r, metric_substitution(ms, flat),
                                     SubstPolicy::auto_register)));
    }
    {
        Matrix polar = {{one, zero}, {zero, x1 * x1}};
        CHECK(equals_zero(substitute(r, metric_substitution(ms, polar),
                                     SubstPolicy::auto_register)));
    }
    {
        Matrix bump = {{one, zero}, {zero, one + x1 * x1}};
        ScalarExpr rb =
            substitute(r, metric_substitution(ms, bump), SubstPolicy::auto_register);
        std::map<Atom, ScalarExpr> at_point{{Atom::base(1), one}};
        ScalarExpr rv = substitute(rb, at_point, SubstPolicy::auto_register);
        CHECK(identically_equal(rv, ScalarExpr::constant(sp, Rational(-1, 2))));
    }
}

TEST_CASE("scalar curvature is affine in the second metric derivatives",
          "[relativity]") {
    auto ms = make_metric_space(2, SignatureMode::riemannian);
    ScalarExpr r = scalar_curvature(ms);
    for (int sigma = 1; sigma <= 3; ++sigma)
        for (const MultiIndex& j : sorted_multi_indices(2, 2))
            CHECK(jet_order(raw_partial(r, Atom::field(sigma, j))) <= 1);
}

TEST_CASE("curvature principal component projects to first order", "[relativity]") {
    auto ms = make_metric_space(2, SignatureMode::riemannian);
    auto hl = hilbert_lagrangian(ms);
    CHECK(hl.order == 2);
    CHECK(jet_order(hl.density) == 2);
    CHECK(hilbert_theta(ms).jet_order() <= 1);
}

TEST_CASE("two-dimensional vacuum field equations vanish identically", "[relativity]") {
    auto ms = make_metric_space(2, SignatureMode::riemannian);
    auto hl = hilbert_lagrangian(ms);
    for (int a = 1; a <= 2; ++a)
        for (int b = a; b <= 2; ++b) CHECK(equals_zero(einstein_density(ms, a, b)));
    for (int sigma = 1; sigma <= 3; ++sigma)
        CHECK(equals_zero(classical_el_expression(hl, sigma)));
    CHECK(form_equals_zero(einstein_el(ms)));
}

TEST_CASE("curvature Caratheodory product reproduces the Lagrangian", "[relativity]") {
    auto ms = make_metric_space(2, SignatureMode::riemannian);
    auto hl = hilbert_lagrangian(ms);
    DecomposableForm cara = hilbert_caratheodory(ms);
    CHECK(cara.factors.size() == 2);
    CHECK(forms_equal(horizontalize(cara.expansion()), horizontalize(lambda_form(hl))));
}

TEST_CASE("lorentzian volume scale squares to minus the determinant", "[relativity]") {
    auto ms = make_metric_space(2, SignatureMode::lorentzian);
    ScalarExpr det = ms.g[0][0] * ms.g[1][1] - ms.g[0][1] * ms.g[1][0];
    CHECK(equals_zero(ms.volume_scale * ms.volume_scale + det));
    auto msr = make_metric_space(2, SignatureMode::riemannian);
    ScalarExpr detr = msr.g[0][0] * msr.g[1][1] - msr.g[0][1] * msr.g[1][0];
    CHECK(equals_zero(msr.volume_scale * msr.volume_scale - detr));
}
