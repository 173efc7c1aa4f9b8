#include <lepage/lepage_forms.hpp>

#include <catch2/catch_amalgamated.hpp>

using namespace lepage;

TEST_CASE("principal component collapses to dy ^ dx2 for L = y1_1", "[lepage]") {
    auto sp = make_jet_space(2, 1, 2);
    auto lag = make_lagrangian(sp, 1, y_coord(sp, 1, MultiIndex{1}));
    Form theta = principal_component(lag);
    CHECK(forms_equal(theta, wedge(dy_form(sp, 1), dx_form(sp, 2))));
    CHECK(theta.jet_order() == 0);
}

TEST_CASE("principal component of L = y_11 over a line is dy_1", "[lepage]") {
    auto sp = make_jet_space(1, 1, 3);
    auto lag = make_lagrangian(sp, 2, y_coord(sp, 1, MultiIndex{1, 1}));
    CHECK(forms_equal(principal_component(lag), dy_form(sp, 1, MultiIndex{1})));
}

TEST_CASE("harmonic Lagrangian: explicit theta, Lepage check, field equations",
          "[lepage]") {
    auto sp = make_jet_space(2, 1, 4);
    ScalarExpr y1 = y_coord(sp, 1, MultiIndex{1}), y2 = y_coord(sp, 1, MultiIndex{2});
    ScalarExpr l = Rational(1, 2) * (y1 * y1 + y2 * y2);
    auto lag = make_lagrangian(sp, 1, l);
    Form theta = principal_component(lag);
    Form w1 = contact_one_form(sp, 1);
    Form expected = l * omega_0(sp) + y1 * wedge(w1, dx_form(sp, 2)) -
                    y2 * wedge(w1, dx_form(sp, 1));
    CHECK(forms_equal(theta, expected));
    CHECK(forms_equal(horizontalize(theta), lambda_form(lag)));
    LepageReport rep = check_lepage(theta, lag);
    CHECK(rep.horizontal_matches);
    CHECK(rep.vertical_trivial);
    CHECK(rep.ok());
    CHECK(forms_equal(euler_lagrange(lag), classical_euler_lagrange(lag)));
    ScalarExpr e1 = classical_el_expression(lag, 1);
    ScalarExpr want = -(y_coord(sp, 1, MultiIndex{1, 1}) + y_coord(sp, 1, MultiIndex{2, 2}));
    CHECK(identically_equal(e1, want));
    // the Lagrangian form itself is not a Lepage equivalent
    LepageReport bad = check_lepage(lambda_form(lag), lag);
    CHECK(bad.horizontal_matches);
    CHECK(!bad.vertical_trivial);
    CHECK(!bad.ok());
}

TEST_CASE("fundamental form adds the antisymmetric correction", "[lepage]") {
    auto sp = make_jet_space(2, 2, 2);
    ScalarExpr l = y_coord(sp, 1, MultiIndex{1}) * y_coord(sp, 2, MultiIndex{2});
    auto lag = make_lagrangian(sp, 1, l);
    Form z = fundamental_form(lag);
    Form diff = z - principal_component(lag);
    Form expected = Rational(1, 2) * wedge(contact_one_form(sp, 1), contact_one_form(sp, 2));
    CHECK(forms_equal(diff, expected));
    CHECK(forms_equal(horizontalize(z), lambda_form(lag)));
    CHECK(check_lepage(z, lag).ok());
}

TEST_CASE("first-order Caratheodory routes agree factor by factor", "[lepage]") {
    auto sp = make_jet_space(2, 1, 2);
    ScalarExpr l = y_coord(sp, 1, MultiIndex{1}) * y_coord(sp, 1, MultiIndex{2});
    auto lag = make_lagrangian(sp, 1, l, true);
    DecomposableForm a = caratheodory_first(lag);
    DecomposableForm b = caratheodory_contraction(lag);
    DecomposableForm c = caratheodory_closed(lag);
    for (size_t j = 0; j < 2; ++j) {
        CHECK(forms_equal(a.factors[j], b.factors[j]));
        CHECK(forms_equal(a.factors[j], c.factors[j]));
    }
    CHECK(identically_equal(a.prefactor, b.prefactor));
    CHECK(check_lepage(a.expansion(), lag).ok());
}

TEST_CASE("second-order Caratheodory matches the closed formula", "[lepage]") {
    auto sp = make_jet_space(2, 1, 4);
    ScalarExpr l = y_coord(sp, 1, MultiIndex{1, 1}) + y_coord(sp, 1, MultiIndex{2, 2});
    auto lag = make_lagrangian(sp, 2, l, true);
    DecomposableForm b = caratheodory_contraction(lag);
    DecomposableForm c = caratheodory_closed(lag);
    for (size_t j = 0; j < 2; ++j) CHECK(forms_equal(b.factors[j], c.factors[j]));
    Form lam = c.expansion();
    CHECK(forms_equal(horizontalize(lam), lambda_form(lag)));
    CHECK(check_lepage(lam, lag).ok());
    CHECK(check_lepage(principal_component(lag), lag).ok());
}

TEST_CASE("triviality detection via the source-form test", "[lepage]") {
    auto sp = make_jet_space(1, 1, 2);
    CHECK(is_trivial(make_lagrangian(sp, 1, y_coord(sp, 1, MultiIndex{1}))));
    ScalarExpr y1 = y_coord(sp, 1, MultiIndex{1});
    CHECK(!is_trivial(make_lagrangian(sp, 1, Rational(1, 2) * y1 * y1)));
}

TEST_CASE("fundamental form is closed exactly for trivial Lagrangians", "[lepage]") {
    auto sp = make_jet_space(2, 1, 3);
    auto lag = make_lagrangian(sp, 1, y_coord(sp, 1, MultiIndex{1}));
    CHECK(form_equals_zero(exterior_derivative(fundamental_form(lag))));
    auto lag2 = make_lagrangian(sp, 1, y_coord(sp, 1));
    CHECK(!form_equals_zero(exterior_derivative(fundamental_form(lag2))));
}
