#include <lepage/contact.hpp>

#include <catch2/catch_amalgamated.hpp>

using namespace lepage;

TEST_CASE("wedge products anticommute and absorb repeats", "[exterior]") {
    auto sp = make_jet_space(2, 1, 4);
    CHECK(forms_equal(wedge(dx_form(sp, 1), dx_form(sp, 2)), omega_0(sp)));
    CHECK(wedge(dx_form(sp, 1), dx_form(sp, 1)).is_zero());
    auto ab = wedge(dy_form(sp, 1), dx_form(sp, 2));
    auto ba = wedge(dx_form(sp, 2), dy_form(sp, 1));
    CHECK(forms_equal(ab, -ba));
}

TEST_CASE("contracted volume elements satisfy dx^k ^ omega_j = delta^k_j omega_0",
          "[exterior]") {
    auto sp = make_jet_space(2, 1, 4);
    for (int k = 1; k <= 2; ++k)
        for (int j = 1; j <= 2; ++j) {
            auto w = wedge(dx_form(sp, k), omega_j(sp, j));
            if (k == j)
                CHECK(forms_equal(w, omega_0(sp)));
            else
                CHECK(w.is_zero());
        }
    CHECK(forms_equal(omega_j(sp, 1), dx_form(sp, 2)));
    CHECK(forms_equal(omega_j(sp, 2), -dx_form(sp, 1)));
    CHECK(forms_equal(contract(formal_field(sp, 1), omega_0(sp)), omega_j(sp, 1)));
}

TEST_CASE("exterior derivative is a differential", "[exterior]") {
    auto sp = make_jet_space(2, 1, 4);
    auto f = y_coord(sp, 1) * dx_form(sp, 1);
    CHECK(forms_equal(exterior_derivative(f), wedge(dy_form(sp, 1), dx_form(sp, 1))));
    auto l = y_coord(sp, 1, MultiIndex{1}) * y_coord(sp, 1, MultiIndex{1}) +
             x_coord(sp, 2) * y_coord(sp, 1);
    auto invl = register_inverse(l + ScalarExpr::constant(sp, 1));
    auto g = (l * invl) * dx_form(sp, 2);
    CHECK(form_equals_zero(exterior_derivative(exterior_derivative(g))));
}

TEST_CASE("formal fields annihilate contact forms", "[exterior]") {
    auto sp = make_jet_space(2, 1, 4);
    for (int i = 1; i <= 2; ++i) {
        CHECK(contract(formal_field(sp, i), contact_one_form(sp, 1)).is_zero());
        CHECK(contract(formal_field(sp, i), contact_one_form(sp, 1, MultiIndex{2})).is_zero());
    }
}

TEST_CASE("horizontalization substitutes formal derivatives", "[exterior]") {
    auto sp = make_jet_space(2, 1, 4);
    auto h1 = horizontalize(dy_form(sp, 1));
    auto expect = y_coord(sp, 1, MultiIndex{1}) * dx_form(sp, 1) +
                  y_coord(sp, 1, MultiIndex{2}) * dx_form(sp, 2);
    CHECK(forms_equal(h1, expect));
    CHECK(h1.jet_order() == 1);
    auto h2 = horizontalize(wedge(dy_form(sp, 1, MultiIndex{1}), dx_form(sp, 2)));
    CHECK(forms_equal(h2, y_coord(sp, 1, MultiIndex{1, 1}) * omega_0(sp)));
    // morphism property
    auto a = y_coord(sp, 1, MultiIndex{1}) * dy_form(sp, 1);
    auto b = dy_form(sp, 1, MultiIndex{2});
    CHECK(forms_equal(horizontalize(wedge(a, b)),
                      wedge(horizontalize(a), horizontalize(b))));
}

TEST_CASE("contact components decompose forms completely", "[exterior]") {
    auto sp = make_jet_space(2, 1, 4);
    auto q = wedge(dy_form(sp, 1), dx_form(sp, 2));
    CHECK(forms_equal(contact_component(q, 1),
                      wedge(contact_one_form(sp, 1), dx_form(sp, 2))));
    auto q2 = wedge(dy_form(sp, 1), dy_form(sp, 1, MultiIndex{2}));
    Form sum(sp, 2);
    for (int k = 0; k <= 2; ++k) sum = sum + contact_component(q2, k);
    CHECK(forms_equal(sum, q2));
    CHECK(forms_equal(contact_component(q2, 0), horizontalize(q2)));
}

TEST_CASE("Lie derivatives follow Cartan's formula", "[exterior]") {
    auto sp = make_jet_space(2, 1, 4);
    VectorField ddx1{sp, {{Covector::dx(1), ScalarExpr::one(sp)}}};
    auto lf = lie_derivative(ddx1, x_coord(sp, 1) * dx_form(sp, 2));
    CHECK(forms_equal(lf, dx_form(sp, 2)));
    CHECK(lie_derivative(formal_field(sp, 1), omega_0(sp)).is_zero());
}
