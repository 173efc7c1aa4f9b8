#include <lepage/charts.hpp>

#include <catch2/catch_amalgamated.hpp>

using namespace lepage;

TEST_CASE("prolonged jet maps on a line: scaling, squaring, identity", "[charts]") {
    auto sp = make_jet_space(1, 1, 3);
    ScalarExpr x = x_coord(sp, 1), y = y_coord(sp, 1);
    ChartTransform t = make_chart_transform(sp, {Rational(2) * x}, {y});
    ProlongedTransform p = prolong(t, 2);
    CHECK(identically_equal(p.jet_map(1, MultiIndex{1}),
                            Rational(1, 2) * y_coord(sp, 1, MultiIndex{1})));
    CHECK(identically_equal(p.jet_map(1, MultiIndex{1, 1}),
                            Rational(1, 4) * y_coord(sp, 1, MultiIndex{1, 1})));
    ChartTransform t2 = make_chart_transform(sp, {x}, {y * y});
    ProlongedTransform p2 = prolong(t2, 1);
    CHECK(identically_equal(p2.jet_map(1, MultiIndex{1}),
                            Rational(2) * y * y_coord(sp, 1, MultiIndex{1})));
    ChartTransform id = make_chart_transform(sp, {x}, {y});
    ProlongedTransform pid = prolong(id, 3);
    CHECK(identically_equal(pid.jet_map(1, MultiIndex{1, 1, 1}),
                            y_coord(sp, 1, MultiIndex{1, 1, 1})));
}

TEST_CASE("prolongation recursion is split-independent under a shear", "[charts]") {
    auto sp = make_jet_space(2, 1, 5);
    ScalarExpr x1 = x_coord(sp, 1), x2 = x_coord(sp, 2), y = y_coord(sp, 1);
    ChartTransform t = make_chart_transform(sp, {x1, x2 + Rational(1, 2) * x1 * x1}, {y});
    ProlongedTransform p = prolong(t, 3);
    ScalarExpr alt = ScalarExpr::zero(sp);
    for (int s = 1; s <= 2; ++s)
        alt = alt + t.inv_jacobian[static_cast<size_t>(s - 1)][0] *
                        formal_derivative(p.jet_map(1, MultiIndex{2}), s);
    CHECK(identically_equal(alt, p.jet_map(1, MultiIndex{1, 2})));
}

TEST_CASE("pullbacks act correctly on volume contractions and contact forms",
          "[charts]") {
    auto sp = make_jet_space(2, 1, 5);
    ScalarExpr x1 = x_coord(sp, 1), x2 = x_coord(sp, 2), y = y_coord(sp, 1);
    ChartTransform t = make_chart_transform(sp, {x1, x2 + Rational(1, 2) * x1 * x1}, {y});
    ProlongedTransform p = prolong(t, 3);
    for (int j = 1; j <= 2; ++j) {
        Form lhs = pullback(p, omega_j(sp, j));
        Form rhs(sp, 1);
        for (int s = 1; s <= 2; ++s)
            rhs = rhs +
                  (t.inv_jacobian[static_cast<size_t>(s - 1)][static_cast<size_t>(j - 1)] *
                   t.det_jacobian) *
                      omega_j(sp, s);
        CHECK(forms_equal(lhs, rhs));
    }
    Form f = y * dx_form(sp, 1) + x1 * dy_form(sp, 1);
    CHECK(forms_equal(pullback(p, exterior_derivative(f)),
                      exterior_derivative(pullback(p, f))));

    auto sp1 = make_jet_space(1, 1, 2);
    ScalarExpr u = x_coord(sp1, 1), v = y_coord(sp1, 1);
    ChartTransform ft = make_chart_transform(sp1, {u}, {v + v * v * v});
    ProlongedTransform fp = prolong(ft, 1);
    CHECK(forms_equal(pullback(fp, contact_one_form(sp1, 1)),
                      ft.fiber_jacobian[0][0] * contact_one_form(sp1, 1)));
}

TEST_CASE("composition of transforms chains the prolonged jet maps", "[charts]") {
    auto sp = make_jet_space(1, 1, 3);
    ScalarExpr x = x_coord(sp, 1), y = y_coord(sp, 1);
    ChartTransform t1 = make_chart_transform(sp, {Rational(2) * x}, {y + x});
    ChartTransform t2 = make_chart_transform(sp, {Rational(3) * x}, {y * y});
    ChartTransform t21 = compose(t2, t1);
    ProlongedTransform p1 = prolong(t1, 2), p2 = prolong(t2, 2), p21 = prolong(t21, 2);
    std::map<Atom, ScalarExpr> via1 = {
        {Atom::base(1), t1.base_map[0]},
        {Atom::field(1, MultiIndex{}), p1.jet_map(1, MultiIndex{})},
        {Atom::field(1, MultiIndex{1}), p1.jet_map(1, MultiIndex{1})},
        {Atom::field(1, MultiIndex{1, 1}), p1.jet_map(1, MultiIndex{1, 1})}};
    for (int len = 0; len <= 2; ++len)
        for (const MultiIndex& j : sorted_multi_indices(1, len)) {
            ScalarExpr chained = substitute(p2.jet_map(1, j), via1, SubstPolicy::auto_register);
            CHECK(identically_equal(chained, p21.jet_map(1, j)));
        }
}

TEST_CASE("theta is chart-invariant at orders one and two", "[charts]") {
    auto sp = make_jet_space(2, 1, 5);
    ScalarExpr x1 = x_coord(sp, 1), x2 = x_coord(sp, 2), y = y_coord(sp, 1);
    ChartTransform t = make_chart_transform(sp, {x1, x2 + Rational(1, 2) * x1 * x1}, {y});
    ScalarExpr ya = y_coord(sp, 1, MultiIndex{1}), yb = y_coord(sp, 1, MultiIndex{2});
    auto lag1 = make_lagrangian(sp, 1, Rational(1, 2) * (ya * ya + yb * yb));
    CHECK(check_theta_invariance(lag1, t));
    auto lag2 = make_lagrangian(
        sp, 2, y_coord(sp, 1, MultiIndex{1, 1}) + y_coord(sp, 1, MultiIndex{2, 2}), true);
    CHECK(check_theta_invariance(lag2, t));
    CHECK(check_caratheodory_invariance(lag2, t));
}

TEST_CASE("third-order obstruction brackets decide invariance", "[charts]") {
    auto sp = make_jet_space(2, 1, 5);
    ScalarExpr x1 = x_coord(sp, 1), x2 = x_coord(sp, 2), y = y_coord(sp, 1);
    ChartTransform shear = make_chart_transform(sp, {x1, x2 + Rational(1, 2) * x1 * x1}, {y});
    ChartTransform linear = make_chart_transform(sp, {x1 + Rational(2) * x2, x2}, {y});
    ScalarExpr y11 = y_coord(sp, 1, MultiIndex{1, 1});
    ScalarExpr y111 = y_coord(sp, 1, MultiIndex{1, 1, 1});

    auto lag_a = make_lagrangian(sp, 3, y11 * y11, true);
    CHECK(obstruction_3rd(lag_a, shear).holds);
    CHECK(check_theta_invariance(lag_a, shear));

    auto lag_b = make_lagrangian(sp, 3, y111 * y111, true);
    CHECK(obstruction_3rd(lag_b, linear).holds);
    CHECK(!obstruction_3rd(lag_b, shear).holds);
    CHECK(!check_theta_invariance(lag_b, shear));

    // density linear in the third derivatives: constant nonzero brackets whose
    // divergences all vanish, yet invariance fails
    auto lag_c = make_lagrangian(sp, 3, y111, true);
    ObstructionReport rc = obstruction_3rd(lag_c, shear);
    CHECK(!rc.holds);
    bool some_bracket = false;
    for (const auto& b : rc.brackets) some_bracket = some_bracket || !equals_zero(b);
    CHECK(some_bracket);
    for (const auto& r : rc.residuals) CHECK(equals_zero(r));
    CHECK(!check_theta_invariance(lag_c, shear));
}

TEST_CASE("third-order Caratheodory invariance requires a vanishing obstruction",
          "[charts]") {
    auto sp = make_jet_space(2, 1, 5);
    ScalarExpr x1 = x_coord(sp, 1), x2 = x_coord(sp, 2), y = y_coord(sp, 1);
    ChartTransform shear = make_chart_transform(sp, {x1, x2 + Rational(1, 2) * x1 * x1}, {y});
    ScalarExpr y11 = y_coord(sp, 1, MultiIndex{1, 1});
    auto lag_a = make_lagrangian(sp, 3, y11 * y11, true);
    CHECK(check_caratheodory_invariance(lag_a, shear));
    auto lag_c = make_lagrangian(sp, 3, y_coord(sp, 1, MultiIndex{1, 1, 1}), true);
    CHECK_THROWS_AS(check_caratheodory_invariance(lag_c, shear), PreconditionError);
}

TEST_CASE("obstruction report is trivial below order three and refuses above",
          "[charts]") {
    auto sp = make_jet_space(2, 1, 5);
    ScalarExpr x1 = x_coord(sp, 1), x2 = x_coord(sp, 2), y = y_coord(sp, 1);
    ChartTransform shear = make_chart_transform(sp, {x1, x2 + Rational(1, 2) * x1 * x1}, {y});
    auto low = make_lagrangian(sp, 1, y_coord(sp, 1, MultiIndex{1}));
    ObstructionReport rep = obstruction_3rd(low, shear);
    CHECK(rep.holds);
    CHECK(rep.brackets.size() == 1);
    CHECK(rep.residuals.size() == 2);
    auto sp7 = make_jet_space(2, 1, 7);
    auto high = make_lagrangian(sp7, 4, y_coord(sp7, 1, MultiIndex{1, 1, 1, 1}));
    ChartTransform shear7 = make_chart_transform(
        sp7, {x_coord(sp7, 1), x_coord(sp7, 2) + Rational(1, 2) * pow(x_coord(sp7, 1), 2)},
        {y_coord(sp7, 1)});
    CHECK_THROWS_AS(obstruction_3rd(high, shear7), PreconditionError);
}
