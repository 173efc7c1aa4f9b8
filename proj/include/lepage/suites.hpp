#pragma once

#include <functional>
#include <random>
#include <string>
#include <vector>

#include "lepage/dispatch.hpp"

namespace lepage {

/// Outcome of one named verification suite.
struct SuiteResult {
    std::string name;
    bool ok = true;
    std::vector<std::string> lines;

    SuiteResult() = default;
    explicit SuiteResult(std::string suite_name) : name(std::move(suite_name)) {}

    void check(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            lines.push_back("FAIL: " + what);
        }
    }
    void note(const std::string& what) { lines.push_back(what); }

    [[nodiscard]] std::string text() const {
        std::string out = "suite " + name + "\n";
        for (const std::string& l : lines) out += "  " + l + "\n";
        out += name + ": " + (ok ? "PASS" : "FAIL") + "\n";
        return out;
    }
};

namespace detail {

[[nodiscard]] inline Rational random_coeff(std::mt19937& rng) {
    std::uniform_int_distribution<int> num(-4, 4), den(1, 3);
    int p = num(rng);
    if (p == 0) p = 1;
    return {p, den(rng)};
}

/// Random polynomial in the jet coordinates up to the given order; at most
/// max_degree atoms per term.
[[nodiscard]] inline ScalarExpr random_polynomial(const SpacePtr& sp, std::mt19937& rng,
                                                  int max_jet_order, int max_degree,
                                                  int num_terms) {
    std::vector<ScalarExpr> pool;
    for (int i = 1; i <= sp->n(); ++i) pool.push_back(x_coord(sp, i));
    for (int sigma = 1; sigma <= sp->m(); ++sigma)
        for (int len = 0; len <= max_jet_order; ++len)
            for (const MultiIndex& j : sorted_multi_indices(sp->n(), len))
                pool.push_back(y_coord(sp, sigma, j));
    std::uniform_int_distribution<size_t> pick(0, pool.size() - 1);
    std::uniform_int_distribution<int> deg(1, max_degree);
    ScalarExpr acc = ScalarExpr::zero(sp);
    for (int t = 0; t < num_terms; ++t) {
        ScalarExpr term = ScalarExpr::constant(sp, random_coeff(rng));
        int d = deg(rng);
        for (int k = 0; k < d; ++k) term = term * pool[pick(rng)];
        acc = acc + term;
    }
    return acc;
}

/// Random Lagrangian with a registered nonvanishing declaration obtained by
/// adding a nonzero constant.
[[nodiscard]] inline Lagrangian random_lagrangian(const SpacePtr& sp, std::mt19937& rng, int r,
                                                  int max_jet_order, int max_degree = 3,
                                                  int num_terms = 3) {
    ScalarExpr density = random_polynomial(sp, rng, max_jet_order, max_degree, num_terms);
    std::uniform_int_distribution<int> c(1, 9);
    density = density + ScalarExpr::constant(sp, Rational(c(rng)));
    return make_lagrangian(sp, r, density, true);
}

[[nodiscard]] inline bool decomposables_equal(const DecomposableForm& a,
                                              const DecomposableForm& b) {
    if (a.factors.size() != b.factors.size()) return false;
    if (!identically_equal(a.prefactor, b.prefactor)) return false;
    for (size_t k = 0; k < a.factors.size(); ++k)
        if (!forms_equal(a.factors[k], b.factors[k])) return false;
    return true;
}

/// Random q-form with polynomial coefficients and covectors of jet order at
/// most cov_order.
[[nodiscard]] inline Form random_form(const SpacePtr& sp, std::mt19937& rng, int q,
                                      int cov_order, int coeff_order) {
    std::vector<Covector> pool;
    for (int i = 1; i <= sp->n(); ++i) pool.push_back(Covector::dx(i));
    for (int sigma = 1; sigma <= sp->m(); ++sigma)
        for (int len = 0; len <= cov_order; ++len)
            for (const MultiIndex& j : sorted_multi_indices(sp->n(), len))
                pool.push_back(Covector::dy(sigma, j));
    std::uniform_int_distribution<size_t> pick(0, pool.size() - 1);
    Form f(sp, q);
    for (int t = 0; t < 3; ++t) {
        Wedge w;
        for (int k = 0; k < q; ++k) w.push_back(pool[pick(rng)]);
        f.accumulate(w, random_polynomial(sp, rng, coeff_order, 2, 2));
    }
    return f;
}

}  // namespace detail

/// Carathéodory form via contractions agrees with the classical first-order
/// product formula on randomized first-order Lagrangians.
[[nodiscard]] inline SuiteResult suite_caratheodory_first() {
    SuiteResult res{"caratheodory-first"};
    std::mt19937 rng(20250801);
    int count = 0;
    for (int t = 0; t < 25; ++t) {
        int n = 2 + t % 2, m = 1 + (t / 2) % 2;
        auto sp = make_jet_space(n, m, 2);
        Lagrangian lag = detail::random_lagrangian(sp, rng, 1, 1);
        DecomposableForm first = caratheodory_first(lag);
        DecomposableForm contr = caratheodory_contraction(lag);
        res.check(detail::decomposables_equal(first, contr),
                  "instance " + std::to_string(t) + " (n=" + std::to_string(n) +
                      ", m=" + std::to_string(m) + "): contraction route != product formula");
        ++count;
    }
    res.note(std::to_string(count) + " randomized first-order Lagrangians compared");
    return res;
}

/// Second-order Carathéodory equivalent: the contraction route matches the
/// closed formula, and the result is a Lepage equivalent of the Lagrangian.
[[nodiscard]] inline SuiteResult suite_caratheodory_second() {
    SuiteResult res{"caratheodory-second"};
    std::mt19937 rng(20250802);
    for (int t = 0; t < 15; ++t) {
        auto sp = make_jet_space(2, 1, 4);
        Lagrangian lag = detail::random_lagrangian(sp, rng, 2, 2);
        DecomposableForm contr = caratheodory_contraction(lag);
        DecomposableForm closed = caratheodory_closed(lag);
        res.check(detail::decomposables_equal(contr, closed),
                  "instance " + std::to_string(t) + ": contraction route != closed formula");
        LepageReport rep = check_lepage(closed.expansion(), lag);
        res.check(rep.horizontal_matches,
                  "instance " + std::to_string(t) + ": h(Lambda) != lambda");
        res.check(rep.vertical_trivial,
                  "instance " + std::to_string(t) + ": h i_xi d(Lambda) != 0");
    }
    res.note("15 randomized second-order Lagrangians checked");
    return res;
}

/// The principal component is a Lepage equivalent and its first contact
/// component of the differential reproduces the Euler-Lagrange form.
[[nodiscard]] inline SuiteResult suite_lepage_theta() {
    SuiteResult res{"lepage-theta"};
    std::mt19937 rng(20250803);
    for (int t = 0; t < 10; ++t) {
        int n = 2 + t % 2, m = 1 + (t / 2) % 2;
        auto sp = make_jet_space(n, m, 2);
        Lagrangian lag = detail::random_lagrangian(sp, rng, 1, 1);
        res.check(check_lepage(principal_component(lag), lag).ok(),
                  "first-order instance " + std::to_string(t) + ": theta is not Lepage");
        res.check(forms_equal(euler_lagrange(lag), classical_euler_lagrange(lag)),
                  "first-order instance " + std::to_string(t) +
                      ": p1 d theta != classical Euler-Lagrange form");
    }
    for (int t = 0; t < 8; ++t) {
        auto sp = make_jet_space(2, 1, 4);
        Lagrangian lag = detail::random_lagrangian(sp, rng, 2, 2);
        res.check(check_lepage(principal_component(lag), lag).ok(),
                  "second-order instance " + std::to_string(t) + ": theta is not Lepage");
        res.check(forms_equal(euler_lagrange(lag), classical_euler_lagrange(lag)),
                  "second-order instance " + std::to_string(t) +
                      ": p1 d theta != classical Euler-Lagrange form");
    }
    res.note("18 randomized Lagrangians checked at orders one and two");
    return res;
}

/// Fundamental form: frozen expansion for L = y1_1*y2_2, and closedness holds
/// exactly for variationally trivial Lagrangians.
[[nodiscard]] inline SuiteResult suite_fundamental() {
    SuiteResult res{"fundamental"};
    {
        auto sp = make_jet_space(2, 2, 2);
        ScalarExpr l = y_coord(sp, 1, MultiIndex{1}) * y_coord(sp, 2, MultiIndex{2});
        Lagrangian lag = make_lagrangian(sp, 1, l, false);
        Form z = fundamental_form(lag);
        Form theta = principal_component(lag);
        Form extra = Rational(1, 2) * wedge(contact_one_form(sp, 1), contact_one_form(sp, 2));
        res.check(forms_equal(z, theta + extra),
                  "Z(y1_1*y2_2) != theta + (1/2) w1^w2");
        res.check(check_lepage(z, lag).ok(), "Z(y1_1*y2_2) is not Lepage");
    }
    std::mt19937 rng(20250804);
    for (int t = 0; t < 5; ++t) {
        auto sp = make_jet_space(2, 1, 2);
        ScalarExpr f = detail::random_polynomial(sp, rng, 0, 2, 2);
        ScalarExpr g = detail::random_polynomial(sp, rng, 0, 2, 2);
        ScalarExpr div = formal_derivative(f, 1) + formal_derivative(g, 2);
        Lagrangian lag = make_lagrangian(sp, 1, div, false);
        res.check(is_trivial(lag), "divergence instance " + std::to_string(t) +
                                       ": is_trivial returned false");
        res.check(form_equals_zero(exterior_derivative(fundamental_form(lag))),
                  "divergence instance " + std::to_string(t) + ": dZ != 0");
    }
    {
        auto sp = make_jet_space(2, 1, 2);
        Lagrangian lag = make_lagrangian(sp, 1, y_coord(sp, 1), false);
        res.check(!is_trivial(lag), "L = y1: is_trivial returned true");
        res.check(!form_equals_zero(exterior_derivative(fundamental_form(lag))),
                  "L = y1: dZ vanished for a non-trivial Lagrangian");
    }
    res.note("frozen expansion, five random total divergences, one non-trivial case");
    return res;
}

/// Chart invariance of the principal component and of the Carathéodory form
/// for second-order Lagrangians under a nonlinear base transform.
[[nodiscard]] inline SuiteResult suite_invariance() {
    SuiteResult res{"invariance"};
    std::mt19937 rng(20250805);
    auto sp = make_jet_space(2, 1, 4);
    ScalarExpr x1 = x_coord(sp, 1), x2 = x_coord(sp, 2), y = y_coord(sp, 1);
    ChartTransform shear =
        make_chart_transform(sp, {x1, x2 + Rational(1, 2) * x1 * x1}, {y});
    {
        ScalarExpr harmonic = Rational(1, 2) * (pow(y_coord(sp, 1, MultiIndex{1}), 2) +
                                                pow(y_coord(sp, 1, MultiIndex{2}), 2)) +
                              ScalarExpr::constant(sp, Rational(3));
        Lagrangian lag = make_lagrangian(sp, 2, harmonic, true);
        res.check(check_theta_invariance(lag, shear), "harmonic: theta not invariant");
        res.check(check_caratheodory_invariance(lag, shear),
                  "harmonic: Caratheodory form not invariant");
    }
    for (int t = 0; t < 4; ++t) {
        Lagrangian lag = detail::random_lagrangian(sp, rng, 2, 2);
        res.check(check_theta_invariance(lag, shear),
                  "instance " + std::to_string(t) + ": theta not invariant");
        res.check(check_caratheodory_invariance(lag, shear),
                  "instance " + std::to_string(t) + ": Caratheodory form not invariant");
    }
    res.note("second-order invariance under xbar2 = x2 + x1^2/2");
    return res;
}

/// Third-order obstruction: brackets vanish exactly when the principal
/// component is chart-invariant; the printed divergence alone is insufficient.
[[nodiscard]] inline SuiteResult suite_obstruction() {
    SuiteResult res{"obstruction"};
    std::mt19937 rng(20250806);
    auto sp = make_jet_space(2, 1, 6);
    ScalarExpr x1 = x_coord(sp, 1), x2 = x_coord(sp, 2), y = y_coord(sp, 1);
    ChartTransform shear =
        make_chart_transform(sp, {x1, x2 + Rational(1, 2) * x1 * x1}, {y});
    ChartTransform bend = make_chart_transform(
        sp, {x1 + Rational(1, 6) * x2 * x2 * x2, x2}, {y});
    ChartTransform linear = make_chart_transform(
        sp, {x1 + Rational(2) * x2, x2 - x1}, {Rational(3) * y});

    // (i) third-order Lagrangians independent of the third derivatives
    for (int t = 0; t < 4; ++t) {
        Lagrangian lag = detail::random_lagrangian(sp, rng, 3, 2);
        for (const auto* tr : {&shear, &bend}) {
            ObstructionReport rep = obstruction_3rd(lag, *tr);
            res.check(rep.holds, "case (i) instance " + std::to_string(t) +
                                     ": bracket obstruction reported");
            for (const ScalarExpr& r : rep.residuals)
                res.check(equals_zero(r), "case (i) instance " + std::to_string(t) +
                                              ": printed divergence residual nonzero");
        }
        res.check(check_caratheodory_invariance(lag, shear),
                  "case (i) instance " + std::to_string(t) +
                      ": third-order Caratheodory form not invariant");
    }
    // (ii) arbitrary third-order Lagrangians under affine transforms
    for (int t = 0; t < 4; ++t) {
        Lagrangian lag = detail::random_lagrangian(sp, rng, 3, 3);
        ObstructionReport rep = obstruction_3rd(lag, linear);
        res.check(rep.holds,
                  "case (ii) instance " + std::to_string(t) + ": obstruction reported");
        if (t < 2)
            res.check(check_theta_invariance(lag, linear),
                      "case (ii) instance " + std::to_string(t) + ": theta not invariant");
    }
    // nonzero obstruction for a density linear in the third derivatives
    {
        Lagrangian lag =
            make_lagrangian(sp, 3, y_coord(sp, 1, MultiIndex{1, 1, 1}), true);
        ObstructionReport rep = obstruction_3rd(lag, shear);
        res.check(!rep.holds, "L = y1_111: obstruction unexpectedly holds");
        bool some_bracket = false;
        for (const ScalarExpr& b : rep.brackets) some_bracket = some_bracket || !equals_zero(b);
        res.check(some_bracket, "L = y1_111: no nonzero bracket found");
        for (const ScalarExpr& r : rep.residuals)
            res.check(equals_zero(r),
                      "L = y1_111: printed divergence residual nonzero (brackets are constant)");
        res.check(!check_theta_invariance(lag, shear),
                  "L = y1_111: theta invariant despite nonzero bracket");
        bool threw = false;
        try {
            (void)check_caratheodory_invariance(lag, shear);
        } catch (const PreconditionError&) {
            threw = true;
        }
        res.check(threw, "L = y1_111: Caratheodory invariance check did not refuse");
    }
    // nonconstant bracket case, where the printed divergence fires as well
    {
        Lagrangian lag = make_lagrangian(
            sp, 3, pow(y_coord(sp, 1, MultiIndex{1, 1, 1}), 2), true);
        ObstructionReport rep = obstruction_3rd(lag, shear);
        res.check(!rep.holds, "L = (y1_111)^2: obstruction unexpectedly holds");
        res.check(!check_theta_invariance(lag, shear),
                  "L = (y1_111)^2: theta invariant despite obstruction");
    }
    res.note("bracket verdicts agree with independent invariance checks");
    return res;
}

/// Dimension-two gravitational checks: the principal component projects to
/// first order, the field equations vanish identically, and the Carathéodory
/// factors match both the generic constructor and the explicit coefficients.
[[nodiscard]] inline SuiteResult suite_hilbert2();

/// Dimension-three gravitational checks against the curvature oracle.
[[nodiscard]] inline SuiteResult suite_hilbert3();

namespace detail {

/// Carathéodory factor of the gravitational Lagrangian from the explicit
/// curvature coefficients; indices (i, j) range over ordered pairs sharing the
/// contact form of the corresponding symmetric component.
[[nodiscard]] inline Form hilbert_printed_factor(const MetricSpace& ms, int k) {
    const SpacePtr& sp = ms.space;
    const int n = ms.n;
    auto ginv = [&](int a, int b) -> const ScalarExpr& {
        return ms.g_inv[static_cast<size_t>(a - 1)][static_cast<size_t>(b - 1)];
    };
    Form f = curvature_density(ms) * dx_form(sp, k);
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j) {
            ScalarExpr c2 = ScalarExpr::zero(sp);
            for (int p = 1; p <= n; ++p)
                for (int q = 1; q <= n; ++q)
                    for (int s = 1; s <= n; ++s) {
                        ScalarExpr bracket = ginv(q, p) * ginv(s, i) * ginv(j, k) -
                                             Rational(2) * ginv(s, q) * ginv(p, i) * ginv(j, k) +
                                             ginv(p, i) * ginv(q, j) * ginv(s, k);
                        c2 = c2 + bracket * ms.metric_coord(p, q, MultiIndex{s});
                    }
            c2 = Rational(1, 2) * ms.volume_scale * c2;
            f = f + c2 * contact_one_form(sp, ms.sigma(i, j));
            for (int l = 1; l <= n; ++l) {
                ScalarExpr c3 =
                    ms.volume_scale * (ginv(i, l) * ginv(k, j) - ginv(k, l) * ginv(j, i));
                f = f + c3 * contact_one_form(sp, ms.sigma(i, j), MultiIndex{l});
            }
        }
    return f;
}

inline void hilbert_common(SuiteResult& res, const MetricSpace& ms,
                           bool check_contraction) {
    const std::string dim = std::to_string(ms.n) + "d";
    Form theta = hilbert_theta(ms);
    res.check(theta.jet_order() <= 1,
              dim + ": principal component carries second derivatives");
    DecomposableForm cara = hilbert_caratheodory(ms);
    for (int k = 1; k <= ms.n; ++k)
        res.check(forms_equal(cara.factors[static_cast<size_t>(k - 1)],
                              hilbert_printed_factor(ms, k)),
                  dim + ": Caratheodory factor " + std::to_string(k) +
                      " differs from the explicit coefficients");
    if (check_contraction) {
        DecomposableForm contr = caratheodory_contraction(hilbert_lagrangian(ms));
        res.check(decomposables_equal(contr, cara),
                  dim + ": contraction route differs from the closed formula");
    }
}

}  // namespace detail

[[nodiscard]] inline SuiteResult suite_hilbert2() {
    SuiteResult res{"hilbert2"};
    auto ms = make_metric_space(2, SignatureMode::riemannian);
    detail::hilbert_common(res, ms, true);
    res.check(form_equals_zero(einstein_el(ms)),
              "2d: Euler-Lagrange form of the curvature density is not zero");
    Lagrangian hl = hilbert_lagrangian(ms);
    for (int a = 1; a <= 2; ++a)
        for (int b = a; b <= 2; ++b) {
            res.check(equals_zero(einstein_density(ms, a, b)),
                      "2d: curvature oracle density (" + std::to_string(a) +
                          std::to_string(b) + ") nonzero");
            res.check(equals_zero(classical_el_expression(hl, ms.sigma(a, b))),
                      "2d: Euler-Lagrange expression (" + std::to_string(a) +
                          std::to_string(b) + ") nonzero");
        }
    res.note("first-order projection, identically zero field equations, factor match");
    return res;
}

[[nodiscard]] inline SuiteResult suite_hilbert3() {
    SuiteResult res{"hilbert3"};
    auto ms = make_metric_space(3, SignatureMode::lorentzian);
    detail::hilbert_common(res, ms, false);
    Lagrangian hl = hilbert_lagrangian(ms);
    for (int a = 1; a <= 3; ++a)
        for (int b = a; b <= 3; ++b)
            res.check(
                identically_equal(classical_el_expression(hl, ms.sigma(a, b)),
                                  einstein_density(ms, a, b)),
                "3d: Euler-Lagrange expression (" + std::to_string(a) + std::to_string(b) +
                    ") differs from the curvature oracle");
    res.note("factor match and six field-equation components against the oracle");
    return res;
}

/// Exterior-calculus property suite on randomized inputs.
[[nodiscard]] inline SuiteResult suite_calculus() {
    SuiteResult res{"calculus"};
    std::mt19937 rng(20250808);
    {
        // base dimension three so that d(d f) stays inside the degree-(n+1) scope
        auto sp = make_jet_space(3, 2, 3);
        std::uniform_int_distribution<int> qd(0, 2);
        for (int t = 0; t < 50; ++t) {
            Form f = detail::random_form(sp, rng, qd(rng), 1, 1);
            res.check(form_equals_zero(exterior_derivative(exterior_derivative(f))),
                      "d(d f) != 0 at instance " + std::to_string(t));
        }
        res.note("50 instances of d over random forms");
    }
    {
        auto sp = make_jet_space(2, 2, 3);
        std::uniform_int_distribution<int> qd(0, 1);
        for (int t = 0; t < 50; ++t) {
            Form a = detail::random_form(sp, rng, qd(rng), 1, 1);
            Form b = detail::random_form(sp, rng, qd(rng), 1, 1);
            res.check(forms_equal(horizontalize(wedge(a, b)),
                                  wedge(horizontalize(a), horizontalize(b))),
                      "h(a^b) != h(a)^h(b) at instance " + std::to_string(t));
        }
        res.note("50 instances of the horizontalization morphism property");
    }
    {
        auto sp = make_jet_space(3, 2, 3);
        int count = 0;
        for (int i = 1; i <= 3; ++i)
            for (int sigma = 1; sigma <= 2; ++sigma)
                for (int len = 0; len <= 2; ++len)
                    for (const MultiIndex& j : sorted_multi_indices(3, len)) {
                        res.check(
                            form_equals_zero(contract(formal_field(sp, i),
                                                      contact_one_form(sp, sigma, j))),
                            "i_{d_" + std::to_string(i) + "} w" + std::to_string(sigma) + "_" +
                                j.to_digits() + " != 0");
                        ++count;
                    }
        res.note(std::to_string(count) + " contact forms contracted with formal fields");
    }
    {
        auto sp = make_jet_space(2, 1, 3);
        std::uniform_int_distribution<int> qd(1, 3);
        for (int t = 0; t < 50; ++t) {
            int q = qd(rng);
            Form f = detail::random_form(sp, rng, q, 1, 1);
            Form sum(sp, q);
            for (int k = 0; k <= q; ++k) sum = sum + contact_component(f, k);
            res.check(forms_equal(sum, f),
                      "sum of contact components != form at instance " + std::to_string(t));
        }
        res.note("50 instances of contact-decomposition completeness");
    }
    {
        auto sp = make_jet_space(2, 1, 4);
        ScalarExpr x1 = x_coord(sp, 1), x2 = x_coord(sp, 2), y = y_coord(sp, 1);
        std::vector<ChartTransform> transforms;
        transforms.push_back(
            make_chart_transform(sp, {x1, x2 + Rational(1, 2) * x1 * x1}, {y}));
        transforms.push_back(make_chart_transform(
            sp, {x1 + Rational(2) * x2, x2}, {y + y * y * y}));
        std::uniform_int_distribution<int> qd(0, 2);
        for (int t = 0; t < 50; ++t) {
            const ChartTransform& tr = transforms[static_cast<size_t>(t % 2)];
            Form f = detail::random_form(sp, rng, qd(rng), 1, 1);
            ProlongedTransform p = prolong(tr, f.jet_order() + 1);
            res.check(forms_equal(pullback(p, exterior_derivative(f)),
                                  exterior_derivative(pullback(p, f))),
                      "pullback does not commute with d at instance " + std::to_string(t));
        }
        res.note("50 instances of pullback/d commutation under two transforms");
    }
    return res;
}

/// Runs a named suite; names follow the acceptance criteria.
[[nodiscard]] inline std::vector<std::string> suite_names() {
    return {"caratheodory-first",      "caratheodory-second",    "lepage-theta", "fundamental", "invariance",
            "obstruction", "hilbert2",    "hilbert3",     "calculus"};
}

[[nodiscard]] inline SuiteResult run_suite(const std::string& name) {
    if (name == "caratheodory-first") return suite_caratheodory_first();
    if (name == "caratheodory-second") return suite_caratheodory_second();
    if (name == "lepage-theta") return suite_lepage_theta();
    if (name == "fundamental") return suite_fundamental();
    if (name == "invariance") return suite_invariance();
    if (name == "obstruction") return suite_obstruction();
    if (name == "hilbert2") return suite_hilbert2();
    if (name == "hilbert3") return suite_hilbert3();
    if (name == "calculus") return suite_calculus();
    throw ParseError("unknown suite '" + name + "'");
}

}  // namespace lepage
