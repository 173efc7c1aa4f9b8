#include <lepage/suites.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace lepage;

TEST_CASE("principal component prints in both presentation bases", "[cli]") {
    auto sp = make_jet_space(2, 1, 2);
    Lagrangian lag = make_lagrangian(sp, 1, y_coord(sp, 1, MultiIndex{1}), false);
    Form theta = principal_component(lag);
    CHECK(print_form(theta, OutputFormat::text, OutputBasis::coordinate) == "dy1^dx2");
    CHECK(print_form(theta, OutputFormat::text, OutputBasis::contact) ==
          "y1_1*dx1^dx2 + w1^dx2");
}

TEST_CASE("text and sexpr printers round-trip through the parsers", "[cli]") {
    auto sp = make_jet_space(2, 1, 3);
    ScalarExpr y = y_coord(sp, 1);
    std::vector<ScalarExpr> exprs;
    exprs.push_back(Rational(1, 2) * (pow(y_coord(sp, 1, MultiIndex{1}), 2) +
                                      pow(y_coord(sp, 1, MultiIndex{2}), 2)) +
                    ScalarExpr::constant(sp, Rational(3)));
    exprs.push_back(register_sqrt(ScalarExpr::one(sp) + y * y) * x_coord(sp, 2));
    exprs.push_back(inverse_of(ScalarExpr::one(sp) + y * y) -
                    Rational(2, 7) * x_coord(sp, 1));
    for (const ScalarExpr& e : exprs) {
        CHECK(identically_equal(parse_expression(sp, print_expression(e, OutputFormat::text)),
                                e));
        CHECK(identically_equal(
            parse_expression_sexpr(sp, print_expression(e, OutputFormat::sexpr)), e));
    }
    Lagrangian lag = make_lagrangian(sp, 1, y_coord(sp, 1, MultiIndex{1}), false);
    Form theta = principal_component(lag);
    for (OutputBasis basis : {OutputBasis::coordinate, OutputBasis::contact})
        CHECK(forms_equal(parse_form(sp, print_form(theta, OutputFormat::text, basis)),
                          theta));
    CHECK(forms_equal(
        parse_form_sexpr(sp, print_form(theta, OutputFormat::sexpr, OutputBasis::coordinate)),
        theta));
}

TEST_CASE("randomized expressions and forms survive both round-trips", "[cli]") {
    std::mt19937 rng(424242);
    auto sp = make_jet_space(2, 2, 3);
    for (int t = 0; t < 20; ++t) {
        ScalarExpr e = detail::random_polynomial(sp, rng, 2, 3, 3);
        CHECK(identically_equal(parse_expression(sp, print_expression(e, OutputFormat::text)),
                                e));
        CHECK(identically_equal(
            parse_expression_sexpr(sp, print_expression(e, OutputFormat::sexpr)), e));
    }
    std::uniform_int_distribution<int> qd(0, 3);
    for (int t = 0; t < 10; ++t) {
        Form f = detail::random_form(sp, rng, qd(rng), 1, 1);
        for (OutputBasis basis : {OutputBasis::coordinate, OutputBasis::contact})
            CHECK(forms_equal(parse_form(sp, print_form(f, OutputFormat::text, basis)), f));
        CHECK(forms_equal(
            parse_form_sexpr(sp, print_form(f, OutputFormat::sexpr, OutputBasis::contact)),
            f));
    }
}

TEST_CASE("identical inputs produce byte-identical output", "[cli]") {
    const std::string src =
        "base 2\nfiber 1\norder 2\nlagrangian y1_11 + y1_22 + 5\nnonvanishing lagrangian\n";
    ToolOptions opt;
    for (const char* cmd : {"theta", "caratheodory", "euler-lagrange"}) {
        CommandResult a = run_command(cmd, src, opt);
        CommandResult b = run_command(cmd, src, opt);
        CHECK(a.exit_code == 0);
        CHECK(a.output == b.output);
    }
}

TEST_CASE("jet indices canonicalize while parsing", "[cli]") {
    auto sp = make_jet_space(2, 1, 3);
    CHECK(identically_equal(parse_expression(sp, "y1_21"),
                            y_coord(sp, 1, MultiIndex{1, 2})));
    CHECK(identically_equal(parse_expression(sp, "3/4 * x1^2 - 1/2"),
                            Rational(3, 4) * pow(x_coord(sp, 1), 2) -
                                ScalarExpr::constant(sp, Rational(1, 2))));
}

TEST_CASE("problem files parse into spaces, densities, and transforms", "[cli]") {
    ProblemFile pf = parse_problem(
        "# harmonic field\n"
        "base 2\n"
        "fiber 1\n"
        "order 1\n"
        "lagrangian (1/2)*(y1_1^2 + y1_2^2)\n");
    CHECK(pf.n == 2);
    CHECK(pf.m == 1);
    CHECK(pf.r == 1);
    auto sp = pf.space;
    ScalarExpr want = Rational(1, 2) * (pow(y_coord(sp, 1, MultiIndex{1}), 2) +
                                        pow(y_coord(sp, 1, MultiIndex{2}), 2));
    CHECK(identically_equal(pf.lagrangian->density, want));

    ProblemFile pt = parse_problem(
        "base 2\nfiber 1\norder 2\nlagrangian y1_11 + y1_22\nnonvanishing lagrangian\n"
        "transform\nx1 = x1\nx2 = x2 + (1/2)*x1^2\ny1 = y1\nend\n");
    CHECK(pt.transforms.size() == 1);
    CHECK(pt.lagrangian->nonvanishing);
}

TEST_CASE("malformed problems raise located parse errors", "[cli]") {
    CHECK_THROWS_AS(parse_problem("base 2\nfiber 1\norder 1\nlagrangian y1_3\n"),
                    ParseError);
    CHECK_THROWS_AS(parse_problem("base 2\nfiber 1\norder 1\nlagrangian y1_11\n"),
                    ParseError);
    CHECK_THROWS_AS(parse_problem("base 2\nbogus 3\n"), ParseError);
    CHECK_THROWS_AS(parse_expression(make_jet_space(2, 1, 2), "1/0"), ParseError);
    CHECK_THROWS_AS(parse_expression(make_jet_space(2, 1, 2), "y1_1 +"), ParseError);
    try {
        (void)parse_problem("base 2\nfiber 1\norder 1\nlagrangian y1_3\n");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("line 4") != std::string::npos);
    }
}

TEST_CASE("commands exit 0 on success and print the requested basis", "[cli]") {
    const std::string harmonic =
        "base 2\nfiber 1\norder 1\n"
        "lagrangian (1/2)*(y1_1^2 + y1_2^2) + 3\n"
        "nonvanishing lagrangian\n";
    ToolOptions opt;
    CommandResult r = run_command("check-lepage", harmonic, opt);
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("lepage: holds") != std::string::npos);

    r = run_command("theta", "base 2\nfiber 1\norder 1\nlagrangian y1_1\n", opt);
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("y1_1*dx1^dx2 + w1^dx2") != std::string::npos);

    ToolOptions coord;
    coord.basis = OutputBasis::coordinate;
    r = run_command("theta", "base 2\nfiber 1\norder 1\nlagrangian y1_1\n", coord);
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("dy1^dx2") != std::string::npos);

    r = run_command("caratheodory", harmonic, opt);
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("prefactor:") != std::string::npos);

    r = run_command("einstein", "mode metric riemannian\nbase 2\n", opt);
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("E[g11] = 0") != std::string::npos);

    r = run_command("hilbert-theta", "mode metric riemannian\nbase 2\n", opt);
    CHECK(r.exit_code == 0);
}

TEST_CASE("commands map failures to the documented exit codes", "[cli]") {
    ToolOptions opt;
    CommandResult r = run_command(
        "caratheodory", "base 2\nfiber 1\norder 1\nlagrangian (1/2)*(y1_1^2 + y1_2^2)\n",
        opt);
    CHECK(r.exit_code == 3);

    r = run_command("theta", "base 2\nfiber 1\norder 1\nlagrangian y1_3\n", opt);
    CHECK(r.exit_code == 2);

    r = run_command("bogus", "base 2\nfiber 1\norder 1\nlagrangian y1_1\n", opt);
    CHECK(r.exit_code == 2);

    r = run_command("hilbert-theta", "base 2\nfiber 1\norder 1\nlagrangian y1_1\n", opt);
    CHECK(r.exit_code == 3);

    const std::string shear_tail =
        "transform\nx1 = x1\nx2 = x2 + (1/2)*x1^2\ny1 = y1\nend\n";
    r = run_command("check-invariance",
                    "base 2\nfiber 1\norder 2\nlagrangian y1_11 + y1_22\n"
                    "nonvanishing lagrangian\n" +
                        shear_tail,
                    opt);
    CHECK(r.exit_code == 0);

    r = run_command("obstruction",
                    "base 2\nfiber 1\norder 3\nlagrangian y1_111\n" + shear_tail, opt);
    CHECK(r.exit_code == 1);
    CHECK(r.output.find("obstruction: fails") != std::string::npos);

    r = run_command("obstruction",
                    "base 2\nfiber 1\norder 1\nlagrangian y1_1\n" + shear_tail, opt);
    CHECK(r.exit_code == 0);

    r = run_command("check-invariance",
                    "base 2\nfiber 1\norder 3\nlagrangian y1_111\n" + shear_tail, opt);
    CHECK(r.exit_code == 1);
}
