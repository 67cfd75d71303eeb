#include <catch2/catch_amalgamated.hpp>

#include "hlab/runner.hpp"

using namespace hlab;

namespace {
Point pt(std::vector<double> x, std::vector<double> y) { return Point(std::move(x), std::move(y)); }
}

TEST_CASE("parse basics") {
    ScalarField g1 = parse_scalar_field("((y1)^2 + (y2)^2)/2", 2);
    CHECK(eval_value(g1, pt({0, 0}, {1, 2})) == Catch::Approx(2.5));
    CHECK(eval_value(g1, pt({3, -1}, {0.5, 0.5})) == Catch::Approx(0.25));

    ScalarField z = parse_scalar_field("0", 3);
    CHECK(eval_value(z, pt({1, 2, 3}, {4, 5, 6})) == 0.0);

    CHECK_THROWS_AS(parse_scalar_field("y1*y3", 2), DimensionError);
    CHECK_THROWS_AS(parse_scalar_field("abs(y1)", 2), UnsupportedFunction);
    CHECK_THROWS_AS(parse_scalar_field("tan(y1)", 2), UnsupportedFunction);
    CHECK_THROWS_AS(parse_scalar_field("", 2), SyntaxError);
    CHECK_THROWS_AS(parse_scalar_field("y1 +", 2), SyntaxError);
    CHECK_THROWS_AS(parse_scalar_field("(y1", 2), SyntaxError);
    CHECK_THROWS_AS(parse_scalar_field("y1 y2", 2), SyntaxError);
    CHECK_THROWS_AS(parse_scalar_field("x1", 0), DimensionError);
}

TEST_CASE("syntax error carries position") {
    try {
        parse_scalar_field("y1 + @", 2);
        FAIL("expected SyntaxError");
    } catch (const SyntaxError& e) {
        CHECK(e.pos == 5);
    }
}

TEST_CASE("numbers and precedence") {
    CHECK(eval_value(parse_scalar_field("1e-3", 1), pt({0}, {0})) == Catch::Approx(1e-3));
    CHECK(eval_value(parse_scalar_field("2.5E2", 1), pt({0}, {0})) == Catch::Approx(250.0));
    // unary minus binds looser than ^: -2^2 = -(2^2)
    CHECK(eval_value(parse_scalar_field("-2^2", 1), pt({0}, {0})) == Catch::Approx(-4.0));
    CHECK(eval_value(parse_scalar_field("2+3*4", 1), pt({0}, {0})) == Catch::Approx(14.0));
    CHECK(eval_value(parse_scalar_field("2*x1^3", 1), pt({2}, {0})) == Catch::Approx(16.0));
    // right-associative power via factor recursion: 2^3^2 = 2^(3^2)
    CHECK(eval_value(parse_scalar_field("2^3^2", 1), pt({0}, {0})) == Catch::Approx(512.0));
}

TEST_CASE("jet of 2*y1*y2 at y=(1,2)") {
    ScalarField f = parse_scalar_field("2*y1*y2", 2);
    Jet2 j = eval_jet2(f, pt({0, 0}, {1, 2}));
    CHECK(j.value() == Catch::Approx(4.0));
    CHECK(j.dy(0) == Catch::Approx(4.0));
    CHECK(j.dy(1) == Catch::Approx(2.0));
    CHECK(j.dydy(0, 0) == 0.0);
    CHECK(j.dydy(0, 1) == Catch::Approx(2.0));
    CHECK(j.dydy(1, 0) == Catch::Approx(2.0));
    CHECK(j.dydy(1, 1) == 0.0);
    CHECK(j.dx(0) == 0.0);
    CHECK(j.dx(1) == 0.0);
}

TEST_CASE("jet of a linear coordinate") {
    ScalarField f = parse_scalar_field("x1", 2);
    Jet2 j = eval_jet2(f, pt({7, -3}, {2, 5}));
    CHECK(j.value() == 7.0);
    CHECK(j.dx(0) == 1.0);
    CHECK(j.dx(1) == 0.0);
    CHECK(j.dy(0) == 0.0);
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) CHECK(j.h(a, b) == 0.0);
}

TEST_CASE("jet of Euclidean norm at y=(3,4)") {
    ScalarField f = parse_scalar_field("sqrt((y1)^2+(y2)^2)", 2);
    Jet2 j = eval_jet2(f, pt({0, 0}, {3, 4}));
    CHECK(j.value() == Catch::Approx(5.0));
    CHECK(j.dy(0) == Catch::Approx(0.6).margin(1e-8));
    CHECK(j.dy(1) == Catch::Approx(0.8).margin(1e-8));
}

TEST_CASE("euler residual") {
    ScalarField f = parse_scalar_field("(y1)^2+(y2)^2", 2);
    CHECK(euler_residual(f, pt({0.3, -1}, {1.5, -0.7}), 2.0) == Catch::Approx(0.0).margin(1e-14));
    ScalarField c = parse_scalar_field("y1*y2*y2", 2);
    CHECK(euler_residual(c, pt({0, 0}, {1, 1}), 2.0) == Catch::Approx(1.0));
    ScalarField l = parse_scalar_field("x1*y1", 2);
    CHECK(euler_residual(l, pt({2, 1}, {3, -4}), 1.0) == Catch::Approx(0.0).margin(1e-14));
}

TEST_CASE("evaluation domain errors") {
    CHECK_THROWS_AS(eval_value(parse_scalar_field("1/y1", 1), pt({0}, {0})), EvalError);
    CHECK_THROWS_AS(eval_jet2(parse_scalar_field("log(y1)", 1), pt({0}, {-1})), EvalError);
    CHECK_THROWS_AS(eval_jet2(parse_scalar_field("sqrt(y1)", 1), pt({0}, {-2})), EvalError);
    CHECK_THROWS_AS(eval_jet2(parse_scalar_field("y1^(-1)", 1), pt({0}, {0})), EvalError);
    // non-integer exponent requires a positive base
    CHECK_THROWS_AS(eval_jet2(parse_scalar_field("y1^2.5", 1), pt({0}, {-1})), EvalError);
    CHECK(eval_value(parse_scalar_field("y1^2.5", 1), pt({0}, {4})) == Catch::Approx(32.0));
    CHECK_THROWS_AS(eval_value(parse_scalar_field("y1", 1), pt({0, 0}, {0, 0})),
                    DimensionError);
}

TEST_CASE("negative integer exponents differentiate correctly") {
    ScalarField f = parse_scalar_field("y1^(-2)", 1);
    Jet2 j = eval_jet2(f, pt({0}, {2}));
    CHECK(j.value() == Catch::Approx(0.25));
    CHECK(j.dy(0) == Catch::Approx(-2.0 / 8.0));
    CHECK(j.dydy(0, 0) == Catch::Approx(6.0 / 16.0));
}

TEST_CASE("AD against central finite differences, 1000 random pairs") {
    ConditionReport rep = selftest_ad_vs_fd(20240817, 1000);
    INFO("max scaled residual " << rep.max_res << " over " << rep.count << " pairs");
    CHECK(rep.pass);
    CHECK(rep.count >= 900);
}

TEST_CASE("Hessian is structurally symmetric") {
    std::mt19937_64 rng(7);
    for (int t = 0; t < 50; ++t) {
        int dim = 1 + static_cast<int>(rng() % 3);
        ScalarField f = parse_scalar_field(hlab::detail::random_field_string(rng, dim), dim);
        Point p = hlab::detail::random_point(rng, dim);
        try {
            Jet2 j = eval_jet2(f, p);
            for (int a = 0; a < 2 * dim; ++a)
                for (int b = 0; b < 2 * dim; ++b)
                    CHECK(j.h(a, b) == j.h(b, a));  // exact, pairwise fill
        } catch (const EvalError&) {
        }
    }
}

TEST_CASE("serialize / reparse round trip") {
    std::mt19937_64 rng(11);
    std::vector<std::string> fixed = {
        "((y1)^2 + (y2)^2)/2", "sin(x1*y2) - cos(x2)", "exp(0.1*(x1+y1))*log(1.5+(y2)^2)",
        "y1^(-3) + x1^2.5", "-(x1 - y2)^3/(2 + (x2)^2)"};
    for (int t = 0; t < 20; ++t) fixed.push_back(hlab::detail::random_field_string(rng, 2));
    for (const auto& src : fixed) {
        ScalarField f = parse_scalar_field(src, 2);
        ScalarField g = reparse(f);
        for (int q = 0; q < 100; ++q) {
            Point p = hlab::detail::random_point(rng, 2);
            p.x[0] = std::abs(p.x[0]) + 0.1;  // keep x1^2.5 in domain
            double a, b;
            try {
                a = eval_value(f, p);
            } catch (const EvalError&) {
                CHECK_THROWS_AS(eval_value(g, p), EvalError);
                continue;
            }
            b = eval_value(g, p);
            CHECK(a == b);  // identical AST semantics, bit-for-bit
        }
    }
}

TEST_CASE("eval_value agrees with the jet value") {
    std::mt19937_64 rng(23);
    for (int t = 0; t < 100; ++t) {
        int dim = 1 + static_cast<int>(rng() % 3);
        ScalarField f = parse_scalar_field(hlab::detail::random_field_string(rng, dim), dim);
        Point p = hlab::detail::random_point(rng, dim);
        try {
            double v = eval_value(f, p);
            CHECK(v == eval_jet2(f, p).value());
        } catch (const EvalError&) {
        }
    }
}

TEST_CASE("derivative fields match jet derivatives") {
    std::mt19937_64 rng(31);
    for (int t = 0; t < 30; ++t) {
        ScalarField f = parse_scalar_field(hlab::detail::random_field_string(rng, 2), 2);
        Point p = hlab::detail::random_point(rng, 2);
        try {
            Jet2 j = eval_jet2(f, p);
            for (int i = 0; i < 2; ++i) {
                CHECK(eval_value(derivative_field_x(f, i), p) ==
                      Catch::Approx(j.dx(i)).margin(1e-12));
                CHECK(eval_value(derivative_field_y(f, i), p) ==
                      Catch::Approx(j.dy(i)).margin(1e-12));
            }
        } catch (const EvalError&) {
        }
    }
}

TEST_CASE("combinators build evaluable fields") {
    ScalarField a = field_x(0, 2), b = field_y(1, 2);
    ScalarField f = 2.0 * a * b + field_const(1.0, 2) - (-b);
    Point p = pt({3, 0}, {0, 4});
    CHECK(eval_value(f, p) == Catch::Approx(2.0 * 3 * 4 + 1 + 4));
}
