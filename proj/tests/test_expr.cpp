#include <cmath>

#include "algloc/expr.hpp"
#include "doctest.h"

using namespace algloc;

TEST_CASE("parse accepts the grammar") {
    Expr e = parse_expr("sin(th)*cos(ph)", std::vector<std::string>{"th", "ph"});
    Bindings b;
    b.set("th", 0.3);
    b.set("ph", 1.1);
    CHECK(e.eval(b) == doctest::Approx(std::sin(0.3) * std::cos(1.1)));

    Expr p = parse_expr("th^2 + 3", std::vector<std::string>{"th"});
    CHECK(p.eval(b) == doctest::Approx(0.09 + 3.0));

    CHECK_NOTHROW(parse_expr("-th^2 * (1 - exp(th)) / sqrt(2.5e-1)", std::vector<std::string>{"th"}));
    CHECK_NOTHROW(parse_expr("x_1 + 2*x_1^-2", std::vector<std::string>{"x_1"}));
}

TEST_CASE("parse rejects unknown symbols and bad syntax") {
    CHECK_THROWS_AS(parse_expr("sin(q)", std::vector<std::string>{"th"}), ParseError);
    CHECK_THROWS_AS(parse_expr("th +", std::vector<std::string>{"th"}), ParseError);
    CHECK_THROWS_AS(parse_expr("th^th", std::vector<std::string>{"th"}), ParseError);
    CHECK_THROWS_AS(parse_expr("(th", std::vector<std::string>{"th"}), ParseError);
    try {
        parse_expr("th + q", std::vector<std::string>{"th"});
        CHECK(false);
    } catch (const ParseError& err) {
        CHECK(err.position == 5);
    }
}

TEST_CASE("print/parse round trip is stable") {
    Rng rng(12345);
    std::vector<std::string> syms{"x", "y"};
    auto random_expr = [&](auto&& self, int depth) -> Expr {
        int pick = static_cast<int>(rng() % (depth <= 0 ? 3 : 10));
        switch (pick) {
            case 0: return Expr(uniform(rng, -3.0, 3.0));
            case 1: return Expr::symbol("x");
            case 2: return Expr::symbol("y");
            case 3: return self(self, depth - 1) + self(self, depth - 1);
            case 4: return self(self, depth - 1) - self(self, depth - 1);
            case 5: return self(self, depth - 1) * self(self, depth - 1);
            case 6: return sin(self(self, depth - 1));
            case 7: return cos(self(self, depth - 1));
            case 8: return -self(self, depth - 1);
            default: return pow_int(self(self, depth - 1), 1 + static_cast<int>(rng() % 3));
        }
    };
    for (int i = 0; i < 200; ++i) {
        Expr e = random_expr(random_expr, 5);
        Expr reparsed = parse_expr(e.str(), syms);
        CAPTURE(e.str());
        CHECK(reparsed.same_as(e));
        CHECK(parse_expr(reparsed.str(), syms).same_as(reparsed));
    }
}

TEST_CASE("derivatives: calculus identities") {
    Expr th = Expr::symbol("th");
    CHECK(sin(th).derivative("th").same_as(cos(th)));
    CHECK(pow_int(th, 2).derivative("ph").is_zero());

    // d/dth (th*cos th) at 0 equals 1 (finite-difference oracle, frozen).
    Expr e = th * cos(th);
    Bindings b;
    b.set("th", 0.0);
    CHECK(e.derivative("th").eval(b) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("derivative matches centered finite differences on random expressions") {
    Rng rng(777);
    std::vector<std::string> syms{"x", "y", "lam"};
    auto random_expr = [&](auto&& self, int depth) -> Expr {
        int pick = static_cast<int>(rng() % (depth <= 0 ? 4 : 12));
        switch (pick) {
            case 0: return Expr(uniform(rng, -2.0, 2.0));
            case 1: return Expr::symbol("x");
            case 2: return Expr::symbol("y");
            case 3: return Expr::symbol("lam");
            case 4: return self(self, depth - 1) + self(self, depth - 1);
            case 5: return self(self, depth - 1) - self(self, depth - 1);
            case 6: return self(self, depth - 1) * self(self, depth - 1);
            case 7: return sin(self(self, depth - 1));
            case 8: return cos(self(self, depth - 1));
            case 9: return exp(Expr(0.2) * self(self, depth - 1));
            case 10: return -self(self, depth - 1);
            default: return pow_int(self(self, depth - 1), static_cast<int>(rng() % 3));
        }
    };
    const double h = 1e-6;
    int checked = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        Expr e = random_expr(random_expr, 6);
        Expr de = e.derivative("x");
        double x = uniform(rng, -1.5, 1.5);
        Bindings b;
        b.set("y", uniform(rng, -1.5, 1.5));
        b.set("lam", uniform(rng, -1.5, 1.5));
        b.set("x", x + h);
        double fp, fm, exact;
        try {
            fp = e.eval(b);
            b.set("x", x - h);
            fm = e.eval(b);
            b.set("x", x);
            exact = de.eval(b);
        } catch (const EvalError&) {
            continue;  // random tree hit a singular point
        }
        double fd = (fp - fm) / (2.0 * h);
        // exp nesting can make values huge; scale-aware bound
        double scale = 1.0 + std::abs(exact) + std::abs(fp) + std::abs(fm);
        CAPTURE(e.str());
        CHECK(std::abs(fd - exact) <= 1e-6 * scale);
        ++checked;
    }
    CHECK(checked > 800);
}

TEST_CASE("evaluation errors") {
    Expr th = Expr::symbol("th");
    Expr lam = Expr::symbol("lam");

    Bindings b;
    b.set("th", M_PI / 2.0);
    CHECK(sin(th).eval(b) == doctest::Approx(1.0));

    b.set("th", 0.0);
    b.set("lam", 2.0);
    CHECK((lam * cos(th)).eval(b) == doctest::Approx(2.0));

    Bindings unbound;
    unbound.set("th", 0.0);
    CHECK_THROWS_AS((lam * cos(th)).eval(unbound), SymbolError);
    CHECK_THROWS_AS((Expr(1.0) / th).eval(unbound), EvalError);
    CHECK_THROWS_AS(sqrt(th - 1.0).eval(unbound), EvalError);
}

TEST_CASE("compiled evaluation agrees with tree evaluation") {
    Expr x = Expr::symbol("x");
    Expr y = Expr::symbol("y");
    Expr shared = sin(x * y) + pow_int(x, 3);
    Expr e = shared * shared - cos(shared) / (y + 2.0);
    CompiledExpr ce(e);
    Rng rng(5);
    for (int i = 0; i < 100; ++i) {
        Bindings b;
        b.set("x", uniform(rng, -2.0, 2.0));
        b.set("y", uniform(rng, -1.0, 1.0));
        CHECK(ce.eval(b) == doctest::Approx(e.eval(b)).epsilon(1e-14));
    }
}
