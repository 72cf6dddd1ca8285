#include <cmath>

#include "algloc/builtin_manifolds.hpp"
#include "algloc/geometry.hpp"
#include "doctest.h"

using namespace algloc;

namespace {

const double PI = 3.14159265358979323846;

Expr random_trig_expr(const Chart& ch, Rng& rng) {
    Expr acc(uniform(rng, -1.0, 1.0));
    for (int i = 0; i < ch.dim; ++i) {
        Expr c = Expr::symbol(ch.coord_symbols[i]);
        acc = acc + uniform(rng, -1.0, 1.0) * sin(c) + uniform(rng, -1.0, 1.0) * cos(c);
        if (rng() % 2) acc = acc * (1.0 + 0.25 * cos(c));
    }
    return acc;
}

DiffForm random_form(const ManifoldModel& M, int degree, Rng& rng) {
    DiffForm w = DiffForm::zero(M, degree);
    for (int c = 0; c < M.num_charts(); ++c)
        for (auto& e : w.coeff[c]) e = random_trig_expr(M.chart(c), rng);
    return w;
}

VectorField random_field(const ManifoldModel& M, Rng& rng) {
    VectorField X = VectorField::zero(M);
    for (int c = 0; c < M.num_charts(); ++c)
        for (auto& e : X.comp[c]) e = random_trig_expr(M.chart(c), rng);
    return X;
}

double max_abs(const ManifoldModel& M, const DiffForm& w, int samples, Rng& rng) {
    double out = 0.0;
    for (int c = 0; c < M.num_charts(); ++c) {
        if (!w.defined_on(c)) continue;
        for (int s = 0; s < samples; ++s) {
            Point p = M.sample_point(c, rng);
            for (double v : eval_form(M, w, p)) out = std::max(out, std::abs(v));
        }
    }
    return out;
}

}  // namespace

TEST_CASE("gauss-legendre nodes integrate polynomials exactly") {
    std::vector<double> x, w;
    gauss_legendre(8, x, w);
    double s0 = 0.0, s2 = 0.0, s14 = 0.0;
    for (int i = 0; i < 8; ++i) {
        s0 += w[i];
        s2 += w[i] * x[i] * x[i];
        s14 += w[i] * std::pow(x[i], 14);
    }
    CHECK(s0 == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(s2 == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(s14 == doctest::Approx(2.0 / 15.0).epsilon(1e-13));
}

TEST_CASE("exterior derivative basics on the sphere") {
    auto M = s2_manifold();
    M->validate();

    DiffForm f = DiffForm::zero(*M, 0);
    for (int c = 0; c < M->num_charts(); ++c) f.coeff[c][0] = Expr(3.5);
    DiffForm df = exterior_derivative(*M, f);
    Rng rng(1);
    CHECK(max_abs(*M, df, 20, rng) == 0.0);

    // d(cos th) = -sin th dth on the spherical chart.
    DiffForm z = DiffForm::zero(*M, 0);
    z.coeff[0][0] = cos(Expr::symbol(M->chart(0).coord_symbols[0]));
    z.coeff[1].clear();
    z.coeff[2].clear();
    DiffForm dz = exterior_derivative(*M, z);
    Point p;
    p.chart = 0;
    p.coords = {0.7, 1.3};
    auto vals = eval_form(*M, dz, p);
    CHECK(vals[0] == doctest::Approx(-std::sin(0.7)).epsilon(1e-12));
    CHECK(vals[1] == doctest::Approx(0.0));

    CHECK_THROWS_AS(exterior_derivative(*M, DiffForm::zero(*M, 2)), DegreeError);
}

TEST_CASE("d of d vanishes on random forms") {
    auto M = s2_manifold();
    Rng rng(42);
    for (int trial = 0; trial < 25; ++trial) {
        DiffForm w = random_form(*M, 0, rng);
        DiffForm ddw = exterior_derivative(*M, exterior_derivative(*M, w));
        CHECK(max_abs(*M, ddw, 8, rng) <= 1e-9);
    }
}

TEST_CASE("interior product identities") {
    auto M = s2_manifold();
    const Chart& sph = M->chart(0);
    Expr th = Expr::symbol(sph.coord_symbols[0]);

    // i_{d/dph}(dth ^ dph) = -dth
    VectorField X = VectorField::zero(*M);
    X.comp[0] = {Expr(0.0), Expr(1.0)};
    DiffForm vol = DiffForm::zero(*M, 2);
    vol.coeff[0][0] = Expr(1.0);
    DiffForm c = interior_product(*M, X, vol);
    Point p;
    p.chart = 0;
    p.coords = {1.0, 2.0};
    auto vals = eval_form(*M, c, p);
    CHECK(vals[0] == doctest::Approx(-1.0));
    CHECK(vals[1] == doctest::Approx(0.0));

    // i_{d/dth}(sin th dth ^ dph) = sin th dph
    VectorField Y = VectorField::zero(*M);
    Y.comp[0] = {Expr(1.0), Expr(0.0)};
    DiffForm svol = DiffForm::zero(*M, 2);
    svol.coeff[0][0] = sin(th);
    auto vals2 = eval_form(*M, interior_product(*M, Y, svol), p);
    CHECK(vals2[0] == doctest::Approx(0.0));
    CHECK(vals2[1] == doctest::Approx(std::sin(1.0)));

    CHECK_THROWS_AS(interior_product(*M, X, DiffForm::zero(*M, 0)), DegreeError);

    // i_X i_X = 0 on random data
    Rng rng(7);
    for (int trial = 0; trial < 10; ++trial) {
        VectorField Z = random_field(*M, rng);
        DiffForm w = random_form(*M, 2, rng);
        DiffForm twice = interior_product(*M, Z, interior_product(*M, Z, w));
        CHECK(max_abs(*M, twice, 10, rng) <= 1e-10);
    }
}

TEST_CASE("integration: sphere area and torus volume") {
    auto M = s2_manifold();
    DiffForm area = DiffForm::zero(*M, 2);
    area.coeff[0][0] = sin(Expr::symbol(M->chart(0).coord_symbols[0]));
    area.coeff[1].clear();
    area.coeff[2].clear();
    double a32 = integrate_top_form(*M, area, 32);
    double a64 = integrate_top_form(*M, area, 64);
    CHECK(a32 == doctest::Approx(4.0 * PI).epsilon(1e-9));
    CHECK(std::abs(a64 - a32) <= 1e-7 * std::abs(a64));

    DiffForm zero2 = DiffForm::zero(*M, 2);
    CHECK(integrate_top_form(*M, zero2) == 0.0);

    auto T = t2_manifold();
    DiffForm tvol = DiffForm::zero(*T, 2);
    tvol.coeff[0][0] = Expr(1.0);
    CHECK(integrate_top_form(*T, tvol, 16) == doctest::Approx(4.0 * PI * PI).epsilon(1e-12));
}

TEST_CASE("lie derivative via cartan matches flow-pullback finite differences") {
    auto M = s2_manifold();
    Rng rng(99);
    // Work on the spherical chart only; flow stays inside for small t.
    const Chart& ch = M->chart(0);
    for (int trial = 0; trial < 5; ++trial) {
        VectorField X = random_field(*M, rng);
        DiffForm w = random_form(*M, 1, rng);
        DiffForm lw = lie_derivative(*M, X, w);

        for (int s = 0; s < 6; ++s) {
            Point p = M->sample_point(0, rng, 0.2);
            const double dt = 5e-4;
            // flow the point by +-dt with RK4 and compare pullback difference
            auto flow = [&](Point q, double t) {
                Bindings b;
                auto eval_X = [&](const Point& pt) {
                    Bindings bb;
                    for (int i = 0; i < ch.dim; ++i) bb.set(ch.coord_symbols[i], pt.coords[i]);
                    std::vector<double> v(ch.dim);
                    for (int i = 0; i < ch.dim; ++i) v[i] = X.comp[0][i].eval(bb);
                    return v;
                };
                const int steps = 4;
                double h = t / steps;
                for (int st = 0; st < steps; ++st) {
                    auto k1 = eval_X(q);
                    Point q2 = q;
                    for (int i = 0; i < ch.dim; ++i) q2.coords[i] += 0.5 * h * k1[i];
                    auto k2 = eval_X(q2);
                    Point q3 = q;
                    for (int i = 0; i < ch.dim; ++i) q3.coords[i] += 0.5 * h * k2[i];
                    auto k3 = eval_X(q3);
                    Point q4 = q;
                    for (int i = 0; i < ch.dim; ++i) q4.coords[i] += h * k3[i];
                    auto k4 = eval_X(q4);
                    for (int i = 0; i < ch.dim; ++i)
                        q.coords[i] += h / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
                }
                return q;
            };
            // pullback (phi_t^* w)_i(p) = w_j(phi_t(p)) * d(phi_t)^j/dx^i, with
            // the flow Jacobian approximated by finite differences.
            auto pullback = [&](double t) {
                const double eps = 1e-5;
                Point q = flow(p, t);
                auto wq = eval_form(*M, w, q);
                std::vector<double> out(ch.dim, 0.0);
                for (int i = 0; i < ch.dim; ++i) {
                    Point pp = p, pm = p;
                    pp.coords[i] += eps;
                    pm.coords[i] -= eps;
                    Point qp = flow(pp, t), qm = flow(pm, t);
                    for (int j = 0; j < ch.dim; ++j) {
                        double dj = (qp.coords[j] - qm.coords[j]) / (2.0 * eps);
                        out[i] += wq[j] * dj;
                    }
                }
                return out;
            };
            auto plus = pullback(dt);
            auto minus = pullback(-dt);
            auto exact = eval_form(*M, lw, p);
            for (int i = 0; i < ch.dim; ++i) {
                double fd = (plus[i] - minus[i]) / (2.0 * dt);
                CHECK(std::abs(fd - exact[i]) <= 1e-5 * (1.0 + std::abs(exact[i])));
            }
        }
    }
}

TEST_CASE("transition consistency: pushed tangent field glues, corrupted data does not") {
    auto M = s2_manifold();
    // Rotation field about the z axis: d/dph on sph, (-v, u) on both stereo charts.
    VectorField rot = VectorField::zero(*M);
    rot.comp[0] = {Expr(0.0), Expr(1.0)};
    for (int c = 1; c <= 2; ++c) {
        Expr u = Expr::symbol(M->chart(c).coord_symbols[0]);
        Expr v = Expr::symbol(M->chart(c).coord_symbols[1]);
        rot.comp[c] = {-v, u};
    }
    Rng rng(3);
    auto report = transition_check_field(*M, rot, 12, rng);
    CHECK_FALSE(report.empty());
    CHECK(report.max_residual < 1e-9);

    // ambient function z as a 0-form glues as well
    DiffForm zf = DiffForm::zero(*M, 0);
    auto z = s2_xyz(*M, 2);
    for (int c = 0; c < 3; ++c) zf.coeff[c][0] = z[c];
    auto report_z = transition_check_form(*M, zf, 12, rng);
    CHECK(report_z.max_residual < 1e-10);

    // and dz glues as a 1-form
    auto report_dz = transition_check_form(*M, exterior_derivative(*M, zf), 12, rng);
    CHECK(report_dz.max_residual < 1e-9);

    VectorField bad = rot;
    bad.comp[1][0] = bad.comp[1][0] + 0.1;
    auto report_bad = transition_check_field(*M, bad, 12, rng);
    CHECK(report_bad.max_residual > 0.05);

    // single-chart object: empty report
    VectorField only_sph = VectorField::zero(*M);
    only_sph.comp[1].clear();
    only_sph.comp[2].clear();
    auto report_single = transition_check_field(*M, only_sph, 12, rng);
    CHECK(report_single.empty());
}

TEST_CASE("point manifold integrates by evaluation") {
    ManifoldModel M;
    M.name = "pt";
    M.dim = 0;
    Chart ch;
    ch.name = "pt";
    ch.dim = 0;
    ch.quadrature = true;
    ch.orientation = 1;
    M.charts.push_back(ch);
    M.validate();
    DiffForm w;
    w.degree = 0;
    w.coeff = {{Expr(2.25)}};
    CHECK(integrate_top_form(M, w) == doctest::Approx(2.25));
}
