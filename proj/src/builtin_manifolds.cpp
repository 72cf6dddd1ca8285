#include "algloc/builtin_manifolds.hpp"

#include <cmath>

namespace algloc {

namespace {

const double PI = 3.14159265358979323846;

Chart make_chart(const std::string& name, std::vector<std::string> coords,
                 std::vector<std::pair<double, double>> domain, int orientation,
                 bool quadrature, bool evaluation) {
    Chart ch;
    ch.name = name;
    ch.dim = static_cast<int>(coords.size());
    for (auto& c : coords) ch.coord_symbols.push_back(SymbolTable::intern(c));
    ch.domain = std::move(domain);
    ch.orientation = orientation;
    ch.quadrature = quadrature;
    ch.evaluation = evaluation;
    return ch;
}

}  // namespace

std::shared_ptr<ManifoldModel> s2_manifold(const std::string& prefix) {
    auto M = std::make_shared<ManifoldModel>();
    M->name = prefix;
    M->dim = 2;
    const std::string th = prefix + ":th", ph = prefix + ":ph";
    const std::string un = prefix + ":un", vn = prefix + ":vn";
    const std::string us = prefix + ":us", vs = prefix + ":vs";
    M->charts.push_back(make_chart("sph", {th, ph}, {{0.0, PI}, {0.0, 2.0 * PI}}, +1, true, false));
    M->charts.push_back(
        make_chart("stn", {un, vn}, {{-0.75, 0.75}, {-0.75, 0.75}}, +1, false, true));
    M->charts.push_back(
        make_chart("sts", {us, vs}, {{-0.75, 0.75}, {-0.75, 0.75}}, -1, false, true));

    Expr eth = Expr::symbol(th), eph = Expr::symbol(ph);
    Expr eun = Expr::symbol(un), evn = Expr::symbol(vn);

    ChartTransition to_n;
    to_n.from = 0;
    to_n.to = 1;
    to_n.map = {sin(eth) * cos(eph) / (1.0 + cos(eth)), sin(eth) * sin(eph) / (1.0 + cos(eth))};
    to_n.sample_box = {{0.15, 1.25}, {0.2, 6.0}};
    M->transitions.push_back(to_n);

    ChartTransition to_s;
    to_s.from = 0;
    to_s.to = 2;
    to_s.map = {sin(eth) * cos(eph) / (1.0 - cos(eth)), sin(eth) * sin(eph) / (1.0 - cos(eth))};
    to_s.sample_box = {{1.9, 3.0}, {0.2, 6.0}};
    M->transitions.push_back(to_s);

    ChartTransition n_to_s;
    n_to_s.from = 1;
    n_to_s.to = 2;
    Expr rho2 = eun * eun + evn * evn;
    n_to_s.map = {eun / rho2, evn / rho2};
    n_to_s.sample_box = {{0.3, 0.7}, {0.3, 0.7}};
    M->transitions.push_back(n_to_s);

    return M;
}

std::vector<Expr> s2_xyz(const ManifoldModel& M, int which) {
    std::vector<Expr> out(M.num_charts());
    {
        const Chart& ch = M.chart(0);
        Expr th = Expr::symbol(ch.coord_symbols[0]);
        Expr ph = Expr::symbol(ch.coord_symbols[1]);
        switch (which) {
            case 0: out[0] = sin(th) * cos(ph); break;
            case 1: out[0] = sin(th) * sin(ph); break;
            default: out[0] = cos(th); break;
        }
    }
    for (int c = 1; c <= 2; ++c) {
        const Chart& ch = M.chart(c);
        Expr u = Expr::symbol(ch.coord_symbols[0]);
        Expr v = Expr::symbol(ch.coord_symbols[1]);
        Expr r2 = u * u + v * v;
        switch (which) {
            case 0: out[c] = 2.0 * u / (1.0 + r2); break;
            case 1: out[c] = 2.0 * v / (1.0 + r2); break;
            default:
                out[c] = (c == 1) ? (1.0 - r2) / (1.0 + r2) : (r2 - 1.0) / (1.0 + r2);
                break;
        }
    }
    return out;
}

Expr stereo_rho2(const ManifoldModel& M, int chart) {
    const Chart& ch = M.chart(chart);
    Expr u = Expr::symbol(ch.coord_symbols[0]);
    Expr v = Expr::symbol(ch.coord_symbols[1]);
    return u * u + v * v;
}

std::shared_ptr<ManifoldModel> t2_manifold() {
    auto M = std::make_shared<ManifoldModel>();
    M->name = "t2";
    M->dim = 2;
    M->charts.push_back(
        make_chart("torus", {"t2:a", "t2:b"}, {{0.0, 2.0 * PI}, {0.0, 2.0 * PI}}, +1, true, true));
    return M;
}

std::shared_ptr<ManifoldModel> s2xs2_manifold() {
    auto M = std::make_shared<ManifoldModel>();
    M->name = "s2xs2";
    M->dim = 4;
    const std::string th1 = "p:th1", ph1 = "p:ph1", th2 = "p:th2", ph2 = "p:ph2";
    M->charts.push_back(make_chart(
        "sphsph", {th1, ph1, th2, ph2},
        {{0.0, PI}, {0.0, 2.0 * PI}, {0.0, PI}, {0.0, 2.0 * PI}}, +1, true, false));
    struct Factor {
        char tag;
        int orientation;
    };
    const Factor factors[2] = {{'n', +1}, {'s', -1}};
    for (const Factor& f1 : factors) {
        for (const Factor& f2 : factors) {
            std::string nm = std::string(1, f1.tag) + std::string(1, f2.tag);
            std::vector<std::string> coords = {"p:" + nm + ":u1", "p:" + nm + ":v1",
                                               "p:" + nm + ":u2", "p:" + nm + ":v2"};
            M->charts.push_back(make_chart(
                nm, coords, {{-0.75, 0.75}, {-0.75, 0.75}, {-0.75, 0.75}, {-0.75, 0.75}},
                f1.orientation * f2.orientation, false, true));
        }
    }
    // Transitions from the spherical product chart to each stereo product chart.
    Expr eth1 = Expr::symbol(th1), eph1 = Expr::symbol(ph1);
    Expr eth2 = Expr::symbol(th2), eph2 = Expr::symbol(ph2);
    auto stereo_pair = [](const Expr& th, const Expr& ph, bool north) -> std::pair<Expr, Expr> {
        Expr den = north ? (1.0 + cos(th)) : (1.0 - cos(th));
        return {sin(th) * cos(ph) / den, sin(th) * sin(ph) / den};
    };
    int chart_id = 1;
    for (const Factor& f1 : factors) {
        for (const Factor& f2 : factors) {
            ChartTransition t;
            t.from = 0;
            t.to = chart_id++;
            auto [u1, v1] = stereo_pair(eth1, eph1, f1.tag == 'n');
            auto [u2, v2] = stereo_pair(eth2, eph2, f2.tag == 'n');
            t.map = {u1, v1, u2, v2};
            auto box_for = [](char tag) -> std::pair<double, double> {
                return tag == 'n' ? std::pair<double, double>{0.15, 1.25}
                                  : std::pair<double, double>{1.9, 3.0};
            };
            t.sample_box = {box_for(f1.tag), {0.2, 6.0}, box_for(f2.tag), {0.2, 6.0}};
            M->transitions.push_back(t);
        }
    }
    return M;
}

}  // namespace algloc
