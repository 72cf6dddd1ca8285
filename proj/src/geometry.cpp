#include "algloc/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace algloc {

void gauss_legendre(int order, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.assign(order, 0.0);
    weights.assign(order, 0.0);
    const double eps = 1e-15;
    const int mid = (order + 1) / 2;
    for (int i = 0; i < mid; ++i) {
        // Chebyshev initial guess, Newton iteration on P_n.
        double x = std::cos(M_PI * (i + 0.75) / (order + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < order; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            dp = order * (x * p0 - p1) / (x * x - 1.0);
            double dx = p0 / dp;
            x -= dx;
            if (std::abs(dx) < eps) break;
        }
        nodes[i] = -x;
        nodes[order - 1 - i] = x;
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[order - 1 - i] = w;
    }
}

int ManifoldModel::chart_index(const std::string& chart_name) const {
    for (int c = 0; c < num_charts(); ++c)
        if (charts[c].name == chart_name) return c;
    throw Error("unknown chart '" + chart_name + "' in manifold '" + name + "'");
}

std::vector<int> ManifoldModel::quadrature_charts() const {
    std::vector<int> out;
    for (int c = 0; c < num_charts(); ++c)
        if (charts[c].quadrature) out.push_back(c);
    return out;
}

void ManifoldModel::validate() const {
    if (quadrature_charts().empty())
        throw ValidationError("manifold '" + name + "' has no quadrature chart");
    for (const Chart& ch : charts) {
        if (static_cast<int>(ch.coord_symbols.size()) != ch.dim)
            throw ValidationError("chart '" + ch.name + "': coordinate count != dimension");
        if (ch.orientation != 1 && ch.orientation != -1)
            throw ValidationError("chart '" + ch.name + "': orientation must be +1 or -1");
        if (static_cast<int>(ch.domain.size()) != ch.dim)
            throw ValidationError("chart '" + ch.name + "': domain box size != dimension");
        for (auto [lo, hi] : ch.domain)
            if (!(lo <= hi)) throw ValidationError("chart '" + ch.name + "': empty domain interval");
    }
    for (const ChartTransition& t : transitions) {
        if (t.from < 0 || t.from >= num_charts() || t.to < 0 || t.to >= num_charts())
            throw ValidationError("transition references unknown chart");
        if (static_cast<int>(t.map.size()) != charts[t.to].dim)
            throw ValidationError("transition map component count != target dimension");
        if (static_cast<int>(t.sample_box.size()) != charts[t.from].dim)
            throw ValidationError("transition sample box size != source dimension");
    }
}

Point ManifoldModel::sample_point(int c, Rng& rng, double inset) const {
    const Chart& ch = charts.at(c);
    Point p;
    p.chart = c;
    p.coords.resize(ch.dim);
    for (int i = 0; i < ch.dim; ++i) {
        auto [lo, hi] = ch.domain[i];
        double u = uniform(rng, inset, 1.0 - inset);
        p.coords[i] = lo + u * (hi - lo);
    }
    return p;
}

Bindings ManifoldModel::bind_point(const Point& p) const {
    const Chart& ch = charts.at(p.chart);
    if (p.coords.size() != static_cast<std::size_t>(ch.dim))
        throw ValidationError("point coordinate count != chart dimension");
    Bindings b;
    for (int i = 0; i < ch.dim; ++i) b.set(ch.coord_symbols[i], p.coords[i]);
    return b;
}

std::vector<std::vector<double>> ManifoldModel::transition_jacobian(const ChartTransition& t,
                                                                    const Point& p) const {
    const Chart& from = charts.at(t.from);
    Bindings b = bind_point(p);
    std::vector<std::vector<double>> J(t.map.size(), std::vector<double>(from.dim));
    for (std::size_t i = 0; i < t.map.size(); ++i)
        for (int j = 0; j < from.dim; ++j)
            J[i][j] = t.map[i].derivative(from.coord_symbols[j]).eval(b);
    return J;
}

Point ManifoldModel::transition_apply(const ChartTransition& t, const Point& p) const {
    Bindings b = bind_point(p);
    Point q;
    q.chart = t.to;
    q.coords.resize(t.map.size());
    for (std::size_t i = 0; i < t.map.size(); ++i) q.coords[i] = t.map[i].eval(b);
    return q;
}

DiffForm DiffForm::zero(const ManifoldModel& M, int degree) {
    DiffForm w;
    w.degree = degree;
    w.coeff.resize(M.num_charts());
    const auto& table = IndexTable::get(M.dim, degree);
    for (int c = 0; c < M.num_charts(); ++c)
        w.coeff[c].assign(table.size(), Expr(0.0));
    return w;
}

VectorField VectorField::zero(const ManifoldModel& M) {
    VectorField X;
    X.comp.resize(M.num_charts());
    for (int c = 0; c < M.num_charts(); ++c) X.comp[c].assign(M.dim, Expr(0.0));
    return X;
}

DiffForm exterior_derivative(const ManifoldModel& M, const DiffForm& w) {
    if (w.degree >= M.dim) throw DegreeError("exterior derivative of a top-degree form");
    DiffForm out;
    out.degree = w.degree + 1;
    out.coeff.resize(M.num_charts());
    const auto& in_table = IndexTable::get(M.dim, w.degree);
    const auto& out_table = IndexTable::get(M.dim, w.degree + 1);
    for (int c = 0; c < M.num_charts(); ++c) {
        if (!w.defined_on(c)) continue;
        const Chart& ch = M.chart(c);
        out.coeff[c].assign(out_table.size(), Expr(0.0));
        for (int pos = 0; pos < out_table.size(); ++pos) {
            const IdxTuple& T = out_table.tuple(pos);
            Expr acc(0.0);
            for (std::size_t j = 0; j < T.size(); ++j) {
                IdxTuple rest;
                rest.reserve(T.size() - 1);
                for (std::size_t t = 0; t < T.size(); ++t)
                    if (t != j) rest.push_back(T[t]);
                Expr dcoef = w.coeff[c][in_table.position(rest)].derivative(ch.coord_symbols[T[j]]);
                acc = (j % 2 == 0) ? acc + dcoef : acc - dcoef;
            }
            out.coeff[c][pos] = acc;
        }
    }
    return out;
}

DiffForm interior_product(const ManifoldModel& M, const VectorField& X, const DiffForm& w) {
    if (w.degree < 1) throw DegreeError("interior product needs degree >= 1");
    DiffForm out;
    out.degree = w.degree - 1;
    out.coeff.resize(M.num_charts());
    const auto& in_table = IndexTable::get(M.dim, w.degree);
    const auto& out_table = IndexTable::get(M.dim, w.degree - 1);
    for (int c = 0; c < M.num_charts(); ++c) {
        if (!w.defined_on(c) || !X.defined_on(c)) continue;
        out.coeff[c].assign(out_table.size(), Expr(0.0));
        for (int pos = 0; pos < out_table.size(); ++pos) {
            const IdxTuple& S = out_table.tuple(pos);
            Expr acc(0.0);
            for (int i = 0; i < M.dim; ++i) {
                IdxTuple full = S;
                full.push_back(i);
                int sign = sort_with_sign(full);
                if (sign == 0) continue;
                // w(X, e_S) with X in the first slot: move i to the front.
                // full = sorted(i, S); sign accounts for sorting (S, i).
                // Inserting at the front instead of the back flips by (-1)^{|S|}.
                int front_sign = (S.size() % 2 == 0) ? 1 : -1;
                Expr term = X.comp[c][i] * w.coeff[c][in_table.position(full)];
                acc = acc + Expr(static_cast<double>(sign * front_sign)) * term;
            }
            out.coeff[c][pos] = acc;
        }
    }
    return out;
}

DiffForm wedge(const ManifoldModel& M, const DiffForm& a, const DiffForm& b) {
    int k = a.degree + b.degree;
    if (k > M.dim) throw DegreeError("wedge exceeds manifold dimension");
    DiffForm out;
    out.degree = k;
    out.coeff.resize(M.num_charts());
    const auto& ta = IndexTable::get(M.dim, a.degree);
    const auto& tb = IndexTable::get(M.dim, b.degree);
    const auto& to = IndexTable::get(M.dim, k);
    for (int c = 0; c < M.num_charts(); ++c) {
        if (!a.defined_on(c) || !b.defined_on(c)) continue;
        out.coeff[c].assign(to.size(), Expr(0.0));
        for (int ia = 0; ia < ta.size(); ++ia) {
            if (a.coeff[c][ia].is_zero()) continue;
            for (int ib = 0; ib < tb.size(); ++ib) {
                if (b.coeff[c][ib].is_zero()) continue;
                const IdxTuple& I = ta.tuple(ia);
                const IdxTuple& J = tb.tuple(ib);
                if (!tuples_disjoint(I, J)) continue;
                int sign = merge_sign(I, J);
                IdxTuple K = merge_tuples(I, J);
                int pos = to.position(K);
                Expr term = a.coeff[c][ia] * b.coeff[c][ib];
                out.coeff[c][pos] = out.coeff[c][pos] + Expr(static_cast<double>(sign)) * term;
            }
        }
    }
    return out;
}

DiffForm lie_derivative(const ManifoldModel& M, const VectorField& X, const DiffForm& w) {
    DiffForm result;
    if (w.degree == 0) {
        result = DiffForm::zero(M, 0);
        for (int c = 0; c < M.num_charts(); ++c) {
            if (!w.defined_on(c) || !X.defined_on(c)) { result.coeff[c].clear(); continue; }
            Expr acc(0.0);
            for (int i = 0; i < M.dim; ++i)
                acc = acc + X.comp[c][i] * w.coeff[c][0].derivative(M.chart(c).coord_symbols[i]);
            result.coeff[c][0] = acc;
        }
        return result;
    }
    if (w.degree == M.dim) return exterior_derivative(M, interior_product(M, X, w));
    DiffForm t1 = interior_product(M, X, exterior_derivative(M, w));
    DiffForm t2 = exterior_derivative(M, interior_product(M, X, w));
    return form_add(t1, t2);
}

DiffForm form_scale(const DiffForm& w, const Expr& f) {
    DiffForm out = w;
    for (auto& chart_coeff : out.coeff)
        for (auto& e : chart_coeff) e = f * e;
    return out;
}

DiffForm form_add(const DiffForm& a, const DiffForm& b) {
    if (a.degree != b.degree) throw DegreeError("adding forms of different degrees");
    DiffForm out = a;
    out.coeff.resize(std::max(a.coeff.size(), b.coeff.size()));
    for (std::size_t c = 0; c < out.coeff.size(); ++c) {
        if (c >= b.coeff.size() || b.coeff[c].empty()) continue;
        if (out.coeff[c].empty()) {
            out.coeff[c] = b.coeff[c];
        } else {
            for (std::size_t i = 0; i < out.coeff[c].size(); ++i)
                out.coeff[c][i] = out.coeff[c][i] + b.coeff[c][i];
        }
    }
    return out;
}

DiffForm d_of_function(const ManifoldModel& M, const ScalarField& f) {
    DiffForm w;
    w.degree = 0;
    w.coeff.resize(M.num_charts());
    for (int c = 0; c < M.num_charts() && c < static_cast<int>(f.size()); ++c)
        w.coeff[c] = {f[c]};
    return exterior_derivative(M, w);
}

double integrate_top_form(const ManifoldModel& M, const DiffForm& w, int order_override) {
    if (w.degree != M.dim) throw DegreeError("integrate_top_form needs a top-degree form");
    double total = 0.0;
    for (int c : M.quadrature_charts()) {
        if (!w.defined_on(c))
            throw ValidationError("top form missing data on quadrature chart '" + M.chart(c).name + "'");
        const Chart& ch = M.chart(c);
        if (ch.dim == 0) {
            // A point: integration is evaluation.
            Bindings b;
            total += ch.orientation * w.coeff[c][0].eval(b);
            continue;
        }
        CompiledExpr f(w.coeff[c][0]);
        std::vector<std::vector<double>> nodes(ch.dim), weights(ch.dim);
        for (int i = 0; i < ch.dim; ++i) {
            int order = order_override > 0
                            ? order_override
                            : (i < static_cast<int>(ch.quad_order.size()) && ch.quad_order[i] > 0
                                   ? ch.quad_order[i]
                                   : 32);
            std::vector<double> x, wt;
            gauss_legendre(order, x, wt);
            auto [lo, hi] = ch.domain[i];
            double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
            nodes[i].resize(order);
            weights[i].resize(order);
            for (int q = 0; q < order; ++q) {
                nodes[i][q] = mid + half * x[q];
                weights[i][q] = half * wt[q];
            }
        }
        // Lexicographic walk over the tensor grid; fixed order keeps the sum
        // reproducible. Kahan compensation controls roundoff for big grids.
        std::vector<int> idx(ch.dim, 0);
        Bindings b;
        double chart_sum = 0.0, comp = 0.0;
        while (true) {
            double wgt = 1.0;
            for (int i = 0; i < ch.dim; ++i) {
                b.set(ch.coord_symbols[i], nodes[i][idx[i]]);
                wgt *= weights[i][idx[i]];
            }
            double term = wgt * f.eval(b);
            double y = term - comp;
            double t = chart_sum + y;
            comp = (t - chart_sum) - y;
            chart_sum = t;
            int i = ch.dim - 1;
            while (i >= 0 && ++idx[i] == static_cast<int>(nodes[i].size())) {
                idx[i] = 0;
                --i;
            }
            if (i < 0) break;
        }
        total += ch.orientation * chart_sum;
    }
    return total;
}

namespace {

Bindings bind_with_params(const ManifoldModel& M, const Point& p, const Bindings& params) {
    Bindings b = params;
    const Chart& ch = M.chart(p.chart);
    for (int i = 0; i < ch.dim; ++i) b.set(ch.coord_symbols[i], p.coords[i]);
    return b;
}

}  // namespace

std::vector<double> eval_form(const ManifoldModel& M, const DiffForm& w, const Point& p,
                              const Bindings& params) {
    if (!w.defined_on(p.chart))
        throw ValidationError("form has no data on chart '" + M.chart(p.chart).name + "'");
    Bindings b = bind_with_params(M, p, params);
    std::vector<double> out(w.coeff[p.chart].size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = w.coeff[p.chart][i].eval(b);
    return out;
}

std::vector<double> eval_field(const ManifoldModel& M, const VectorField& X, const Point& p,
                               const Bindings& params) {
    if (!X.defined_on(p.chart))
        throw ValidationError("field has no data on chart '" + M.chart(p.chart).name + "'");
    Bindings b = bind_with_params(M, p, params);
    std::vector<double> out(X.comp[p.chart].size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = X.comp[p.chart][i].eval(b);
    return out;
}

namespace {

Point sample_in_box(const ManifoldModel& M, const ChartTransition& t, Rng& rng) {
    Point p;
    p.chart = t.from;
    p.coords.resize(t.sample_box.size());
    for (std::size_t i = 0; i < t.sample_box.size(); ++i) {
        auto [lo, hi] = t.sample_box[i];
        p.coords[i] = lo + uniform(rng, 0.02, 0.98) * (hi - lo);
    }
    return p;
}

}  // namespace

TransitionReport transition_check_field(const ManifoldModel& M, const VectorField& X,
                                        int samples, Rng& rng) {
    TransitionReport report;
    for (const ChartTransition& t : M.transitions) {
        if (!X.defined_on(t.from) || !X.defined_on(t.to)) continue;
        for (int s = 0; s < samples; ++s) {
            Point p = sample_in_box(M, t, rng);
            Point q = M.transition_apply(t, p);
            auto J = M.transition_jacobian(t, p);
            auto vf = eval_field(M, X, p);
            auto vt = eval_field(M, X, q);
            double res = 0.0;
            for (std::size_t i = 0; i < J.size(); ++i) {
                double pushed = 0.0;
                for (std::size_t j = 0; j < vf.size(); ++j) pushed += J[i][j] * vf[j];
                res = std::max(res, std::abs(pushed - vt[i]));
            }
            report.entries.push_back({t.from, t.to, p, res});
            report.max_residual = std::max(report.max_residual, res);
        }
    }
    return report;
}

TransitionReport transition_check_form(const ManifoldModel& M, const DiffForm& w,
                                       int samples, Rng& rng, const Bindings& params) {
    TransitionReport report;
    const auto& table = IndexTable::get(M.dim, w.degree);
    for (const ChartTransition& t : M.transitions) {
        if (!w.defined_on(t.from) || !w.defined_on(t.to)) continue;
        for (int s = 0; s < samples; ++s) {
            Point p = sample_in_box(M, t, rng);
            Point q = M.transition_apply(t, p);
            auto J = M.transition_jacobian(t, p);
            auto vf = eval_form(M, w, p, params);
            auto vt = eval_form(M, w, q, params);
            // Pulled-back coefficients: w_from[I] = sum_K w_to[K] det(J[K, I]).
            double res = 0.0;
            for (int ip = 0; ip < table.size(); ++ip) {
                const IdxTuple& I = table.tuple(ip);
                double pulled = 0.0;
                for (int kp = 0; kp < table.size(); ++kp) {
                    const IdxTuple& K = table.tuple(kp);
                    // det of the submatrix J[K, I]
                    int kk = static_cast<int>(K.size());
                    double det = 0.0;
                    if (kk == 0) {
                        det = 1.0;
                    } else {
                        std::vector<int> perm(kk);
                        for (int i = 0; i < kk; ++i) perm[i] = i;
                        // Leibniz over permutations (k <= 4 in practice).
                        do {
                            double prod = 1.0;
                            int sign = 1;
                            for (int i = 0; i < kk; ++i)
                                for (int j = i + 1; j < kk; ++j)
                                    if (perm[i] > perm[j]) sign = -sign;
                            for (int i = 0; i < kk; ++i) prod *= J[K[i]][I[perm[i]]];
                            det += sign * prod;
                        } while (std::next_permutation(perm.begin(), perm.end()));
                    }
                    pulled += vt[kp] * det;
                }
                res = std::max(res, std::abs(pulled - vf[ip]));
            }
            report.entries.push_back({t.from, t.to, p, res});
            report.max_residual = std::max(report.max_residual, res);
        }
    }
    return report;
}

}  // namespace algloc
