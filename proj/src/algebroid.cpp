#include "algloc/algebroid.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace algloc {

namespace {

// Coefficient of a cochain/multisection on an arbitrary (possibly unsorted)
// index tuple: sign * stored coefficient, or 0 on repeated indices.
Expr eval_on_tuple(const std::vector<Expr>& coeff, const IndexTable& table, IdxTuple t) {
    int sign = sort_with_sign(t);
    if (sign == 0) return Expr(0.0);
    Expr v = coeff[table.position(t)];
    return sign == 1 ? v : -v;
}

// Symbolic determinant of the submatrix entries(rows[i], cols[j]) by Leibniz
// expansion; ranks involved are tiny.
template <typename EntryFn>
Expr sym_det(const EntryFn& entries, const IdxTuple& rows, const IdxTuple& cols) {
    const int k = static_cast<int>(rows.size());
    if (k == 0) return Expr(1.0);
    std::vector<int> perm(k);
    for (int i = 0; i < k; ++i) perm[i] = i;
    Expr acc(0.0);
    do {
        int sign = 1;
        for (int i = 0; i < k; ++i)
            for (int j = i + 1; j < k; ++j)
                if (perm[i] > perm[j]) sign = -sign;
        Expr prod(1.0);
        for (int i = 0; i < k; ++i) prod = prod * entries(rows[i], cols[perm[i]]);
        acc = sign == 1 ? acc + prod : acc - prod;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return acc;
}

}  // namespace

void AlgebroidModel::validate() const {
    manifold->validate();
    const int m = dim();
    const auto& pair_table = IndexTable::get(rank, 2);
    for (int c = 0; c < M().num_charts(); ++c) {
        if (!defined_on(c)) continue;
        if (static_cast<int>(anchor[c].size()) != m)
            throw ValidationError("anchor row count != manifold dimension on chart " +
                                  M().chart(c).name);
        for (const auto& row : anchor[c])
            if (static_cast<int>(row.size()) != rank)
                throw ValidationError("anchor column count != rank");
        if (static_cast<int>(structure[c].size()) != pair_table.size())
            throw ValidationError("structure function table has wrong pair count");
        for (const auto& entry : structure[c])
            if (static_cast<int>(entry.size()) != rank)
                throw ValidationError("structure function entry has wrong length");
    }
}

Expr AlgebroidModel::anchor_apply(int chart, int alpha, const Expr& f) const {
    const Chart& ch = M().chart(chart);
    Expr acc(0.0);
    for (int i = 0; i < ch.dim; ++i)
        acc = acc + anchor[chart][i][alpha] * f.derivative(ch.coord_symbols[i]);
    return acc;
}

Expr AlgebroidModel::structure_coeff(int chart, int alpha, int beta, int gamma) const {
    if (alpha == beta) return Expr(0.0);
    const auto& pair_table = IndexTable::get(rank, 2);
    if (alpha < beta) return structure[chart][pair_table.position({alpha, beta})][gamma];
    return -structure[chart][pair_table.position({beta, alpha})][gamma];
}

std::vector<std::vector<double>> AlgebroidModel::frame_change(const ChartTransition& t,
                                                              const Point& p) const {
    auto J = M().transition_jacobian(t, p);
    const int m = dim();
    std::vector<std::vector<double>> F(rank, std::vector<double>(rank, 0.0));
    if (frame_rule == FrameRule::Tangent || frame_rule == FrameRule::TangentPlusTrivial) {
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) F[i][j] = J[i][j];
        for (int k = m; k < rank; ++k) F[k][k] = 1.0;
        return F;
    }
    // Cotangent: F = J^{-T}.
    Eigen::MatrixXd Jm(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) Jm(i, j) = J[i][j];
    Eigen::MatrixXd Ft = Jm.inverse().transpose();
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) F[i][j] = Ft(i, j);
    return F;
}

ASection ASection::zero(const AlgebroidModel& A) {
    ASection s;
    s.comp.resize(A.M().num_charts());
    for (auto& c : s.comp) c.assign(A.rank, Expr(0.0));
    return s;
}

ACochain ACochain::zero(const AlgebroidModel& A, int degree) {
    ACochain x;
    x.degree = degree;
    x.coeff.resize(A.M().num_charts());
    const auto& table = IndexTable::get(A.rank, degree);
    for (auto& c : x.coeff) c.assign(table.size(), Expr(0.0));
    return x;
}

AMultiSection AMultiSection::zero(const AlgebroidModel& A, int degree) {
    AMultiSection x;
    x.degree = degree;
    x.coeff.resize(A.M().num_charts());
    const auto& table = IndexTable::get(A.rank, degree);
    for (auto& c : x.coeff) c.assign(table.size(), Expr(0.0));
    return x;
}

// --- constructors ------------------------------------------------------------

AlgebroidModel tangent_algebroid(std::shared_ptr<const ManifoldModel> M, std::string name) {
    AlgebroidModel A;
    A.name = name.empty() ? M->name + "-tangent" : std::move(name);
    A.rank = M->dim;
    A.manifold = std::move(M);
    A.frame_rule = FrameRule::Tangent;
    const int n = A.M().num_charts();
    const auto& pair_table = IndexTable::get(A.rank, 2);
    A.anchor.resize(n);
    A.structure.resize(n);
    A.present.assign(n, 1);
    for (int c = 0; c < n; ++c) {
        A.anchor[c].assign(A.dim(), std::vector<Expr>(A.rank, Expr(0.0)));
        for (int i = 0; i < A.dim(); ++i) A.anchor[c][i][i] = Expr(1.0);
        A.structure[c].assign(pair_table.size(), std::vector<Expr>(A.rank, Expr(0.0)));
    }
    return A;
}

AlgebroidModel poisson_cotangent_algebroid(std::shared_ptr<const ManifoldModel> M,
                                           const std::vector<std::vector<std::vector<Expr>>>& pi,
                                           std::string name) {
    AlgebroidModel A;
    A.name = name.empty() ? M->name + "-cotangent" : std::move(name);
    A.rank = M->dim;
    A.manifold = std::move(M);
    A.frame_rule = FrameRule::Cotangent;
    const int n = A.M().num_charts();
    const int m = A.dim();
    const auto& pair_table = IndexTable::get(A.rank, 2);
    A.anchor.resize(n);
    A.structure.resize(n);
    A.present.assign(n, 0);
    for (int c = 0; c < n; ++c) {
        if (c >= static_cast<int>(pi.size()) || pi[c].empty()) continue;
        A.present[c] = 1;
        const Chart& ch = A.M().chart(c);
        A.anchor[c].assign(m, std::vector<Expr>(m, Expr(0.0)));
        for (int i = 0; i < m; ++i)
            for (int alpha = 0; alpha < m; ++alpha) A.anchor[c][i][alpha] = pi[c][i][alpha];
        A.structure[c].assign(pair_table.size(), std::vector<Expr>(m, Expr(0.0)));
        for (int pos = 0; pos < pair_table.size(); ++pos) {
            auto [alpha, beta] = std::pair(pair_table.tuple(pos)[0], pair_table.tuple(pos)[1]);
            for (int gamma = 0; gamma < m; ++gamma)
                A.structure[c][pos][gamma] =
                    -(pi[c][alpha][beta].derivative(ch.coord_symbols[gamma]));
        }
    }
    return A;
}

AlgebroidModel atiyah_trivial_bundle_algebroid(std::shared_ptr<const ManifoldModel> M,
                                               int fibre_dim, std::string name) {
    const int m = M->dim;
    const int g = fibre_dim * fibre_dim;  // gl(n) block
    AlgebroidModel A;
    A.name = name.empty() ? M->name + "-atiyah" : std::move(name);
    A.rank = m + g;
    A.manifold = std::move(M);
    A.frame_rule = FrameRule::TangentPlusTrivial;
    const int n = A.M().num_charts();
    const auto& pair_table = IndexTable::get(A.rank, 2);
    A.anchor.resize(n);
    A.structure.resize(n);
    A.present.assign(n, 1);
    // gl(n) basis E_{pq} indexed by m + p*n + q; [E_{pq}, E_{uv}] = d_{qu} E_{pv} - d_{vp} E_{uq}.
    for (int c = 0; c < n; ++c) {
        A.anchor[c].assign(m, std::vector<Expr>(A.rank, Expr(0.0)));
        for (int i = 0; i < m; ++i) A.anchor[c][i][i] = Expr(1.0);
        A.structure[c].assign(pair_table.size(), std::vector<Expr>(A.rank, Expr(0.0)));
        for (int pos = 0; pos < pair_table.size(); ++pos) {
            int alpha = pair_table.tuple(pos)[0], beta = pair_table.tuple(pos)[1];
            if (alpha < m || beta < m) continue;  // bracket with a coordinate field vanishes
            int p = (alpha - m) / fibre_dim, q = (alpha - m) % fibre_dim;
            int u = (beta - m) / fibre_dim, v = (beta - m) % fibre_dim;
            if (q == u) {
                int target = m + p * fibre_dim + v;
                A.structure[c][pos][target] = A.structure[c][pos][target] + Expr(1.0);
            }
            if (v == p) {
                int target = m + u * fibre_dim + q;
                A.structure[c][pos][target] = A.structure[c][pos][target] - Expr(1.0);
            }
        }
    }
    return A;
}

AlgebroidModel lie_algebra_point_algebroid(const std::vector<std::vector<std::vector<double>>>& f,
                                           std::string name) {
    const int r = static_cast<int>(f.size());
    auto M = std::make_shared<ManifoldModel>();
    M->name = "point";
    M->dim = 0;
    Chart ch;
    ch.name = "pt";
    ch.dim = 0;
    ch.quadrature = true;
    ch.evaluation = true;
    ch.orientation = 1;
    M->charts.push_back(ch);

    AlgebroidModel A;
    A.name = name.empty() ? "lie-algebra-point" : std::move(name);
    A.rank = r;
    A.manifold = M;
    A.frame_rule = FrameRule::TangentPlusTrivial;
    const auto& pair_table = IndexTable::get(r, 2);
    A.anchor.resize(1);
    A.structure.resize(1);
    A.present.assign(1, 1);
    A.structure[0].assign(pair_table.size(), std::vector<Expr>(r, Expr(0.0)));
    for (int pos = 0; pos < pair_table.size(); ++pos) {
        int a = pair_table.tuple(pos)[0], b = pair_table.tuple(pos)[1];
        for (int c = 0; c < r; ++c) A.structure[0][pos][c] = Expr(f[a][b][c]);
    }
    return A;
}

// --- axiom checks -------------------------------------------------------------

AxiomReport check_axioms(const AlgebroidModel& A, int samples, Rng& rng) {
    AxiomReport report;
    const int r = A.rank;
    const int m = A.dim();
    for (int c = 0; c < A.M().num_charts(); ++c) {
        if (!A.defined_on(c)) continue;
        const Chart& ch = A.M().chart(c);

        // Anchor homomorphism: a({e_a,e_b})^i - [a(e_a), a(e_b)]^i.
        std::vector<Expr> residuals;
        for (int alpha = 0; alpha < r; ++alpha) {
            for (int beta = alpha + 1; beta < r; ++beta) {
                for (int i = 0; i < m; ++i) {
                    Expr lhs(0.0);
                    for (int gamma = 0; gamma < r; ++gamma)
                        lhs = lhs + A.structure_coeff(c, alpha, beta, gamma) * A.anchor[c][i][gamma];
                    Expr rhs(0.0);
                    for (int j = 0; j < m; ++j) {
                        int sym = ch.coord_symbols[j];
                        rhs = rhs + A.anchor[c][j][alpha] * A.anchor[c][i][beta].derivative(sym) -
                              A.anchor[c][j][beta] * A.anchor[c][i][alpha].derivative(sym);
                    }
                    residuals.push_back(lhs - rhs);
                }
            }
        }

        // Jacobi: cyclic sum of {e_a, {e_b, e_g}} expanded on the frame.
        std::vector<Expr> jacobi;
        for (int alpha = 0; alpha < r; ++alpha) {
            for (int beta = alpha + 1; beta < r; ++beta) {
                for (int gamma = beta + 1; gamma < r; ++gamma) {
                    for (int eps = 0; eps < r; ++eps) {
                        Expr acc(0.0);
                        const int cyc[3][3] = {{alpha, beta, gamma},
                                               {beta, gamma, alpha},
                                               {gamma, alpha, beta}};
                        for (const auto& abc : cyc) {
                            int a = abc[0], b = abc[1], g = abc[2];
                            // {e_a, {e_b, e_g}} = a(e_a)(c^e_{bg}) e_e + c^d_{bg} c^e_{ad} e_e
                            Expr term = A.anchor_apply(c, a, A.structure_coeff(c, b, g, eps));
                            for (int d = 0; d < r; ++d)
                                term = term + A.structure_coeff(c, b, g, d) *
                                                  A.structure_coeff(c, a, d, eps);
                            acc = acc + term;
                        }
                        jacobi.push_back(acc);
                    }
                }
            }
        }

        const int chart_samples = std::max(1, samples / std::max(1, A.M().num_charts()));
        for (int s = 0; s < chart_samples; ++s) {
            Point p = A.M().sample_point(c, rng);
            Bindings b = A.M().bind_point(p);
            for (const Expr& e : residuals)
                report.anchor_residual = std::max(report.anchor_residual, std::abs(e.eval(b)));
            for (const Expr& e : jacobi)
                report.jacobi_residual = std::max(report.jacobi_residual, std::abs(e.eval(b)));
        }
    }
    return report;
}

// --- graded operations ---------------------------------------------------------

ACochain delta(const AlgebroidModel& A, const ACochain& xi) {
    if (xi.degree >= A.rank) throw DegreeError("delta on a top-degree cochain");
    const int r = A.rank;
    ACochain out;
    out.degree = xi.degree + 1;
    out.coeff.resize(A.M().num_charts());
    const auto& in_table = IndexTable::get(r, xi.degree);
    const auto& out_table = IndexTable::get(r, xi.degree + 1);
    for (int c = 0; c < A.M().num_charts(); ++c) {
        if (!xi.defined_on(c) || !A.defined_on(c)) continue;
        out.coeff[c].assign(out_table.size(), Expr(0.0));
        for (int pos = 0; pos < out_table.size(); ++pos) {
            const IdxTuple& T = out_table.tuple(pos);
            const int p1 = static_cast<int>(T.size());
            Expr acc(0.0);
            for (int i = 0; i < p1; ++i) {
                IdxTuple rest;
                rest.reserve(p1 - 1);
                for (int t = 0; t < p1; ++t)
                    if (t != i) rest.push_back(T[t]);
                Expr term = A.anchor_apply(c, T[i], xi.coeff[c][in_table.position(rest)]);
                acc = (i % 2 == 0) ? acc + term : acc - term;
            }
            for (int i = 0; i < p1; ++i) {
                for (int j = i + 1; j < p1; ++j) {
                    IdxTuple rest;
                    rest.reserve(p1 - 2);
                    for (int t = 0; t < p1; ++t)
                        if (t != i && t != j) rest.push_back(T[t]);
                    Expr term(0.0);
                    for (int gamma = 0; gamma < r; ++gamma) {
                        Expr cg = A.structure_coeff(c, T[i], T[j], gamma);
                        if (cg.is_zero()) continue;
                        IdxTuple full;
                        full.reserve(p1 - 1);
                        full.push_back(gamma);
                        for (int x : rest) full.push_back(x);
                        term = term + cg * eval_on_tuple(xi.coeff[c], in_table, full);
                    }
                    acc = ((i + j) % 2 == 0) ? acc + term : acc - term;
                }
            }
            out.coeff[c][pos] = acc;
        }
    }
    return out;
}

ACochain wedge(const AlgebroidModel& A, const ACochain& xi, const ACochain& zeta) {
    int k = xi.degree + zeta.degree;
    if (k > A.rank) throw DegreeError("wedge exceeds algebroid rank");
    ACochain out;
    out.degree = k;
    out.coeff.resize(A.M().num_charts());
    const auto& ta = IndexTable::get(A.rank, xi.degree);
    const auto& tb = IndexTable::get(A.rank, zeta.degree);
    const auto& to = IndexTable::get(A.rank, k);
    for (int c = 0; c < A.M().num_charts(); ++c) {
        if (!xi.defined_on(c) || !zeta.defined_on(c)) continue;
        out.coeff[c].assign(to.size(), Expr(0.0));
        for (int ia = 0; ia < ta.size(); ++ia) {
            if (xi.coeff[c][ia].is_zero()) continue;
            for (int ib = 0; ib < tb.size(); ++ib) {
                if (zeta.coeff[c][ib].is_zero()) continue;
                const IdxTuple& I = ta.tuple(ia);
                const IdxTuple& J = tb.tuple(ib);
                if (!tuples_disjoint(I, J)) continue;
                int sign = merge_sign(I, J);
                int pos = to.position(merge_tuples(I, J));
                Expr term = xi.coeff[c][ia] * zeta.coeff[c][ib];
                out.coeff[c][pos] = out.coeff[c][pos] + Expr(static_cast<double>(sign)) * term;
            }
        }
    }
    return out;
}

ACochain contract(const AlgebroidModel& A, const ASection& s, const ACochain& xi) {
    if (xi.degree < 1) throw DegreeError("contract needs degree >= 1");
    ACochain out;
    out.degree = xi.degree - 1;
    out.coeff.resize(A.M().num_charts());
    const auto& in_table = IndexTable::get(A.rank, xi.degree);
    const auto& out_table = IndexTable::get(A.rank, xi.degree - 1);
    for (int c = 0; c < A.M().num_charts(); ++c) {
        if (!xi.defined_on(c) || !s.defined_on(c)) continue;
        out.coeff[c].assign(out_table.size(), Expr(0.0));
        for (int pos = 0; pos < out_table.size(); ++pos) {
            const IdxTuple& S = out_table.tuple(pos);
            Expr acc(0.0);
            for (int alpha = 0; alpha < A.rank; ++alpha) {
                if (s.comp[c][alpha].is_zero()) continue;
                IdxTuple full;
                full.reserve(S.size() + 1);
                full.push_back(alpha);
                for (int x : S) full.push_back(x);
                acc = acc + s.comp[c][alpha] * eval_on_tuple(xi.coeff[c], in_table, full);
            }
            out.coeff[c][pos] = acc;
        }
    }
    return out;
}

namespace {

// {s, e_j} = K^gamma_j e_gamma with K^g_j = s^b c^g_{bj} - a(e_j)(s^g).
Expr bracket_frame_matrix(const AlgebroidModel& A, const ASection& s, int c, int gamma, int j) {
    Expr acc = -A.anchor_apply(c, j, s.comp[c][gamma]);
    for (int beta = 0; beta < A.rank; ++beta)
        acc = acc + s.comp[c][beta] * A.structure_coeff(c, beta, j, gamma);
    return acc;
}

}  // namespace

AMultiSection lie_multisection(const AlgebroidModel& A, const ASection& s, const AMultiSection& X) {
    AMultiSection out;
    out.degree = X.degree;
    out.coeff.resize(A.M().num_charts());
    const auto& table = IndexTable::get(A.rank, X.degree);
    for (int c = 0; c < A.M().num_charts(); ++c) {
        if (!X.defined_on(c) || !s.defined_on(c) || !A.defined_on(c)) continue;
        out.coeff[c].assign(table.size(), Expr(0.0));
        for (int ip = 0; ip < table.size(); ++ip) {
            const IdxTuple& J = table.tuple(ip);
            // a(s)(X^J) contribution stays on the same tuple.
            Expr der(0.0);
            for (int beta = 0; beta < A.rank; ++beta)
                der = der + s.comp[c][beta] * A.anchor_apply(c, beta, X.coeff[c][ip]);
            out.coeff[c][ip] = out.coeff[c][ip] + der;
            // slot replacement by K.
            for (std::size_t t = 0; t < J.size(); ++t) {
                for (int gamma = 0; gamma < A.rank; ++gamma) {
                    Expr K = bracket_frame_matrix(A, s, c, gamma, J[t]);
                    if (K.is_zero()) continue;
                    IdxTuple target = J;
                    target[t] = gamma;
                    IdxTuple sorted = target;
                    int sign = sort_with_sign(sorted);
                    if (sign == 0) continue;
                    int tpos = table.position(sorted);
                    Expr term = K * X.coeff[c][ip];
                    out.coeff[c][tpos] =
                        out.coeff[c][tpos] + Expr(static_cast<double>(sign)) * term;
                }
            }
        }
    }
    return out;
}

ACochain lie_cochain(const AlgebroidModel& A, const ASection& s, const ACochain& xi) {
    ACochain out;
    out.degree = xi.degree;
    out.coeff.resize(A.M().num_charts());
    const auto& table = IndexTable::get(A.rank, xi.degree);
    for (int c = 0; c < A.M().num_charts(); ++c) {
        if (!xi.defined_on(c) || !s.defined_on(c) || !A.defined_on(c)) continue;
        out.coeff[c].assign(table.size(), Expr(0.0));
        for (int ip = 0; ip < table.size(); ++ip) {
            const IdxTuple& T = table.tuple(ip);
            Expr acc(0.0);
            for (int beta = 0; beta < A.rank; ++beta)
                acc = acc + s.comp[c][beta] * A.anchor_apply(c, beta, xi.coeff[c][ip]);
            for (std::size_t t = 0; t < T.size(); ++t) {
                for (int gamma = 0; gamma < A.rank; ++gamma) {
                    Expr K = bracket_frame_matrix(A, s, c, gamma, T[t]);
                    if (K.is_zero()) continue;
                    IdxTuple arg = T;
                    arg[t] = gamma;
                    acc = acc - K * eval_on_tuple(xi.coeff[c], table, arg);
                }
            }
            out.coeff[c][ip] = acc;
        }
    }
    return out;
}

ASection section_bracket(const AlgebroidModel& A, const ASection& s, const ASection& t) {
    ASection out = ASection::zero(A);
    for (int c = 0; c < A.M().num_charts(); ++c) {
        if (!s.defined_on(c) || !t.defined_on(c) || !A.defined_on(c)) {
            out.comp[c].clear();
            continue;
        }
        for (int gamma = 0; gamma < A.rank; ++gamma) {
            Expr acc(0.0);
            for (int alpha = 0; alpha < A.rank; ++alpha) {
                acc = acc + s.comp[c][alpha] * A.anchor_apply(c, alpha, t.comp[c][gamma]) -
                      t.comp[c][alpha] * A.anchor_apply(c, alpha, s.comp[c][gamma]);
                for (int beta = 0; beta < A.rank; ++beta)
                    acc = acc + s.comp[c][alpha] * t.comp[c][beta] *
                                    A.structure_coeff(c, alpha, beta, gamma);
            }
            out.comp[c][gamma] = acc;
        }
    }
    return out;
}

ACochain anchor_pullback(const AlgebroidModel& A, const DiffForm& w) {
    if (w.degree > A.rank) throw DegreeError("anchor pullback beyond algebroid rank");
    ACochain out;
    out.degree = w.degree;
    out.coeff.resize(A.M().num_charts());
    const auto& form_table = IndexTable::get(A.dim(), w.degree);
    const auto& coch_table = IndexTable::get(A.rank, w.degree);
    for (int c = 0; c < A.M().num_charts(); ++c) {
        if (!w.defined_on(c) || !A.defined_on(c)) continue;
        out.coeff[c].assign(coch_table.size(), Expr(0.0));
        auto entry = [&](int i, int alpha) { return A.anchor[c][i][alpha]; };
        for (int tp = 0; tp < coch_table.size(); ++tp) {
            const IdxTuple& T = coch_table.tuple(tp);
            Expr acc(0.0);
            for (int fp = 0; fp < form_table.size(); ++fp) {
                if (w.coeff[c][fp].is_zero()) continue;
                acc = acc + w.coeff[c][fp] * sym_det(entry, form_table.tuple(fp), T);
            }
            out.coeff[c][tp] = acc;
        }
    }
    return out;
}

ACochain cochain_add(const ACochain& x, const ACochain& y) {
    if (x.degree != y.degree) throw DegreeError("adding cochains of different degrees");
    ACochain out = x;
    out.coeff.resize(std::max(x.coeff.size(), y.coeff.size()));
    for (std::size_t c = 0; c < out.coeff.size(); ++c) {
        if (c >= y.coeff.size() || y.coeff[c].empty()) continue;
        if (out.coeff[c].empty()) {
            out.coeff[c] = y.coeff[c];
        } else {
            for (std::size_t i = 0; i < out.coeff[c].size(); ++i)
                out.coeff[c][i] = out.coeff[c][i] + y.coeff[c][i];
        }
    }
    return out;
}

ACochain cochain_scale(const ACochain& x, const Expr& f) {
    ACochain out = x;
    for (auto& chart : out.coeff)
        for (auto& e : chart) e = f * e;
    return out;
}

AMultiSection multisection_add(const AMultiSection& x, const AMultiSection& y) {
    if (x.degree != y.degree) throw DegreeError("adding multisections of different degrees");
    AMultiSection out = x;
    for (std::size_t c = 0; c < out.coeff.size() && c < y.coeff.size(); ++c) {
        if (y.coeff[c].empty()) continue;
        if (out.coeff[c].empty()) {
            out.coeff[c] = y.coeff[c];
        } else {
            for (std::size_t i = 0; i < out.coeff[c].size(); ++i)
                out.coeff[c][i] = out.coeff[c][i] + y.coeff[c][i];
        }
    }
    return out;
}

std::vector<double> eval_cochain(const AlgebroidModel& A, const ACochain& xi, const Point& p,
                                 const Bindings& params) {
    if (!xi.defined_on(p.chart))
        throw ValidationError("cochain has no data on chart '" + A.M().chart(p.chart).name + "'");
    Bindings b = params;
    const Chart& ch = A.M().chart(p.chart);
    for (int i = 0; i < ch.dim; ++i) b.set(ch.coord_symbols[i], p.coords[i]);
    std::vector<double> out(xi.coeff[p.chart].size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = xi.coeff[p.chart][i].eval(b);
    return out;
}

std::vector<double> eval_multisection(const AlgebroidModel& A, const AMultiSection& X,
                                      const Point& p, const Bindings& params) {
    if (!X.defined_on(p.chart))
        throw ValidationError("multisection has no data on chart '" +
                              A.M().chart(p.chart).name + "'");
    Bindings b = params;
    const Chart& ch = A.M().chart(p.chart);
    for (int i = 0; i < ch.dim; ++i) b.set(ch.coord_symbols[i], p.coords[i]);
    std::vector<double> out(X.coeff[p.chart].size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = X.coeff[p.chart][i].eval(b);
    return out;
}

// --- reconstruction ------------------------------------------------------------

DifferentialTables differential_tables_of(const AlgebroidModel& A) {
    DifferentialTables D;
    D.manifold = A.manifold;
    D.rank = A.rank;
    const int n = A.M().num_charts();
    D.on_functions.resize(n);
    D.on_generators.resize(n);
    const auto& pair_table = IndexTable::get(A.rank, 2);
    for (int c = 0; c < n; ++c) {
        if (!A.defined_on(c)) continue;
        const Chart& ch = A.M().chart(c);
        D.on_functions[c].resize(ch.dim);
        for (int j = 0; j < ch.dim; ++j) {
            D.on_functions[c][j].resize(A.rank);
            for (int alpha = 0; alpha < A.rank; ++alpha)
                D.on_functions[c][j][alpha] = A.anchor[c][j][alpha];
        }
        D.on_generators[c].resize(A.rank);
        for (int gamma = 0; gamma < A.rank; ++gamma) {
            D.on_generators[c][gamma].assign(pair_table.size(), Expr(0.0));
            for (int pos = 0; pos < pair_table.size(); ++pos)
                D.on_generators[c][gamma][pos] = -A.structure[c][pos][gamma];
        }
    }
    return D;
}

AlgebroidModel induce_from_differential(const DifferentialTables& D, int samples, Rng& rng,
                                        double tol) {
    AlgebroidModel A;
    A.name = "induced";
    A.rank = D.rank;
    A.manifold = D.manifold;
    const int n = A.M().num_charts();
    const auto& pair_table = IndexTable::get(D.rank, 2);
    A.anchor.resize(n);
    A.structure.resize(n);
    A.present.assign(n, 0);
    for (int c = 0; c < n; ++c) {
        if (c >= static_cast<int>(D.on_generators.size()) || D.on_generators[c].empty()) continue;
        A.present[c] = 1;
        const Chart& ch = A.M().chart(c);
        A.anchor[c].resize(ch.dim);
        for (int j = 0; j < ch.dim; ++j) A.anchor[c][j] = D.on_functions[c][j];
        A.structure[c].assign(pair_table.size(), std::vector<Expr>(D.rank, Expr(0.0)));
        for (int pos = 0; pos < pair_table.size(); ++pos)
            for (int gamma = 0; gamma < D.rank; ++gamma)
                A.structure[c][pos][gamma] = -D.on_generators[c][gamma][pos];
    }

    // D extends the reconstructed delta, so D^2 = 0 is delta^2 = 0 on the
    // generating functions and coframe elements.
    for (int c = 0; c < n; ++c) {
        if (!A.defined_on(c)) continue;
        const Chart& ch = A.M().chart(c);
        std::vector<ACochain> dd;
        for (int j = 0; j < ch.dim; ++j) {
            ACochain df = ACochain::zero(A, 1);
            for (int cc = 0; cc < n; ++cc)
                if (cc != c) df.coeff[cc].clear();
            df.coeff[c] = D.on_functions[c][j];
            dd.push_back(delta(A, df));
        }
        for (int gamma = 0; gamma < D.rank; ++gamma) {
            ACochain eg = ACochain::zero(A, 1);
            for (int cc = 0; cc < n; ++cc)
                if (cc != c) eg.coeff[cc].clear();
            for (int alpha = 0; alpha < D.rank; ++alpha)
                eg.coeff[c][alpha] = Expr(alpha == gamma ? 1.0 : 0.0);
            ACochain deg = delta(A, eg);
            // delta(e^gamma) must reproduce the table; then apply delta again.
            dd.push_back(delta(A, deg));
        }
        const int chart_samples = std::max(1, samples / n);
        for (int s = 0; s < chart_samples; ++s) {
            Point p = A.M().sample_point(c, rng);
            for (const ACochain& q : dd) {
                auto vals = eval_cochain(A, q, p);
                for (double v : vals)
                    if (std::abs(v) > tol)
                        throw ValidationError("differential does not square to zero (residual " +
                                              std::to_string(v) + ")");
            }
        }
    }
    return A;
}

// --- transition checks -----------------------------------------------------------

TransitionReport transition_check_anchor(const AlgebroidModel& A, int samples, Rng& rng) {
    TransitionReport report;
    const ManifoldModel& M = A.M();
    for (const ChartTransition& t : M.transitions) {
        if (!A.defined_on(t.from) || !A.defined_on(t.to)) continue;
        for (int s = 0; s < samples; ++s) {
            Point p = M.sample_point(t.from, rng);
            // stay inside the transition's sample box
            for (std::size_t i = 0; i < t.sample_box.size(); ++i) {
                auto [lo, hi] = t.sample_box[i];
                p.coords[i] = lo + uniform(rng, 0.02, 0.98) * (hi - lo);
            }
            Point q = M.transition_apply(t, p);
            auto J = M.transition_jacobian(t, p);
            auto F = A.frame_change(t, p);
            Bindings bp = M.bind_point(p);
            Bindings bq = M.bind_point(q);
            double res = 0.0;
            for (int alpha = 0; alpha < A.rank; ++alpha) {
                for (int i = 0; i < M.dim; ++i) {
                    double lhs = 0.0;
                    for (int beta = 0; beta < A.rank; ++beta)
                        lhs += A.anchor[t.to][i][beta].eval(bq) * F[beta][alpha];
                    double rhs = 0.0;
                    for (int j = 0; j < M.dim; ++j)
                        rhs += J[i][j] * A.anchor[t.from][j][alpha].eval(bp);
                    res = std::max(res, std::abs(lhs - rhs));
                }
            }
            report.entries.push_back({t.from, t.to, p, res});
            report.max_residual = std::max(report.max_residual, res);
        }
    }
    return report;
}

TransitionReport transition_check_cochain(const AlgebroidModel& A, const ACochain& xi,
                                          int samples, Rng& rng, const Bindings& params) {
    TransitionReport report;
    const ManifoldModel& M = A.M();
    const auto& table = IndexTable::get(A.rank, xi.degree);
    for (const ChartTransition& t : M.transitions) {
        if (!xi.defined_on(t.from) || !xi.defined_on(t.to)) continue;
        for (int s = 0; s < samples; ++s) {
            Point p = M.sample_point(t.from, rng);
            for (std::size_t i = 0; i < t.sample_box.size(); ++i) {
                auto [lo, hi] = t.sample_box[i];
                p.coords[i] = lo + uniform(rng, 0.02, 0.98) * (hi - lo);
            }
            Point q = M.transition_apply(t, p);
            auto F = A.frame_change(t, p);
            auto vf = eval_cochain(A, xi, p, params);
            auto vt = eval_cochain(A, xi, q, params);
            double res = 0.0;
            for (int ip = 0; ip < table.size(); ++ip) {
                const IdxTuple& I = table.tuple(ip);
                double pulled = 0.0;
                for (int kp = 0; kp < table.size(); ++kp) {
                    const IdxTuple& K = table.tuple(kp);
                    const int kk = static_cast<int>(K.size());
                    double det = 0.0;
                    if (kk == 0) {
                        det = 1.0;
                    } else {
                        std::vector<int> perm(kk);
                        for (int i = 0; i < kk; ++i) perm[i] = i;
                        do {
                            int sign = 1;
                            for (int i = 0; i < kk; ++i)
                                for (int j = i + 1; j < kk; ++j)
                                    if (perm[i] > perm[j]) sign = -sign;
                            double prod = 1.0;
                            for (int i = 0; i < kk; ++i) prod *= F[K[i]][I[perm[i]]];
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

double max_abs_cochain(const AlgebroidModel& A, const ACochain& xi,
                       const std::vector<Point>& pts, const Bindings& params) {
    double out = 0.0;
    for (const Point& p : pts) {
        if (!xi.defined_on(p.chart)) continue;
        auto vals = eval_cochain(A, xi, p, params);
        for (double v : vals) out = std::max(out, std::abs(v));
    }
    return out;
}

}  // namespace algloc
