#ifndef ALGLOC_ALGEBROID_HPP
#define ALGLOC_ALGEBROID_HPP

#include <memory>

#include "algloc/geometry.hpp"

namespace algloc {

// Frame-change rule across a chart transition for algebroid-valued data.
enum class FrameRule {
    Tangent,    // frame = coordinate vector fields; change matrix = Jacobian
    Cotangent,  // frame = coordinate coframe; change matrix = inverse-transpose Jacobian
    TangentPlusTrivial,  // block diag(Jacobian, identity) for trivialized extra directions
};

// Lie algebroid in local data: per chart an anchor matrix a^i_alpha (dim x rank)
// and structure functions c^gamma_{alpha beta} over alpha < beta defining the
// bracket of the local frame.
struct AlgebroidModel {
    std::string name;
    int rank = 0;
    std::shared_ptr<const ManifoldModel> manifold;
    // anchor[chart][i][alpha]
    std::vector<std::vector<std::vector<Expr>>> anchor;
    // structure[chart][pair position (alpha<beta)][gamma]
    std::vector<std::vector<std::vector<Expr>>> structure;
    // present[chart]: whether algebroid data is declared on the chart.
    std::vector<char> present;
    FrameRule frame_rule = FrameRule::Tangent;

    const ManifoldModel& M() const { return *manifold; }
    int dim() const { return manifold->dim; }
    bool defined_on(int c) const {
        return c < static_cast<int>(present.size()) && present[c];
    }
    void validate() const;

    // a(e_alpha)(f) as a symbolic derivation.
    Expr anchor_apply(int chart, int alpha, const Expr& f) const;
    // Bracket of frame elements as coefficients: {e_alpha, e_beta} = sum c^g e_g.
    Expr structure_coeff(int chart, int alpha, int beta, int gamma) const;
    // Frame-change matrix across a transition, evaluated numerically at a
    // source point (entries of the source frame in the target frame).
    std::vector<std::vector<double>> frame_change(const ChartTransition& t, const Point& p) const;
};

// Section of A: r coefficients per chart.
struct ASection {
    std::vector<std::vector<Expr>> comp;  // [chart][alpha]
    static ASection zero(const AlgebroidModel& A);
    bool defined_on(int c) const { return c < static_cast<int>(comp.size()) && !comp[c].empty(); }
};

// Element of C^p_A = Gamma(Lambda^p A*): antisymmetric coefficients over
// strictly increasing frame tuples.
struct ACochain {
    int degree = 0;
    std::vector<std::vector<Expr>> coeff;  // [chart][tuple position]
    static ACochain zero(const AlgebroidModel& A, int degree);
    bool defined_on(int c) const { return c < static_cast<int>(coeff.size()) && !coeff[c].empty(); }
};

// Element of Gamma(Lambda^q A).
struct AMultiSection {
    int degree = 0;
    std::vector<std::vector<Expr>> coeff;
    static AMultiSection zero(const AlgebroidModel& A, int degree);
    bool defined_on(int c) const { return c < static_cast<int>(coeff.size()) && !coeff[c].empty(); }
};

// --- constructors -----------------------------------------------------------

AlgebroidModel tangent_algebroid(std::shared_ptr<const ManifoldModel> M, std::string name = "");

// Cotangent algebroid of a bivector: anchor a(e_alpha)^i = Pi^{i alpha},
// bracket of the coordinate coframe expanded from the Lie bracket of 1-forms,
// giving c^gamma_{alpha beta} = -d_gamma Pi^{alpha beta}. Axioms hold exactly
// when Pi is Poisson.
AlgebroidModel poisson_cotangent_algebroid(std::shared_ptr<const ManifoldModel> M,
                                           const std::vector<std::vector<std::vector<Expr>>>& pi,
                                           std::string name = "");

// Atiyah algebroid of a trivialized rank-n bundle: frame = (coordinate fields,
// gl(n) basis), anchor projects onto the first block, bracket from the matrix
// commutator on the gl block.
AlgebroidModel atiyah_trivial_bundle_algebroid(std::shared_ptr<const ManifoldModel> M,
                                               int fibre_dim, std::string name = "");

// Lie algebra as an algebroid over a point (dim-0 manifold, zero anchor).
AlgebroidModel lie_algebra_point_algebroid(const std::vector<std::vector<std::vector<double>>>& f,
                                           std::string name = "");

// --- axiom checks ------------------------------------------------------------

struct AxiomReport {
    double anchor_residual = 0.0;  // a({e_a,e_b}) - [a(e_a), a(e_b)]
    double jacobi_residual = 0.0;  // cyclic sum including anchor-derivative terms
    double max_residual() const { return std::max(anchor_residual, jacobi_residual); }
};

AxiomReport check_axioms(const AlgebroidModel& A, int samples, Rng& rng);

// --- graded operations --------------------------------------------------------

// Cartan differential on C^._A.
ACochain delta(const AlgebroidModel& A, const ACochain& xi);
ACochain wedge(const AlgebroidModel& A, const ACochain& xi, const ACochain& zeta);
// Interior product i_s, a degree -1 antiderivation (section in the first slot).
ACochain contract(const AlgebroidModel& A, const ASection& s, const ACochain& xi);
// L_s = {s, .} extended to multisections as a derivation.
AMultiSection lie_multisection(const AlgebroidModel& A, const ASection& s, const AMultiSection& X);
// Lie derivative on cochains, expanded directly from the bracket.
ACochain lie_cochain(const AlgebroidModel& A, const ASection& s, const ACochain& xi);
// Bracket of two sections.
ASection section_bracket(const AlgebroidModel& A, const ASection& s, const ASection& t);
// Pullback along the anchor: (a* w)(e_a1, ...) = w(a(e_a1), ...).
ACochain anchor_pullback(const AlgebroidModel& A, const DiffForm& w);

ACochain cochain_add(const ACochain& x, const ACochain& y);
ACochain cochain_scale(const ACochain& x, const Expr& f);
AMultiSection multisection_add(const AMultiSection& x, const AMultiSection& y);

// Evaluate all coefficients at a point (with optional parameter bindings).
std::vector<double> eval_cochain(const AlgebroidModel& A, const ACochain& xi, const Point& p,
                                 const Bindings& params = {});
std::vector<double> eval_multisection(const AlgebroidModel& A, const AMultiSection& X,
                                      const Point& p, const Bindings& params = {});

// --- reconstruction from a differential (degree-1 derivation tables) ---------

// D is given by its action on coordinate functions (one 1-cochain per
// coordinate, per chart) and on the coframe generators (one 2-cochain per
// generator). Checks D^2 = 0 at sample points, then recovers anchor and
// bracket.
struct DifferentialTables {
    std::shared_ptr<const ManifoldModel> manifold;
    int rank = 0;
    // on_functions[chart][j] = coefficients of D(x^j), length = rank.
    std::vector<std::vector<std::vector<Expr>>> on_functions;
    // on_generators[chart][gamma] = coefficients of D(e^gamma) over pairs alpha<beta.
    std::vector<std::vector<std::vector<Expr>>> on_generators;
};

DifferentialTables differential_tables_of(const AlgebroidModel& A);
AlgebroidModel induce_from_differential(const DifferentialTables& D, int samples, Rng& rng,
                                        double tol = 1e-9);

// Transition check for algebroid data: anchor columns must push forward
// consistently; cochain/multisection coefficients must glue under the frame rule.
TransitionReport transition_check_anchor(const AlgebroidModel& A, int samples, Rng& rng);
TransitionReport transition_check_cochain(const AlgebroidModel& A, const ACochain& xi,
                                          int samples, Rng& rng, const Bindings& params = {});

// Maximum |coefficient| over sample points on every defined chart.
double max_abs_cochain(const AlgebroidModel& A, const ACochain& xi,
                       const std::vector<Point>& pts, const Bindings& params = {});

}  // namespace algloc

#endif
