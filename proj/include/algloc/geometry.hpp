#ifndef ALGLOC_GEOMETRY_HPP
#define ALGLOC_GEOMETRY_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "algloc/expr.hpp"
#include "algloc/multiindex.hpp"

namespace algloc {

// Nodes and weights for Gauss-Legendre quadrature on [-1, 1].
void gauss_legendre(int order, std::vector<double>& nodes, std::vector<double>& weights);

struct Chart {
    std::string name;
    int dim = 0;
    std::vector<int> coord_symbols;
    bool quadrature = false;   // participates in integration
    bool evaluation = false;   // hosts pointwise data (fixed points)
    // Bounded coordinate box; quadrature domain for quadrature charts and the
    // sampling region for property tests on any chart.
    std::vector<std::pair<double, double>> domain;
    std::vector<int> quad_order;  // per axis; empty = use default
    int orientation = +1;         // sign of the coordinate order vs the manifold orientation
};

struct Point {
    int chart = -1;
    std::vector<double> coords;
};

// Declared coordinate change between two overlapping charts: target
// coordinates as expressions in source coordinates, plus a box of source
// points where the overlap is sampled.
struct ChartTransition {
    int from = -1, to = -1;
    std::vector<Expr> map;  // size = dim of target chart
    std::vector<std::pair<double, double>> sample_box;  // in source coordinates
};

class ManifoldModel {
public:
    std::string name;
    int dim = 0;
    std::vector<Chart> charts;
    std::vector<ChartTransition> transitions;

    int chart_index(const std::string& chart_name) const;
    const Chart& chart(int c) const { return charts.at(c); }
    int num_charts() const { return static_cast<int>(charts.size()); }
    std::vector<int> quadrature_charts() const;

    void validate() const;

    // Uniform point in the interior of the chart's domain (small inset).
    Point sample_point(int c, Rng& rng, double inset = 0.02) const;
    Bindings bind_point(const Point& p) const;

    // Jacobian d(target)/d(source) of a transition, evaluated at a source point.
    std::vector<std::vector<double>> transition_jacobian(const ChartTransition& t,
                                                         const Point& p) const;
    Point transition_apply(const ChartTransition& t, const Point& p) const;
};

// Differential form of fixed degree: one coefficient array per chart over
// strictly increasing coordinate tuples. A chart with an empty array carries
// no data for this object.
struct DiffForm {
    int degree = 0;
    std::vector<std::vector<Expr>> coeff;  // [chart][tuple position]

    static DiffForm zero(const ManifoldModel& M, int degree);
    bool defined_on(int c) const { return c < static_cast<int>(coeff.size()) && !coeff[c].empty(); }
};

struct VectorField {
    std::vector<std::vector<Expr>> comp;  // [chart][i]

    static VectorField zero(const ManifoldModel& M);
    bool defined_on(int c) const { return c < static_cast<int>(comp.size()) && !comp[c].empty(); }
};

// 0-form helper: one Expr per chart.
using ScalarField = std::vector<Expr>;

DiffForm exterior_derivative(const ManifoldModel& M, const DiffForm& w);
DiffForm interior_product(const ManifoldModel& M, const VectorField& X, const DiffForm& w);
DiffForm wedge(const ManifoldModel& M, const DiffForm& a, const DiffForm& b);
// Cartan formula: L_X = i_X d + d i_X.
DiffForm lie_derivative(const ManifoldModel& M, const VectorField& X, const DiffForm& w);
DiffForm form_scale(const DiffForm& w, const Expr& f);
DiffForm form_add(const DiffForm& a, const DiffForm& b);
DiffForm d_of_function(const ManifoldModel& M, const ScalarField& f);

// Tensor-grid Gauss-Legendre integration of a top form over the quadrature
// charts, coefficient times orientation sign, summed in a fixed order.
// `order_override` > 0 replaces every chart's per-axis order.
double integrate_top_form(const ManifoldModel& M, const DiffForm& w, int order_override = 0);

// Evaluation of per-chart data at a point.
std::vector<double> eval_form(const ManifoldModel& M, const DiffForm& w, const Point& p,
                              const Bindings& params = {});
std::vector<double> eval_field(const ManifoldModel& M, const VectorField& X, const Point& p,
                               const Bindings& params = {});

// Transition-consistency report: one entry per (transition, sample).
struct TransitionResidual {
    int from, to;
    Point sample;
    double residual;
};
struct TransitionReport {
    std::vector<TransitionResidual> entries;
    double max_residual = 0.0;
    bool empty() const { return entries.empty(); }
};

// Checks that per-chart data glues: components transformed by the declared
// Jacobian agree with the target chart's components. Samples are drawn from
// each transition's sample box.
TransitionReport transition_check_field(const ManifoldModel& M, const VectorField& X,
                                        int samples, Rng& rng);
TransitionReport transition_check_form(const ManifoldModel& M, const DiffForm& w,
                                       int samples, Rng& rng, const Bindings& params = {});

}  // namespace algloc

#endif
