#ifndef ALGLOC_BUILTIN_MANIFOLDS_HPP
#define ALGLOC_BUILTIN_MANIFOLDS_HPP

#include <memory>

#include "algloc/geometry.hpp"

namespace algloc {

// Unit sphere with one spherical quadrature chart (th, ph) and two
// stereographic evaluation charts around the poles. Chart layout:
//   0 "sph": (th, ph) in (0, pi) x (0, 2pi), orientation +1, quadrature
//   1 "stn": (u, v) around the north pole, orientation +1
//   2 "sts": (u, v) around the south pole, orientation -1
// Stereographic charts are sampled inside a disc-shaped box |u|,|v| <= 0.75.
std::shared_ptr<ManifoldModel> s2_manifold(const std::string& prefix = "s2");

// Flat torus, single chart (t1, t2) in [0, 2pi)^2.
std::shared_ptr<ManifoldModel> t2_manifold();

// Product of two unit spheres: one spherical quadrature chart and the four
// stereo x stereo evaluation charts around the pole pairs.
std::shared_ptr<ManifoldModel> s2xs2_manifold();

// Ambient coordinate functions x, y, z of the sphere expressed on each chart
// of s2_manifold (index order matches the chart order above).
std::vector<Expr> s2_xyz(const ManifoldModel& M, int which);  // which in {0,1,2}

// (1 - u^2 - v^2)/(1 + u^2 + v^2) style helpers for a stereo chart.
Expr stereo_rho2(const ManifoldModel& M, int chart);

}  // namespace algloc

#endif
