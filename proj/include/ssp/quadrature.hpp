#pragma once

#include <functional>
#include <vector>

namespace ssp {

// Gauss-Legendre nodes/weights on [-1,1], computed once per order by Newton
// iteration on the Legendre recurrence.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

const GaussRule& gauss_legendre(int order);

using Fn1 = std::function<double(double)>;

// integral over [a,b] with a single Gauss panel
double integrate_panel(const Fn1& f, double a, double b, int order = 16);

// composite Gauss quadrature over consecutive panels given by breakpoints
double integrate_panels(const Fn1& f, const std::vector<double>& breaks,
                        int order = 16);

// Breakpoints for [a,b] with geometric grading toward singular endpoints.
// `ratio` is the geometric factor between consecutive panel widths at a
// graded end; `levels` panels are stacked there, the innermost one ending a
// distance ~ span * ratio^levels from the endpoint (the remaining gap is kept
// as the final panel, so the mesh covers [a,b] exactly).  `interior` panels
// cover the non-graded middle.
std::vector<double> graded_breaks(double a, double b, bool grade_left,
                                  bool grade_right, int levels, double ratio,
                                  int interior = 8);

// merge extra breakpoints (e.g. integrand kinks) into a sorted break list,
// dropping points outside [front, back]
std::vector<double> merge_breaks(std::vector<double> breaks,
                                 const std::vector<double>& extra);

// Adaptive composite quadrature over the given panels: a panel is accepted
// when its order-8 and order-16 Gauss values agree within
// tol_abs + tol_rel * |panel|, otherwise it is bisected (depth-limited, with
// tol_abs split between halves).  Resolves oscillatory tails that a fixed
// panel layout aliases.
double integrate_adaptive(const Fn1& f, const std::vector<double>& breaks,
                          double tol_abs = 1e-12, double tol_rel = 1e-10,
                          int max_depth = 24);

}  // namespace ssp
