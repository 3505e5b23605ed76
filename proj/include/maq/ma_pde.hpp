#pragma once

#include <vector>

#include "maq/field2d.hpp"

namespace maq {

// Second-order central differences on interior nodes; exact on quadratics.
HessianField2D hessian_fd(const ScalarField2D& u);

// det(Hess u) - 1 on interior nodes.
ScalarField2D ma_residual(const ScalarField2D& u);

struct JHoloResidual {
  ScalarField2D det_residual;       // |det(D alpha) - 1|
  ScalarField2D symmetry_residual;  // |d(alpha_1)/dy - d(alpha_2)/dx|
};

// Defect of the graph of alpha from being a J-holomorphic curve: both
// components vanish iff alpha is the derivative of a Monge-Ampere solution.
JHoloResidual jholo_residual(const GradientField2D& alpha);

// Node-wise eigenvalue-sign classification of the Hessian with the null band
// |lambda| <= 1e-8 * max |Hess entry|.
SignField2D positivity_field(const ScalarField2D& u);

// Max deviation from the least-squares degree-2 fit, normalized by max |u|.
double quadratic_deviation(const ScalarField2D& u);

struct CounterexampleFamily {
  ScalarField2D potential;        // x^2/y + y^3/12
  GradientField2D one_form;       // (2x/y, y^2/4 - x^2/y^2)
  std::vector<Vec4> immersion;    // (2xy, 2y, 2x, y^2 - x^2), grid-ordered
  GridSpec grid;

  static double potential_at(double x, double y);
  static Vec2 gradient_at(double x, double y);
  static Mat2 hessian_at(double x, double y);
  static Vec4 immersion_at(double x, double y);
  // F(z) = (-i - i(z+i)^2, i + i(z-i)^2); immersion_at is its composition
  // with the inverse space-time chart.
  static std::pair<Complex, Complex> holomorphic_immersion_at(Complex z);
};

// The half-plane family of non-quadratic Monge-Ampere solutions; every node
// must satisfy y > 0, and dphi = alpha is asserted analytically at 1e-10.
CounterexampleFamily counterexample_family(const GridSpec& grid);

struct BoundaryBernsteinReport {
  double row_quadratic_deviation = 0;  // bottom row vs its 1-D quadratic fit
  double sup_laplacian_bottom = 0;     // sup |u_xx + u_yy| on the bottom interior row
  Eigen::Vector3d row_fit_coeffs = Eigen::Vector3d::Zero();  // c0 + c1 x + c2 x^2
};

// Diagnostics for the boundary Bernstein hypotheses; does not decide the
// theorem.
BoundaryBernsteinReport boundary_bernstein_check(const ScalarField2D& u);

struct NewtonOptions {
  double residual_tol = 1e-10;
  int max_iterations = 50;
  double convexify_floor = 1e-8;
  double min_step = 1.0 / (1 << 20);
};

struct NewtonResult {
  ScalarField2D u;
  bool converged = false;
  int iterations = 0;
  double final_residual = 0;
  std::vector<double> residual_history;
  bool interior_convex = false;  // a posteriori: Hessian positive-definite
};

// Damped Newton iteration on det Hess_h(u) = 1 with Dirichlet data taken from
// the boundary ring of `boundary_data`. Default initial guess solves the
// Poisson problem (Laplacian = 2) with the same data.
NewtonResult newton_ma_solve(const ScalarField2D& boundary_data,
                             const ScalarField2D* init = nullptr,
                             const NewtonOptions& opts = {});

// log2(e(h)/e(h/2)) averaged over successive refinement pairs.
double observed_order(const std::vector<double>& errors);

// Max |field| over the nodes shared with the interior of the unrefined grid
// (refinement `factor` relative to it). Order studies compare errors at these
// fixed spatial nodes; the all-interior max sits at a location that moves
// with h near the boundary and understates the order.
double max_abs_on_coarse_nodes(const ScalarField2D& interior_field, int factor);

}  // namespace maq
