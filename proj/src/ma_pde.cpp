#include "maq/ma_pde.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <cmath>

namespace maq {

namespace {

void require_stencil_grid(const GridSpec& g) {
  if (g.nx < 5 || g.ny < 5) throw GridTooSmall();
}

}  // namespace

HessianField2D hessian_fd(const ScalarField2D& u) {
  const GridSpec& g = u.grid();
  require_stencil_grid(g);
  const GridSpec gi = g.interior();
  const double h2 = g.h * g.h;

  HessianField2D out{ScalarField2D(gi), ScalarField2D(gi), ScalarField2D(gi)};
  for (int j = 1; j + 1 < g.ny; ++j) {
    for (int i = 1; i + 1 < g.nx; ++i) {
      out.uxx(i - 1, j - 1) = (u(i + 1, j) - 2 * u(i, j) + u(i - 1, j)) / h2;
      out.uyy(i - 1, j - 1) = (u(i, j + 1) - 2 * u(i, j) + u(i, j - 1)) / h2;
      out.uxy(i - 1, j - 1) =
          (u(i + 1, j + 1) - u(i + 1, j - 1) - u(i - 1, j + 1) + u(i - 1, j - 1)) /
          (4 * h2);
    }
  }
  return out;
}

ScalarField2D ma_residual(const ScalarField2D& u) {
  const HessianField2D H = hessian_fd(u);
  const GridSpec gi = H.grid();
  ScalarField2D r(gi);
  for (int j = 0; j < gi.ny; ++j)
    for (int i = 0; i < gi.nx; ++i)
      r(i, j) = H.uxx(i, j) * H.uyy(i, j) - H.uxy(i, j) * H.uxy(i, j) - 1.0;
  return r;
}

JHoloResidual jholo_residual(const GradientField2D& alpha) {
  const GridSpec& g = alpha.grid();
  require_stencil_grid(g);
  const GridSpec gi = g.interior();
  const double two_h = 2 * g.h;

  JHoloResidual out{ScalarField2D(gi), ScalarField2D(gi)};
  for (int j = 1; j + 1 < g.ny; ++j) {
    for (int i = 1; i + 1 < g.nx; ++i) {
      const double a1x = (alpha.c1(i + 1, j) - alpha.c1(i - 1, j)) / two_h;
      const double a1y = (alpha.c1(i, j + 1) - alpha.c1(i, j - 1)) / two_h;
      const double a2x = (alpha.c2(i + 1, j) - alpha.c2(i - 1, j)) / two_h;
      const double a2y = (alpha.c2(i, j + 1) - alpha.c2(i, j - 1)) / two_h;
      out.det_residual(i - 1, j - 1) = std::abs(a1x * a2y - a1y * a2x - 1.0);
      out.symmetry_residual(i - 1, j - 1) = std::abs(a1y - a2x);
    }
  }
  return out;
}

SignField2D positivity_field(const ScalarField2D& u) {
  const HessianField2D H = hessian_fd(u);
  const GridSpec gi = H.grid();

  double scale = 0;
  for (int j = 0; j < gi.ny; ++j)
    for (int i = 0; i < gi.nx; ++i)
      scale = std::max({scale, std::abs(H.uxx(i, j)), std::abs(H.uxy(i, j)),
                        std::abs(H.uyy(i, j))});
  const double band = 1e-8 * std::max(scale, 1e-300);

  SignField2D out{gi, Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic>(gi.nx, gi.ny)};
  for (int j = 0; j < gi.ny; ++j) {
    for (int i = 0; i < gi.nx; ++i) {
      Mat2 Hm;
      Hm << H.uxx(i, j), H.uxy(i, j), H.uxy(i, j), H.uyy(i, j);
      const Eigen::SelfAdjointEigenSolver<Mat2> es(Hm);
      const double l0 = es.eigenvalues()(0), l1 = es.eigenvalues()(1);
      NodeSign s;
      if (std::abs(l0) <= band || std::abs(l1) <= band)
        s = NodeSign::Null;
      else if (l0 > band && l1 > band)
        s = NodeSign::Positive;
      else if (l0 < -band && l1 < -band)
        s = NodeSign::Negative;
      else
        s = NodeSign::Indefinite;
      out.tags(i, j) = static_cast<int>(s);
    }
  }
  return out;
}

double quadratic_deviation(const ScalarField2D& u) {
  const GridSpec& g = u.grid();
  const int n = u.count_valid();
  if (n < 6) throw RankDeficientFit("fewer than 6 unmasked nodes");

  // Centered and scaled coordinates for a well-conditioned Vandermonde.
  const double cx = g.x0 + 0.5 * (g.nx - 1) * g.h;
  const double cy = g.y0 + 0.5 * (g.ny - 1) * g.h;
  const double sx = std::max(1e-300, 0.5 * (g.nx - 1) * g.h);
  const double sy = std::max(1e-300, 0.5 * (g.ny - 1) * g.h);

  Eigen::MatrixXd V(n, 6);
  Eigen::VectorXd rhs(n);
  int r = 0;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (!u.valid_at(i, j)) continue;
      const double X = (g.x(i) - cx) / sx;
      const double Y = (g.y(j) - cy) / sy;
      V.row(r) << 1, X, Y, X * X, X * Y, Y * Y;
      rhs(r) = u(i, j);
      ++r;
    }
  }
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(V);
  if (qr.rank() < 6) throw RankDeficientFit();
  const Eigen::VectorXd coef = qr.solve(rhs);
  const double scale = std::max(u.max_abs(), 1e-300);
  return (V * coef - rhs).cwiseAbs().maxCoeff() / scale;
}

double CounterexampleFamily::potential_at(double x, double y) {
  return x * x / y + y * y * y / 12.0;
}

Vec2 CounterexampleFamily::gradient_at(double x, double y) {
  return Vec2(2 * x / y, y * y / 4.0 - x * x / (y * y));
}

Mat2 CounterexampleFamily::hessian_at(double x, double y) {
  Mat2 H;
  H << 2 / y, -2 * x / (y * y), -2 * x / (y * y),
      2 * x * x / (y * y * y) + y / 2.0;
  return H;
}

Vec4 CounterexampleFamily::immersion_at(double x, double y) {
  return Vec4(2 * x * y, 2 * y, 2 * x, y * y - x * x);
}

std::pair<Complex, Complex> CounterexampleFamily::holomorphic_immersion_at(
    Complex z) {
  const Complex i(0, 1);
  return {-i - i * (z + i) * (z + i), i + i * (z - i) * (z - i)};
}

CounterexampleFamily counterexample_family(const GridSpec& grid) {
  if (!grid.valid()) throw BadParameter("invalid grid spec");
  if (grid.y0 <= 0) throw DomainViolation("grid reaches y <= 0");

  CounterexampleFamily fam;
  fam.grid = grid;
  fam.potential = ScalarField2D(grid);
  ScalarField2D a1(grid), a2(grid);
  fam.immersion.resize(static_cast<size_t>(grid.nx) * grid.ny);

  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      const double x = grid.x(i), y = grid.y(j);
      if (y <= 0) throw DomainViolation("node with y <= 0");
      fam.potential(i, j) = CounterexampleFamily::potential_at(x, y);
      const Vec2 al = CounterexampleFamily::gradient_at(x, y);
      a1(i, j) = al(0);
      a2(i, j) = al(1);
      fam.immersion[i + static_cast<size_t>(grid.nx) * j] =
          CounterexampleFamily::immersion_at(x, y);

      // dphi = alpha, analytic formulas on both sides.
      const double dpx = 2 * x / y;
      const double dpy = -x * x / (y * y) + y * y / 4.0;
      if (std::abs(dpx - al(0)) > 1e-10 || std::abs(dpy - al(1)) > 1e-10) {
        throw InternalInconsistency("counterexample: dphi != alpha");
      }
    }
  }
  fam.one_form = GradientField2D(std::move(a1), std::move(a2));
  return fam;
}

BoundaryBernsteinReport boundary_bernstein_check(const ScalarField2D& u) {
  const GridSpec& g = u.grid();
  require_stencil_grid(g);

  BoundaryBernsteinReport rep;

  // Condition 1: 1-D quadratic fit of the bottom-row restriction.
  {
    const double cx = g.x0 + 0.5 * (g.nx - 1) * g.h;
    const double sx = std::max(1e-300, 0.5 * (g.nx - 1) * g.h);
    Eigen::MatrixXd V(g.nx, 3);
    Eigen::VectorXd rhs(g.nx);
    for (int i = 0; i < g.nx; ++i) {
      const double X = (g.x(i) - cx) / sx;
      V.row(i) << 1, X, X * X;
      rhs(i) = u(i, 0);
    }
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(V);
    if (qr.rank() < 3) throw RankDeficientFit("degenerate bottom row");
    const Eigen::Vector3d c = qr.solve(rhs);
    rep.row_quadratic_deviation = (V * c - rhs).cwiseAbs().maxCoeff();
    // Undo the centering/scaling: coefficients of c0 + c1 x + c2 x^2.
    rep.row_fit_coeffs(2) = c(2) / (sx * sx);
    rep.row_fit_coeffs(1) = c(1) / sx - 2 * c(2) * cx / (sx * sx);
    rep.row_fit_coeffs(0) = c(0) - c(1) * cx / sx + c(2) * cx * cx / (sx * sx);
  }

  // Condition 2: sup of the Laplacian over the bottom interior row.
  {
    const HessianField2D H = hessian_fd(u);
    double sup = 0;
    for (int i = 0; i < H.grid().nx; ++i)
      sup = std::max(sup, std::abs(H.uxx(i, 0) + H.uyy(i, 0)));
    rep.sup_laplacian_bottom = sup;
  }
  return rep;
}

namespace {

// Poisson solve Laplacian u = rhs with Dirichlet data, 5-point stencil.
ScalarField2D poisson_dirichlet(const ScalarField2D& boundary_data, double rhs) {
  const GridSpec& g = boundary_data.grid();
  const int mx = g.nx - 2, my = g.ny - 2;
  const auto idx = [mx](int i, int j) { return i + mx * j; };
  const double h2 = g.h * g.h;

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<size_t>(mx) * my * 5);
  Eigen::VectorXd b = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(mx) * my,
                                                rhs * h2);
  for (int j = 0; j < my; ++j) {
    for (int i = 0; i < mx; ++i) {
      const int row = idx(i, j);
      trip.emplace_back(row, row, -4.0);
      const int gi = i + 1, gj = j + 1;
      const auto couple = [&](int ii, int jj) {
        if (ii >= 1 && ii <= mx && jj >= 1 && jj <= my)
          trip.emplace_back(row, idx(ii - 1, jj - 1), 1.0);
        else
          b(row) -= boundary_data(ii, jj);
      };
      couple(gi + 1, gj);
      couple(gi - 1, gj);
      couple(gi, gj + 1);
      couple(gi, gj - 1);
    }
  }
  Eigen::SparseMatrix<double> A(static_cast<Eigen::Index>(mx) * my,
                                static_cast<Eigen::Index>(mx) * my);
  A.setFromTriplets(trip.begin(), trip.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(A);
  if (lu.info() != Eigen::Success) throw LinearSolveFailure("Poisson factorization");
  const Eigen::VectorXd sol = lu.solve(b);
  if (lu.info() != Eigen::Success) throw LinearSolveFailure("Poisson solve");

  ScalarField2D out = boundary_data;
  for (int j = 0; j < my; ++j)
    for (int i = 0; i < mx; ++i) out(i + 1, j + 1) = sol(idx(i, j));
  return out;
}

Eigen::VectorXd ma_residual_vector(const ScalarField2D& u) {
  const ScalarField2D r = ma_residual(u);
  const GridSpec gi = r.grid();
  Eigen::VectorXd v(static_cast<Eigen::Index>(gi.nx) * gi.ny);
  for (int j = 0; j < gi.ny; ++j)
    for (int i = 0; i < gi.nx; ++i) v(i + gi.nx * j) = r(i, j);
  return v;
}

}  // namespace

NewtonResult newton_ma_solve(const ScalarField2D& boundary_data,
                             const ScalarField2D* init, const NewtonOptions& opts) {
  const GridSpec& g = boundary_data.grid();
  require_stencil_grid(g);
  const int mx = g.nx - 2, my = g.ny - 2;
  const auto idx = [mx](int i, int j) { return i + mx * j; };
  const double h2 = g.h * g.h;

  NewtonResult res;
  res.u = init ? *init : poisson_dirichlet(boundary_data, 2.0);
  if (!(res.u.grid() == g)) throw BadParameter("init grid mismatch");
  // Dirichlet ring always comes from boundary_data.
  for (int i = 0; i < g.nx; ++i) {
    res.u(i, 0) = boundary_data(i, 0);
    res.u(i, g.ny - 1) = boundary_data(i, g.ny - 1);
  }
  for (int j = 0; j < g.ny; ++j) {
    res.u(0, j) = boundary_data(0, j);
    res.u(g.nx - 1, j) = boundary_data(g.nx - 1, j);
  }

  Eigen::VectorXd F = ma_residual_vector(res.u);
  double fnorm = F.cwiseAbs().maxCoeff();
  res.residual_history.push_back(fnorm);

  for (int it = 0; it < opts.max_iterations && fnorm > opts.residual_tol; ++it) {
    const HessianField2D H = hessian_fd(res.u);

    // Linearization coefficients from the convexified Hessian: eigenvalues
    // clamped to >= convexify_floor so the linear operator stays elliptic.
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<size_t>(mx) * my * 9);
    for (int j = 0; j < my; ++j) {
      for (int i = 0; i < mx; ++i) {
        Mat2 Hm;
        Hm << H.uxx(i, j), H.uxy(i, j), H.uxy(i, j), H.uyy(i, j);
        const Eigen::SelfAdjointEigenSolver<Mat2> es(Hm);
        Vec2 lam = es.eigenvalues().cwiseMax(opts.convexify_floor);
        const Mat2 Ht = es.eigenvectors() * lam.asDiagonal() *
                        es.eigenvectors().transpose();

        // d(det H)/du_kl = Ht_yy * d(uxx) + Ht_xx * d(uyy) - 2 Ht_xy * d(uxy)
        const double cxx = Ht(1, 1) / h2;
        const double cyy = Ht(0, 0) / h2;
        const double cxy = -2 * Ht(0, 1) / (4 * h2);
        const int row = idx(i, j);
        const auto add = [&](int ii, int jj, double w) {
          if (ii >= 0 && ii < mx && jj >= 0 && jj < my)
            trip.emplace_back(row, idx(ii, jj), w);
          // couplings to Dirichlet nodes drop out of the correction system
        };
        add(i, j, -2 * cxx - 2 * cyy);
        add(i + 1, j, cxx);
        add(i - 1, j, cxx);
        add(i, j + 1, cyy);
        add(i, j - 1, cyy);
        add(i + 1, j + 1, cxy);
        add(i - 1, j - 1, cxy);
        add(i + 1, j - 1, -cxy);
        add(i - 1, j + 1, -cxy);
      }
    }
    Eigen::SparseMatrix<double> Jm(static_cast<Eigen::Index>(mx) * my,
                                   static_cast<Eigen::Index>(mx) * my);
    Jm.setFromTriplets(trip.begin(), trip.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(Jm);
    if (lu.info() != Eigen::Success) throw LinearSolveFailure("Newton factorization");
    const Eigen::VectorXd delta = lu.solve(-F);
    if (lu.info() != Eigen::Success) throw LinearSolveFailure("Newton solve");

    // Backtracking with an Armijo-style residual decrease.
    double step = 1.0;
    ScalarField2D trial = res.u;
    double trial_norm = fnorm;
    while (true) {
      for (int j = 0; j < my; ++j)
        for (int i = 0; i < mx; ++i)
          trial(i + 1, j + 1) = res.u(i + 1, j + 1) + step * delta(idx(i, j));
      const Eigen::VectorXd Ft = ma_residual_vector(trial);
      trial_norm = Ft.cwiseAbs().maxCoeff();
      if (trial_norm <= (1.0 - 1e-4 * step) * fnorm || step <= opts.min_step) {
        F = Ft;
        break;
      }
      step *= 0.5;
    }
    res.u = trial;
    fnorm = trial_norm;
    res.iterations = it + 1;
    res.residual_history.push_back(fnorm);
  }

  res.final_residual = fnorm;
  res.converged = fnorm <= opts.residual_tol;

  const SignField2D signs = positivity_field(res.u);
  res.interior_convex = true;
  for (int j = 0; j < signs.grid.ny && res.interior_convex; ++j)
    for (int i = 0; i < signs.grid.nx; ++i)
      if (signs.at(i, j) != NodeSign::Positive) {
        res.interior_convex = false;
        break;
      }
  return res;
}

double observed_order(const std::vector<double>& errors) {
  if (errors.size() < 2) throw BadParameter("need at least two refinement levels");
  double sum = 0;
  for (size_t k = 0; k + 1 < errors.size(); ++k) {
    sum += std::log2(errors[k] / errors[k + 1]);
  }
  return sum / static_cast<double>(errors.size() - 1);
}

double max_abs_on_coarse_nodes(const ScalarField2D& interior_field, int factor) {
  if (factor < 1) throw BadParameter("refinement factor must be >= 1");
  const GridSpec& g = interior_field.grid();
  double m = 0;
  for (int j = factor - 1; j < g.ny; j += factor)
    for (int i = factor - 1; i < g.nx; i += factor)
      m = std::max(m, std::abs(interior_field(i, j)));
  return m;
}

}  // namespace maq
