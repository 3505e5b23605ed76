#include "maq/surface_patch.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>

namespace maq {

namespace {

// Second-order difference along one grid direction; one-sided on the edges.
template <typename Getter>
Vec3 fd_derivative(const Getter& at, int k, int n, double h) {
  if (k == 0) return (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2 * h);
  if (k == n - 1)
    return (3.0 * at(n - 1) - 4.0 * at(n - 2) + at(n - 3)) / (2 * h);
  return (at(k + 1) - at(k - 1)) / (2 * h);
}

// Covariant central difference of a vector field along a position curve,
// first-order Schild transport of the neighbours to the center node.
Vec3 covariant_diff(const HPoint& p, const Vec3& pos_plus, const Vec3& pos_minus,
                    const Vec3& v_plus, const Vec3& v_minus, double h) {
  const Vec3 d_plus = pos_plus - p.vec();
  const Vec3 d_minus = pos_minus - p.vec();
  const Vec3 moved_plus = v_plus + christoffel(p, d_plus, v_plus);
  const Vec3 moved_minus = v_minus + christoffel(p, d_minus, v_minus);
  return (moved_plus - moved_minus) / (2 * h);
}

}  // namespace

SurfacePatch SurfacePatch::from_function(
    const GridSpec& grid, const std::function<Vec3(double, double)>& f,
    int orientation) {
  if (grid.nx < 5 || grid.ny < 5) throw GridTooSmall();
  SurfacePatch p;
  p.param = grid;
  p.orientation = orientation;
  p.positions.resize(static_cast<size_t>(grid.nx) * grid.ny);
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) p.pos(i, j) = f(grid.x(i), grid.y(j));
  return p;
}

PatchFrames patch_frames(const SurfacePatch& patch) {
  const GridSpec& g = patch.param;
  if (g.nx < 5 || g.ny < 5) throw GridTooSmall();

  PatchFrames fr;
  fr.grid = g;
  const size_t n = static_cast<size_t>(g.nx) * g.ny;
  fr.es.resize(n);
  fr.et.resize(n);
  fr.normal.resize(n);

  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const Vec3 es = fd_derivative(
          [&](int k) { return patch.pos(k, j); }, i, g.nx, g.h);
      const Vec3 et = fd_derivative(
          [&](int k) { return patch.pos(i, k); }, j, g.ny, g.h);
      const double z = patch.pos(i, j)(2);

      Mat32 T;
      T.col(0) = es / z;
      T.col(1) = et / z;
      const Eigen::JacobiSVD<Mat32> svd(T);
      if (svd.singularValues()(1) < tol::kImmersion) throw DegenerateImmersion();

      const Vec3 cr = es.cross(et);
      fr.es[fr.idx(i, j)] = es;
      fr.et[fr.idx(i, j)] = et;
      fr.normal[fr.idx(i, j)] = patch.orientation * (cr / cr.norm()) * z;
    }
  }
  return fr;
}

FundamentalForms fundamental_forms(const SurfacePatch& patch) {
  const PatchFrames fr = patch_frames(patch);
  const GridSpec& g = patch.param;
  const GridSpec gi = g.interior();

  FundamentalForms out;
  out.grid = gi;
  const size_t n = static_cast<size_t>(gi.nx) * gi.ny;
  out.I.resize(n);
  out.II.resize(n);
  out.III.resize(n);
  out.A.resize(n);
  out.K = ScalarField2D(gi);
  out.ii_asymmetry = ScalarField2D(gi);

  for (int j = 1; j + 1 < g.ny; ++j) {
    for (int i = 1; i + 1 < g.nx; ++i) {
      const HPoint p(patch.pos(i, j));
      const Vec3 es = fr.es[fr.idx(i, j)];
      const Vec3 et = fr.et[fr.idx(i, j)];

      Mat2 I;
      I << hs_inner(p, es, es), hs_inner(p, es, et), hs_inner(p, et, es),
          hs_inner(p, et, et);

      const Vec3 dnu_s =
          covariant_diff(p, patch.pos(i + 1, j), patch.pos(i - 1, j),
                         fr.normal[fr.idx(i + 1, j)], fr.normal[fr.idx(i - 1, j)],
                         g.h);
      const Vec3 dnu_t =
          covariant_diff(p, patch.pos(i, j + 1), patch.pos(i, j - 1),
                         fr.normal[fr.idx(i, j + 1)], fr.normal[fr.idx(i, j - 1)],
                         g.h);

      Mat2 II_raw;
      II_raw << hs_inner(p, dnu_s, es), hs_inner(p, dnu_s, et),
          hs_inner(p, dnu_t, es), hs_inner(p, dnu_t, et);
      const double asym = std::abs(II_raw(0, 1) - II_raw(1, 0));
      const Mat2 II = 0.5 * (II_raw + II_raw.transpose());

      const Mat2 A = I.inverse() * II;
      const size_t k = out.idx(i - 1, j - 1);
      out.I[k] = I;
      out.II[k] = II;
      out.A[k] = A;
      out.III[k] = II * A;
      out.K(i - 1, j - 1) = A.determinant();
      out.ii_asymmetry(i - 1, j - 1) = asym;
    }
  }
  return out;
}

ScalarField2D ii_norm_field(const SurfacePatch& patch) {
  const FundamentalForms f = fundamental_forms(patch);
  ScalarField2D out(f.grid);
  for (int j = 0; j < f.grid.ny; ++j)
    for (int i = 0; i < f.grid.nx; ++i) {
      const Mat2& A = f.A[f.idx(i, j)];
      out(i, j) = std::sqrt(std::max(0.0, (A * A).trace()));
    }
  return out;
}

LiftedPatch gauss_lift(const SurfacePatch& patch) {
  const PatchFrames fr = patch_frames(patch);
  LiftedPatch lift;
  lift.grid = patch.param;
  lift.base = patch.positions;
  lift.vec = fr.normal;
  return lift;
}

LiftTangents lift_tangents(const LiftedPatch& lift, int i, int j,
                           bool project_vertical) {
  const GridSpec& g = lift.grid;
  if (i < 1 || j < 1 || i + 1 >= g.nx || j + 1 >= g.ny)
    throw BadParameter("lift_tangents needs an interior node");

  const HPoint p(lift.base[lift.idx(i, j)]);
  const Vec3 xi = lift.vec[lift.idx(i, j)];

  LiftTangents t;
  t.hor_s = (lift.base[lift.idx(i + 1, j)] - lift.base[lift.idx(i - 1, j)]) /
            (2 * g.h);
  t.hor_t = (lift.base[lift.idx(i, j + 1)] - lift.base[lift.idx(i, j - 1)]) /
            (2 * g.h);
  t.vert_s = covariant_diff(p, lift.base[lift.idx(i + 1, j)],
                            lift.base[lift.idx(i - 1, j)],
                            lift.vec[lift.idx(i + 1, j)],
                            lift.vec[lift.idx(i - 1, j)], g.h);
  t.vert_t = covariant_diff(p, lift.base[lift.idx(i, j + 1)],
                            lift.base[lift.idx(i, j - 1)],
                            lift.vec[lift.idx(i, j + 1)],
                            lift.vec[lift.idx(i, j - 1)], g.h);

  if (project_vertical) {
    const double n2 = hs_inner(p, xi, xi);
    t.vert_s -= (hs_inner(p, t.vert_s, xi) / n2) * xi;
    t.vert_t -= (hs_inner(p, t.vert_t, xi) / n2) * xi;
  }
  return t;
}

ScalarField2D gauss_lift_decomposition_residual(const SurfacePatch& patch) {
  const PatchFrames fr = patch_frames(patch);
  const FundamentalForms forms = fundamental_forms(patch);
  const LiftedPatch lift = gauss_lift(patch);
  const GridSpec& g = patch.param;
  const GridSpec gi = g.interior();

  ScalarField2D out(gi);
  for (int j = 1; j + 1 < g.ny; ++j) {
    for (int i = 1; i + 1 < g.nx; ++i) {
      const HPoint p(patch.pos(i, j));
      const LiftTangents t = lift_tangents(lift, i, j, /*project_vertical=*/false);
      const Mat2& A = forms.A[forms.idx(i - 1, j - 1)];
      const Vec3 es = fr.es[fr.idx(i, j)];
      const Vec3 et = fr.et[fr.idx(i, j)];
      const Vec3 want_s = A(0, 0) * es + A(1, 0) * et;
      const Vec3 want_t = A(0, 1) * es + A(1, 1) * et;
      const double rs = hs_norm(p, t.vert_s - want_s);
      const double rt = hs_norm(p, t.vert_t - want_t);
      out(i - 1, j - 1) = std::max(rs, rt);
    }
  }
  return out;
}

Vec3 fiber_rotation(const UnitTangent& xi, const Vec3& nu) {
  return wedge(xi.base, xi.vector, nu);
}

SasakiMAPoint sasaki_ma_structure(const UnitTangent& xi, double phi) {
  const HPoint& p = xi.base;
  if (std::abs(hs_norm(p, xi.vector) - 1.0) > tol::kTight * 10)
    throw NonUnitVector();

  // Deterministic orthonormal basis of <xi>^perp: seed with the coordinate
  // axis least aligned with xi.
  const Vec3 vh = xi.vector.normalized();
  int seed = 0;
  for (int a = 1; a < 3; ++a)
    if (std::abs(vh(a)) < std::abs(vh(seed))) seed = a;
  Vec3 m1 = Vec3::Unit(seed) - vh(seed) * vh;
  m1.normalize();
  const Vec3 m2 = vh.cross(m1);

  SasakiMAPoint out;
  out.xi = xi;
  out.mu1 = p.z * m1;
  out.mu2 = p.z * m2;
  out.log_curv = phi;

  // On the basis (mu1,0),(mu2,0),(0,mu1),(0,mu2), j_xi acts as J0 on each
  // factor, and J_phi(nu, mu) = (e^phi j mu, e^-phi j nu).
  const double ep = std::exp(phi), em = std::exp(-phi);
  out.J_phi = Mat4::Zero();
  out.J_phi(3, 0) = em;   // (mu1,0) -> e^-phi (0, mu2)
  out.J_phi(2, 1) = -em;  // (mu2,0) -> -e^-phi (0, mu1)
  out.J_phi(1, 2) = ep;   // (0,mu1) -> e^phi (mu2, 0)
  out.J_phi(0, 3) = -ep;  // (0,mu2) -> -e^phi (mu1, 0)

  out.m = Mat4::Zero();
  out.m(0, 2) = out.m(2, 0) = 1;
  out.m(1, 3) = out.m(3, 1) = 1;
  return out;
}

LiftResidual jholo_lift_residual(const SurfacePatch& patch,
                                 const LogCurvature& phi) {
  const FundamentalForms forms = fundamental_forms(patch);
  const LiftedPatch lift = gauss_lift(patch);
  const GridSpec& g = patch.param;

  LiftResidual out{ScalarField2D(forms.grid), forms.ii_asymmetry};
  for (int j = 1; j + 1 < g.ny; ++j) {
    for (int i = 1; i + 1 < g.nx; ++i) {
      const HPoint p(patch.pos(i, j));
      const double ph = phi(p, lift.vec[lift.idx(i, j)]);
      out.curvature_defect(i - 1, j - 1) =
          std::abs(forms.K(i - 1, j - 1) - std::exp(2 * ph));
    }
  }
  return out;
}

LiftResidual jholo_lift_residual(const SurfacePatch& patch, double phi) {
  return jholo_lift_residual(
      patch, [phi](const HPoint&, const Vec3&) { return phi; });
}

LiftedPatch tube_surface(const GeodesicH3& geodesic, const GridSpec& grid) {
  LiftedPatch tube;
  tube.grid = grid;
  const size_t n = static_cast<size_t>(grid.nx) * grid.ny;
  tube.base.resize(n);
  tube.vec.resize(n);
  for (int j = 0; j < grid.ny; ++j) {
    const double theta = grid.y(j);
    for (int i = 0; i < grid.nx; ++i) {
      const double s = grid.x(i);
      const auto [n1, n2] = geodesic.normal_frame(s);
      tube.base[tube.idx(i, j)] = geodesic.point(s).vec();
      tube.vec[tube.idx(i, j)] = std::cos(theta) * n1 + std::sin(theta) * n2;
    }
  }
  return tube;
}

namespace {

// Sasaki inner product of two (horizontal, vertical) pairs at a base point.
double sasaki_inner(const HPoint& p, const Vec3& h1, const Vec3& v1,
                    const Vec3& h2, const Vec3& v2) {
  return hs_inner(p, h1, h2) + hs_inner(p, v1, v2);
}

// Distance of (h, v) from the span of two tangent pairs, relative.
double span_defect(const HPoint& p, const Vec3& h, const Vec3& v,
                   const Vec3& h1, const Vec3& v1, const Vec3& h2,
                   const Vec3& v2) {
  Mat2 G;
  G << sasaki_inner(p, h1, v1, h1, v1), sasaki_inner(p, h1, v1, h2, v2),
      sasaki_inner(p, h2, v2, h1, v1), sasaki_inner(p, h2, v2, h2, v2);
  Vec2 rhs(sasaki_inner(p, h, v, h1, v1), sasaki_inner(p, h, v, h2, v2));
  const Vec2 c = G.ldlt().solve(rhs);
  const Vec3 rh = h - c(0) * h1 - c(1) * h2;
  const Vec3 rv = v - c(0) * v1 - c(1) * v2;
  const double n = std::sqrt(sasaki_inner(p, h, v, h, v));
  return std::sqrt(sasaki_inner(p, rh, rv, rh, rv)) / std::max(n, 1e-300);
}

}  // namespace

TubeCheckReport verify_tube(const GeodesicH3& geodesic, const LiftedPatch& tube,
                            const std::vector<double>& phis) {
  const GridSpec& g = tube.grid;
  TubeCheckReport rep;
  rep.jphi_defects.reserve(phis.size());
  std::vector<double> jphi_max(phis.size(), 0.0);

  for (int j = 1; j + 1 < g.ny; ++j) {
    for (int i = 1; i + 1 < g.nx; ++i) {
      const HPoint p(tube.base[tube.idx(i, j)]);
      const Vec3 xi = tube.vec[tube.idx(i, j)];
      const UnitTangent ut{p, xi};
      const LiftTangents t = lift_tangents(tube, i, j);

      // m((nu,mu),(nu',mu')) = <nu,mu'> + <nu',mu> at the lift point.
      const auto m_val = [&](const Vec3& h1, const Vec3& v1, const Vec3& h2,
                             const Vec3& v2) {
        return hs_inner(p, h1, v2) + hs_inner(p, h2, v1);
      };
      rep.max_m_residual = std::max(
          {rep.max_m_residual, std::abs(m_val(t.hor_s, t.vert_s, t.hor_s, t.vert_s)),
           std::abs(m_val(t.hor_s, t.vert_s, t.hor_t, t.vert_t)),
           std::abs(m_val(t.hor_t, t.vert_t, t.hor_t, t.vert_t))});

      // Analytic tangent plane span{(tau, 0), (0, tau ^ xi)}.
      const Vec3 tau = geodesic.tangent(g.x(i));
      const Vec3 tau_wedge_xi = wedge(p, tau, xi);
      const Vec3 zero = Vec3::Zero();
      rep.max_span_defect = std::max(
          {rep.max_span_defect,
           span_defect(p, t.hor_s, t.vert_s, tau, zero, zero, tau_wedge_xi),
           span_defect(p, t.hor_t, t.vert_t, tau, zero, zero, tau_wedge_xi)});

      // Chordal proxy for the base-to-geodesic distance: exact at zero
      // separation, unlike acosh which floors near 3e-8.
      rep.max_base_projection_defect = std::max(
          rep.max_base_projection_defect,
          (p.vec() - geodesic.point(g.x(i)).vec()).norm() / p.z);

      for (size_t k = 0; k < phis.size(); ++k) {
        const double ep = std::exp(phis[k]), em = std::exp(-phis[k]);
        // J_phi(nu, mu) = (e^phi j mu, e^-phi j nu).
        const Vec3 J1h = ep * fiber_rotation(ut, t.vert_s);
        const Vec3 J1v = em * fiber_rotation(ut, t.hor_s);
        const Vec3 J2h = ep * fiber_rotation(ut, t.vert_t);
        const Vec3 J2v = em * fiber_rotation(ut, t.hor_t);
        const double d1 = span_defect(p, J1h, J1v, t.hor_s, t.vert_s, t.hor_t,
                                      t.vert_t);
        const double d2 = span_defect(p, J2h, J2v, t.hor_s, t.vert_s, t.hor_t,
                                      t.vert_t);
        jphi_max[k] = std::max({jphi_max[k], d1, d2});
      }
    }
  }
  for (size_t k = 0; k < phis.size(); ++k)
    rep.jphi_defects.emplace_back(phis[k], jphi_max[k]);
  return rep;
}

SurfacePatch flat_catalog(FlatKind kind, double parameter, const GridSpec& grid) {
  switch (kind) {
    case FlatKind::Horosphere: {
      const double c = parameter;
      if (c <= 0) throw BadParameter("horosphere needs c > 0");
      SurfacePatch p = SurfacePatch::from_function(
          grid, [c](double s, double t) { return Vec3(s, t, c); },
          /*orientation=*/-1);
      p.expected_shape_eigenvalues = Vec2(1.0, 1.0);
      p.expected_extrinsic_curvature = 1.0;
      return p;
    }
    case FlatKind::Equidistant: {
      const double d = parameter;
      if (d <= 0) throw BadParameter("equidistant needs d > 0");
      const double shd = std::sinh(d), chd = std::cosh(d);
      auto f = [shd, chd](double s, double th) {
        const double r = std::exp(s) / chd;
        return Vec3(r * shd * std::cos(th), r * shd * std::sin(th), r);
      };
      SurfacePatch p = SurfacePatch::from_function(grid, f, +1);
      // Fix the normal to point away from the axis.
      {
        const PatchFrames fr = patch_frames(p);
        const int i = grid.nx / 2, j = grid.ny / 2;
        const Vec3 pos = p.pos(i, j);
        const Vec3 radial(pos(0), pos(1), 0);
        if (fr.normal[fr.idx(i, j)].dot(radial) < 0) {
          p.orientation = -1;
        }
      }
      p.expected_shape_eigenvalues = Vec2(std::tanh(d), 1.0 / std::tanh(d));
      p.expected_extrinsic_curvature = 1.0;
      return p;
    }
    case FlatKind::GeodesicSphere: {
      const double r = parameter;
      if (r <= 0) throw BadParameter("geodesic sphere needs r > 0");
      const double ec = std::cosh(r), er = std::sinh(r);
      auto f = [ec, er](double s, double t) {
        return Vec3(er * std::sin(s) * std::cos(t), er * std::sin(s) * std::sin(t),
                    ec + er * std::cos(s));
      };
      SurfacePatch p = SurfacePatch::from_function(grid, f, +1);
      {
        const PatchFrames fr = patch_frames(p);
        const int i = grid.nx / 2, j = grid.ny / 2;
        const Vec3 out_dir = p.pos(i, j) - Vec3(0, 0, ec);
        if (fr.normal[fr.idx(i, j)].dot(out_dir) < 0) p.orientation = -1;
      }
      const double ct = std::cosh(r) / std::sinh(r);
      p.expected_shape_eigenvalues = Vec2(ct, ct);
      p.expected_extrinsic_curvature = ct * ct;
      return p;
    }
    case FlatKind::GeodesicPlane: {
      auto f = [](double s, double t) { return Vec3(s, 0, std::exp(t)); };
      SurfacePatch p = SurfacePatch::from_function(grid, f, +1);
      p.expected_shape_eigenvalues = Vec2(0.0, 0.0);
      p.expected_extrinsic_curvature = 0.0;
      return p;
    }
  }
  throw BadParameter("unknown catalog kind");
}

MetricField quasicompleteness_metric(const SurfacePatch& patch) {
  const FundamentalForms f = fundamental_forms(patch);
  MetricField out;
  out.grid = f.grid;
  out.value.resize(f.I.size());
  for (size_t k = 0; k < f.I.size(); ++k) out.value[k] = f.I[k] + f.III[k];
  return out;
}

double quasicompleteness_crosscheck(const SurfacePatch& patch) {
  const MetricField qm = quasicompleteness_metric(patch);
  const LiftedPatch lift = gauss_lift(patch);
  const GridSpec& g = patch.param;

  double worst = 0;
  for (int j = 1; j + 1 < g.ny; ++j) {
    for (int i = 1; i + 1 < g.nx; ++i) {
      const HPoint p(patch.pos(i, j));
      const LiftTangents t = lift_tangents(lift, i, j);
      Mat2 pullback;
      pullback << sasaki_inner(p, t.hor_s, t.vert_s, t.hor_s, t.vert_s),
          sasaki_inner(p, t.hor_s, t.vert_s, t.hor_t, t.vert_t),
          sasaki_inner(p, t.hor_t, t.vert_t, t.hor_s, t.vert_s),
          sasaki_inner(p, t.hor_t, t.vert_t, t.hor_t, t.vert_t);
      const Mat2 diff = pullback - qm.value[qm.idx(i - 1, j - 1)];
      worst = std::max(worst, diff.cwiseAbs().maxCoeff());
    }
  }
  return worst;
}

}  // namespace maq
