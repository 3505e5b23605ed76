#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "maq/surface_patch.hpp"

using namespace maq;

namespace {

const GridSpec kPatch{17, 17, -0.25, -0.25, 1.0 / 32};

GridSpec refine(const GridSpec& g, int f) {
  return {(g.nx - 1) * f + 1, (g.ny - 1) * f + 1, g.x0, g.y0, g.h / f};
}

double max_K_error(const SurfacePatch& patch) {
  const FundamentalForms f = fundamental_forms(patch);
  double err = 0;
  for (int j = 0; j < f.grid.ny; ++j)
    for (int i = 0; i < f.grid.nx; ++i)
      err = std::max(err,
                     std::abs(f.K(i, j) - *patch.expected_extrinsic_curvature));
  return err;
}

}  // namespace

TEST_CASE("horosphere: A = Id and K = 1 at roundoff") {
  const SurfacePatch patch = flat_catalog(FlatKind::Horosphere, 1.0, kPatch);
  const FundamentalForms f = fundamental_forms(patch);
  for (int j = 0; j < f.grid.ny; ++j)
    for (int i = 0; i < f.grid.nx; ++i) {
      CHECK((f.A[f.idx(i, j)] - Mat2::Identity()).cwiseAbs().maxCoeff() <= 1e-12);
      CHECK(f.K(i, j) == doctest::Approx(1.0).epsilon(1e-12));
      CHECK((f.III[f.idx(i, j)] - f.I[f.idx(i, j)]).cwiseAbs().maxCoeff() <= 1e-12);
    }
  // Same flatness for other levels c.
  CHECK(max_K_error(flat_catalog(FlatKind::Horosphere, 0.3, kPatch)) <= 1e-12);
  CHECK(max_K_error(flat_catalog(FlatKind::Horosphere, 2.5, kPatch)) <= 1e-12);
}

TEST_CASE("equidistant tube: shape operator eigenvalues tanh d, coth d") {
  for (double d : {0.3, 0.5, 1.0}) {
    const SurfacePatch patch = flat_catalog(FlatKind::Equidistant, d, refine(kPatch, 4));
    const FundamentalForms f = fundamental_forms(patch);
    double eig_err = 0, k_err = 0;
    for (int j = 0; j < f.grid.ny; ++j)
      for (int i = 0; i < f.grid.nx; ++i) {
        const Eigen::EigenSolver<Mat2> es(f.A[f.idx(i, j)]);
        Vec2 lam = es.eigenvalues().real();
        if (lam(0) > lam(1)) std::swap(lam(0), lam(1));
        eig_err = std::max(eig_err, std::abs(lam(0) - std::tanh(d)));
        eig_err = std::max(eig_err, std::abs(lam(1) - 1.0 / std::tanh(d)));
        k_err = std::max(k_err, std::abs(f.K(i, j) - 1.0));
      }
    CHECK(eig_err <= 5e-3);
    CHECK(k_err <= 1e-3);
  }
  CHECK_THROWS_AS(flat_catalog(FlatKind::Equidistant, -0.5, kPatch), BadParameter);
}

TEST_CASE("geodesic sphere and plane") {
  {
    const GridSpec g{17, 17, 0.6, -0.25, 1.0 / 32};
    const SurfacePatch patch = flat_catalog(FlatKind::GeodesicSphere, 1.0, g);
    const FundamentalForms f = fundamental_forms(patch);
    const double ct = 1.0 / std::tanh(1.0);
    for (int j = 0; j < f.grid.ny; ++j)
      for (int i = 0; i < f.grid.nx; ++i)
        CHECK((f.A[f.idx(i, j)] - ct * Mat2::Identity()).cwiseAbs().maxCoeff() <=
              5e-3);
  }
  {
    const SurfacePatch patch = flat_catalog(FlatKind::GeodesicPlane, 1.0, kPatch);
    const FundamentalForms f = fundamental_forms(patch);
    for (int j = 0; j < f.grid.ny; ++j)
      for (int i = 0; i < f.grid.nx; ++i) {
        CHECK(f.A[f.idx(i, j)].cwiseAbs().maxCoeff() <= 1e-10);
        CHECK(std::abs(f.K(i, j)) <= 1e-10);
        CHECK((f.III[f.idx(i, j)]).cwiseAbs().maxCoeff() <= 1e-10);
      }
  }
  {
    // A hemisphere centered on the boundary plane is totally geodesic too;
    // its trigonometric parametrization carries genuine O(h^2) FD error.
    const GridSpec g{17, 17, 0.5, -0.2, 1.0 / 32};
    const SurfacePatch hemi = SurfacePatch::from_function(g, [](double s, double t) {
      return Vec3(std::sin(s) * std::cos(t), std::sin(s) * std::sin(t),
                  std::cos(s));
    });
    const FundamentalForms f = fundamental_forms(hemi);
    for (int j = 0; j < f.grid.ny; ++j)
      for (int i = 0; i < f.grid.nx; ++i)
        CHECK(f.A[f.idx(i, j)].cwiseAbs().maxCoeff() <= 5 * g.h * g.h);
  }
}

TEST_CASE("catalog curvature converges at second order (or sits at roundoff)") {
  struct Case {
    FlatKind kind;
    double parameter;
    GridSpec base;
  };
  const std::vector<Case> cases = {
      {FlatKind::Equidistant, 0.5, kPatch},
      {FlatKind::GeodesicSphere, 1.0, GridSpec{17, 17, 0.6, -0.25, 1.0 / 32}},
  };
  for (const Case& c : cases) {
    std::vector<double> errs;
    for (int level = 0; level < 3; ++level)
      errs.push_back(max_K_error(flat_catalog(c.kind, c.parameter,
                                              refine(c.base, 1 << level))));
    const double order = std::log2(errs[0] / errs[1]) / 1.0;
    CHECK(order >= 1.8);
    CHECK(std::log2(errs[1] / errs[2]) >= 1.8);
  }
  // Horosphere stencils are exact; the error floor replaces the order test.
  std::vector<double> h_errs;
  for (int level = 0; level < 3; ++level)
    h_errs.push_back(
        max_K_error(flat_catalog(FlatKind::Horosphere, 1.0, refine(kPatch, 1 << level))));
  CHECK(h_errs[2] <= 1e-12);
}

TEST_CASE("immersion and degeneracy guards") {
  CHECK_THROWS_AS(
      SurfacePatch::from_function(GridSpec{3, 3, 0, 0, 0.1},
                                  [](double s, double t) { return Vec3(s, t, 1); }),
      GridTooSmall);
  // Collapsed patch: both tangents parallel.
  const SurfacePatch bad = SurfacePatch::from_function(
      kPatch, [](double s, double t) { return Vec3(s + t, s + t, 1.0); });
  CHECK_THROWS_AS(patch_frames(bad), DegenerateImmersion);
}

TEST_CASE("gauss lift: derivative decomposes as (De, De A)") {
  for (double d : {0.3, 1.0}) {
    const SurfacePatch patch = flat_catalog(FlatKind::Equidistant, d, kPatch);
    CHECK(gauss_lift_decomposition_residual(patch).max_abs() <=
          50 * kPatch.h * kPatch.h);
  }
  const SurfacePatch horo = flat_catalog(FlatKind::Horosphere, 1.0, kPatch);
  CHECK(gauss_lift_decomposition_residual(horo).max_abs() <= 1e-10);

  // Refinement drives the defect down at second order.
  std::vector<double> errs;
  for (int level = 0; level < 3; ++level)
    errs.push_back(gauss_lift_decomposition_residual(
                       flat_catalog(FlatKind::GeodesicSphere, 1.0,
                                    refine(GridSpec{17, 17, 0.6, -0.25, 1.0 / 32},
                                           1 << level)))
                       .max_abs());
  CHECK(std::log2(errs[0] / errs[2]) / 2.0 >= 1.8);
}

TEST_CASE("gauss lift: principal scalings of the equidistant tube") {
  // Vertical parts scale horizontal parts by tanh/coth along the principal
  // directions (s along the axis, theta around it).
  const double d = 0.5;
  const SurfacePatch patch = flat_catalog(FlatKind::Equidistant, d, kPatch);
  const LiftedPatch lift = gauss_lift(patch);
  const int i = kPatch.nx / 2, j = kPatch.ny / 2;
  const HPoint p(patch.pos(i, j));
  const LiftTangents t = lift_tangents(lift, i, j, /*project_vertical=*/false);
  CHECK(hs_norm(p, t.vert_s - std::tanh(d) * t.hor_s) <= 5 * kPatch.h * kPatch.h);
  CHECK(hs_norm(p, t.vert_t - (1.0 / std::tanh(d)) * t.hor_t) <=
        5 * kPatch.h * kPatch.h);
}

TEST_CASE("sasaki structure at a point") {
  std::mt19937_64 rng(23);
  std::normal_distribution<double> n(0, 1);
  for (int k = 0; k < 200; ++k) {
    const HPoint p(n(rng), n(rng), 0.5 + std::abs(n(rng)));
    Vec3 v(n(rng), n(rng), n(rng));
    v /= hs_norm(p, v);
    const UnitTangent xi{p, v};

    const SasakiMAPoint pt = sasaki_ma_structure(xi, 0.7);
    CHECK((pt.J_phi * pt.J_phi + Mat4::Identity()).cwiseAbs().maxCoeff() <= 1e-12);

    // m((nu,mu),(nu,mu)) = 2 <nu, mu>: first basis vector in both slots.
    Vec4 w;
    w << 1, 0, 1, 0;
    CHECK(w.dot(pt.m * w) == doctest::Approx(2.0).epsilon(1e-12));

    // j_xi is a quarter turn of the fiber: j(j(nu)) = -nu for nu
    // orthogonal to xi.
    const Vec3 nu = pt.mu1;
    CHECK((fiber_rotation(xi, fiber_rotation(xi, nu)) + nu).norm() <= 1e-10);

    // Basis is hyperbolic-orthonormal and orthogonal to xi.
    CHECK(hs_norm(p, pt.mu1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(hs_norm(p, pt.mu2) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(hs_inner(p, pt.mu1, pt.mu2)) <= 1e-12);
    CHECK(std::abs(hs_inner(p, pt.mu1, v)) <= 1e-12);
  }
  CHECK_THROWS_AS(
      sasaki_ma_structure(UnitTangent{HPoint(0, 0, 1), Vec3(0, 0, 2)}, 0.0),
      NonUnitVector);
}

TEST_CASE("prescription residual of the gauss lift") {
  {
    // Horosphere with phi = 0: K = 1 = e^0 at roundoff.
    const SurfacePatch patch = flat_catalog(FlatKind::Horosphere, 1.0, kPatch);
    CHECK(jholo_lift_residual(patch, 0.0).curvature_defect.max_abs() <= 1e-12);
    // Mismatched pair: |1 - e^2|.
    CHECK(jholo_lift_residual(patch, 1.0).curvature_defect.max_abs() ==
          doctest::Approx(std::exp(2.0) - 1.0).epsilon(1e-10));
  }
  {
    // Geodesic sphere r = 1 with phi = ln coth 1: K = coth^2.
    const GridSpec g{17, 17, 0.6, -0.25, 1.0 / 32};
    std::vector<double> errs;
    for (int level = 0; level < 3; ++level) {
      const SurfacePatch patch =
          flat_catalog(FlatKind::GeodesicSphere, 1.0, refine(g, 1 << level));
      errs.push_back(jholo_lift_residual(patch, std::log(1.0 / std::tanh(1.0)))
                         .curvature_defect.max_abs());
    }
    CHECK(std::log2(errs[0] / errs[2]) / 2.0 >= 1.8);
  }
  {
    // A position-dependent prescription through the lift point.
    const SurfacePatch patch = flat_catalog(FlatKind::Horosphere, 1.0, kPatch);
    const LiftResidual r = jholo_lift_residual(
        patch, [](const HPoint&, const Vec3&) { return 0.0; });
    CHECK(r.curvature_defect.max_abs() <= 1e-12);
  }
}

TEST_CASE("tube surfaces are curtain surfaces") {
  const GridSpec g{41, 41, -0.02, 0.0, 1e-3};
  const GeodesicH3 vert = GeodesicH3::vertical(0, 0);
  const LiftedPatch tube = tube_surface(vert, g);
  const TubeCheckReport rep = verify_tube(vert, tube, {-0.5, 0.0, 0.7});

  CHECK(rep.max_m_residual <= 1e-8);
  CHECK(rep.max_span_defect <= 1e-8);
  CHECK(rep.max_base_projection_defect <= 1e-10);
  for (const auto& [phi, defect] : rep.jphi_defects) CHECK(defect <= 1e-8);

  // Off-axis circular geodesic: same structure, looser FD tolerance.
  const GeodesicH3 circ =
      GeodesicH3::half_circle(Vec2(0.5, -0.2), 1.5, Vec2(1, 0));
  const LiftedPatch tube2 = tube_surface(circ, g);
  const TubeCheckReport rep2 = verify_tube(circ, tube2, {0.3});
  CHECK(rep2.max_m_residual <= 5e-6);
  CHECK(rep2.max_span_defect <= 5e-6);
  CHECK(rep2.max_base_projection_defect <= 1e-10);
  CHECK(rep2.jphi_defects[0].second <= 5e-6);
}

TEST_CASE("ISC lifts are m-positive, tubes are m-null") {
  // Positivity of the tangent planes of an ISC Gauss lift: m(T,T) =
  // 2 II(xi,xi) > 0.
  const SurfacePatch patch = flat_catalog(FlatKind::Equidistant, 0.5, kPatch);
  const LiftedPatch lift = gauss_lift(patch);
  for (int j = 2; j + 2 < kPatch.ny; j += 3) {
    for (int i = 2; i + 2 < kPatch.nx; i += 3) {
      const HPoint p(patch.pos(i, j));
      const LiftTangents t = lift_tangents(lift, i, j);
      const double m_ss = 2 * hs_inner(p, t.hor_s, t.vert_s);
      const double m_tt = 2 * hs_inner(p, t.hor_t, t.vert_t);
      CHECK(m_ss > 0);
      CHECK(m_tt > 0);
      // Determinant of the restricted m is positive as well.
      const double m_st =
          hs_inner(p, t.hor_s, t.vert_t) + hs_inner(p, t.hor_t, t.vert_s);
      CHECK(m_ss * m_tt - m_st * m_st > 0);
    }
  }
}

TEST_CASE("quasicompleteness metric") {
  {
    const SurfacePatch patch = flat_catalog(FlatKind::Horosphere, 1.0, kPatch);
    const FundamentalForms f = fundamental_forms(patch);
    const MetricField qm = quasicompleteness_metric(patch);
    for (int j = 0; j < qm.grid.ny; ++j)
      for (int i = 0; i < qm.grid.nx; ++i)
        CHECK((qm.value[qm.idx(i, j)] - 2.0 * f.I[f.idx(i, j)])
                  .cwiseAbs()
                  .maxCoeff() <= 1e-12);
    CHECK(quasicompleteness_crosscheck(patch) <= 1e-10);
  }
  {
    const SurfacePatch patch = flat_catalog(FlatKind::GeodesicPlane, 1.0, kPatch);
    const FundamentalForms f = fundamental_forms(patch);
    const MetricField qm = quasicompleteness_metric(patch);
    for (int j = 0; j < qm.grid.ny; ++j)
      for (int i = 0; i < qm.grid.nx; ++i)
        CHECK((qm.value[qm.idx(i, j)] - f.I[f.idx(i, j)]).cwiseAbs().maxCoeff() <=
              1e-10);
  }
  {
    // Equidistant: eigenvalues of I^-1 (I+III) are 1 + tanh^2 and 1 + coth^2.
    const double d = 0.5;
    const SurfacePatch patch = flat_catalog(FlatKind::Equidistant, d, kPatch);
    const FundamentalForms f = fundamental_forms(patch);
    const MetricField qm = quasicompleteness_metric(patch);
    const int i = qm.grid.nx / 2, j = qm.grid.ny / 2;
    const Mat2 rel = f.I[f.idx(i, j)].inverse() * qm.value[qm.idx(i, j)];
    const Eigen::EigenSolver<Mat2> es(rel);
    Vec2 lam = es.eigenvalues().real();
    if (lam(0) > lam(1)) std::swap(lam(0), lam(1));
    const double th = std::tanh(d);
    CHECK(lam(0) == doctest::Approx(1 + th * th).epsilon(1e-3));
    CHECK(lam(1) == doctest::Approx(1 + 1.0 / (th * th)).epsilon(1e-3));
    CHECK(quasicompleteness_crosscheck(patch) <= 50 * kPatch.h * kPatch.h);
  }
}
