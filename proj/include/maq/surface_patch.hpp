#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "maq/field2d.hpp"
#include "maq/halfspace.hpp"

namespace maq {

struct UnitTangent {
  HPoint base;
  Vec3 vector = Vec3::UnitZ();  // hyperbolic-unit at base
};

// Immersed parameter patch in H^3. Positions live on the full (s, t) grid;
// derived quantities are second-order finite differences (one-sided on the
// edge ring, central inside).
struct SurfacePatch {
  GridSpec param;
  std::vector<Vec3> positions;
  int orientation = +1;  // flips the normal

  std::optional<Vec2> expected_shape_eigenvalues;
  std::optional<double> expected_extrinsic_curvature;

  size_t idx(int i, int j) const {
    return static_cast<size_t>(i) + static_cast<size_t>(param.nx) * j;
  }
  const Vec3& pos(int i, int j) const { return positions[idx(i, j)]; }
  Vec3& pos(int i, int j) { return positions[idx(i, j)]; }

  static SurfacePatch from_function(
      const GridSpec& grid, const std::function<Vec3(double, double)>& f,
      int orientation = +1);
};

// Tangents and unit normals on the full parameter grid.
struct PatchFrames {
  GridSpec grid;
  std::vector<Vec3> es, et, normal;
  size_t idx(int i, int j) const {
    return static_cast<size_t>(i) + static_cast<size_t>(grid.nx) * j;
  }
};

PatchFrames patch_frames(const SurfacePatch& patch);  // DegenerateImmersion

struct FundamentalForms {
  GridSpec grid;  // interior parameter grid
  std::vector<Mat2> I, II, III, A;
  ScalarField2D K;
  ScalarField2D ii_asymmetry;  // pre-symmetrization defect of II
  size_t idx(int i, int j) const {
    return static_cast<size_t>(i) + static_cast<size_t>(grid.nx) * j;
  }
};

// Shape operator convention: grad_xi(normal) = De * A * xi (no minus sign);
// catalog normals are chosen so A > 0 there.
FundamentalForms fundamental_forms(const SurfacePatch& patch);

// Frame-invariant norm of the second fundamental form, sqrt(tr(A^2)).
ScalarField2D ii_norm_field(const SurfacePatch& patch);

// A surface in the unit tangent bundle, sampled over a parameter grid.
struct LiftedPatch {
  GridSpec grid;
  std::vector<Vec3> base;
  std::vector<Vec3> vec;
  size_t idx(int i, int j) const {
    return static_cast<size_t>(i) + static_cast<size_t>(grid.nx) * j;
  }
  UnitTangent at(int i, int j) const {
    return {HPoint(base[idx(i, j)]), vec[idx(i, j)]};
  }
};

// Gauss lift e-hat = nu_e over the full parameter grid.
LiftedPatch gauss_lift(const SurfacePatch& patch);

// Horizontal/vertical split of the lift derivative at an interior node. The
// vertical part is a first-order Schild-ladder covariant difference; when
// `project_vertical` is set, its spurious radial component (along xi) is
// removed, since vertical vectors of SX live in <xi>^perp.
struct LiftTangents {
  Vec3 hor_s, vert_s, hor_t, vert_t;
};
LiftTangents lift_tangents(const LiftedPatch& lift, int i, int j,
                           bool project_vertical = true);

// max over directions of | grad(nu) - De A | at interior nodes; O(h^2) for a
// genuine Gauss lift.
ScalarField2D gauss_lift_decomposition_residual(const SurfacePatch& patch);

struct SasakiMAPoint {
  UnitTangent xi;
  Vec3 mu1, mu2;  // orthonormal basis of <xi>^perp
  Mat4 J_phi;     // on the basis (mu1,0),(mu2,0),(0,mu1),(0,mu2)
  Mat4 m;
  double log_curv = 0;
};

// j_xi(nu) = xi ^ nu, the fiber rotation of SX.
Vec3 fiber_rotation(const UnitTangent& xi, const Vec3& nu);

SasakiMAPoint sasaki_ma_structure(const UnitTangent& xi, double phi);  // NonUnitVector

using LogCurvature = std::function<double(const HPoint&, const Vec3&)>;

struct LiftResidual {
  ScalarField2D curvature_defect;  // |K - e^{2 phi}| at the lift
  ScalarField2D ii_asymmetry;
};

// Scalar J_phi-holomorphicity defect of the Gauss lift.
LiftResidual jholo_lift_residual(const SurfacePatch& patch, const LogCurvature& phi);
LiftResidual jholo_lift_residual(const SurfacePatch& patch, double phi);

// Unit normal bundle of a complete geodesic, parametrized by arclength s
// (grid x) and fiber angle theta (grid y).
LiftedPatch tube_surface(const GeodesicH3& geodesic, const GridSpec& grid);

struct TubeCheckReport {
  double max_m_residual = 0;
  double max_span_defect = 0;             // vs the analytic tangent plane
  double max_base_projection_defect = 0;  // base distance to the geodesic
  std::vector<std::pair<double, double>> jphi_defects;  // (phi, max defect)
};

TubeCheckReport verify_tube(const GeodesicH3& geodesic, const LiftedPatch& tube,
                            const std::vector<double>& phis);

enum class FlatKind { Horosphere, Equidistant, GeodesicSphere, GeodesicPlane };

// Closed-form flat (K = 1) and geodesic catalog patches with analytic
// expected shape operators.
SurfacePatch flat_catalog(FlatKind kind, double parameter, const GridSpec& grid);

struct MetricField {
  GridSpec grid;
  std::vector<Mat2> value;
  size_t idx(int i, int j) const {
    return static_cast<size_t>(i) + static_cast<size_t>(grid.nx) * j;
  }
};

// I + III; equals the Gauss-lift pullback of the Sasaki metric.
MetricField quasicompleteness_metric(const SurfacePatch& patch);
// max entry difference between I + III and the lift pullback, O(h^2).
double quasicompleteness_crosscheck(const SurfacePatch& patch);

}  // namespace maq
