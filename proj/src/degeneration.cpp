#include "maq/degeneration.hpp"

#include <algorithm>
#include <cmath>

namespace maq {

DiscreteMetricSpace::DiscreteMetricSpace(Eigen::MatrixXd dist, Eigen::VectorXd f)
    : dist_(std::move(dist)), f_(std::move(f)) {
  const int n = static_cast<int>(f_.size());
  if (dist_.rows() != n || dist_.cols() != n)
    throw BadParameter("distance matrix shape mismatch");
  for (int a = 0; a < n; ++a) {
    if (std::abs(dist_(a, a)) > tol::kStructure)
      throw BadParameter("nonzero diagonal distance");
    if (f_(a) < 1.0) throw BadParameter("f must be >= 1");
    for (int b = 0; b < n; ++b) {
      if (dist_(a, b) < 0) throw BadParameter("negative distance");
      if (std::abs(dist_(a, b) - dist_(b, a)) > tol::kStructure)
        throw BadParameter("asymmetric distance");
    }
  }
}

void DiscreteMetricSpace::spot_check_triangle(std::mt19937_64& rng,
                                              int trials) const {
  const int n = size();
  if (n < 3) return;
  std::uniform_int_distribution<int> pick(0, n - 1);
  for (int t = 0; t < trials; ++t) {
    const int a = pick(rng), b = pick(rng), c = pick(rng);
    if (dist_(a, c) > dist_(a, b) + dist_(b, c) + tol::kStructure)
      throw BadParameter("triangle inequality violated");
  }
}

int quasi_maximum(const DiscreteMetricSpace& space, int start) {
  if (start < 0 || start >= space.size()) throw BadParameter("start out of range");
  int y = start;
  while (true) {
    const double radius = 1.0 / std::sqrt(space.f(y));
    int next = -1;
    for (int z = 0; z < space.size(); ++z) {
      if (space.dist(z, y) <= radius && space.f(z) > 2.0 * space.f(y)) {
        next = z;
        break;
      }
    }
    if (next < 0) return y;
    y = next;
  }
}

BlowupResult blowup_rescale(const SurfacePatch& patch, double B, int marked_i,
                            int marked_j) {
  if (B <= 0) throw BadParameter("blow-up factor must be positive");
  const FundamentalForms forms = fundamental_forms(patch);

  BlowupResult out;
  out.B = B;
  out.grid = forms.grid;
  out.ii_norm = ScalarField2D(forms.grid);
  out.ii_norm_rescaled = ScalarField2D(forms.grid);

  double worst = 0;
  for (int j = 0; j < forms.grid.ny; ++j) {
    for (int i = 0; i < forms.grid.nx; ++i) {
      const size_t k = forms.idx(i, j);
      const Mat2& A = forms.A[k];
      const double n = std::sqrt(std::max(0.0, (A * A).trace()));
      out.ii_norm(i, j) = n;
      out.ii_norm_rescaled(i, j) = n / B;

      // Independent route through the scaled forms: I' = B^2 I, II' = B II.
      const Mat2 Ascaled = (B * B * forms.I[k]).inverse() * (B * forms.II[k]);
      const double n2 = std::sqrt(std::max(0.0, (Ascaled * Ascaled).trace()));
      worst = std::max(worst, std::abs(n2 * B - n));
    }
  }
  out.scaling_law_residual = worst;
  if (worst > 1e-10) throw InternalInconsistency("blow-up scaling law violated");

  // Euclidean blow-up coordinates about the marked node.
  const GridSpec& g = patch.param;
  if (marked_i < 0 || marked_i >= g.nx || marked_j < 0 || marked_j >= g.ny)
    throw BadParameter("marked node out of range");
  const HPoint pm(patch.pos(marked_i, marked_j));
  const Vec4 Pm = to_hyperboloid(pm);
  out.rescaled_positions.resize(patch.positions.size());
  for (size_t k = 0; k < patch.positions.size(); ++k) {
    const Vec4 L = hyp_log(Pm, to_hyperboloid(HPoint(patch.positions[k])));
    out.rescaled_positions[k] = B * pull_tangent(pm, L) / pm.z;
  }
  return out;
}

namespace {

// Bilinear evaluation of a lifted patch at fractional parameters; the vector
// part is renormalized to hyperbolic unit length at the interpolated base.
struct LiftInterp {
  const LiftedPatch& P;

  bool in_range(double s, double t, double margin_cells) const {
    const GridSpec& g = P.grid;
    const double fi = (s - g.x0) / g.h;
    const double fj = (t - g.y0) / g.h;
    return fi >= margin_cells && fj >= margin_cells &&
           fi <= g.nx - 1 - margin_cells && fj <= g.ny - 1 - margin_cells;
  }

  void eval(double s, double t, Vec3* base, Vec3* vec) const {
    const GridSpec& g = P.grid;
    double fi = (s - g.x0) / g.h;
    double fj = (t - g.y0) / g.h;
    fi = std::clamp(fi, 0.0, static_cast<double>(g.nx - 1));
    fj = std::clamp(fj, 0.0, static_cast<double>(g.ny - 1));
    const int i0 = std::min(static_cast<int>(fi), g.nx - 2);
    const int j0 = std::min(static_cast<int>(fj), g.ny - 2);
    const double a = fi - i0, b = fj - j0;

    const auto blend = [&](const std::vector<Vec3>& field) {
      return (1 - a) * (1 - b) * field[P.idx(i0, j0)] +
             a * (1 - b) * field[P.idx(i0 + 1, j0)] +
             (1 - a) * b * field[P.idx(i0, j0 + 1)] +
             a * b * field[P.idx(i0 + 1, j0 + 1)];
    };
    *base = blend(P.base);
    Vec3 v = blend(P.vec);
    const HPoint q(*base);
    *vec = v / hs_norm(q, v);
  }
};

double sasaki_dist2(const HPoint& p, const Vec3& v, const HPoint& q,
                    const Vec3& w) {
  const Vec4 P = to_hyperboloid(p);
  const Vec4 Q = to_hyperboloid(q);
  const double dbase = std::acosh(std::max(1.0, -minkowski(P, Q)));
  const Vec4 V = push_tangent(p, v);
  const Vec4 W = hyp_transport(Q, P, push_tangent(q, w));
  const double nv = std::sqrt(std::max(1e-300, minkowski(V, V)));
  const double nw = std::sqrt(std::max(1e-300, minkowski(W, W)));
  const double cosang = std::clamp(minkowski(V, W) / (nv * nw), -1.0, 1.0);
  const double ang = std::acos(cosang);
  return dbase * dbase + ang * ang;
}

struct ProjectionResult {
  double dist = 0;
  Vec2 params = Vec2::Zero();
  Eigen::Matrix<double, 6, 1> section = Eigen::Matrix<double, 6, 1>::Zero();
};

// Damped Newton on the squared Sasaki distance over the other patch's
// parameters; derivatives by central differences.
ProjectionResult project_node(const LiftInterp& other, const HPoint& p,
                              const Vec3& v, const Vec2& init,
                              const GraphDistanceOptions& opts) {
  const auto D = [&](double s, double t) {
    Vec3 base, vec;
    other.eval(s, t, &base, &vec);
    return sasaki_dist2(p, v, HPoint(base), vec);
  };

  Vec2 x = init;
  double fx = D(x(0), x(1));
  const double h = other.P.grid.h;
  const double fd = std::max(1e-7, h * 1e-2);
  double damping = 1e-8;

  for (int it = 0; it < opts.max_iterations && fx > 1e-28; ++it) {
    const double fpx = D(x(0) + fd, x(1)), fmx = D(x(0) - fd, x(1));
    const double fpy = D(x(0), x(1) + fd), fmy = D(x(0), x(1) - fd);
    const double fpp = D(x(0) + fd, x(1) + fd), fmm = D(x(0) - fd, x(1) - fd);
    const double fpm = D(x(0) + fd, x(1) - fd), fmp = D(x(0) - fd, x(1) + fd);

    Vec2 grad((fpx - fmx) / (2 * fd), (fpy - fmy) / (2 * fd));
    Mat2 H;
    H(0, 0) = (fpx - 2 * fx + fmx) / (fd * fd);
    H(1, 1) = (fpy - 2 * fx + fmy) / (fd * fd);
    H(0, 1) = H(1, 0) = (fpp - fpm - fmp + fmm) / (4 * fd * fd);

    if (grad.norm() < 1e-14) break;

    bool stepped = false;
    for (int tries = 0; tries < 12; ++tries) {
      const Mat2 Hd = H + damping * Mat2::Identity();
      const Vec2 step = Hd.ldlt().solve(-grad);
      const Vec2 xn = x + step;
      const double fn = D(xn(0), xn(1));
      if (std::isfinite(fn) && fn < fx) {
        x = xn;
        fx = fn;
        damping = std::max(1e-12, damping * 0.3);
        stepped = true;
        if (step.norm() < 1e-12) it = opts.max_iterations;
        break;
      }
      damping *= 10.0;
    }
    if (!stepped) break;
  }

  if (!other.in_range(x(0), x(1), 1.0)) {
    throw NotAGraph("projection leaves the sampled patch");
  }

  ProjectionResult res;
  res.params = x;
  // acosh/acos amplify coincident-point roundoff to ~5e-8; squared distances
  // below 1e-14 are exact zeros of the section.
  if (fx <= 1e-14) {
    res.dist = 0.0;
    return res;
  }
  res.dist = std::sqrt(fx);
  if (res.dist > opts.injectivity_margin) {
    throw NotAGraph("projection beyond the injectivity margin");
  }

  // Section components in the z-scaled coordinate frame at p: horizontal
  // part log_p(q), vertical part (transported w) - v.
  Vec3 qb, qv;
  other.eval(x(0), x(1), &qb, &qv);
  const HPoint q(qb);
  const Vec4 P = to_hyperboloid(p), Q = to_hyperboloid(q);
  const Vec3 hor = pull_tangent(p, hyp_log(P, Q)) / p.z;
  const Vec4 Wt = hyp_transport(Q, P, push_tangent(q, qv));
  const Vec3 ver = (pull_tangent(p, Wt) - v) / p.z;
  res.section << hor(0), hor(1), hor(2), ver(0), ver(1), ver(2);
  return res;
}

}  // namespace

GraphDistanceResult graph_distance(const LiftedPatch& reference,
                                   const LiftedPatch& other,
                                   const ParamWindow& window,
                                   const GraphDistanceOptions& opts) {
  const GridSpec& g = reference.grid;
  const LiftInterp interp{other};

  int i_lo = static_cast<int>(std::ceil((window.smin - g.x0) / g.h - 1e-9));
  int i_hi = static_cast<int>(std::floor((window.smax - g.x0) / g.h + 1e-9));
  int j_lo = static_cast<int>(std::ceil((window.tmin - g.y0) / g.h - 1e-9));
  int j_hi = static_cast<int>(std::floor((window.tmax - g.y0) / g.h + 1e-9));
  i_lo = std::max(i_lo, 0);
  j_lo = std::max(j_lo, 0);
  i_hi = std::min(i_hi, g.nx - 1);
  j_hi = std::min(j_hi, g.ny - 1);
  if (i_lo > i_hi || j_lo > j_hi) throw BadParameter("empty window");

  const int wx = i_hi - i_lo + 1, wy = j_hi - j_lo + 1;
  std::vector<Eigen::Matrix<double, 6, 1>> sections(
      static_cast<size_t>(wx) * wy);
  double c0 = 0;

  for (int j = j_lo; j <= j_hi; ++j) {
    for (int i = i_lo; i <= i_hi; ++i) {
      const HPoint p(reference.base[reference.idx(i, j)]);
      const Vec3 v = reference.vec[reference.idx(i, j)];
      const Vec2 init(g.x(i), g.y(j));
      const ProjectionResult pr = project_node(interp, p, v, init, opts);
      c0 = std::max(c0, pr.dist);
      sections[(i - i_lo) + static_cast<size_t>(wx) * (j - j_lo)] = pr.section;
    }
  }

  double c1 = 0;
  const auto sec = [&](int a, int b) -> const Eigen::Matrix<double, 6, 1>& {
    return sections[a + static_cast<size_t>(wx) * b];
  };
  for (int b = 0; b < wy; ++b) {
    for (int a = 0; a < wx; ++a) {
      if (a + 1 < wx)
        c1 = std::max(c1, (sec(a + 1, b) - sec(a, b)).cwiseAbs().maxCoeff() / g.h);
      if (b + 1 < wy)
        c1 = std::max(c1, (sec(a, b + 1) - sec(a, b)).cwiseAbs().maxCoeff() / g.h);
    }
  }
  return {c0, c1};
}

namespace {

GridSpec padded_grid(const ParamWindow& w, double pad, double spacing) {
  const double smin = w.smin - pad, smax = w.smax + pad;
  const double tmin = w.tmin - pad, tmax = w.tmax + pad;
  const int nx = std::max(5, static_cast<int>(std::ceil((smax - smin) / spacing)) + 1);
  const int ny = std::max(5, static_cast<int>(std::ceil((tmax - tmin) / spacing)) + 1);
  return {nx, ny, smin, tmin, spacing};
}

}  // namespace

ConvergenceReport degeneration_experiment(const FamilySpec& family,
                                          const ParamWindow& window,
                                          const DegenerationThresholds& thr,
                                          const ExperimentResolution& res) {
  if (family.parameters.empty()) throw BadParameter("empty parameter sequence");
  bool incr = true, decr = true;
  for (size_t k = 0; k + 1 < family.parameters.size(); ++k) {
    incr = incr && family.parameters[k] <= family.parameters[k + 1];
    decr = decr && family.parameters[k] >= family.parameters[k + 1];
  }
  if (!incr && !decr) throw BadParameter("parameter sequence not monotone");
  for (double p : family.parameters)
    if (p <= 0) throw BadParameter("parameters must be positive");

  const bool tube_limit = family.kind == FamilyKind::Equidistant;

  // Reference: candidate limit, padded by two nodes around the window.
  const ParamWindow ref_w{window.smin - 2 * res.ref_spacing,
                          window.smax + 2 * res.ref_spacing,
                          window.tmin - 2 * res.ref_spacing,
                          window.tmax + 2 * res.ref_spacing};
  const GridSpec ref_grid = padded_grid(ref_w, 0.0, res.ref_spacing);

  LiftedPatch reference;
  if (tube_limit) {
    reference = tube_surface(GeodesicH3::vertical(0, 0), ref_grid);
  } else {
    reference = gauss_lift(
        flat_catalog(FlatKind::Horosphere, family.parameters.back(), ref_grid));
  }

  ConvergenceReport report;
  report.kind = family.kind;

  const GridSpec member_grid = padded_grid(window, res.pad, res.other_spacing);
  for (size_t k = 0; k < family.parameters.size(); ++k) {
    const double param = family.parameters[k];
    const SurfacePatch patch =
        tube_limit ? flat_catalog(FlatKind::Equidistant, param, member_grid)
                   : flat_catalog(FlatKind::Horosphere, param, member_grid);
    const LiftedPatch lift = gauss_lift(patch);

    ConvergenceStep step;
    step.index = static_cast<int>(k);
    step.parameter = param;
    step.max_ii = ii_norm_field(patch).max_abs();
    try {
      const GraphDistanceResult gd = graph_distance(reference, lift, window);
      step.c0 = gd.c0;
      step.c1 = gd.c1;
      if (step.c0 >= thr.diverged_c0) {
        step.verdict = Verdict::Diverged;
      } else if (step.c0 <= thr.converged_c0) {
        step.verdict = tube_limit ? Verdict::TubeLike : Verdict::SurfaceLike;
      } else {
        step.verdict = Verdict::SurfaceLike;
      }
    } catch (const NotAGraph&) {
      step.c0 = std::numeric_limits<double>::infinity();
      step.c1 = std::numeric_limits<double>::infinity();
      step.verdict = Verdict::Diverged;
    }
    report.steps.push_back(step);
  }
  return report;
}

}  // namespace maq
