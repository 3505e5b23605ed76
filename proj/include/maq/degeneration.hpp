#pragma once

#include <random>
#include <vector>

#include "maq/surface_patch.hpp"

namespace maq {

// Finite metric space with an upper-semicontinuous stand-in f >= 1.
class DiscreteMetricSpace {
 public:
  DiscreteMetricSpace(Eigen::MatrixXd dist, Eigen::VectorXd f);

  int size() const { return static_cast<int>(f_.size()); }
  double dist(int a, int b) const { return dist_(a, b); }
  double f(int a) const { return f_(a); }

  // Triangle inequality on random triples; throws on violation.
  void spot_check_triangle(std::mt19937_64& rng, int trials = 1000) const;

 private:
  Eigen::MatrixXd dist_;
  Eigen::VectorXd f_;
};

// Returns y with f(y) >= f(start) and f <= 2 f(y) on the ball of radius
// 1/sqrt(f(y)) about y. Deterministic: jumps to the first violator in input
// order; terminates on finite spaces since f doubles along jumps.
int quasi_maximum(const DiscreteMetricSpace& space, int start);

struct BlowupResult {
  double B = 1;
  GridSpec grid;  // interior parameter grid
  ScalarField2D ii_norm;
  ScalarField2D ii_norm_rescaled;
  // B * normal coordinates about the marked node: euclidean blow-up data.
  std::vector<Vec3> rescaled_positions;
  double scaling_law_residual = 0;
};

// Patch geometry in the metric B^2 g near the marked node. The law
// ||II'|| = ||II|| / B is recomputed from the scaled forms and verified
// node-wise to 1e-10.
BlowupResult blowup_rescale(const SurfacePatch& patch, double B, int marked_i,
                            int marked_j);

struct ParamWindow {
  double smin = 0, smax = 0, tmin = 0, tmax = 0;
};

struct GraphDistanceOptions {
  double injectivity_margin = 1.0;  // reject projections farther than this
  int max_iterations = 60;
};

struct GraphDistanceResult {
  double c0 = 0;  // sup of the normal-graph section norm
  double c1 = 0;  // sup of its finite-difference derivative
};

// Represents `other` as a normal graph over `reference` inside the window:
// per reference node, nearest-point projection onto `other` in the (first
// order) Sasaki metric via damped Gauss-Newton over the other patch's
// parameters. Throws NotAGraph when the projection leaves the sampled patch
// or exceeds the injectivity margin.
GraphDistanceResult graph_distance(const LiftedPatch& reference,
                                   const LiftedPatch& other,
                                   const ParamWindow& window,
                                   const GraphDistanceOptions& opts = {});

enum class FamilyKind { Equidistant, TranslatedHorospheres };
enum class Verdict { TubeLike, SurfaceLike, Diverged };

struct FamilySpec {
  FamilyKind kind = FamilyKind::Equidistant;
  std::vector<double> parameters;
};

struct DegenerationThresholds {
  double converged_c0 = 0.05;
  double diverged_c0 = 10.0;
};

struct ExperimentResolution {
  double ref_spacing = 0.05;
  double other_spacing = 0.01;
  double pad = 0.3;
};

struct ConvergenceStep {
  int index = 0;
  double parameter = 0;
  double c0 = 0, c1 = 0, max_ii = 0;
  Verdict verdict = Verdict::SurfaceLike;
};

struct ConvergenceReport {
  FamilyKind kind = FamilyKind::Equidistant;
  std::vector<ConvergenceStep> steps;
};

// Per family parameter: catalog surface, Gauss lift, graph distance to the
// candidate limit (the tube of the vertical axis for Equidistant; the lift at
// the final parameter for TranslatedHorospheres), verdict per thresholds.
ConvergenceReport degeneration_experiment(const FamilySpec& family,
                                          const ParamWindow& window,
                                          const DegenerationThresholds& thr = {},
                                          const ExperimentResolution& res = {});

}  // namespace maq
