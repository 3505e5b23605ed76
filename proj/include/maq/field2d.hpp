#pragma once

#include <functional>
#include <optional>

#include "maq/common.hpp"

namespace maq {

struct GridSpec {
  int nx = 0, ny = 0;
  double x0 = 0, y0 = 0;
  double h = 0;

  double x(int i) const { return x0 + i * h; }
  double y(int j) const { return y0 + j * h; }
  GridSpec interior() const { return {nx - 2, ny - 2, x0 + h, y0 + h, h}; }
  bool valid() const { return nx >= 1 && ny >= 1 && h > 0; }
  bool operator==(const GridSpec&) const = default;
};

// Uniform grid of reals; node (i, j) sits at (x0 + i h, y0 + j h).
class ScalarField2D {
 public:
  ScalarField2D() = default;
  explicit ScalarField2D(const GridSpec& g)
      : grid_(g), values_(Eigen::MatrixXd::Zero(g.nx, g.ny)) {
    if (!g.valid()) throw BadParameter("invalid grid spec");
  }

  static ScalarField2D sample(const GridSpec& g,
                              const std::function<double(double, double)>& f) {
    ScalarField2D out(g);
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) out(i, j) = f(g.x(i), g.y(j));
    return out;
  }

  const GridSpec& grid() const { return grid_; }
  double& operator()(int i, int j) { return values_(i, j); }
  double operator()(int i, int j) const { return values_(i, j); }
  const Eigen::MatrixXd& values() const { return values_; }
  Eigen::MatrixXd& values() { return values_; }

  void set_mask(const Eigen::Matrix<uint8_t, Eigen::Dynamic, Eigen::Dynamic>& m) {
    if (m.rows() != grid_.nx || m.cols() != grid_.ny)
      throw BadParameter("mask shape mismatch");
    mask_ = m;
  }
  bool has_mask() const { return mask_.has_value(); }
  bool valid_at(int i, int j) const { return !mask_ || (*mask_)(i, j) != 0; }

  int count_valid() const {
    if (!mask_) return grid_.nx * grid_.ny;
    int n = 0;
    for (int j = 0; j < grid_.ny; ++j)
      for (int i = 0; i < grid_.nx; ++i)
        if ((*mask_)(i, j)) ++n;
    return n;
  }

  double max_abs() const {
    double m = 0;
    for (int j = 0; j < grid_.ny; ++j)
      for (int i = 0; i < grid_.nx; ++i)
        if (valid_at(i, j)) m = std::max(m, std::abs(values_(i, j)));
    return m;
  }

 private:
  GridSpec grid_;
  Eigen::MatrixXd values_;
  std::optional<Eigen::Matrix<uint8_t, Eigen::Dynamic, Eigen::Dynamic>> mask_;
};

struct GradientField2D {
  ScalarField2D c1, c2;

  GradientField2D() = default;
  GradientField2D(ScalarField2D a, ScalarField2D b)
      : c1(std::move(a)), c2(std::move(b)) {
    if (!(c1.grid() == c2.grid()))
      throw BadParameter("gradient components on different grids");
  }
  const GridSpec& grid() const { return c1.grid(); }
};

// Symmetric by construction: a single cross component.
struct HessianField2D {
  ScalarField2D uxx, uxy, uyy;
  const GridSpec& grid() const { return uxx.grid(); }
};

enum class NodeSign { Positive, Null, Negative, Indefinite };

struct SignField2D {
  GridSpec grid;
  Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic> tags;
  NodeSign at(int i, int j) const { return static_cast<NodeSign>(tags(i, j)); }
};

}  // namespace maq
