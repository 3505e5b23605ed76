#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/SVD>

#include "maq/ma_linear.hpp"
#include "maq/random.hpp"

using namespace maq;

namespace {

Mat2 rot2(double th) {
  Mat2 R;
  R << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
  return R;
}

Mat4 block_diag(const Mat2& A, const Mat2& B) {
  Mat4 M = Mat4::Zero();
  M.block<2, 2>(0, 0) = A;
  M.block<2, 2>(2, 2) = B;
  return M;
}

bool preserves_structure(const Mat4& M) {
  const StructurePack& s = model();
  const auto keeps = [&](const Mat4& X) {
    return (M.transpose() * X * M - X).cwiseAbs().maxCoeff() <= 1e-12;
  };
  return keeps(s.I) && keeps(s.J) && keeps(s.K) && keeps(s.m);
}

}  // namespace

TEST_CASE("model matrices: block forms and quaternionic relations") {
  const StructurePack& s = model();

  Mat4 K_expected;
  K_expected << 0, 0, -1, 0, 0, 0, 0, -1, 1, 0, 0, 0, 0, 1, 0, 0;
  CHECK((s.K - K_expected).cwiseAbs().maxCoeff() == 0);

  CHECK((s.I * s.I + Mat4::Identity()).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK((s.J * s.J + Mat4::Identity()).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK((s.K * s.K + Mat4::Identity()).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK((s.I * s.J - s.K).cwiseAbs().maxCoeff() <= 1e-15);

  for (const Mat4* X : {&s.I, &s.J, &s.K}) {
    CHECK(((*X) * s.J0hat - s.J0hat * (*X)).cwiseAbs().maxCoeff() <= 1e-15);
  }

  // m((z1,w1),(z2,w2)) with z1 = (1,0), w2 = (1,0), others zero, gives 1.
  Vec4 u, v;
  u << 1, 0, 0, 0;
  v << 0, 0, 1, 0;
  CHECK(u.dot(s.m * v) == doctest::Approx(1));

  CHECK((s.V.transpose() * s.m * s.V).cwiseAbs().maxCoeff() == 0);
  CHECK((s.m + s.I.transpose() * s.m * s.I).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK((s.m - s.J.transpose() * s.m * s.J).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK((s.m + s.K.transpose() * s.m * s.K).cwiseAbs().maxCoeff() <= 1e-15);

  Rng rng(3);
  for (int k = 0; k < 100; ++k) {
    const Vec4 a = random_vec4(rng), b = random_vec4(rng);
    CHECK(a.dot(s.omega_i * b) == doctest::Approx(a.dot(s.I * b)));
    CHECK(a.dot(s.omega_j * b) == doctest::Approx(a.dot(s.J * b)));
    CHECK(a.dot(s.omega_k * b) == doctest::Approx(a.dot(s.K * b)));
  }
}

TEST_CASE("two-dimensional matrix identities on 1e4 random matrices") {
  Rng rng(5);
  const StructurePack& s = model();
  double worst = 0;
  for (int k = 0; k < 10000; ++k) {
    const Mat2 A = random_mat2(rng);
    const Mat2 lhs1 = A.transpose() * s.J0 * A * s.J0;
    worst = std::max(
        worst, (lhs1 + A.determinant() * Mat2::Identity()).cwiseAbs().maxCoeff());
    const Mat2 lhs2 = A - A.transpose();
    const Mat2 rhs2 = -(A * s.J0).trace() * s.J0;
    worst = std::max(worst, (lhs2 - rhs2).cwiseAbs().maxCoeff());
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("plane representations: graph and basis agree") {
  Rng rng(9);
  for (int k = 0; k < 1000; ++k) {
    const Mat2 A = random_mat2(rng, 2.0);
    const Plane4 P = Plane4::graph_of(A);
    CHECK((P.basis().transpose() * P.basis() - Mat2::Identity())
              .cwiseAbs()
              .maxCoeff() <= 1e-12);
    Vec4 u, v;
    u << 1, 0, A(0, 0), A(1, 0);
    v << 0, 1, A(0, 1), A(1, 1);
    const Mat4 Pi = P.projector();
    CHECK((Pi * u - u).norm() <= 1e-10 * u.norm());
    CHECK((Pi * v - v).norm() <= 1e-10 * v.norm());
  }
}

TEST_CASE("lagrangian flags: examples") {
  {
    const LagrangianFlags f = classify_graph_plane(Mat2::Identity());
    CHECK(f.omega_i);
    CHECK(!f.omega_j);
    CHECK(f.omega_k);
  }
  {
    const LagrangianFlags f = classify_graph_plane(model().J0);
    CHECK(f.omega_i);
    CHECK(f.omega_j);
    CHECK(!f.omega_k);
  }
  {
    Mat2 A = Mat2::Zero();
    A(0, 0) = 2.0;
    A(1, 1) = 0.5;
    const LagrangianFlags f = classify_graph_plane(A);
    CHECK(f.omega_i);
    CHECK(!f.omega_j);
    CHECK(f.omega_k);
  }
}

TEST_CASE("lagrangian flags: both routes agree on 1e4 random matrices") {
  Rng rng(15);
  for (int k = 0; k < 10000; ++k) {
    CHECK_NOTHROW(classify_graph_plane(random_mat2(rng)));
  }
  // Inputs sitting exactly on the predicates.
  for (int k = 0; k < 200; ++k) {
    CHECK_NOTHROW(classify_graph_plane(random_sym_det1(rng)));
    Mat2 T = random_mat2(rng);
    T(1, 1) = -T(0, 0);
    CHECK_NOTHROW(classify_graph_plane(T));
  }
}

TEST_CASE("calibration identity") {
  const Plane4 first_factor =
      Plane4::from_span(Vec4(1, 0, 0, 0), Vec4(0, 1, 0, 0));
  CHECK(calibration_residual(first_factor, Quat::i(), Quat::j(), Quat::k()) <=
        1e-15);

  Rng rng(21);
  double worst = 0;
  for (int k = 0; k < 1000; ++k) {
    const Plane4 P = random_plane(rng);
    worst = std::max(worst,
                     calibration_residual(P, Quat::i(), Quat::j(), Quat::k()));
  }
  for (int k = 0; k < 100; ++k) {
    const Plane4 P = random_plane(rng);
    const auto [x, y, z] = random_imaginary_triple(rng);
    worst = std::max(worst, calibration_residual(P, x, y, z));
  }
  CHECK(worst <= 1e-12);

  CHECK_THROWS_AS(
      calibration_residual(first_factor, Quat::i(), Quat::i(), Quat::j()),
      BadTriple);
  CHECK_THROWS_AS(calibration_residual(first_factor, Quat(1, 0, 0, 0),
                                       Quat::j(), Quat::k()),
                  BadTriple);
}

TEST_CASE("complex lines: examples") {
  const Plane4 first_factor =
      Plane4::from_span(Vec4(1, 0, 0, 0), Vec4(0, 1, 0, 0));
  CHECK(is_complex_line(first_factor, Quat::i()));

  const Plane4 mixed = Plane4::from_span(Vec4(1, 0, 0, 0), Vec4(0, 0, 1, 0));
  CHECK(!is_complex_line(mixed, Quat::i()));

  CHECK(is_complex_line(Plane4::graph_of(Mat2::Identity()), model().J));

  CHECK_THROWS_AS(is_complex_line(first_factor, Quat(1, 0, 0, 0)), NonUnitInput);
}

TEST_CASE("complex lines: invariance matches the lagrangian criterion") {
  Rng rng(25);
  for (int k = 0; k < 2000; ++k) {
    const Plane4 P = random_plane(rng);
    const Quat x = random_unit_imaginary(rng);
    CHECK_NOTHROW(is_complex_line(P, x));  // InternalInconsistency otherwise
  }
  // J_x-complex planes: span{v, J_x v}.
  for (int k = 0; k < 500; ++k) {
    const Quat x = random_unit_imaginary(rng);
    const Vec4 v = random_vec4(rng);
    if (v.norm() < 1e-3) continue;
    const Plane4 P = Plane4::from_span(v, left_mult_matrix(x) * v);
    CHECK(is_complex_line(P, x));
  }
}

TEST_CASE("line sign classification") {
  CHECK(classify_line(Plane4::graph_of(Mat2::Identity())) == LineSign::Positive);
  CHECK(classify_line(Plane4::graph_of(-Mat2::Identity())) == LineSign::Negative);

  // L = span{(0,w), (J0 w, 0)} meets V and is null.
  const Plane4 null_line = Plane4::from_span(Vec4(0, 0, 1, 0), Vec4(0, 1, 0, 0));
  CHECK(classify_line(null_line) == LineSign::Null);

  CHECK_THROWS_AS(
      classify_line(Plane4::from_span(Vec4(1, 0, 0, 0), Vec4(0, 0, 1, 0))),
      NotComplexLine);

  Rng rng(33);
  for (int k = 0; k < 1000; ++k) {
    const int sign = (k % 2 == 0) ? +1 : -1;
    const Mat2 A = random_sym_det1(rng, sign);
    CHECK(classify_line(Plane4::graph_of(A)) ==
          (sign > 0 ? LineSign::Positive : LineSign::Negative));
  }
  std::uniform_real_distribution<double> ang(0, 6.283185307179586);
  for (int k = 0; k < 1000; ++k) {
    const double th = ang(rng);
    const Vec4 a(0, 0, std::cos(th), std::sin(th));
    const Vec4 b(-std::sin(th), std::cos(th), 0, 0);  // (J0 w, 0)
    const Plane4 L = Plane4::from_span(a, b);
    CHECK(classify_line(L) == LineSign::Null);
    CHECK(tau_invariant(L).abs() == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("tau invariant") {
  {
    const TauValue tau = tau_invariant(Plane4::graph_of(Mat2::Identity()));
    CHECK(!tau.at_infinity);
    CHECK(std::abs(tau.value) <= 1e-12);
  }
  {
    const Plane4 null_line =
        Plane4::from_span(Vec4(0, 0, 1, 0), Vec4(0, 1, 0, 0));
    const TauValue tau = tau_invariant(null_line);
    CHECK(tau.abs() == doctest::Approx(1).epsilon(1e-10));
  }
  // Phi(V) = {(z, conj z)}: psi = conj(phi) on vertical vectors.
  for (const Vec4& v :
       {Vec4(0, 0, 1, 0), Vec4(0, 0, 0, 1), Vec4(0, 0, 0.3, -1.2)}) {
    CHECK(std::abs(psi_time(v) - std::conj(phi_space(v))) <= 1e-15);
  }

  Rng rng(39);
  for (int k = 0; k < 1000; ++k) {
    const int sign = (k % 2 == 0) ? +1 : -1;
    const Plane4 L = Plane4::graph_of(random_sym_det1(rng, sign));
    const TauValue tau = tau_invariant(L);
    const LineSign s = classify_line(L);
    if (s == LineSign::Positive) CHECK(tau.abs() < 1.0);
    if (s == LineSign::Negative) CHECK(tau.abs() > 1.0);
  }
}

TEST_CASE("bilipschitz ratios") {
  {
    const auto [lo, hi] = bilipschitz_ratio(Plane4::graph_of(Mat2::Identity()));
    CHECK(lo == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    CHECK(hi == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  }
  {
    const auto [lo, hi] = bilipschitz_ratio(Plane4::graph_of(Mat2::Zero()));
    CHECK(lo == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(hi == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK_THROWS_AS(bilipschitz_ratio(Plane4::graph_of(-Mat2::Identity())),
                  NegativeDirectionPresent);

  Rng rng(45);
  for (int k = 0; k < 500; ++k) {
    const auto [lo, hi] =
        bilipschitz_ratio(Plane4::graph_of(random_sym_det1(rng, +1)));
    CHECK(lo >= 1.0 - 1e-10);
    CHECK(hi <= std::sqrt(2.0) + 1e-10);
    CHECK(lo <= hi + 1e-12);
  }
}

TEST_CASE("m is the unique invariant form vanishing on V, up to sign") {
  const StructurePack& s = model();

  // Symmetric 4x4 matrices parametrized by their upper triangle (10 dims).
  const auto unpack = [](const Eigen::VectorXd& p) {
    Mat4 M;
    int t = 0;
    for (int i = 0; i < 4; ++i)
      for (int j = i; j < 4; ++j) M(i, j) = M(j, i) = p(t++);
    return M;
  };

  Eigen::MatrixXd C(0, 10);
  const auto stack = [&](const std::function<Mat4(const Mat4&)>& op) {
    Eigen::MatrixXd block(16, 10);
    for (int t = 0; t < 10; ++t) {
      Eigen::VectorXd e = Eigen::VectorXd::Zero(10);
      e(t) = 1;
      const Mat4 img = op(unpack(e));
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) block(4 * i + j, t) = img(i, j);
    }
    Eigen::MatrixXd next(C.rows() + 16, 10);
    next << C, block;
    C = next;
  };

  stack([&](const Mat4& M) { return Mat4(M + s.I.transpose() * M * s.I); });
  stack([&](const Mat4& M) { return Mat4(M - s.J.transpose() * M * s.J); });
  stack([&](const Mat4& M) { return Mat4(M + s.K.transpose() * M * s.K); });
  stack([&](const Mat4& M) {
    Mat4 R = Mat4::Zero();
    R.block<2, 2>(2, 2) = s.V.transpose() * M * s.V;
    return R;
  });

  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(C, Eigen::ComputeFullV);
  int rank = 0;
  for (int i = 0; i < 10; ++i)
    if (svd.singularValues()(i) > 1e-10) ++rank;
  CHECK(rank == 9);  // the solution space is exactly one line

  const Mat4 sol = unpack(svd.matrixV().col(9));
  const double scale = sol(0, 2);
  CHECK(std::abs(scale) > 1e-8);
  CHECK((sol / scale - s.m).cwiseAbs().maxCoeff() <= 1e-10);

  // With the declared form norm, the unit-norm solutions are exactly {+-m}.
  CHECK(form_norm(s.m) == doctest::Approx(1.0).epsilon(1e-15));
  const Mat4 unit_sol = sol / scale / form_norm(sol / scale);
  CHECK(std::min((unit_sol - s.m).cwiseAbs().maxCoeff(),
                 (unit_sol + s.m).cwiseAbs().maxCoeff()) <= 1e-10);
}

TEST_CASE("stabiliser of (I, J, K, m) is the diagonal SO(2)") {
  Rng rng(51);
  std::uniform_real_distribution<double> ang(0, 6.283185307179586);

  for (int k = 0; k < 1000; ++k) {
    const Mat2 R = rot2(ang(rng));
    CHECK(preserves_structure(block_diag(R, R)));
  }
  int preserved = 0;
  for (int k = 0; k < 1000; ++k) {
    const Mat4 M = random_special_orthogonal(rng, 4);
    if (preserves_structure(M)) {
      ++preserved;
      const Mat2 B1 = M.block<2, 2>(0, 0);
      const Mat2 B2 = M.block<2, 2>(2, 2);
      Eigen::JacobiSVD<Mat2> svd(0.5 * (B1 + B2),
                                 Eigen::ComputeFullU | Eigen::ComputeFullV);
      const Mat2 P = svd.matrixU() * svd.matrixV().transpose();
      CHECK((M - block_diag(P, P)).cwiseAbs().maxCoeff() <= 1e-8);
    }
  }
  CHECK(preserved == 0);  // random SO(4) misses the 1-dimensional subgroup

  const Mat4 M = block_diag(rot2(0.3), rot2(0.7));
  CHECK(!preserves_structure(M));
}
