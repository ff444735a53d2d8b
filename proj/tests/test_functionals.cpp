#include "gbcurv/functionals.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace gbcurv;

namespace {

constexpr double kPi = std::numbers::pi;

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

double rel(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).cwiseAbs().maxCoeff() / std::max(1.0, b.cwiseAbs().maxCoeff());
}

std::vector<Signature> signatures(int m) {
  std::vector<Signature> out;
  for (int p = 0; p <= m; ++p) out.push_back(Signature::with_timelike(m, p));
  return out;
}

}  // namespace

TEST(SphereVolume, Values) {
  EXPECT_DOUBLE_EQ(sphere_volume(0), 2.0);
  EXPECT_NEAR(sphere_volume(1), 2 * kPi, 1e-14);
  EXPECT_NEAR(sphere_volume(2), 4 * kPi, 1e-13);
  EXPECT_NEAR(sphere_volume(3), 2 * kPi * kPi, 1e-13);
}

TEST(EulerForm, Examples) {
  const auto s = Signature::riemannian(4);
  const auto r = random_curvature(4, 1);
  EXPECT_EQ(euler_form(r, s, 0), 1.0);
  EXPECT_EQ(euler_form(r, s, 3), 0.0);
  EXPECT_EQ(euler_form(r, s, 6), 0.0);
  const auto sphere = constant_curvature(2, 1.0, Signature::riemannian(2));
  EXPECT_NEAR(euler_form(sphere, Signature::riemannian(2), 2), 1 / (2 * kPi), 1e-15);
}

TEST(EulerForm, DegreeTwoIsScalarCurvature) {
  for (const auto& s : signatures(4)) {
    const auto r = random_curvature(4, 3);
    double tau = 0;
    for (int i = 1; i <= 4; ++i)
      for (int j = 1; j <= 4; ++j) tau += s(i) * s(j) * r(i, j, j, i);
    EXPECT_NEAR(euler_form(r, s, 2), tau / (4 * kPi), 1e-14) << s.to_string();
  }
}

TEST(InteriorEL, Examples) {
  const Signature s({-1, 1, 1});
  const auto r = random_curvature(3, 4);
  const auto e0 = interior_el_tensor(r, s, 0);
  for (int i = 1; i <= 3; ++i)
    for (int j = 1; j <= 3; ++j) EXPECT_EQ(e0(i, j), i == j ? s(i) : 0.0);
  const auto flat = interior_el_tensor(AlgebraicCurvature(3), s, 2);
  EXPECT_EQ(flat.matrix().cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(interior_el_tensor(r, s, 1).matrix().cwiseAbs().maxCoeff(), 0.0);
}

TEST(BoundaryTransgression, Examples) {
  const auto s1 = Signature::riemannian(1);
  const AlgebraicCurvature r1(1);
  const SecondFundamentalForm l1(Eigen::MatrixXd::Identity(1, 1));
  EXPECT_NEAR(boundary_transgression(r1, l1, s1, 2), 1 / (2 * kPi), 1e-15);

  const auto s2 = Signature::riemannian(2);
  const AlgebraicCurvature r2(2);
  const SecondFundamentalForm l2(Eigen::MatrixXd::Identity(2, 2));
  EXPECT_NEAR(boundary_transgression(r2, l2, s2, 3), 1 / (4 * kPi), 1e-15);
  const SecondFundamentalForm zero(Eigen::MatrixXd::Zero(2, 2));
  EXPECT_EQ(boundary_transgression(r2, zero, s2, 3), 0.0);
  // n = 1: a single term with Vol(S^0) = 2
  EXPECT_NEAR(boundary_transgression(r2, zero, s2, 1), 0.5, 1e-15);
}

TEST(BoundaryTransgression, SumOverNu) {
  const auto s = Signature::riemannian(4);
  const auto r = random_curvature(4, 8);
  const SecondFundamentalForm l(oracle::random_symmetric(4, 3));
  const double total = boundary_transgression(r, l, s, 5);
  double parts = 0;
  for (int nu = 0; 2 * nu <= 4; ++nu) parts += boundary_transgression(r, l, s, 5, nu);
  EXPECT_NEAR(total, parts, 1e-14);
}

TEST(BoundaryTransgression, InvalidNu) {
  const auto s = Signature::riemannian(2);
  const SecondFundamentalForm l(Eigen::MatrixXd::Identity(2, 2));
  EXPECT_THROW(boundary_transgression(AlgebraicCurvature(2), l, s, 3, 2), DomainError);
  EXPECT_THROW(boundary_transgression(AlgebraicCurvature(2), l, s, 3, -1), DomainError);
}

TEST(BoundaryEL, Examples) {
  const Signature s({-1, 1});
  const SecondFundamentalForm l(oracle::random_symmetric(2, 5));
  const auto f1 = boundary_el_tensor(AlgebraicCurvature(2), l, s, 1);
  for (int a = 1; a <= 2; ++a)
    for (int b = 1; b <= 2; ++b) EXPECT_NEAR(f1(a, b), a == b ? s(a) / 2.0 : 0.0, 1e-15);

  const auto e = Signature::riemannian(2);
  const Eigen::MatrixXd lm = oracle::random_symmetric(2, 6);
  const auto f2 = boundary_el_tensor(AlgebraicCurvature(2), SecondFundamentalForm(lm), e, 2);
  const Eigen::MatrixXd expect =
      (Eigen::MatrixXd::Identity(2, 2) * lm.trace() - lm) / (2 * kPi);
  EXPECT_LE((f2.matrix() - expect).cwiseAbs().maxCoeff(), 1e-15);
  const auto fi = boundary_el_tensor(AlgebraicCurvature(2),
                                     SecondFundamentalForm(Eigen::MatrixXd::Identity(2, 2)), e, 2);
  EXPECT_NEAR(fi(1, 1), 1 / (2 * kPi), 1e-15);
  EXPECT_NEAR(fi(1, 2), 0.0, 1e-15);
}

// The cached expansions against literal tuple sums, in every signature.
TEST(OracleEquivalence, EulerForm) {
  for (int m = 2; m <= 5; ++m)
    for (const auto& s : signatures(m))
      for (std::uint64_t seed = 0; seed < 3; ++seed) {
        const auto r = random_curvature(m, 100 * m + seed);
        for (int n = 0; n <= m; n += 2)
          EXPECT_LE(rel(euler_form(r, s, n), oracle::euler_form(r, s, n)), 1e-12)
              << s.to_string() << " n=" << n;
      }
}

TEST(OracleEquivalence, InteriorEL) {
  for (int m = 2; m <= 4; ++m)
    for (const auto& s : signatures(m)) {
      const auto r = random_curvature(m, 7 * m);
      for (int n = 0; n + 1 <= m; n += 2)
        EXPECT_LE(rel(interior_el_tensor(r, s, n).matrix(), oracle::interior_el(r, s, n)), 1e-12)
            << s.to_string() << " n=" << n;
    }
}

TEST(OracleEquivalence, BoundaryForms) {
  for (int d = 1; d <= 4; ++d)
    for (const auto& s : signatures(d)) {
      const auto r = random_curvature(d, 11 * d);
      const SecondFundamentalForm l(oracle::random_symmetric(d, 13u * d));
      for (int n = 1; n <= d + 1; ++n)
        for (int nu = 0; 2 * nu <= n - 1; ++nu) {
          EXPECT_LE(rel(boundary_transgression(r, l, s, n, nu),
                        oracle::transgression(r, l, s, n, nu)),
                    1e-12)
              << s.to_string() << " n=" << n << " nu=" << nu;
          if (n <= d)
            EXPECT_LE(rel(boundary_el_tensor(r, l, s, n, nu).matrix(),
                          oracle::boundary_el(r, l, s, n, nu)),
                      1e-12)
                << s.to_string() << " n=" << n << " nu=" << nu;
        }
    }
}

TEST(FrameIndependence, ScalarsAndTensors) {
  const Signature s({-1, 1, 1, 1});
  const auto r = random_curvature(4, 21);
  const auto st = s.tangential();
  const auto rt = random_curvature(3, 22);
  const Eigen::MatrixXd lm = oracle::random_symmetric(3, 23);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto o = random_frame_change(s, seed);
    const auto r2 = r.transformed(o);
    EXPECT_LE(rel(euler_form(r2, s, 4), euler_form(r, s, 4)), 1e-10);
    EXPECT_LE(rel(interior_el_tensor(r2, s, 2).matrix(),
                  interior_el_tensor(r, s, 2).contravariant_transform(o).matrix()),
              1e-10);

    const auto ot = random_frame_change(st, seed + 100);
    const auto rt2 = rt.transformed(ot);
    const SecondFundamentalForm l2(SymTwoTensor(lm).covariant_transform(ot));
    const SecondFundamentalForm l(lm);
    EXPECT_LE(rel(boundary_transgression(rt2, l2, st, 4), boundary_transgression(rt, l, st, 4)),
              1e-10);
    EXPECT_LE(rel(boundary_el_tensor(rt2, l2, st, 3).matrix(),
                  boundary_el_tensor(rt, l, st, 3).contravariant_transform(ot).matrix()),
              1e-10);
  }
}

TEST(Expansion, CacheSizes) {
  // E_{2,2}: R_1221 and R_2112 merge into one monomial
  EXPECT_GE(expansion_size(Signature::riemannian(2), 1, 0), 1u);
  EXPECT_EQ(expansion_size(Signature::riemannian(3), 0, 0), 1u);
}
