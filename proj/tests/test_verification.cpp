#include "gbcurv/cli.hpp"
#include "gbcurv/functionals.hpp"
#include "gbcurv/verification.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <string>

using namespace gbcurv;

namespace {

constexpr double kPi = std::numbers::pi;

cli::ManifoldSpec spec(const std::string& name) {
  return cli::load_spec(std::string(GBCURV_CATALOG_DIR) + "/" + name + ".json");
}

MetricChart catalog(const std::string& name) { return cli::build_chart(spec(name)); }

const PointIntegrand kOne = [](std::span<const double>) { return 1.0; };

}  // namespace

TEST(GaussLegendre, IntegratesPolynomialsExactly) {
  const auto [x, w] = gauss_legendre(5);
  double s0 = 0, s8 = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    s0 += w[i];
    s8 += w[i] * std::pow(x[i], 8);
    EXPECT_GT(w[i], 0.0);
    EXPECT_LT(std::abs(x[i]), 1.0);
  }
  EXPECT_NEAR(s0, 2.0, 1e-15);
  EXPECT_NEAR(s8, 2.0 / 9.0, 1e-15);
  EXPECT_THROW(gauss_legendre(0), DomainError);
}

TEST(Quadrature, NodeOrderingAndInterior) {
  const QuadratureRule rule({{0, 1}, {2, 3}}, 3);
  EXPECT_EQ(rule.size(), 9u);
  std::array<double, 2> a{}, b{};
  rule.node(0, a);
  rule.node(1, b);
  EXPECT_EQ(a[0], b[0]);  // last coordinate fastest
  EXPECT_LT(a[1], b[1]);
  for (std::size_t i = 0; i < rule.size(); ++i) {
    std::array<double, 2> x{};
    EXPECT_GT(rule.node(i, x), 0.0);
    EXPECT_GT(x[0], 0.0);
    EXPECT_LT(x[0], 1.0);
  }
}

TEST(Quadrature, UnitBox) {
  const auto box = catalog("halfplane");
  EXPECT_NEAR(integrate_interior(box, kOne, interior_rule(box, 4)), 1.0, 1e-14);
  EXPECT_NEAR(integrate_boundary(box, kOne, boundary_rule(box, 4)), 1.0, 1e-14);
}

TEST(Quadrature, SphereAreaAndConvergence) {
  const auto s2 = catalog("sphere2");
  EXPECT_NEAR(integrate_interior(s2, kOne, interior_rule(s2, 40)), 4 * kPi, 1e-8);
  double prev = std::abs(integrate_interior(s2, kOne, interior_rule(s2, 2)) - 4 * kPi);
  for (int order : {4, 8, 16, 32}) {
    const double err = std::abs(integrate_interior(s2, kOne, interior_rule(s2, order)) - 4 * kPi);
    if (prev > 1e-10) EXPECT_LE(err, prev / 10) << order;
    prev = err;
  }
}

TEST(Quadrature, BallVolumeAndBoundaryArea) {
  const auto ball = catalog("ball3");
  EXPECT_NEAR(integrate_interior(ball, kOne, interior_rule(ball, 16)), 4 * kPi / 3, 1e-8);
  EXPECT_NEAR(integrate_boundary(ball, kOne, boundary_rule(ball, 16)), 4 * kPi, 1e-8);
  const auto disc = catalog("disc");
  EXPECT_NEAR(integrate_boundary(disc, kOne, boundary_rule(disc, 8)), 2 * kPi, 1e-10);
}

TEST(Quadrature, ThreadedMatchesPlain) {
  const auto s2 = catalog("sphere2");
  const auto rule = interior_rule(s2, 10);
  const double a = integrate_geometry_interior(
      s2, [](const PointGeometry& g) { return g.curvature(1, 2, 2, 1); }, rule);
  const double b = integrate_geometry_interior(
      s2, [](const PointGeometry& g) { return g.curvature(1, 2, 2, 1); }, rule);
  EXPECT_EQ(a, b);
  EXPECT_NEAR(a, integrate_interior(s2, kOne, rule), 1e-10);
}

TEST(Report, Criteria) {
  auto r = VerificationReport::compare("x", 2.0 + 1e-7, 2.0, 1e-6, Criterion::Absolute);
  EXPECT_TRUE(r.pass);
  EXPECT_NEAR(r.rel_err, 5e-8, 1e-15);
  r = VerificationReport::compare("x", 1e-3, 0.0, 1e-4, Criterion::Relative);
  EXPECT_FALSE(r.pass);
  EXPECT_EQ(r.rel_err, r.abs_err);
  EXPECT_TRUE(VerificationReport::compare("w", 0.5, 0.0, 1e-2, Criterion::Witness).pass);
  EXPECT_FALSE(VerificationReport::compare("w", 1e-3, 0.0, 1e-2, Criterion::Witness).pass);
  EXPECT_THROW(r.detail("missing"), std::out_of_range);
}

TEST(GaussBonnet, ClosedExamples) {
  const auto s2 = gauss_bonnet_closed(catalog("sphere2"), 2, 40, 1e-6);
  EXPECT_TRUE(s2.pass) << s2.value;
  EXPECT_LT(s2.seconds, 1.0);
  const auto t2 = gauss_bonnet_closed(catalog("torus2"), 0, 8, 1e-12);
  EXPECT_EQ(t2.value, 0.0);
  const auto s3 = gauss_bonnet_closed(catalog("sphere3"), 0, 6, 1e-12);
  EXPECT_EQ(s3.value, 0.0);
  const auto lt = gauss_bonnet_closed(catalog("torus2_lorentzian"), 0, 8, 1e-12);
  EXPECT_TRUE(lt.pass);
  // nearest integer reference when chi is not given
  const auto free = gauss_bonnet_closed(catalog("sphere2"), std::nullopt, 40, 1e-6);
  EXPECT_EQ(free.reference, 2.0);
  EXPECT_LT(free.detail("distance_to_integer"), 1e-6);
}

TEST(GaussBonnet, BoundaryExamples) {
  const auto disc = gauss_bonnet_boundary(catalog("disc"), 1, 16, 1e-8);
  EXPECT_TRUE(disc.pass) << disc.value;
  EXPECT_NEAR(disc.detail("interior"), 0.0, 1e-14);
  EXPECT_NEAR(disc.detail("boundary"), 1.0, 1e-8);
  const auto hemi = gauss_bonnet_boundary(catalog("hemisphere2"), 1, 24, 1e-6);
  EXPECT_TRUE(hemi.pass) << hemi.value;
  EXPECT_NEAR(hemi.detail("boundary"), 0.0, 1e-12);
  const auto cyl = gauss_bonnet_boundary(catalog("cylinder"), 0, 8, 1e-10);
  EXPECT_TRUE(cyl.pass) << cyl.value;
}

TEST(Variational, VolumeVariation) {
  const auto sp = spec("sphere2");
  const auto chart = cli::build_chart(sp);
  VariationalOptions opt;
  opt.order = 16;
  opt.tol = 1e-8;
  const auto r = variational_check_interior(chart, cli::build_perturbation(sp, "conformal"), 0, opt);
  EXPECT_TRUE(r.pass) << r.value << " vs " << r.reference;
  EXPECT_LE(std::abs(r.detail("lhs") - r.detail("lhs_single_step")),
            std::max(r.detail("fd_error_bound"), 1e-14));
}

TEST(Variational, TopDegreeVanishesOnSphere) {
  const auto sp = spec("sphere2");
  VariationalOptions opt;
  opt.order = 24;
  opt.tol = 1e-6;
  opt.criterion = Criterion::Absolute;
  const auto r = variational_check_interior(cli::build_chart(sp),
                                            cli::build_perturbation(sp, "ambient"), 2, opt);
  EXPECT_TRUE(r.pass) << r.value;
  EXPECT_LE(std::abs(r.detail("lhs")), 1e-6);
}

TEST(Variational, BoundaryDegreeOne) {
  // n = 1: d/dt of half the boundary length against (1/2) int h_ab delta_ab / 2
  const auto sp = spec("ball3");
  VariationalOptions opt;
  opt.order = 10;
  opt.tol = 1e-6;
  const auto r = variational_check_boundary(cli::build_chart(sp),
                                            cli::build_perturbation(sp, "general"), 1, opt);
  EXPECT_TRUE(r.pass) << r.value << " vs " << r.reference;
}

TEST(Variational, DiscTopDegree) {
  const auto sp = spec("disc");
  VariationalOptions opt;
  opt.order = 16;
  opt.tol = 1e-6;
  opt.criterion = Criterion::Absolute;
  const auto r = variational_check_boundary(cli::build_chart(sp), cli::build_perturbation(sp), 2, opt);
  EXPECT_TRUE(r.pass) << r.value;
}

TEST(Variational, DegenerateRangeReportsT) {
  const auto sp = spec("disc");
  const auto chart = cli::build_chart(sp);
  std::vector<MetricEntry> h;
  for (const auto& e : chart.entries()) h.push_back({e.i, e.j, Expression::constant(-1e3) * e.expr});
  VariationalOptions opt;
  opt.fd_step = 1e-2;
  EXPECT_THROW(
      {
        try {
          variational_check_interior(chart, h, 2, opt);
        } catch (const DegenerateMetricError& e) {
          EXPECT_NE(std::string(e.what()).find("t="), std::string::npos);
          throw;
        }
      },
      DegenerateMetricError);
}

TEST(Restriction, DiscHalfplaneHemisphere) {
  for (int sign : {1, -1}) {
    const auto d = restriction_product_check(catalog("disc"), std::nullopt, sign, 6, 1e-10);
    EXPECT_TRUE(d.pass) << d.value;
  }
  const auto h = restriction_product_check(catalog("hemisphere2"), std::nullopt, 1, 6, 1e-8);
  EXPECT_TRUE(h.pass) << h.value;
  const auto flat = restriction_product_check(catalog("halfplane"), std::nullopt, 1, 4, 1e-12);
  EXPECT_TRUE(flat.pass);
  EXPECT_EQ(flat.detail("max_abs_boundary_form"), 0.0);
}

TEST(Identities, Dimension1And3) {
  const auto one = identity_check(1, 50, 1, 1e-12);
  EXPECT_TRUE(one.pass);
  EXPECT_EQ(one.value, 0.0);
  const auto three = identity_check(3, 1000, 1, 1e-12);
  EXPECT_TRUE(three.pass) << three.value;
  for (const Signature& s : {Signature({-1, 1, 1}), Signature({-1, -1, 1})}) {
    const auto r = identity_check(3, 200, 2, 1e-12, s);
    EXPECT_TRUE(r.pass) << s.to_string() << " " << r.value;
  }
}

TEST(Identities, Dimension5Coefficients) {
  const auto good = identity_check(5, 100, 3, 1e-11);
  EXPECT_TRUE(good.pass) << good.value;
  const auto printed = identity_check(5, 100, 3, 1e-11, std::nullopt, IdentityCoefficients::Printed);
  EXPECT_FALSE(printed.pass);
  EXPECT_GT(printed.value, 1e-2);
}

TEST(Identities, EvenDimensionWitnesses) {
  for (int d : {2, 4, 6}) {
    const auto r = identity_check(d, 20, 4, 1e-2);
    EXPECT_EQ(r.criterion, Criterion::Witness);
    EXPECT_TRUE(r.pass) << d << " " << r.value;
  }
}

// Residuals do not depend on the frame the sample is written in.
TEST(Identities, RotationInvariantResiduals) {
  for (int d : {3, 5}) {
    const auto s = Signature::riemannian(d);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto r = random_curvature(d, seed);
      const auto t = r.transformed(random_frame_change(s, seed + 50));
      EXPECT_LE(std::abs(normalized_identity(r, s, d) - normalized_identity(t, s, d)), 1e-12);
      // the Printed variant changes as a value, but only by rounding
      EXPECT_NEAR(normalized_identity(r, s, d, IdentityCoefficients::Printed),
                  normalized_identity(t, s, d, IdentityCoefficients::Printed), 1e-10);
    }
  }
}

TEST(Identities, DegreeSixEulerFormInDimension6) {
  // The dimension 5 combination is the degree 6 Euler form up to a constant.
  const auto s = Signature::riemannian(6);
  const auto c = identity_coefficients(5);
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const auto r = random_curvature(6, seed);
    const auto t = identity_monomials(r, s, 5);
    double sum = 0;
    for (std::size_t i = 0; i < c.size(); ++i) sum += c[i] * t[i];
    const double e6 = euler_form(r, s, 6) * std::pow(8 * kPi, 3) * 6;
    EXPECT_NEAR(sum * 8, e6, 1e-10 * std::max(1.0, std::abs(e6)));
  }
}

TEST(Pullback, FlatMapGivesPlainEntries) {
  // X = (2x, y): pullback of delta is diag(4, 1)
  const ExpressionScope scope{{"x", "y"}, {}};
  const std::vector<Expression> map = {Expression::parse("2*x", scope), Expression::parse("y", scope)};
  const std::vector<std::vector<Expression>> amb = {
      {Expression::constant(1), Expression::constant(0)},
      {Expression::constant(0), Expression::constant(1)}};
  const auto h = pullback_entries(2, map, amb);
  const std::array<double, 2> p{0.3, 0.1};
  const auto m = evaluate_entries(2, h, p);
  EXPECT_NEAR(m(0, 0), 4.0, 1e-15);
  EXPECT_NEAR(m(1, 1), 1.0, 1e-15);
  EXPECT_NEAR(m(0, 1), 0.0, 1e-15);
}
