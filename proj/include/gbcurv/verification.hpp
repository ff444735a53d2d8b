#pragma once

// Numerical checks of the curvature functionals: tensor-product Gauss-Legendre
// quadrature over charts, Gauss-Bonnet integrals, finite-difference first
// variations, the circle-product restriction property and the randomized
// universal curvature identities.

#include "gbcurv/geometry.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace gbcurv {

/// Gauss-Legendre nodes and weights on [-1, 1], nodes ascending.
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int order);

class QuadratureRule {
 public:
  /// `order` nodes on every interval.
  QuadratureRule(std::vector<Interval> domain, int order);

  int order() const { return order_; }
  int dim() const { return static_cast<int>(domain_.size()); }
  const std::vector<Interval>& domain() const { return domain_; }
  const std::vector<double>& nodes(int k) const { return nodes_[static_cast<std::size_t>(k)]; }
  const std::vector<double>& weights(int k) const {
    return weights_[static_cast<std::size_t>(k)];
  }

  /// Number of tensor-product nodes.
  std::size_t size() const;
  /// Node `index` (last coordinate fastest); returns its weight.
  double node(std::size_t index, std::span<double> x) const;

 private:
  std::vector<Interval> domain_;
  int order_;
  std::vector<std::vector<double>> nodes_;
  std::vector<std::vector<double>> weights_;
};

/// Rule over the full chart box.
QuadratureRule interior_rule(const MetricChart& chart, int order);
/// Rule over coordinates 2..m of the boundary face.
QuadratureRule boundary_rule(const MetricChart& chart, int order);

enum class Criterion {
  Absolute,  // pass iff abs_err <= tol
  Relative,  // pass iff rel_err <= tol
  Witness,   // pass iff value > tol (a non-vanishing witness)
};

struct VerificationReport {
  std::string test;
  double value = 0.0;
  double reference = 0.0;
  double abs_err = 0.0;
  /// abs_err / |reference|, or abs_err when the reference is 0.
  double rel_err = 0.0;
  double tol = 0.0;
  Criterion criterion = Criterion::Absolute;
  bool pass = false;
  double seconds = 0.0;
  /// Extra named quantities (both sides, error bounds, ...).
  std::vector<std::pair<std::string, double>> details;

  static VerificationReport compare(std::string test, double value, double reference, double tol,
                                    Criterion criterion);
  /// Value of a named detail; throws std::out_of_range if absent.
  double detail(const std::string& name) const;
};

std::string criterion_name(Criterion c);

/// Pairwise sum; the result depends only on the order of `v`.
double pairwise_sum(std::span<const double> v);

using PointIntegrand = std::function<double(std::span<const double>)>;
using GeometryIntegrand = std::function<double(const PointGeometry&)>;

/// sum w f(x) dx_g over the rule's nodes.
double integrate_interior(const MetricChart& chart, const PointIntegrand& f,
                          const QuadratureRule& rule);
/// Same over the boundary face; the rule covers coordinates 2..m.
double integrate_boundary(const MetricChart& chart, const PointIntegrand& f,
                          const QuadratureRule& rule);

/// Integrals of functions of the full point geometry. Node evaluation runs
/// on worker threads; the reduction order is fixed.
double integrate_geometry_interior(const MetricChart& chart, const GeometryIntegrand& f,
                                   const QuadratureRule& rule);
double integrate_geometry_boundary(const MetricChart& chart, const GeometryIntegrand& f,
                                   const QuadratureRule& rule);

/// int_M E_{m,m}. With no `chi`, the reference is the nearest integer.
VerificationReport gauss_bonnet_closed(const MetricChart& chart, std::optional<int> chi,
                                       int order, double tol);
/// int_M E_{m,m} + int_dM F_{m,m-1}.
VerificationReport gauss_bonnet_boundary(const MetricChart& chart, std::optional<int> chi,
                                         int order, double tol);

struct VariationalOptions {
  double fd_step = 1e-3;
  int order = 16;
  double tol = 1e-4;
  Criterion criterion = Criterion::Relative;
};

/// d/dt int E_{m,n}(g + t h) dx versus 1/2 int h_ij E_ij dx. The LHS is the
/// Richardson combination of central differences with steps s and s/2.
/// Details: lhs, rhs, lhs_single_step (step s/2), fd_error_bound.
VerificationReport variational_check_interior(const MetricChart& chart,
                                              const std::vector<MetricEntry>& h, int n,
                                              const VariationalOptions& opt = {});

/// As above with the boundary term int F_{m,n-1} on the left and
/// 1/2 int h_ab F_ab on the right. Details add rhs_interior, rhs_boundary.
VerificationReport variational_check_boundary(const MetricChart& chart,
                                              const std::vector<MetricEntry>& h, int n,
                                              const VariationalOptions& opt = {});

/// On boundary nodes of N x S^1 (metric g_N + sign dtheta^2) compares
/// xi_theta F_{theta theta, nu} with F_{nu} of N at the same point, for every
/// nu. `n` defaults to dim N. Value is the maximal deviation.
VerificationReport restriction_product_check(const MetricChart& chart_n, std::optional<int> n,
                                             int sign, int order, double tol);

/// Which coefficient list to use for the dimension 5 identity.
enum class IdentityCoefficients {
  /// (1, -12, 3, -24, 16, -24, -2, 8): the restriction of the degree 6 Euler
  /// form, which vanishes in dimension 5.
  EulerForm,
  /// (1, -12, 3, 24, 16, -24, 2, -8): terms 4, 7 and 8 with the opposite
  /// sign. Kept to report its residual; it does not vanish in dimension 5.
  Printed,
};

/// Monomials of the dimension 1, 3 or 5 identity, without coefficients, as
/// xi-weighted contractions. The tensor may have any dimension.
///   1: tau
///   3: tau^2, |rho|^2, |R|^2
///   5: tau^3, tau |rho|^2, tau |R|^2, R_aija R_bklb R_jlik,
///      R_aija R_bjkb R_cikc, R_aija R_jkln R_lnik, R_ijkl R_klan R_anij,
///      R_kaij R_inkl R_jlan
/// with tau = R_ijji and rho_ij = R_aija.
std::vector<double> identity_monomials(const AlgebraicCurvature& r, const Signature& signs,
                                       int identity_dim);

std::vector<double> identity_coefficients(
    int identity_dim, IdentityCoefficients which = IdentityCoefficients::EulerForm);

/// |sum c_t t| / (1 + max |c_t t|).
double normalized_identity(const AlgebraicCurvature& r, const Signature& signs,
                           int identity_dim,
                           IdentityCoefficients which = IdentityCoefficients::EulerForm);

/// For odd dim: max normalized residual over random tensors, pass iff <= tol.
/// For even dim: the identity of dim - 1, pass iff some sample exceeds tol.
VerificationReport identity_check(int dim, int samples, std::uint64_t seed, double tol,
                                  std::optional<Signature> signs = std::nullopt,
                                  IdentityCoefficients which = IdentityCoefficients::EulerForm);

/// h_ij = sum_AB H_AB d_i X^A d_j X^B, the pullback of a symmetric ambient
/// tensor through the map X. Entries are exact derivative expressions.
std::vector<MetricEntry> pullback_entries(int dim, const std::vector<Expression>& map,
                                          const std::vector<std::vector<Expression>>& ambient);

}  // namespace gbcurv
