#pragma once

// Chart-based metric geometry: metric jets by nested forward-mode AD,
// Levi-Civita connection, Riemann tensor, orthonormal and boundary-adapted
// frames, and the second fundamental form of the boundary face.
//
// Curvature convention: R_ijkl = g(R(e_i, e_j) e_k, e_l) with
// R(X, Y) = [nabla_X, nabla_Y] - nabla_[X,Y], so the unit round sphere has
// R_1221 = +1 in an orthonormal frame.
//
// Boundary convention: the boundary face is {x_1 = lower bound of coordinate
// 1} and x_1 increases into the manifold.

#include "gbcurv/expression.hpp"
#include "gbcurv/tensor_core.hpp"

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace gbcurv {

inline constexpr int kMaxChartDim = 6;

class DegenerateMetricError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NullDirectionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

/// One upper-triangle metric entry, 1-based i <= j.
struct MetricEntry {
  int i = 1;
  int j = 1;
  Expression expr;
};

class MetricChart {
 public:
  MetricChart(std::string name, std::vector<std::string> coordinates,
              std::vector<Interval> domain, std::vector<MetricEntry> entries,
              Signature signature, bool boundary = false,
              std::optional<Expression> volume_weight = std::nullopt);

  const std::string& name() const { return name_; }
  int dim() const { return static_cast<int>(coordinates_.size()); }
  const std::vector<std::string>& coordinates() const { return coordinates_; }
  const std::vector<Interval>& domain() const { return domain_; }
  const std::vector<MetricEntry>& entries() const { return entries_; }
  const Signature& signature() const { return signature_; }
  bool has_boundary() const { return boundary_; }
  const std::optional<Expression>& volume_weight() const { return volume_weight_; }

  /// Entry expression for 1-based (i, j) in either order; zero if absent.
  Expression entry(int i, int j) const;

  /// Throws DomainError unless x lies in the closed coordinate box.
  void check_in_domain(std::span<const double> x) const;

 private:
  std::string name_;
  std::vector<std::string> coordinates_;
  std::vector<Interval> domain_;
  std::vector<MetricEntry> entries_;
  Signature signature_;
  bool boundary_;
  std::optional<Expression> volume_weight_;
};

/// g_ij, d_k g_ij and d_k d_l g_ij at a point (0-based storage).
struct MetricJet {
  int dim = 0;
  Eigen::MatrixXd g;
  std::vector<Eigen::MatrixXd> dg;   // dg[k](i, j)
  std::vector<Eigen::MatrixXd> ddg;  // ddg[k * dim + l](i, j)

  const Eigen::MatrixXd& d(int k) const { return dg[static_cast<std::size_t>(k)]; }
  const Eigen::MatrixXd& dd(int k, int l) const {
    return ddg[static_cast<std::size_t>(k * dim + l)];
  }
};

MetricJet metric_jet(const MetricChart& chart, std::span<const double> x);

/// Metric matrix; validates invertibility and signature.
Eigen::MatrixXd metric_at(const MetricChart& chart, std::span<const double> x);

/// Gamma^k_ij, accessed 1-based as (k, i, j).
class Christoffel {
 public:
  explicit Christoffel(int dim) : dim_(dim), c_(static_cast<std::size_t>(dim * dim * dim), 0.0) {}
  int dim() const { return dim_; }
  double operator()(int k, int i, int j) const { return at0(k - 1, i - 1, j - 1); }
  double at0(int k, int i, int j) const { return c_[idx(k, i, j)]; }
  double& at0(int k, int i, int j) { return c_[idx(k, i, j)]; }

 private:
  std::size_t idx(int k, int i, int j) const {
    return static_cast<std::size_t>((k * dim_ + i) * dim_ + j);
  }
  int dim_;
  std::vector<double> c_;
};

Christoffel christoffel(const MetricChart& chart, std::span<const double> x);

/// Coordinate-frame Riemann components, as computed (not symmetrized).
class CoordinateCurvature {
 public:
  explicit CoordinateCurvature(int dim)
      : dim_(dim), c_(static_cast<std::size_t>(dim * dim * dim * dim), 0.0) {}
  int dim() const { return dim_; }
  double operator()(int i, int j, int k, int l) const {
    return c_[idx(i - 1, j - 1, k - 1, l - 1)];
  }
  double& at0(int i, int j, int k, int l) { return c_[idx(i, j, k, l)]; }
  std::span<const double> components() const { return c_; }
  /// Largest violation of the curvature symmetries relative to max |R|.
  double symmetry_residual() const;

 private:
  std::size_t idx(int i, int j, int k, int l) const {
    return static_cast<std::size_t>(((i * dim_ + j) * dim_ + k) * dim_ + l);
  }
  int dim_;
  std::vector<double> c_;
};

CoordinateCurvature riemann_at(const MetricChart& chart, std::span<const double> x);
CoordinateCurvature riemann_from_jet(const MetricJet& jet);

/// Orthonormal frame at a point: column i of `vectors` holds e_{i+1} in
/// coordinate components.
struct PointFrame {
  std::vector<double> point;
  Eigen::MatrixXd vectors;
  Signature signs;
  bool boundary_adapted = false;
};

PointFrame orthonormal_frame_at(const MetricChart& chart, std::span<const double> x,
                                bool boundary_adapted);
PointFrame frame_from_metric(const Eigen::MatrixXd& g, std::span<const double> x,
                             bool boundary_adapted);

AlgebraicCurvature curvature_in_frame(const CoordinateCurvature& r, const PointFrame& frame);

SecondFundamentalForm second_fundamental_form(const MetricChart& chart,
                                              std::span<const double> y);

/// Frame components h(e_i, e_j) of a covariant 2-tensor given in coordinates.
SymTwoTensor frame_components(const Eigen::MatrixXd& h_coord, const PointFrame& frame);

/// sqrt|det g| or the chart's volume weight.
double volume_density(const MetricChart& chart, std::span<const double> x);
/// sqrt|det g_tangential| on the boundary face.
double boundary_volume_density(const MetricChart& chart, std::span<const double> y);

/// Everything the curvature functionals need at one point, from a single jet.
struct PointGeometry {
  PointFrame frame;
  AlgebraicCurvature curvature;
  std::optional<SecondFundamentalForm> second_fundamental_form;
  double density = 0.0;
};

PointGeometry geometry_at(const MetricChart& chart, std::span<const double> x,
                          bool boundary_point);

/// N x S^1 with metric g_N + sign * dtheta^2, theta in [0, 2 pi].
MetricChart product_with_circle(const MetricChart& chart_n, int sign);

/// g + t h. Probes a small interior grid and throws DegenerateMetricError
/// naming the point and t if the metric degenerates or changes signature.
MetricChart perturbed(const MetricChart& chart, const std::vector<MetricEntry>& h, double t);

/// Dense coordinate matrix of a list of covariant entries at a point.
Eigen::MatrixXd evaluate_entries(int dim, const std::vector<MetricEntry>& h,
                                 std::span<const double> x);

std::string format_point(std::span<const double> x);

}  // namespace gbcurv
