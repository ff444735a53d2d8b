#include "gbcurv/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

namespace gbcurv {

namespace {

constexpr double kNullTolerance = 1e-12;
constexpr double kSingularTolerance = 1e-12;
constexpr double kDomainSlack = 1e-12;

// Symmetric Jacobi scaling so that badly scaled charts (sin^2 factors near
// the poles) are not reported singular by an absolute eigenvalue cut.
Eigen::VectorXd scaled_eigenvalues(const Eigen::MatrixXd& g) {
  const auto m = g.rows();
  Eigen::VectorXd d(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double row = g.row(i).cwiseAbs().maxCoeff();
    d(i) = row > 0.0 ? 1.0 / std::sqrt(row) : 1.0;
  }
  const Eigen::MatrixXd s = d.asDiagonal() * g * d.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

void validate_metric(const Eigen::MatrixXd& g, const Signature& sig,
                     std::span<const double> x, const std::string& context) {
  if (!g.allFinite())
    throw DegenerateMetricError("non-finite metric at " + format_point(x) + context);
  const Eigen::VectorXd ev = scaled_eigenvalues(g);
  int negatives = 0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (std::abs(ev(i)) < kSingularTolerance)
      throw DegenerateMetricError("singular metric at " + format_point(x) + context);
    if (ev(i) < 0.0) ++negatives;
  }
  if (negatives != sig.p())
    throw DegenerateMetricError("metric signature changes at " + format_point(x) + context +
                                " (expected " + std::to_string(sig.p()) +
                                " negative directions, found " +
                                std::to_string(negatives) + ")");
}

template <int N>
MetricJet jet_n(const MetricChart& chart, std::span<const double> x) {
  using D1 = Dual<double, N>;
  using D2 = Dual<D1, N>;
  std::array<D2, N> xs{};
  for (int k = 0; k < N; ++k) {
    xs[k].re.re = x[static_cast<std::size_t>(k)];
    xs[k].re.eps[k] = 1.0;
    xs[k].eps[k].re = 1.0;
  }
  MetricJet jet;
  jet.dim = N;
  jet.g = Eigen::MatrixXd::Zero(N, N);
  jet.dg.assign(N, Eigen::MatrixXd::Zero(N, N));
  jet.ddg.assign(N * N, Eigen::MatrixXd::Zero(N, N));
  for (const MetricEntry& e : chart.entries()) {
    const D2 v = e.expr.eval<D2>(std::span<const D2>(xs.data(), xs.size()));
    const int i = e.i - 1;
    const int j = e.j - 1;
    auto put = [&](Eigen::MatrixXd& mat, double val) {
      mat(i, j) = val;
      mat(j, i) = val;
    };
    put(jet.g, v.re.re);
    for (int k = 0; k < N; ++k) {
      put(jet.dg[k], v.re.eps[k]);
      for (int l = 0; l < N; ++l) put(jet.ddg[k * N + l], v.eps[k].eps[l]);
    }
  }
  return jet;
}

// Gamma_{l,ij} = 1/2 (d_i g_jl + d_j g_il - d_l g_ij), stored [l][i][j].
std::vector<double> christoffel_first(const MetricJet& jet) {
  const int m = jet.dim;
  std::vector<double> c(static_cast<std::size_t>(m * m * m));
  for (int l = 0; l < m; ++l)
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        c[static_cast<std::size_t>((l * m + i) * m + j)] =
            0.5 * (jet.d(i)(j, l) + jet.d(j)(i, l) - jet.d(l)(i, j));
  return c;
}

Christoffel christoffel_second(const MetricJet& jet, const std::vector<double>& first,
                               const Eigen::MatrixXd& ginv) {
  const int m = jet.dim;
  Christoffel g2(m);
  for (int k = 0; k < m; ++k)
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        double s = 0.0;
        for (int l = 0; l < m; ++l)
          s += ginv(k, l) * first[static_cast<std::size_t>((l * m + i) * m + j)];
        g2.at0(k, i, j) = s;
      }
  return g2;
}

double g_of(const Eigen::MatrixXd& g, const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  return u.dot(g * v);
}

// Scale of the terms summed in g(u, u); used to judge cancellation.
double g_scale(const Eigen::MatrixXd& g, const Eigen::VectorXd& u) {
  return u.cwiseAbs().dot(g.cwiseAbs() * u.cwiseAbs());
}

SecondFundamentalForm l_from_jet(const MetricJet& jet, const PointFrame& frame) {
  const int m = jet.dim;
  const std::vector<double> first = christoffel_first(jet);
  const Eigen::VectorXd e1 = frame.vectors.col(0);
  // Gamma_{n,cd} := sum_l Gamma_{l,cd} e1^l
  Eigen::MatrixXd gn = Eigen::MatrixXd::Zero(m, m);
  for (int c = 0; c < m; ++c)
    for (int d = 0; d < m; ++d) {
      double s = 0.0;
      for (int l = 0; l < m; ++l) s += first[static_cast<std::size_t>((l * m + c) * m + d)] * e1(l);
      gn(c, d) = s;
    }
  const Eigen::MatrixXd t = frame.vectors.rightCols(m - 1);
  return SecondFundamentalForm(Eigen::MatrixXd(t.transpose() * gn * t));
}

}  // namespace

std::string format_point(std::span<const double> x) {
  std::ostringstream os;
  os.precision(17);
  os << "x=(";
  for (std::size_t i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
  os << ")";
  return os.str();
}

MetricChart::MetricChart(std::string name, std::vector<std::string> coordinates,
                         std::vector<Interval> domain, std::vector<MetricEntry> entries,
                         Signature signature, bool boundary,
                         std::optional<Expression> volume_weight)
    : name_(std::move(name)),
      coordinates_(std::move(coordinates)),
      domain_(std::move(domain)),
      entries_(std::move(entries)),
      signature_(std::move(signature)),
      boundary_(boundary),
      volume_weight_(std::move(volume_weight)) {
  const int m = dim();
  if (m < 1 || m > kMaxChartDim)
    throw DomainError("chart dimension must lie in 1.." + std::to_string(kMaxChartDim));
  if (static_cast<int>(domain_.size()) != m)
    throw DomainError("chart needs one domain interval per coordinate");
  if (signature_.dim() != m) throw DomainError("signature length differs from chart dimension");
  for (const Interval& iv : domain_)
    if (!(iv.lo < iv.hi)) throw DomainError("empty coordinate interval");
  std::vector<int> seen(static_cast<std::size_t>(m * m), 0);
  for (MetricEntry& e : entries_) {
    if (e.i > e.j) std::swap(e.i, e.j);
    if (e.i < 1 || e.j > m) throw DomainError("metric entry index out of range");
    int& s = seen[static_cast<std::size_t>((e.i - 1) * m + (e.j - 1))];
    if (s) throw DomainError("duplicate metric entry");
    s = 1;
  }
}

Expression MetricChart::entry(int i, int j) const {
  if (i > j) std::swap(i, j);
  for (const MetricEntry& e : entries_)
    if (e.i == i && e.j == j) return e.expr;
  return Expression::constant(0.0);
}

void MetricChart::check_in_domain(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim())
    throw DomainError("point has " + std::to_string(x.size()) + " coordinates, chart has " +
                      std::to_string(dim()));
  for (std::size_t k = 0; k < x.size(); ++k) {
    const Interval& iv = domain_[k];
    const double slack = kDomainSlack * std::max(1.0, iv.hi - iv.lo);
    if (!(x[k] >= iv.lo - slack && x[k] <= iv.hi + slack))
      throw DomainError("point outside chart domain: " + format_point(x));
  }
}

MetricJet metric_jet(const MetricChart& chart, std::span<const double> x) {
  chart.check_in_domain(x);
  switch (chart.dim()) {
    case 1: return jet_n<1>(chart, x);
    case 2: return jet_n<2>(chart, x);
    case 3: return jet_n<3>(chart, x);
    case 4: return jet_n<4>(chart, x);
    case 5: return jet_n<5>(chart, x);
    case 6: return jet_n<6>(chart, x);
    default: throw DomainError("unsupported chart dimension");
  }
}

Eigen::MatrixXd metric_at(const MetricChart& chart, std::span<const double> x) {
  chart.check_in_domain(x);
  const int m = chart.dim();
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(m, m);
  for (const MetricEntry& e : chart.entries()) {
    const double v = e.expr(x);
    g(e.i - 1, e.j - 1) = v;
    g(e.j - 1, e.i - 1) = v;
  }
  validate_metric(g, chart.signature(), x, "");
  return g;
}

Christoffel christoffel(const MetricChart& chart, std::span<const double> x) {
  const MetricJet jet = metric_jet(chart, x);
  validate_metric(jet.g, chart.signature(), x, "");
  return christoffel_second(jet, christoffel_first(jet), jet.g.inverse());
}

double CoordinateCurvature::symmetry_residual() const {
  const int m = dim_;
  double scale = 0.0;
  for (double v : c_) scale = std::max(scale, std::abs(v));
  double worst = 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k)
        for (int l = 0; l < m; ++l) {
          const double r = c_[idx(i, j, k, l)];
          worst = std::max(worst, std::abs(r + c_[idx(j, i, k, l)]));
          worst = std::max(worst, std::abs(r + c_[idx(i, j, l, k)]));
          worst = std::max(worst, std::abs(r - c_[idx(k, l, i, j)]));
          worst = std::max(worst, std::abs(r + c_[idx(j, k, i, l)] + c_[idx(k, i, j, l)]));
        }
  return worst / std::max(1.0, scale);
}

CoordinateCurvature riemann_from_jet(const MetricJet& jet) {
  const int m = jet.dim;
  const Eigen::MatrixXd ginv = jet.g.inverse();
  const std::vector<double> first = christoffel_first(jet);
  const Christoffel second = christoffel_second(jet, first, ginv);
  auto g1 = [&](int l, int i, int j) {
    return first[static_cast<std::size_t>((l * m + i) * m + j)];
  };
  // d_i Gamma_{l,jk}
  auto dg1 = [&](int i, int l, int j, int k) {
    return 0.5 * (jet.dd(i, j)(k, l) + jet.dd(i, k)(j, l) - jet.dd(i, l)(j, k));
  };
  CoordinateCurvature r(m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k)
        for (int l = 0; l < m; ++l) {
          double v = dg1(i, l, j, k) - dg1(j, l, i, k);
          for (int q = 0; q < m; ++q)
            v += -g1(q, i, l) * second.at0(q, j, k) + g1(q, j, l) * second.at0(q, i, k);
          r.at0(i, j, k, l) = v;
        }
  return r;
}

CoordinateCurvature riemann_at(const MetricChart& chart, std::span<const double> x) {
  const MetricJet jet = metric_jet(chart, x);
  validate_metric(jet.g, chart.signature(), x, "");
  return riemann_from_jet(jet);
}

PointFrame frame_from_metric(const Eigen::MatrixXd& g, std::span<const double> x,
                             bool boundary_adapted) {
  const int m = static_cast<int>(g.rows());
  PointFrame f{std::vector<double>(x.begin(), x.end()), Eigen::MatrixXd::Zero(m, m),
               Signature::riemannian(m), boundary_adapted};
  std::vector<int> signs;
  std::vector<Eigen::VectorXd> done;

  auto orthonormalize = [&](Eigen::VectorXd v, const char* what) {
    for (std::size_t j = 0; j < done.size(); ++j)
      v -= signs[j] * g_of(g, v, done[j]) * done[j];
    const double n = g_of(g, v, v);
    if (std::abs(n) <= kNullTolerance * g_scale(g, v) || n == 0.0)
      throw NullDirectionError(std::string("null ") + what + " in Gram-Schmidt at " +
                               format_point(x));
    const int s = n > 0.0 ? 1 : -1;
    signs.push_back(s);
    done.push_back(v / std::sqrt(std::abs(n)));
  };

  int first_tangential = 0;
  if (boundary_adapted) {
    // Normal covector dx_1 raised by g; g(N, dx_1) = g^{11} fixes the inward side.
    const Eigen::MatrixXd ginv = g.inverse();
    Eigen::VectorXd nvec = ginv.col(0);
    const double g11 = ginv(0, 0);
    if (g11 < 0.0) nvec = -nvec;
    orthonormalize(nvec, "boundary normal");
    first_tangential = 1;
  }
  for (int i = first_tangential; i < m; ++i) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(m);
    v(i) = 1.0;
    orthonormalize(v, "coordinate direction");
  }
  for (int i = 0; i < m; ++i) f.vectors.col(i) = done[static_cast<std::size_t>(i)];
  f.signs = Signature(signs);
  return f;
}

PointFrame orthonormal_frame_at(const MetricChart& chart, std::span<const double> x,
                                bool boundary_adapted) {
  if (boundary_adapted) {
    if (!chart.has_boundary()) throw DomainError("chart has no boundary face");
    chart.check_in_domain(x);
    const Interval& iv = chart.domain()[0];
    if (std::abs(x[0] - iv.lo) > kDomainSlack * std::max(1.0, iv.hi - iv.lo))
      throw DomainError("point is not on the boundary face: " + format_point(x));
  }
  const Eigen::MatrixXd g = metric_at(chart, x);
  return frame_from_metric(g, x, boundary_adapted);
}

AlgebraicCurvature curvature_in_frame(const CoordinateCurvature& r, const PointFrame& frame) {
  if (r.dim() != frame.vectors.rows()) throw DomainError("curvature and frame dimensions differ");
  return AlgebraicCurvature::symmetrized(r.dim(), r.components()).transformed(frame.vectors);
}

SymTwoTensor frame_components(const Eigen::MatrixXd& h_coord, const PointFrame& frame) {
  return SymTwoTensor(Eigen::MatrixXd(frame.vectors.transpose() * h_coord * frame.vectors));
}

SecondFundamentalForm second_fundamental_form(const MetricChart& chart,
                                              std::span<const double> y) {
  const PointFrame frame = orthonormal_frame_at(chart, y, true);
  return l_from_jet(metric_jet(chart, y), frame);
}

double volume_density(const MetricChart& chart, std::span<const double> x) {
  if (chart.volume_weight()) return std::abs((*chart.volume_weight())(x));
  return std::sqrt(std::abs(metric_at(chart, x).determinant()));
}

double boundary_volume_density(const MetricChart& chart, std::span<const double> y) {
  const Eigen::MatrixXd g = metric_at(chart, y);
  const int m = chart.dim();
  if (m == 1) return 1.0;
  return std::sqrt(std::abs(g.bottomRightCorner(m - 1, m - 1).determinant()));
}

PointGeometry geometry_at(const MetricChart& chart, std::span<const double> x,
                          bool boundary_point) {
  const MetricJet jet = metric_jet(chart, x);
  validate_metric(jet.g, chart.signature(), x, "");
  PointFrame frame = frame_from_metric(jet.g, x, boundary_point);
  AlgebraicCurvature r = curvature_in_frame(riemann_from_jet(jet), frame);
  std::optional<SecondFundamentalForm> l;
  double density = 0.0;
  const int m = chart.dim();
  if (boundary_point) {
    l = l_from_jet(jet, frame);
    density = m == 1 ? 1.0
                     : std::sqrt(std::abs(jet.g.bottomRightCorner(m - 1, m - 1).determinant()));
  } else if (chart.volume_weight()) {
    density = std::abs((*chart.volume_weight())(x));
  } else {
    density = std::sqrt(std::abs(jet.g.determinant()));
  }
  return PointGeometry{std::move(frame), std::move(r), std::move(l), density};
}

MetricChart product_with_circle(const MetricChart& chart_n, int sign) {
  if (sign != 1 && sign != -1) throw DomainError("circle sign must be +1 or -1");
  std::vector<std::string> coords = chart_n.coordinates();
  std::string theta = "theta";
  while (std::find(coords.begin(), coords.end(), theta) != coords.end()) theta += "_";
  coords.push_back(theta);
  std::vector<Interval> domain = chart_n.domain();
  domain.push_back({0.0, 2.0 * std::numbers::pi});
  std::vector<MetricEntry> entries = chart_n.entries();
  const int m = chart_n.dim() + 1;
  entries.push_back({m, m, Expression::constant(static_cast<double>(sign))});
  return MetricChart(chart_n.name() + " x S1", coords, domain, entries,
                     chart_n.signature().appended(sign), chart_n.has_boundary(),
                     chart_n.volume_weight());
}

Eigen::MatrixXd evaluate_entries(int dim, const std::vector<MetricEntry>& h,
                                 std::span<const double> x) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(dim, dim);
  for (const MetricEntry& e : h) {
    const double v = e.expr(x);
    out(e.i - 1, e.j - 1) = v;
    out(e.j - 1, e.i - 1) = v;
  }
  return out;
}

MetricChart perturbed(const MetricChart& chart, const std::vector<MetricEntry>& h, double t) {
  const int m = chart.dim();
  std::vector<MetricEntry> entries = chart.entries();
  for (MetricEntry e : h) {
    if (e.i > e.j) std::swap(e.i, e.j);
    if (e.i < 1 || e.j > m) throw DomainError("perturbation entry index out of range");
    if (t == 0.0) continue;
    const Expression term = Expression::constant(t) * e.expr;
    auto it = std::find_if(entries.begin(), entries.end(),
                           [&](const MetricEntry& g) { return g.i == e.i && g.j == e.j; });
    if (it == entries.end())
      entries.push_back({e.i, e.j, term});
    else
      it->expr = it->expr + term;
  }
  // A weight override describes the unperturbed metric only.
  std::optional<Expression> weight = t == 0.0 ? chart.volume_weight() : std::nullopt;
  MetricChart out(chart.name(), chart.coordinates(), chart.domain(), std::move(entries),
                  chart.signature(), chart.has_boundary(), std::move(weight));
  if (t == 0.0) return out;

  static constexpr std::array<double, 3> kProbe = {0.2113248654051871, 0.5, 0.7886751345948129};
  std::vector<int> digit(static_cast<std::size_t>(m), 0);
  std::vector<double> x(static_cast<std::size_t>(m));
  const std::string context = " for t=" + std::to_string(t);
  while (true) {
    for (int k = 0; k < m; ++k) {
      const Interval& iv = out.domain()[static_cast<std::size_t>(k)];
      x[static_cast<std::size_t>(k)] = iv.lo + kProbe[static_cast<std::size_t>(digit[k])] * (iv.hi - iv.lo);
    }
    Eigen::MatrixXd g = evaluate_entries(m, out.entries(), x);
    validate_metric(g, out.signature(), x, context);
    int k = 0;
    while (k < m && ++digit[static_cast<std::size_t>(k)] == 3) digit[static_cast<std::size_t>(k++)] = 0;
    if (k == m) break;
  }
  return out;
}

}  // namespace gbcurv
