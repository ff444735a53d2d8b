#include "gbcurv/verification.hpp"

#include "gbcurv/functionals.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace gbcurv {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// f(i) for i in [0, count) on worker threads. If any node throws, the
// exception of the lowest failing index is rethrown.
template <class F>
std::vector<double> evaluate_nodes(std::size_t count, const F& f) {
  std::vector<double> out(count, 0.0);
  const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t workers = std::min(hw, count / 64 + 1);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) out[i] = f(i);
    return out;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::size_t> error_index(workers, count);
  std::vector<std::thread> threads;
  const std::size_t chunk = (count + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      const std::size_t lo = w * chunk, hi = std::min(count, lo + chunk);
      for (std::size_t i = lo; i < hi; ++i) {
        try {
          out[i] = f(i);
        } catch (...) {
          errors[w] = std::current_exception();
          error_index[w] = i;
          return;
        }
      }
    });
  }
  for (auto& t : threads) t.join();
  std::size_t best = workers;
  for (std::size_t w = 0; w < workers; ++w)
    if (errors[w] && (best == workers || error_index[w] < error_index[best])) best = w;
  if (best != workers) std::rethrow_exception(errors[best]);
  return out;
}

std::vector<double> boundary_point(const MetricChart& chart, std::span<const double> z) {
  std::vector<double> y(static_cast<std::size_t>(chart.dim()));
  y[0] = chart.domain()[0].lo;
  std::copy(z.begin(), z.end(), y.begin() + 1);
  return y;
}

void require_boundary(const MetricChart& chart) {
  if (!chart.has_boundary()) throw DomainError("chart '" + chart.name() + "' has no boundary face");
}

// Rethrows metric failures of a perturbed chart with the offending t.
template <class F>
double at_step(double t, const F& f) {
  try {
    return f();
  } catch (const DegenerateMetricError& e) {
    throw DegenerateMetricError(std::string(e.what()) + " for t=" + std::to_string(t));
  } catch (const NullDirectionError& e) {
    throw NullDirectionError(std::string(e.what()) + " for t=" + std::to_string(t));
  }
}

// Chart without a volume weight so every evaluation uses sqrt|det g|.
MetricChart unweighted(const MetricChart& c) {
  return MetricChart(c.name(), c.coordinates(), c.domain(), c.entries(), c.signature(),
                     c.has_boundary());
}

struct FdResult {
  double richardson;
  double fine;
  double bound;
};

template <class F>
FdResult central_difference(double s, const F& phi) {
  const double d1 = (phi(s) - phi(-s)) / (2.0 * s);
  const double d2 = (phi(s / 2) - phi(-s / 2)) / s;
  return {(4.0 * d2 - d1) / 3.0, d2, std::abs(d1 - d2)};
}

double tangential_pair(const SymTwoTensor& h_frame, const SymTwoTensor& f) {
  const int d = f.dim();
  double s = 0.0;
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) s += h_frame.at0(a + 1, b + 1) * f.at0(a, b);
  return s;
}

double full_pair(const SymTwoTensor& h_frame, const SymTwoTensor& e) {
  return (h_frame.matrix().array() * e.matrix().array()).sum();
}

}  // namespace

std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int order) {
  if (order < 1) throw DomainError("quadrature order must be positive");
  const int n = order;
  std::vector<double> x(static_cast<std::size_t>(n)), w(static_cast<std::size_t>(n));
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    const double wi = 2.0 / ((1.0 - z * z) * dp * dp);
    x[static_cast<std::size_t>(i)] = -z;
    x[static_cast<std::size_t>(n - 1 - i)] = z;
    w[static_cast<std::size_t>(i)] = wi;
    w[static_cast<std::size_t>(n - 1 - i)] = wi;
  }
  if (n % 2) x[static_cast<std::size_t>(n / 2)] = 0.0;
  return {x, w};
}

QuadratureRule::QuadratureRule(std::vector<Interval> domain, int order)
    : domain_(std::move(domain)), order_(order) {
  const auto [x, w] = gauss_legendre(order);
  for (const Interval& iv : domain_) {
    if (!(iv.hi > iv.lo)) throw DomainError("quadrature interval must have hi > lo");
    const double half = 0.5 * (iv.hi - iv.lo), mid = 0.5 * (iv.hi + iv.lo);
    std::vector<double> nx(x.size()), nw(w.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      nx[i] = mid + half * x[i];
      nw[i] = half * w[i];
    }
    nodes_.push_back(std::move(nx));
    weights_.push_back(std::move(nw));
  }
}

std::size_t QuadratureRule::size() const {
  std::size_t n = 1;
  for (std::size_t k = 0; k < domain_.size(); ++k) n *= static_cast<std::size_t>(order_);
  return n;
}

double QuadratureRule::node(std::size_t index, std::span<double> x) const {
  double w = 1.0;
  const auto o = static_cast<std::size_t>(order_);
  for (std::size_t k = domain_.size(); k-- > 0;) {
    const std::size_t i = index % o;
    index /= o;
    x[k] = nodes_[k][i];
    w *= weights_[k][i];
  }
  return w;
}

QuadratureRule interior_rule(const MetricChart& chart, int order) {
  return QuadratureRule(chart.domain(), order);
}

QuadratureRule boundary_rule(const MetricChart& chart, int order) {
  require_boundary(chart);
  return QuadratureRule(std::vector<Interval>(chart.domain().begin() + 1, chart.domain().end()),
                        order);
}

VerificationReport VerificationReport::compare(std::string test, double value, double reference,
                                               double tol, Criterion criterion) {
  VerificationReport r;
  r.test = std::move(test);
  r.value = value;
  r.reference = reference;
  r.abs_err = std::abs(value - reference);
  r.rel_err = reference != 0.0 ? r.abs_err / std::abs(reference) : r.abs_err;
  r.tol = tol;
  r.criterion = criterion;
  switch (criterion) {
    case Criterion::Absolute: r.pass = r.abs_err <= tol; break;
    case Criterion::Relative: r.pass = r.rel_err <= tol; break;
    case Criterion::Witness: r.pass = value > tol; break;
  }
  if (!std::isfinite(value)) r.pass = false;
  return r;
}

double VerificationReport::detail(const std::string& name) const {
  for (const auto& [k, v] : details)
    if (k == name) return v;
  throw std::out_of_range("no report detail named " + name);
}

std::string criterion_name(Criterion c) {
  switch (c) {
    case Criterion::Absolute: return "absolute";
    case Criterion::Relative: return "relative";
    case Criterion::Witness: return "witness";
  }
  return "?";
}

double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 16) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t h = v.size() / 2;
  return pairwise_sum(v.first(h)) + pairwise_sum(v.subspan(h));
}

double integrate_interior(const MetricChart& chart, const PointIntegrand& f,
                          const QuadratureRule& rule) {
  if (rule.dim() != chart.dim()) throw DomainError("rule and chart dimensions differ");
  const auto vals = evaluate_nodes(rule.size(), [&](std::size_t i) {
    std::vector<double> x(static_cast<std::size_t>(chart.dim()));
    const double w = rule.node(i, x);
    return w * f(x) * volume_density(chart, x);
  });
  return pairwise_sum(vals);
}

double integrate_boundary(const MetricChart& chart, const PointIntegrand& f,
                          const QuadratureRule& rule) {
  require_boundary(chart);
  if (rule.dim() != chart.dim() - 1) throw DomainError("rule must cover the boundary face");
  const auto vals = evaluate_nodes(rule.size(), [&](std::size_t i) {
    std::vector<double> z(static_cast<std::size_t>(rule.dim()));
    const double w = rule.node(i, z);
    const std::vector<double> y = boundary_point(chart, z);
    return w * f(y) * boundary_volume_density(chart, y);
  });
  return pairwise_sum(vals);
}

double integrate_geometry_interior(const MetricChart& chart, const GeometryIntegrand& f,
                                   const QuadratureRule& rule) {
  if (rule.dim() != chart.dim()) throw DomainError("rule and chart dimensions differ");
  const auto vals = evaluate_nodes(rule.size(), [&](std::size_t i) {
    std::vector<double> x(static_cast<std::size_t>(chart.dim()));
    const double w = rule.node(i, x);
    const PointGeometry pg = geometry_at(chart, x, false);
    return w * f(pg) * pg.density;
  });
  return pairwise_sum(vals);
}

double integrate_geometry_boundary(const MetricChart& chart, const GeometryIntegrand& f,
                                   const QuadratureRule& rule) {
  require_boundary(chart);
  if (rule.dim() != chart.dim() - 1) throw DomainError("rule must cover the boundary face");
  const auto vals = evaluate_nodes(rule.size(), [&](std::size_t i) {
    std::vector<double> z(static_cast<std::size_t>(rule.dim()));
    const double w = rule.node(i, z);
    const PointGeometry pg = geometry_at(chart, boundary_point(chart, z), true);
    return w * f(pg) * pg.density;
  });
  return pairwise_sum(vals);
}

namespace {

VerificationReport chi_report(std::string test, double value, std::optional<int> chi,
                              double tol) {
  const double nearest = std::round(value);
  auto r = VerificationReport::compare(std::move(test), value,
                                       chi ? static_cast<double>(*chi) : nearest, tol,
                                       Criterion::Absolute);
  r.details.emplace_back("nearest_integer", nearest);
  r.details.emplace_back("distance_to_integer", std::abs(value - nearest));
  return r;
}

}  // namespace

VerificationReport gauss_bonnet_closed(const MetricChart& chart, std::optional<int> chi,
                                       int order, double tol) {
  const auto t0 = Clock::now();
  const int m = chart.dim();
  double value = 0.0;
  // E_{m,m} vanishes identically for odd m.
  if (m % 2 == 0)
    value = integrate_geometry_interior(
        chart,
        [m](const PointGeometry& pg) { return euler_form(pg.curvature, pg.frame.signs, m); },
        interior_rule(chart, order));
  auto r = chi_report("gauss-bonnet " + chart.name(), value, chi, tol);
  r.details.emplace_back("order", order);
  r.seconds = seconds_since(t0);
  return r;
}

VerificationReport gauss_bonnet_boundary(const MetricChart& chart, std::optional<int> chi,
                                         int order, double tol) {
  require_boundary(chart);
  const auto t0 = Clock::now();
  const int m = chart.dim();
  if (m < 2) throw DomainError("boundary Gauss-Bonnet needs dimension at least 2");
  double interior = 0.0;
  if (m % 2 == 0)
    interior = integrate_geometry_interior(
        chart,
        [m](const PointGeometry& pg) { return euler_form(pg.curvature, pg.frame.signs, m); },
        interior_rule(chart, order));
  const double boundary = integrate_geometry_boundary(
      chart,
      [m](const PointGeometry& pg) {
        return boundary_transgression(pg.curvature.tangential(), *pg.second_fundamental_form,
                                      pg.frame.signs.tangential(), m);
      },
      boundary_rule(chart, order));
  auto r = chi_report("gauss-bonnet-boundary " + chart.name(), interior + boundary, chi, tol);
  r.details.emplace_back("interior", interior);
  r.details.emplace_back("boundary", boundary);
  r.details.emplace_back("order", order);
  r.seconds = seconds_since(t0);
  return r;
}

namespace {

double interior_functional(const MetricChart& c, int n, const QuadratureRule& rule) {
  if (n == 0)
    return integrate_geometry_interior(c, [](const PointGeometry&) { return 1.0; }, rule);
  return integrate_geometry_interior(
      c, [n](const PointGeometry& pg) { return euler_form(pg.curvature, pg.frame.signs, n); },
      rule);
}

double boundary_functional(const MetricChart& c, int n, const QuadratureRule& rule) {
  if (n < 1) return 0.0;
  return integrate_geometry_boundary(
      c,
      [n](const PointGeometry& pg) {
        return boundary_transgression(pg.curvature.tangential(), *pg.second_fundamental_form,
                                      pg.frame.signs.tangential(), n);
      },
      rule);
}

double interior_rhs(const MetricChart& c, const std::vector<MetricEntry>& h, int n,
                    const QuadratureRule& rule) {
  const int m = c.dim();
  return 0.5 * integrate_geometry_interior(
                   c,
                   [&](const PointGeometry& pg) {
                     const SymTwoTensor hf =
                         frame_components(evaluate_entries(m, h, pg.frame.point), pg.frame);
                     if (n == 0) {
                       double tr = 0.0;
                       for (int i = 0; i < m; ++i) tr += pg.frame.signs.at0(i) * hf.at0(i, i);
                       return tr;
                     }
                     return full_pair(hf, interior_el_tensor(pg.curvature, pg.frame.signs, n));
                   },
                   rule);
}

double boundary_rhs(const MetricChart& c, const std::vector<MetricEntry>& h, int n,
                    const QuadratureRule& rule) {
  if (n < 1) return 0.0;
  const int m = c.dim();
  return 0.5 * integrate_geometry_boundary(
                   c,
                   [&](const PointGeometry& pg) {
                     const SymTwoTensor hf =
                         frame_components(evaluate_entries(m, h, pg.frame.point), pg.frame);
                     const SymTwoTensor f = boundary_el_tensor(
                         pg.curvature.tangential(), *pg.second_fundamental_form,
                         pg.frame.signs.tangential(), n);
                     return tangential_pair(hf, f);
                   },
                   rule);
}

VerificationReport variational_report(std::string test, const FdResult& fd, double rhs,
                                      const VariationalOptions& opt) {
  auto r = VerificationReport::compare(std::move(test), fd.richardson, rhs, opt.tol,
                                       opt.criterion);
  r.details.emplace_back("lhs", fd.richardson);
  r.details.emplace_back("rhs", rhs);
  r.details.emplace_back("lhs_single_step", fd.fine);
  r.details.emplace_back("fd_error_bound", fd.bound);
  r.details.emplace_back("fd_step", opt.fd_step);
  r.details.emplace_back("order", opt.order);
  return r;
}

}  // namespace

VerificationReport variational_check_interior(const MetricChart& chart,
                                              const std::vector<MetricEntry>& h, int n,
                                              const VariationalOptions& opt) {
  const auto t0 = Clock::now();
  if (n < 0) throw DomainError("degree n must be non-negative");
  if (n > chart.dim()) throw DomainError("degree n exceeds the dimension");
  const MetricChart base = unweighted(chart);
  const QuadratureRule rule = interior_rule(base, opt.order);
  const FdResult fd = central_difference(opt.fd_step, [&](double t) {
    return at_step(t, [&] { return interior_functional(perturbed(base, h, t), n, rule); });
  });
  const double rhs = interior_rhs(base, h, n, rule);
  auto r = variational_report("variation " + chart.name() + " n=" + std::to_string(n), fd, rhs,
                              opt);
  r.seconds = seconds_since(t0);
  return r;
}

VerificationReport variational_check_boundary(const MetricChart& chart,
                                              const std::vector<MetricEntry>& h, int n,
                                              const VariationalOptions& opt) {
  require_boundary(chart);
  const auto t0 = Clock::now();
  if (n < 0) throw DomainError("degree n must be non-negative");
  if (n > chart.dim()) throw DomainError("degree n exceeds the dimension");
  const MetricChart base = unweighted(chart);
  const QuadratureRule irule = interior_rule(base, opt.order);
  const QuadratureRule brule = boundary_rule(base, opt.order);
  const FdResult fd = central_difference(opt.fd_step, [&](double t) {
    return at_step(t, [&] {
      const MetricChart c = perturbed(base, h, t);
      return interior_functional(c, n, irule) + boundary_functional(c, n, brule);
    });
  });
  const double ri = interior_rhs(base, h, n, irule);
  const double rb = boundary_rhs(base, h, n, brule);
  auto r = variational_report("variation-boundary " + chart.name() + " n=" + std::to_string(n),
                              fd, ri + rb, opt);
  r.details.emplace_back("rhs_interior", ri);
  r.details.emplace_back("rhs_boundary", rb);
  r.seconds = seconds_since(t0);
  return r;
}

VerificationReport restriction_product_check(const MetricChart& chart_n, std::optional<int> n,
                                             int sign, int order, double tol) {
  require_boundary(chart_n);
  const auto t0 = Clock::now();
  const int mn = chart_n.dim();
  const int deg = n.value_or(mn);
  if (deg < 1 || deg > mn) throw DomainError("restriction degree must satisfy 1 <= n <= dim N");
  const MetricChart prod = product_with_circle(chart_n, sign);
  const QuadratureRule rule = boundary_rule(prod, order);
  const int nus = (deg - 1) / 2 + 1;
  // Per node: max deviation over nu, then max |F_N| over nu.
  std::vector<double> scale(rule.size(), 0.0);
  const auto dev = evaluate_nodes(rule.size(), [&](std::size_t i) {
    std::vector<double> z(static_cast<std::size_t>(rule.dim()));
    rule.node(i, z);
    const std::vector<double> y = boundary_point(prod, z);
    const std::vector<double> yn(y.begin(), y.end() - 1);
    const PointGeometry gm = geometry_at(prod, y, true);
    const PointGeometry gn = geometry_at(chart_n, yn, true);
    const int last = prod.dim() - 2;
    const int xi = gm.frame.signs.at0(prod.dim() - 1);
    double worst = 0.0;
    for (int nu = 0; nu < nus; ++nu) {
      const SymTwoTensor fm =
          boundary_el_tensor(gm.curvature.tangential(), *gm.second_fundamental_form,
                             gm.frame.signs.tangential(), deg, nu);
      const double fn = boundary_transgression(gn.curvature.tangential(),
                                               *gn.second_fundamental_form,
                                               gn.frame.signs.tangential(), deg, nu);
      worst = std::max(worst, std::abs(xi * fm.at0(last, last) - fn));
      scale[i] = std::max(scale[i], std::abs(fn));
    }
    return worst;
  });
  const double max_dev = dev.empty() ? 0.0 : *std::max_element(dev.begin(), dev.end());
  auto r = VerificationReport::compare(
      "restriction " + chart_n.name() + (sign > 0 ? " +" : " -") + " n=" + std::to_string(deg),
      max_dev, 0.0, tol, Criterion::Absolute);
  r.details.emplace_back("nodes", static_cast<double>(rule.size()));
  r.details.emplace_back("max_abs_boundary_form",
                         scale.empty() ? 0.0 : *std::max_element(scale.begin(), scale.end()));
  r.seconds = seconds_since(t0);
  return r;
}

std::vector<double> identity_monomials(const AlgebraicCurvature& r, const Signature& signs,
                                       int identity_dim) {
  const int d = r.dim();
  if (signs.dim() != d) throw DomainError("curvature and signature dimensions differ");
  auto x = [&](int i) { return static_cast<double>(signs.at0(i)); };
  auto R = [&](int i, int j, int k, int l) { return r.at0(i, j, k, l); };

  // rho_ij = sum_a R_aija, tau = sum_ij R_ijji.
  Eigen::MatrixXd rho = Eigen::MatrixXd::Zero(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int a = 0; a < d; ++a) rho(i, j) += x(a) * R(a, i, j, a);
  double tau = 0.0;
  for (int i = 0; i < d; ++i) tau += x(i) * rho(i, i);

  if (identity_dim == 1) return {tau};

  double rho2 = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) rho2 += x(i) * x(j) * rho(i, j) * rho(i, j);
  double r2 = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l) r2 += x(i) * x(j) * x(k) * x(l) * R(i, j, k, l) * R(i, j, k, l);

  if (identity_dim == 3) return {tau * tau, rho2, r2};
  if (identity_dim != 5) throw DomainError("identities exist for dimensions 1, 3 and 5");


  // 24 R_aija R_bklb R_jlik
  double t4 = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l)
          t4 += x(i) * x(j) * x(k) * x(l) * rho(i, j) * rho(k, l) * R(j, l, i, k);
  // 16 R_aija R_bjkb R_cikc
  double t5 = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) t5 += x(i) * x(j) * x(k) * rho(i, j) * rho(j, k) * rho(i, k);
  // -24 R_aija R_jkln R_lnik
  double t6 = 0.0;
  // 2 R_ijkl R_klan R_anij
  double t7 = 0.0;
  // -8 R_kaij R_inkl R_jlan
  double t8 = 0.0;
  // S(j,k,i,k') = sum_{l,n} R_jkln R_lnik, indexed (j,k,i,kk).
  const std::size_t dd = static_cast<std::size_t>(d);
  std::vector<double> s(dd * dd * dd * dd, 0.0);
  auto si = [&](int a, int b, int c, int e) {
    return static_cast<std::size_t>(((a * d + b) * d + c) * d + e);
  };
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int c = 0; c < d; ++c)
        for (int e = 0; e < d; ++e) {
          double v = 0.0;
          for (int l = 0; l < d; ++l)
            for (int n = 0; n < d; ++n) v += x(l) * x(n) * R(a, b, l, n) * R(l, n, c, e);
          s[si(a, b, c, e)] = v;
        }
  // t6 = sum_{i,j,k} x_i x_j x_k rho_ij S(j,k,i,k)
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) t6 += x(i) * x(j) * x(k) * rho(i, j) * s[si(j, k, i, k)];
  // t7 = sum_{i,j,a,n} x_i x_j x_a x_n S(i,j,a,n) R_anij
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int a = 0; a < d; ++a)
        for (int n = 0; n < d; ++n) t7 += x(i) * x(j) * x(a) * x(n) * s[si(i, j, a, n)] * R(a, n, i, j);
  // t8 = sum x^6 R_kaij R_inkl R_jlan, brute force.
  for (int k = 0; k < d; ++k)
    for (int a = 0; a < d; ++a)
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
          const double r1 = R(k, a, i, j);
          if (r1 == 0.0) continue;
          const double w1 = x(k) * x(a) * x(i) * x(j);
          for (int n = 0; n < d; ++n)
            for (int l = 0; l < d; ++l) t8 += w1 * x(n) * x(l) * r1 * R(i, n, k, l) * R(j, l, a, n);
        }
  return {tau * tau * tau, tau * rho2, tau * r2, t4, t5, t6, t7, t8};
}

std::vector<double> identity_coefficients(int identity_dim, IdentityCoefficients which) {
  switch (identity_dim) {
    case 1: return {1};
    case 3: return {1, -4, 1};
    case 5:
      if (which == IdentityCoefficients::Printed) return {1, -12, 3, 24, 16, -24, 2, -8};
      return {1, -12, 3, -24, 16, -24, -2, 8};
    default: throw DomainError("identities exist for dimensions 1, 3 and 5");
  }
}

double normalized_identity(const AlgebraicCurvature& r, const Signature& signs,
                           int identity_dim, IdentityCoefficients which) {
  const auto coeff = identity_coefficients(identity_dim, which);
  const auto mono = identity_monomials(r, signs, identity_dim);
  double sum = 0.0, big = 0.0;
  for (std::size_t k = 0; k < mono.size(); ++k) {
    const double t = coeff[k] * mono[k];
    sum += t;
    big = std::max(big, std::abs(t));
  }
  return std::abs(sum) / (1.0 + big);
}

VerificationReport identity_check(int dim, int samples, std::uint64_t seed, double tol,
                                  std::optional<Signature> signs, IdentityCoefficients which) {
  if (dim < 1 || dim > 6) throw DomainError("identity checks cover dimensions 1 to 6");
  if (samples < 1) throw DomainError("at least one sample is required");
  const Signature sig = signs.value_or(Signature::riemannian(dim));
  if (sig.dim() != dim) throw DomainError("signature dimension differs from dim");
  const auto t0 = Clock::now();
  const bool vanishing = dim % 2 == 1;
  const int idim = vanishing ? dim : dim - 1;
  double worst = 0.0;
  int witnesses = 0;
  for (int s = 0; s < samples; ++s) {
    const AlgebraicCurvature r = random_curvature(dim, seed + static_cast<std::uint64_t>(s));
    const double v = normalized_identity(r, sig, idim, which);
    worst = std::max(worst, v);
    if (v > tol) ++witnesses;
  }
  auto rep = VerificationReport::compare(
      "identity dim=" + std::to_string(dim) + " " + sig.to_string() +
          (idim == 5 && which == IdentityCoefficients::Printed ? " printed" : ""),
      worst, 0.0, tol,
      vanishing ? Criterion::Absolute : Criterion::Witness);
  rep.details.emplace_back("identity_dim", idim);
  rep.details.emplace_back("samples", samples);
  rep.details.emplace_back("samples_above_tol", witnesses);
  rep.seconds = seconds_since(t0);
  return rep;
}

std::vector<MetricEntry> pullback_entries(int dim, const std::vector<Expression>& map,
                                          const std::vector<std::vector<Expression>>& ambient) {
  const std::size_t n = map.size();
  if (ambient.size() != n) throw DomainError("ambient tensor size differs from the map");
  for (const auto& row : ambient)
    if (row.size() != n) throw DomainError("ambient tensor must be square");
  std::vector<std::vector<Expression>> jac(n);
  for (std::size_t a = 0; a < n; ++a)
    for (int i = 0; i < dim; ++i) jac[a].push_back(map[a].derivative(i));
  std::vector<MetricEntry> out;
  for (int i = 0; i < dim; ++i)
    for (int j = i; j < dim; ++j) {
      Expression e = Expression::constant(0.0);
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
          if (ambient[a][b].is_zero_constant()) continue;
          const Expression& da = jac[a][static_cast<std::size_t>(i)];
          const Expression& db = jac[b][static_cast<std::size_t>(j)];
          if (da.is_zero_constant() || db.is_zero_constant()) continue;
          e = e + ambient[a][b] * da * db;
        }
      if (!e.is_zero_constant()) out.push_back({i + 1, j + 1, e});
    }
  return out;
}

}  // namespace gbcurv
