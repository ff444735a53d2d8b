#include "gbcurv/tensor_core.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace gbcurv {

Signature::Signature(std::vector<int> signs) : signs_(std::move(signs)) {
  if (signs_.empty()) throw DomainError("signature must have dimension >= 1");
  for (int s : signs_) {
    if (s != 1 && s != -1) throw DomainError("signature entries must be +1 or -1");
    if (s == -1) ++p_;
  }
}

Signature Signature::riemannian(int dim) {
  if (dim < 1) throw DomainError("signature must have dimension >= 1");
  return Signature(std::vector<int>(static_cast<std::size_t>(dim), 1));
}

Signature Signature::with_timelike(int dim, int timelike) {
  if (dim < 1 || timelike < 0 || timelike > dim)
    throw DomainError("invalid signature counts");
  std::vector<int> s(static_cast<std::size_t>(dim), 1);
  std::fill_n(s.begin(), timelike, -1);
  return Signature(std::move(s));
}

int Signature::operator()(int i) const {
  if (i < 1 || i > dim()) throw DomainError("signature index out of range");
  return signs_[static_cast<std::size_t>(i - 1)];
}

Eigen::MatrixXd Signature::eta() const {
  Eigen::MatrixXd e = Eigen::MatrixXd::Zero(dim(), dim());
  for (int i = 0; i < dim(); ++i) e(i, i) = at0(i);
  return e;
}

Signature Signature::appended(int sign) const {
  auto s = signs_;
  s.push_back(sign);
  return Signature(std::move(s));
}

Signature Signature::tangential() const {
  if (dim() < 2) throw DomainError("boundary of a 1-dimensional frame is empty");
  return Signature(std::vector<int>(signs_.begin() + 1, signs_.end()));
}

std::string Signature::to_string() const {
  std::string out;
  for (int s : signs_) out += (s > 0 ? '+' : '-');
  return out;
}

double generalized_delta(const Signature& signs, std::span<const int> upper,
                         std::span<const int> lower) {
  if (upper.size() != lower.size())
    throw DomainError("generalized_delta: index lists differ in length");
  const int m = signs.dim();
  for (int i : upper)
    if (i < 1 || i > m) throw DomainError("generalized_delta: index out of range");
  for (int i : lower)
    if (i < 1 || i > m) throw DomainError("generalized_delta: index out of range");

  const std::size_t n = upper.size();
  // position of each upper entry inside lower; sign of the permutation
  std::vector<int> perm(n);
  std::vector<bool> used(n, false);
  double xi = 1.0;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < a; ++b)
      if (upper[a] == upper[b]) return 0.0;
    bool found = false;
    for (std::size_t b = 0; b < n; ++b) {
      if (!used[b] && lower[b] == upper[a]) {
        used[b] = true;
        perm[a] = static_cast<int>(b);
        found = true;
        break;
      }
    }
    if (!found) return 0.0;
    xi *= signs(upper[a]);
  }
  int inversions = 0;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      if (perm[a] > perm[b]) ++inversions;
  return (inversions % 2 == 0 ? 1.0 : -1.0) * xi;
}

// ---------------------------------------------------------------------------

SymTwoTensor::SymTwoTensor(int dim) {
  if (dim < 1) throw DomainError("tensor dimension must be >= 1");
  m_ = Eigen::MatrixXd::Zero(dim, dim);
}

SymTwoTensor::SymTwoTensor(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols() || a.rows() < 1)
    throw DomainError("SymTwoTensor needs a non-empty square matrix");
  m_ = Eigen::MatrixXd(a.rows(), a.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double v = 0.5 * (a(i, j) + a(j, i));
      m_(i, j) = v;
      m_(j, i) = v;
    }
}

void SymTwoTensor::set(int i, int j, double v) {
  if (i < 1 || j < 1 || i > dim() || j > dim())
    throw DomainError("SymTwoTensor index out of range");
  m_(i - 1, j - 1) = v;
  m_(j - 1, i - 1) = v;
}

double SymTwoTensor::pair(const SymTwoTensor& other) const {
  if (other.dim() != dim()) throw DomainError("pairing tensors of different dimension");
  return m_.cwiseProduct(other.m_).sum();
}

SymTwoTensor SymTwoTensor::covariant_transform(const Eigen::MatrixXd& o) const {
  return SymTwoTensor(Eigen::MatrixXd(o.transpose() * m_ * o));
}

SymTwoTensor SymTwoTensor::contravariant_transform(const Eigen::MatrixXd& o) const {
  const Eigen::MatrixXd inv = o.inverse();
  return SymTwoTensor(Eigen::MatrixXd(inv * m_ * inv.transpose()));
}

SecondFundamentalForm::SecondFundamentalForm(SymTwoTensor components)
    : l_(std::move(components)) {}

// ---------------------------------------------------------------------------

AlgebraicCurvature::AlgebraicCurvature(int dim) : dim_(dim) {
  if (dim < 1) throw DomainError("curvature dimension must be >= 1");
  c_.assign(static_cast<std::size_t>(dim) * dim * dim * dim, 0.0);
}

void AlgebraicCurvature::set0(int i, int j, int k, int l, double v) {
  c_[offset(i, j, k, l)] = v;
  c_[offset(j, i, k, l)] = -v;
  c_[offset(i, j, l, k)] = -v;
  c_[offset(j, i, l, k)] = v;
  c_[offset(k, l, i, j)] = v;
  c_[offset(l, k, i, j)] = -v;
  c_[offset(k, l, j, i)] = -v;
  c_[offset(l, k, j, i)] = v;
}

void AlgebraicCurvature::set(int i, int j, int k, int l, double v) {
  if (std::min({i, j, k, l}) < 1 || std::max({i, j, k, l}) > dim_)
    throw DomainError("curvature index out of range");
  if ((i == j || k == l) && v != 0.0)
    throw DomainError("curvature components with a repeated pair index vanish");
  set0(i - 1, j - 1, k - 1, l - 1, v);
}

AlgebraicCurvature AlgebraicCurvature::symmetrized(int dim,
                                                   std::span<const double> raw) {
  AlgebraicCurvature r(dim);
  if (raw.size() != r.c_.size()) throw DomainError("curvature array has wrong size");
  auto at = [&](int i, int j, int k, int l) { return raw[r.offset(i, j, k, l)]; };
  for (int i = 0; i < dim; ++i)
    for (int j = i + 1; j < dim; ++j)
      for (int k = 0; k < dim; ++k)
        for (int l = k + 1; l < dim; ++l) {
          // visit each orbit once: (i,j) <= (k,l) lexicographically
          if (std::pair(i, j) > std::pair(k, l)) continue;
          const double v = (at(i, j, k, l) - at(j, i, k, l) - at(i, j, l, k) +
                            at(j, i, l, k) + at(k, l, i, j) - at(l, k, i, j) -
                            at(k, l, j, i) + at(l, k, j, i)) /
                           8.0;
          r.set0(i, j, k, l, v);
        }
  return r;
}

AlgebraicCurvature AlgebraicCurvature::project(int dim, std::span<const double> raw) {
  AlgebraicCurvature shape(dim);
  const std::size_t n = shape.c_.size();
  if (raw.size() != n) throw DomainError("curvature array has wrong size");
  auto off = [&](int i, int j, int k, int l) { return shape.offset(i, j, k, l); };

  std::vector<double> a(n), b(n), c(n), d(n);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      for (int k = 0; k < dim; ++k)
        for (int l = 0; l < dim; ++l)
          a[off(i, j, k, l)] = 0.5 * (raw[off(i, j, k, l)] - raw[off(j, i, k, l)]);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      for (int k = 0; k < dim; ++k)
        for (int l = 0; l < dim; ++l)
          b[off(i, j, k, l)] = 0.5 * (a[off(i, j, k, l)] - a[off(i, j, l, k)]);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      for (int k = 0; k < dim; ++k)
        for (int l = 0; l < dim; ++l)
          c[off(i, j, k, l)] = 0.5 * (b[off(i, j, k, l)] + b[off(k, l, i, j)]);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      for (int k = 0; k < dim; ++k)
        for (int l = 0; l < dim; ++l)
          d[off(i, j, k, l)] =
              c[off(i, j, k, l)] - (c[off(i, j, k, l)] + c[off(j, k, i, l)] +
                                    c[off(k, i, j, l)]) / 3.0;
  // canonical write-through
  return symmetrized(dim, d);
}

double AlgebraicCurvature::max_abs() const {
  double mx = 0.0;
  for (double v : c_) mx = std::max(mx, std::abs(v));
  return mx;
}

double AlgebraicCurvature::bianchi_residual() const {
  double mx = 0.0;
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j)
      for (int k = 0; k < dim_; ++k)
        for (int l = 0; l < dim_; ++l)
          mx = std::max(mx, std::abs(at0(i, j, k, l) + at0(j, k, i, l) +
                                     at0(k, i, j, l)));
  return mx / std::max(1.0, max_abs());
}

double AlgebraicCurvature::symmetry_residual() const {
  double mx = 0.0;
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j)
      for (int k = 0; k < dim_; ++k)
        for (int l = 0; l < dim_; ++l) {
          const double v = at0(i, j, k, l);
          mx = std::max(mx, std::abs(v + at0(j, i, k, l)) +
                                std::abs(v - at0(k, l, i, j)));
        }
  return mx;
}

AlgebraicCurvature AlgebraicCurvature::transformed(const Eigen::MatrixXd& o) const {
  const int m = dim_;
  if (o.rows() != m || o.cols() != m) throw DomainError("frame change has wrong size");
  // contract one slot at a time: m^5 work instead of m^8
  std::vector<double> cur(c_), next(c_.size());
  for (int slot = 0; slot < 4; ++slot) {
    std::array<int, 4> idx{};
    for (idx[0] = 0; idx[0] < m; ++idx[0])
      for (idx[1] = 0; idx[1] < m; ++idx[1])
        for (idx[2] = 0; idx[2] < m; ++idx[2])
          for (idx[3] = 0; idx[3] < m; ++idx[3]) {
            double s = 0.0;
            auto src = idx;
            for (int a = 0; a < m; ++a) {
              src[static_cast<std::size_t>(slot)] = a;
              s += o(a, idx[static_cast<std::size_t>(slot)]) *
                   cur[offset(src[0], src[1], src[2], src[3])];
            }
            next[offset(idx[0], idx[1], idx[2], idx[3])] = s;
          }
    std::swap(cur, next);
  }
  return symmetrized(m, cur);
}

AlgebraicCurvature AlgebraicCurvature::tangential() const {
  if (dim_ < 2) throw DomainError("tangential block of a 1-dimensional tensor is empty");
  const int t = dim_ - 1;
  AlgebraicCurvature out(t);
  for (int i = 0; i < t; ++i)
    for (int j = 0; j < t; ++j)
      for (int k = 0; k < t; ++k)
        for (int l = 0; l < t; ++l)
          out.c_[out.offset(i, j, k, l)] = at0(i + 1, j + 1, k + 1, l + 1);
  return out;
}

AlgebraicCurvature random_curvature(int dim, std::uint64_t seed) {
  if (dim < 1) throw DomainError("random_curvature: dim must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> raw(static_cast<std::size_t>(dim) * dim * dim * dim);
  for (double& v : raw) v = u(rng);
  return AlgebraicCurvature::project(dim, raw);
}

AlgebraicCurvature constant_curvature(int dim, double kappa, const Signature& signs) {
  if (dim < 2) throw DomainError("constant_curvature: dim must be >= 2");
  if (signs.dim() != dim) throw DomainError("constant_curvature: signature dimension mismatch");
  AlgebraicCurvature r(dim);
  for (int i = 1; i <= dim; ++i)
    for (int j = i + 1; j <= dim; ++j) r.set(i, j, j, i, kappa * signs(i) * signs(j));
  return r;
}

Eigen::MatrixXd plane_transformation(const Signature& signs, int a, int b, double theta) {
  const int m = signs.dim();
  if (a == b || a < 1 || b < 1 || a > m || b > m)
    throw DomainError("plane_transformation: need distinct indices in range");
  Eigen::MatrixXd t = Eigen::MatrixXd::Identity(m, m);
  const int i = a - 1, j = b - 1;
  if (signs(a) == signs(b)) {
    t(i, i) = std::cos(theta);
    t(j, i) = std::sin(theta);
    t(i, j) = -std::sin(theta);
    t(j, j) = std::cos(theta);
  } else {
    t(i, i) = std::cosh(theta);
    t(j, i) = std::sinh(theta);
    t(i, j) = std::sinh(theta);
    t(j, j) = std::cosh(theta);
  }
  return t;
}

Eigen::MatrixXd random_frame_change(const Signature& signs, std::uint64_t seed,
                                    double boost_range) {
  const int m = signs.dim();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(-M_PI, M_PI);
  std::uniform_real_distribution<double> rapidity(-boost_range, boost_range);
  Eigen::MatrixXd o = Eigen::MatrixXd::Identity(m, m);
  for (int a = 1; a <= m; ++a)
    for (int b = a + 1; b <= m; ++b) {
      const double th = signs(a) == signs(b) ? angle(rng) : rapidity(rng);
      o = o * plane_transformation(signs, a, b, th);
    }
  return o;
}

}  // namespace gbcurv
