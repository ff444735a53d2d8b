#include "gbcurv/functionals.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>
#include <vector>

namespace gbcurv {

namespace {

constexpr int kMaxContracted = 7;

using Key = std::array<std::uint8_t, 2 * kMaxContracted + 2>;

// Merged expansion sum_t coeff_t prod R(...) prod L(...).
struct Expansion {
  int r_factors = 0;
  int l_factors = 0;
  std::vector<double> coeff;
  std::vector<std::uint8_t> idx;  // 4 per R factor then 2 per L factor, per term

  std::size_t stride() const { return static_cast<std::size_t>(4 * r_factors + 2 * l_factors); }
};

int permutation_sign(std::span<const int> upper, std::span<const int> lower) {
  const std::size_t k = upper.size();
  std::array<int, kMaxContracted + 1> pos{};
  for (std::size_t t = 0; t < k; ++t)
    pos[t] = static_cast<int>(std::find(upper.begin(), upper.end(), lower[t]) - upper.begin());
  int inv = 0;
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = a + 1; b < k; ++b)
      if (pos[a] > pos[b]) ++inv;
  return inv % 2 ? -1 : 1;
}

// Canonical form of the factor list under the curvature symmetries. Returns 0
// if a factor vanishes by antisymmetry, otherwise the accumulated sign.
int canonical_key(int rf, int lf, std::span<const int> up, std::span<const int> lo, Key& key) {
  int sign = 1;
  // Factors packed big-endian so integer order is lexicographic order.
  std::array<std::uint32_t, kMaxContracted> rs{};
  std::array<std::uint32_t, kMaxContracted> ls{};
  for (int t = 0; t < rf; ++t) {
    // R_{u(2t) u(2t+1) l(2t+1) l(2t)}
    int a = up[2 * t], b = up[2 * t + 1], c = lo[2 * t + 1], d = lo[2 * t];
    if (a == b || c == d) return 0;
    if (a > b) { std::swap(a, b); sign = -sign; }
    if (c > d) { std::swap(c, d); sign = -sign; }
    if (std::pair(a, b) > std::pair(c, d)) { std::swap(a, c); std::swap(b, d); }
    rs[static_cast<std::size_t>(t)] = static_cast<std::uint32_t>((a << 24) | (b << 16) | (c << 8) | d);
  }
  for (int s = 0; s < lf; ++s) {
    int a = up[2 * rf + s], b = lo[2 * rf + s];
    if (a > b) std::swap(a, b);
    ls[static_cast<std::size_t>(s)] = static_cast<std::uint32_t>((a << 8) | b);
  }
  std::sort(rs.begin(), rs.begin() + rf);
  std::sort(ls.begin(), ls.begin() + lf);
  key.fill(0xff);
  std::size_t p = 0;
  for (int t = 0; t < rf; ++t)
    for (int sh : {24, 16, 8, 0}) key[p++] = static_cast<std::uint8_t>(rs[static_cast<std::size_t>(t)] >> sh);
  for (int s = 0; s < lf; ++s)
    for (int sh : {8, 0}) key[p++] = static_cast<std::uint8_t>(ls[static_cast<std::size_t>(s)] >> sh);
  return sign;
}

// Expand delta^{(i) u_1..u_k}_{(j) l_1..l_k} R..R L..L over all index tuples.
Expansion build_expansion(const Signature& signs, int rf, int lf,
                          std::optional<std::pair<int, int>> free_pair) {
  const int d = signs.dim();
  const int k = 2 * rf + lf;
  if (k > kMaxContracted) throw DomainError("contraction degree too large to expand");
  Expansion e;
  e.r_factors = rf;
  e.l_factors = lf;
  const int fi = free_pair ? free_pair->first : -1;
  const int fj = free_pair ? free_pair->second : -1;

  std::vector<int> avail;
  for (int x = 0; x < d; ++x)
    if (x != fi) avail.push_back(x);
  if (static_cast<int>(avail.size()) < k) return e;

  std::map<Key, double> acc;
  std::vector<char> pick(avail.size(), 0);
  std::fill(pick.begin(), pick.begin() + k, 1);
  std::vector<int> full_up(static_cast<std::size_t>(k + (free_pair ? 1 : 0)));
  std::vector<int> full_lo(full_up.size());
  const std::size_t off = free_pair ? 1 : 0;
  Key key;
  do {
    std::vector<int> a_set;
    for (std::size_t t = 0; t < avail.size(); ++t)
      if (pick[t]) a_set.push_back(avail[t]);
    std::vector<int> b_set = a_set;
    if (free_pair && fi != fj) {
      auto it = std::find(b_set.begin(), b_set.end(), fj);
      if (it == b_set.end()) continue;
      *it = fi;
      std::sort(b_set.begin(), b_set.end());
    }
    double xi = 1.0;
    for (int x : a_set) xi *= signs.at0(x);
    if (free_pair) {
      xi *= signs.at0(fi);
      full_up[0] = fi;
      full_lo[0] = fj;
    }
    std::vector<int> u = a_set;
    do {
      std::copy(u.begin(), u.end(), full_up.begin() + static_cast<std::ptrdiff_t>(off));
      std::vector<int> l = b_set;
      do {
        std::copy(l.begin(), l.end(), full_lo.begin() + static_cast<std::ptrdiff_t>(off));
        const int fs = canonical_key(rf, lf, u, l, key);
        if (fs == 0) continue;
        acc[key] += fs * xi * permutation_sign(full_up, full_lo);
      } while (std::next_permutation(l.begin(), l.end()));
    } while (std::next_permutation(u.begin(), u.end()));
  } while (std::prev_permutation(pick.begin(), pick.end()));

  const std::size_t stride = e.stride();
  for (const auto& [kk, c] : acc) {
    if (c == 0.0) continue;
    e.coeff.push_back(c);
    e.idx.insert(e.idx.end(), kk.begin(), kk.begin() + static_cast<std::ptrdiff_t>(stride));
  }
  return e;
}

std::shared_ptr<const Expansion> cached_expansion(const Signature& signs, int rf, int lf,
                                                  std::optional<std::pair<int, int>> fp) {
  static std::mutex mu;
  static std::map<std::string, std::shared_ptr<const Expansion>> cache;
  std::string name = signs.to_string() + "|" + std::to_string(rf) + "|" + std::to_string(lf);
  if (fp) name += "|" + std::to_string(fp->first) + "," + std::to_string(fp->second);
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(name);
  if (it != cache.end()) return it->second;
  auto e = std::make_shared<const Expansion>(build_expansion(signs, rf, lf, fp));
  cache.emplace(name, e);
  return e;
}

double evaluate(const Expansion& e, const AlgebraicCurvature& r, const SecondFundamentalForm* l) {
  double sum = 0.0;
  const std::uint8_t* p = e.idx.data();
  for (double c : e.coeff) {
    double v = c;
    for (int t = 0; t < e.r_factors; ++t, p += 4) v *= r.at0(p[0], p[1], p[2], p[3]);
    for (int s = 0; s < e.l_factors; ++s, p += 2) v *= l->at0(p[0], p[1]);
    sum += v;
  }
  return sum;
}

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

void check_dims(int rdim, const Signature& signs) {
  if (rdim != signs.dim()) throw DomainError("curvature and signature dimensions differ");
}

std::vector<int> nu_range(int n, std::optional<int> nu) {
  if (n < 1) throw DomainError("boundary degree n must be at least 1");
  if (nu) {
    if (*nu < 0 || 2 * *nu > n - 1)
      throw DomainError("nu must satisfy 0 <= 2 nu <= n - 1");
    return {*nu};
  }
  std::vector<int> out;
  for (int v = 0; 2 * v <= n - 1; ++v) out.push_back(v);
  return out;
}

double boundary_norm(int n, int nu) {
  const int k = n - 1 - 2 * nu;
  return std::pow(8.0 * std::numbers::pi, nu) * factorial(nu) * sphere_volume(k) * factorial(k);
}

void check_boundary(const AlgebraicCurvature& r_tan, const SecondFundamentalForm& l,
                    const Signature& signs_tan) {
  check_dims(r_tan.dim(), signs_tan);
  if (l.boundary_dim() != signs_tan.dim())
    throw DomainError("second fundamental form and signature dimensions differ");
}

}  // namespace

double sphere_volume(int k) {
  if (k < 0) throw DomainError("sphere dimension must be non-negative");
  // Gamma((k+1)/2) for integer or half-integer argument.
  const int twice = k + 1;
  double gamma = 0.0;
  if (twice % 2 == 0) {
    gamma = factorial(twice / 2 - 1);
  } else {
    gamma = std::sqrt(std::numbers::pi);
    for (int h = 1; 2 * h < twice; ++h) gamma *= (2.0 * h - 1.0) / 2.0;
  }
  return 2.0 * std::pow(std::numbers::pi, twice / 2.0) / gamma;
}

double euler_form(const AlgebraicCurvature& r, const Signature& signs, int n) {
  check_dims(r.dim(), signs);
  if (n < 0) throw DomainError("degree n must be non-negative");
  if (n % 2 || n > signs.dim()) return 0.0;
  if (n == 0) return 1.0;
  const int nb = n / 2;
  const auto e = cached_expansion(signs, nb, 0, std::nullopt);
  return evaluate(*e, r, nullptr) / (std::pow(8.0 * std::numbers::pi, nb) * factorial(nb));
}

SymTwoTensor interior_el_tensor(const AlgebraicCurvature& r, const Signature& signs, int n) {
  check_dims(r.dim(), signs);
  if (n < 0) throw DomainError("degree n must be non-negative");
  const int m = signs.dim();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m, m);
  if (n % 2 || n + 1 > m) return SymTwoTensor(out);
  const int nb = n / 2;
  const double norm = std::pow(8.0 * std::numbers::pi, nb) * factorial(nb);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      out(i, j) = evaluate(*cached_expansion(signs, nb, 0, std::pair(i, j)), r, nullptr) / norm;
  return SymTwoTensor(out);
}

double boundary_transgression(const AlgebraicCurvature& r_tan, const SecondFundamentalForm& l,
                              const Signature& signs_tan, int n, std::optional<int> nu) {
  check_boundary(r_tan, l, signs_tan);
  double total = 0.0;
  for (int v : nu_range(n, nu)) {
    if (n - 1 > signs_tan.dim()) continue;
    const auto e = cached_expansion(signs_tan, v, n - 1 - 2 * v, std::nullopt);
    total += evaluate(*e, r_tan, &l) / boundary_norm(n, v);
  }
  return total;
}

SymTwoTensor boundary_el_tensor(const AlgebraicCurvature& r_tan, const SecondFundamentalForm& l,
                                const Signature& signs_tan, int n, std::optional<int> nu) {
  check_boundary(r_tan, l, signs_tan);
  const int d = signs_tan.dim();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(d, d);
  for (int v : nu_range(n, nu)) {
    if (n > d) continue;
    const double norm = boundary_norm(n, v);
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        out(a, b) +=
            evaluate(*cached_expansion(signs_tan, v, n - 1 - 2 * v, std::pair(a, b)), r_tan, &l) /
            norm;
  }
  return SymTwoTensor(out);
}

std::size_t expansion_size(const Signature& signs, int r_factors, int l_factors,
                           std::optional<std::pair<int, int>> free_pair) {
  return cached_expansion(signs, r_factors, l_factors, free_pair)->coeff.size();
}

}  // namespace gbcurv
