#pragma once

// Slow reference implementations used only by tests. They follow the
// defining formulas literally: sums over index tuples, epsilon as the
// determinant of frame inner products, explicit normalizations.

#include "gbcurv/invariants.hpp"
#include "gbcurv/tensor_core.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <set>
#include <vector>

namespace oracle {

using gbcurv::AlgebraicCurvature;
using gbcurv::SecondFundamentalForm;
using gbcurv::Signature;

inline double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

inline double sphere_volume(int k) {
  return 2.0 * std::pow(std::numbers::pi, (k + 1) / 2.0) / std::tgamma((k + 1) / 2.0);
}

/// det( g(e^{u_a}, e^{l_b}) ) with g(e^u, e^l) = xi_u delta_ul.
inline double epsilon(const Signature& s, const std::vector<int>& up, const std::vector<int>& lo) {
  const int k = static_cast<int>(up.size());
  if (k == 0) return 1.0;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(k, k);
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b)
      if (up[static_cast<std::size_t>(a)] == lo[static_cast<std::size_t>(b)])
        m(a, b) = s.at0(up[static_cast<std::size_t>(a)]);
  return std::round(m.determinant());
}

/// Calls f(t) for every tuple t of k distinct values in [0, d), in
/// lexicographic order. Tuples with a repeated index have epsilon = 0.
inline void for_each_injective(int d, int k, const std::function<void(const std::vector<int>&)>& f) {
  std::vector<int> t(static_cast<std::size_t>(k), 0);
  std::function<void(int)> rec = [&](int pos) {
    if (pos == k) {
      f(t);
      return;
    }
    for (int v = 0; v < d; ++v) {
      if (std::find(t.begin(), t.begin() + pos, v) != t.begin() + pos) continue;
      t[static_cast<std::size_t>(pos)] = v;
      rec(pos + 1);
    }
  };
  rec(0);
}

// prod_t R_{u(2t) u(2t+1) l(2t+1) l(2t)} prod_s L_{u(2r+s) l(2r+s)}, starting at `off`.
inline double product(const AlgebraicCurvature& r, const SecondFundamentalForm* l, int rf, int lf,
                      const std::vector<int>& u, const std::vector<int>& w, int off) {
  double v = 1.0;
  for (int t = 0; t < rf; ++t) {
    const auto i = static_cast<std::size_t>(off + 2 * t);
    v *= r.at0(u[i], u[i + 1], w[i + 1], w[i]);
  }
  for (int s = 0; s < lf; ++s) {
    const auto i = static_cast<std::size_t>(off + 2 * rf + s);
    v *= l->at0(u[i], w[i]);
  }
  return v;
}

// Full contraction with an optional free pair (i upper, j lower) in front.
inline double contraction(const AlgebraicCurvature& r, const SecondFundamentalForm* l,
                          const Signature& s, int rf, int lf, int fi, int fj) {
  const int d = s.dim();
  const int k = 2 * rf + lf;
  const bool free = fi >= 0;
  double sum = 0.0;
  for_each_injective(d, k, [&](const std::vector<int>& up) {
    for_each_injective(d, k, [&](const std::vector<int>& lo) {
      std::vector<int> fu, fl;
      if (free) {
        fu.push_back(fi);
        fl.push_back(fj);
      }
      fu.insert(fu.end(), up.begin(), up.end());
      fl.insert(fl.end(), lo.begin(), lo.end());
      const double e = epsilon(s, fu, fl);
      if (e == 0.0) return;
      sum += e * product(r, l, rf, lf, fu, fl, free ? 1 : 0);
    });
  });
  return sum;
}

inline double euler_form(const AlgebraicCurvature& r, const Signature& s, int n) {
  if (n % 2 || n > s.dim()) return 0.0;
  const int nb = n / 2;
  return contraction(r, nullptr, s, nb, 0, -1, -1) /
         (std::pow(8.0 * std::numbers::pi, nb) * factorial(nb));
}

inline Eigen::MatrixXd interior_el(const AlgebraicCurvature& r, const Signature& s, int n) {
  const int m = s.dim();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m, m);
  if (n % 2) return out;
  const int nb = n / 2;
  const double norm = std::pow(8.0 * std::numbers::pi, nb) * factorial(nb);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) out(i, j) = contraction(r, nullptr, s, nb, 0, i, j) / norm;
  return out;
}

inline double boundary_norm(int n, int nu) {
  const int k = n - 1 - 2 * nu;
  return std::pow(8.0 * std::numbers::pi, nu) * factorial(nu) * sphere_volume(k) * factorial(k);
}

inline double transgression(const AlgebraicCurvature& rt, const SecondFundamentalForm& l,
                            const Signature& st, int n, int nu) {
  return contraction(rt, &l, st, nu, n - 1 - 2 * nu, -1, -1) / boundary_norm(n, nu);
}

inline Eigen::MatrixXd boundary_el(const AlgebraicCurvature& rt, const SecondFundamentalForm& l,
                                   const Signature& st, int n, int nu) {
  const int d = st.dim();
  Eigen::MatrixXd out(d, d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      out(a, b) = contraction(rt, &l, st, nu, n - 1 - 2 * nu, a, b) / boundary_norm(n, nu);
  return out;
}

/// Canonical admissible monomials by brute force: every arrangement of the
/// multiset {1,1,2,2,...,d,d} into L pairs, g quadruples and an output pair,
/// reduced by the variable symmetries.
inline std::set<std::vector<int>> admissible_monomials(int d) {
  std::set<std::vector<int>> out;
  std::vector<int> base;
  for (int v = 1; v <= d; ++v) base.insert(base.end(), {v, v});
  for (int ell = 0; 4 * ell + 2 <= 2 * d; ++ell) {
    const int k = (2 * d - 2 - 4 * ell) / 2;
    std::vector<int> w = base;
    do {
      std::vector<std::vector<int>> ls, gs;
      for (int t = 0; t < k; ++t) {
        std::vector<int> p = {w[static_cast<std::size_t>(2 * t)], w[static_cast<std::size_t>(2 * t + 1)]};
        std::sort(p.begin(), p.end());
        ls.push_back(p);
      }
      for (int t = 0; t < ell; ++t) {
        const auto o = static_cast<std::size_t>(2 * k + 4 * t);
        std::vector<int> q = {std::min(w[o], w[o + 1]), std::max(w[o], w[o + 1]),
                              std::min(w[o + 2], w[o + 3]), std::max(w[o + 2], w[o + 3])};
        gs.push_back(q);
      }
      std::sort(ls.begin(), ls.end());
      std::sort(gs.begin(), gs.end());
      std::vector<int> key = {k, ell};
      for (const auto& p : ls) key.insert(key.end(), p.begin(), p.end());
      for (const auto& q : gs) key.insert(key.end(), q.begin(), q.end());
      key.push_back(std::min(w[w.size() - 2], w.back()));
      key.push_back(std::max(w[w.size() - 2], w.back()));
      out.insert(key);
    } while (std::next_permutation(w.begin(), w.end()));
  }
  return out;
}

/// Same key layout for a FormalMonomial.
inline std::vector<int> key_of(const gbcurv::FormalMonomial& m) {
  std::vector<int> key = {m.ord_l(), m.ord_g() / 2};
  for (const auto& [a, b] : m.l_factors()) key.insert(key.end(), {a, b});
  for (const auto& q : m.g_factors()) key.insert(key.end(), q.begin(), q.end());
  key.push_back(m.output().first);
  key.push_back(m.output().second);
  return key;
}

/// Random symmetric matrix with entries in [-1, 1].
inline Eigen::MatrixXd random_symmetric(int d, unsigned seed) {
  std::srand(seed);
  Eigen::MatrixXd a = Eigen::MatrixXd::Random(d, d);
  return (0.5 * (a + a.transpose())).eval();
}

}  // namespace oracle
