#pragma once

// Formal boundary invariants: monomials in the variables L~_ab, g~_ab/cd and
// e^u o e^v, the orthogonal group action on them, and the exact computation
// of the invariant admissible polynomials.
//
// Indices are 1-based throughout this header.

#include "gbcurv/tensor_core.hpp"

#include <gmpxx.h>

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gbcurv {

inline constexpr int kMaxFormalDim = 7;

class NotInvariantError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// L~_{a1 b1}..L~_{ak bk} g~_{c1 d1/e1 f1}..g~_{..} e^u o e^v in canonical
/// form: a <= b inside every pair, the two pairs of a g~ factor keep their
/// order, factor lists sorted, u <= v.
class FormalMonomial {
 public:
  using Pair = std::pair<int, int>;
  using Quad = std::array<int, 4>;

  FormalMonomial(int dim, const std::vector<Pair>& l, const std::vector<Quad>& g, Pair out);

  int dim() const { return dim_; }
  int ord_l() const { return k_; }
  int ord_g() const { return 2 * ell_; }
  int ord() const { return k_ + 2 * ell_; }

  /// Number of occurrences of index w.
  int degree(int w) const;
  bool touches_itself(int w) const;
  bool contains(int w) const { return degree(w) > 0; }

  std::vector<Pair> l_factors() const;
  std::vector<Quad> g_factors() const;
  Pair output() const { return {slot(out_pos()), slot(out_pos() + 1)}; }

  /// Text form such as "L11 L23 g12/33 e2.e2".
  std::string to_string() const;

  /// Monomial with occurrence `pos` (0-based over all index slots, in the
  /// order L factors, g factors, output) replaced by `w`; re-canonicalized.
  FormalMonomial with_slot(int pos, int w) const;
  /// Several replacements (pos, w) at once; positions refer to this monomial.
  FormalMonomial with_slots(const std::vector<std::pair<int, int>>& changes) const;
  int slot_count() const { return 2 * (k_ + 2 * ell_ + 1); }
  int slot(int pos) const { return slots_[static_cast<std::size_t>(pos)]; }

  friend bool operator==(const FormalMonomial&, const FormalMonomial&) = default;
  friend std::strong_ordering operator<=>(const FormalMonomial& a, const FormalMonomial& b) {
    if (auto c = a.k_ <=> b.k_; c != 0) return c;
    if (auto c = a.ell_ <=> b.ell_; c != 0) return c;
    if (auto c = a.slots_ <=> b.slots_; c != 0) return c;
    return a.dim_ <=> b.dim_;
  }

 private:
  FormalMonomial() = default;
  int out_pos() const { return 2 * k_ + 4 * ell_; }
  void canonicalize();

  std::uint8_t dim_ = 0;
  std::uint8_t k_ = 0;
  std::uint8_t ell_ = 0;
  std::array<std::uint8_t, 2 * (kMaxFormalDim + 1)> slots_{};

  friend class FormalPolynomial;
  friend std::vector<FormalMonomial> enumerate_admissible(int, const Signature&);
};

/// Polynomial with exact rational coefficients. Zero coefficients are never
/// stored.
class FormalPolynomial {
 public:
  explicit FormalPolynomial(int dim) : dim_(dim) {}

  int dim() const { return dim_; }
  const std::map<FormalMonomial, mpq_class>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  mpq_class coefficient(const FormalMonomial& m) const;
  void add(const FormalMonomial& m, const mpq_class& c);

  /// Homogeneous piece P_k of L-order k.
  FormalPolynomial component(int k) const;

  FormalPolynomial& operator+=(const FormalPolynomial& o);
  FormalPolynomial& operator-=(const FormalPolynomial& o);
  FormalPolynomial& operator*=(const mpq_class& s);
  friend FormalPolynomial operator+(FormalPolynomial a, const FormalPolynomial& b) { return a += b; }
  friend FormalPolynomial operator-(FormalPolynomial a, const FormalPolynomial& b) { return a -= b; }
  friend FormalPolynomial operator*(const mpq_class& s, FormalPolynomial a) { return a *= s; }
  friend bool operator==(const FormalPolynomial&, const FormalPolynomial&) = default;

  /// One "coeff * monomial" line per term in monomial order.
  std::string to_string() const;

 private:
  int dim_;
  std::map<FormalMonomial, mpq_class> terms_;
};

/// Numeric image of a polynomial under a finite group element.
using NumericPolynomial = std::map<FormalMonomial, double>;

/// Every canonical monomial with each index 1..dim appearing exactly twice.
/// Sorted in monomial order.
std::vector<FormalMonomial> enumerate_admissible(int dim, const Signature& signs);

/// Derivative at theta = 0 of the T_{a,b}(theta) action.
FormalPolynomial infinitesimal_action(const FormalPolynomial& p, int a, int b,
                                      const Signature& signs);

/// Full T_{a,b}(theta) action by multilinear expansion.
NumericPolynomial finite_action(const FormalPolynomial& p, int a, int b, double theta,
                                const Signature& signs);

/// True if every generator X_{a,b}, a < b, annihilates p.
bool is_invariant(const FormalPolynomial& p, const Signature& signs);

enum class KernelMethod {
  /// Rank over Z/p with Q_k as an exact kernel certificate; falls back to
  /// Rational when the modular rank does not close the gap.
  Certified,
  /// Sparse Gaussian elimination over Q.
  Rational,
};

/// Rational basis of the invariant admissible polynomials, computed as the
/// joint kernel of all X_{a,b}. Both methods are exact. Basis vectors are
/// ordered by L-order and scaled so the first coefficient is 1.
std::vector<FormalPolynomial> invariant_subspace(int dim, const Signature& signs,
                                                 KernelMethod method = KernelMethod::Certified);

/// Q_k; requires 0 <= k <= dim-1 and k = dim-1 mod 2.
FormalPolynomial q_polynomial(int dim, int k, const Signature& signs);

/// Exact rank of a family of polynomials over Q.
int rational_rank(const std::vector<FormalPolynomial>& family);

struct ExchangeViolation {
  FormalMonomial c;
  FormalMonomial a;
  FormalMonomial b;
  std::string reason;
};

/// Checks c(A,P) != 0 <=> c(B,P) != 0 for every monomial C with deg_a = 3,
/// deg_b = 1 and index a touching itself. Throws NotInvariantError if P is
/// not invariant.
std::vector<ExchangeViolation> exchange_check(const FormalPolynomial& p, int a, int b,
                                              const Signature& signs);

/// Drops every monomial that contains the top index; result has dim - 1.
FormalPolynomial restrict_polynomial(const FormalPolynomial& p);

}  // namespace gbcurv
