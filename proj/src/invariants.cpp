#include "gbcurv/invariants.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

namespace gbcurv {

namespace {

void check_dim(int dim) {
  if (dim < 1 || dim > kMaxFormalDim)
    throw DomainError("formal dimension must lie in 1.." + std::to_string(kMaxFormalDim));
}

void check_pair(int a, int b, const Signature& signs) {
  if (a == b) throw DomainError("generator indices must differ");
  if (a < 1 || b < 1 || a > signs.dim() || b > signs.dim())
    throw DomainError("generator index out of range");
}

// Sign picked up by the 'b' occurrences under X_{a,b}: -1 in a definite
// plane (rotation), +1 in a mixed plane (boost).
int b_sign(int a, int b, const Signature& signs) { return signs(a) == signs(b) ? -1 : 1; }

int permutation_parity(const std::vector<int>& p) {
  int inv = 0;
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = i + 1; j < p.size(); ++j)
      if (p[i] > p[j]) ++inv;
  return inv % 2 ? -1 : 1;
}

// Sparse row over Q, sorted by column.
using Row = std::vector<std::pair<int, mpq_class>>;

// row -= f * pivot
Row axpy(const Row& row, const mpq_class& f, const Row& pivot) {
  Row out;
  out.reserve(row.size() + pivot.size());
  std::size_t i = 0, j = 0;
  while (i < row.size() || j < pivot.size()) {
    if (j == pivot.size() || (i < row.size() && row[i].first < pivot[j].first)) {
      out.push_back(row[i++]);
    } else if (i == row.size() || pivot[j].first < row[i].first) {
      out.emplace_back(pivot[j].first, -f * pivot[j].second);
      ++j;
    } else {
      mpq_class v = row[i].second - f * pivot[j].second;
      if (v != 0) out.emplace_back(row[i].first, std::move(v));
      ++i;
      ++j;
    }
  }
  return out;
}

// Incremental reduced row echelon form over Q.
class Echelon {
 public:
  explicit Echelon(int cols) : cols_(cols) {}

  // Returns true if the row increased the rank.
  bool insert(Row row) {
    while (!row.empty()) {
      const int c = row.front().first;
      auto it = pivots_.find(c);
      if (it == pivots_.end()) {
        const mpq_class lead = row.front().second;
        for (auto& [col, v] : row) v /= lead;
        pivots_.emplace(c, std::move(row));
        return true;
      }
      const mpq_class f = row.front().second;
      row = axpy(row, f, it->second);
    }
    return false;
  }

  int rank() const { return static_cast<int>(pivots_.size()); }

  // Kernel basis, one vector per free column, as dense rationals.
  std::vector<std::vector<mpq_class>> kernel() {
    // Back substitution, highest pivot first so each used row is final.
    for (auto it = pivots_.rbegin(); it != pivots_.rend(); ++it) {
      Row& r = it->second;
      bool changed = true;
      while (changed) {
        changed = false;
        for (std::size_t t = 1; t < r.size(); ++t) {
          auto p = pivots_.find(r[t].first);
          if (p != pivots_.end() && p->first != it->first) {
            const mpq_class f = r[t].second;
            r = axpy(r, f, p->second);
            changed = true;
            break;
          }
        }
      }
    }
    std::vector<std::vector<mpq_class>> basis;
    for (int f = 0; f < cols_; ++f) {
      if (pivots_.count(f)) continue;
      std::vector<mpq_class> v(static_cast<std::size_t>(cols_));
      v[static_cast<std::size_t>(f)] = 1;
      for (const auto& [p, r] : pivots_)
        for (const auto& [col, val] : r)
          if (col == f) v[static_cast<std::size_t>(p)] = -val;
      basis.push_back(std::move(v));
    }
    return basis;
  }

 private:
  int cols_;
  std::map<int, Row> pivots_;
};

constexpr std::uint64_t kPrime = 2147483647;  // 2^31 - 1

std::uint64_t mod_pow(std::uint64_t b, std::uint64_t e) {
  std::uint64_t r = 1;
  b %= kPrime;
  while (e) {
    if (e & 1) r = r * b % kPrime;
    b = b * b % kPrime;
    e >>= 1;
  }
  return r;
}

using ModRow = std::vector<std::pair<int, std::uint64_t>>;

// Incremental echelon form over Z/p; only the rank is needed.
class ModEchelon {
 public:
  bool insert(ModRow row) {
    while (!row.empty()) {
      const int c = row.front().first;
      auto it = pivots_.find(c);
      if (it == pivots_.end()) {
        const std::uint64_t inv = mod_pow(row.front().second, kPrime - 2);
        for (auto& [col, v] : row) v = v * inv % kPrime;
        pivots_.emplace(c, std::move(row));
        return true;
      }
      const std::uint64_t f = row.front().second;
      const ModRow& piv = it->second;
      ModRow out;
      out.reserve(row.size() + piv.size());
      std::size_t i = 0, j = 0;
      while (i < row.size() || j < piv.size()) {
        if (j == piv.size() || (i < row.size() && row[i].first < piv[j].first)) {
          out.push_back(row[i++]);
        } else if (i == row.size() || piv[j].first < row[i].first) {
          out.emplace_back(piv[j].first, (kPrime - f * piv[j].second % kPrime) % kPrime);
          ++j;
        } else {
          const std::uint64_t v = (row[i].second + kPrime - f * piv[j].second % kPrime) % kPrime;
          if (v) out.emplace_back(row[i].first, v);
          ++i;
          ++j;
        }
      }
      row = std::move(out);
    }
    return false;
  }
  int rank() const { return static_cast<int>(pivots_.size()); }

 private:
  std::map<int, ModRow> pivots_;
};

using IntRow = std::vector<std::pair<int, long>>;

ModRow to_mod_row(const IntRow& r) {
  ModRow out;
  out.reserve(r.size());
  for (const auto& [j, v] : r) {
    const long m = v % static_cast<long>(kPrime);
    out.emplace_back(j, static_cast<std::uint64_t>(m < 0 ? m + static_cast<long>(kPrime) : m));
  }
  return out;
}

// Rows of the matrix of X_{a,b} restricted to the given columns, sparsest
// first.
std::vector<IntRow> generator_rows(const std::vector<FormalMonomial>& cols, int a, int b,
                                   const Signature& signs) {
  const int sb = b_sign(a, b, signs);
  std::map<FormalMonomial, std::map<int, long>> rows;
  for (int j = 0; j < static_cast<int>(cols.size()); ++j) {
    const FormalMonomial& m = cols[static_cast<std::size_t>(j)];
    for (int pos = 0; pos < m.slot_count(); ++pos) {
      if (m.slot(pos) == a) rows[m.with_slot(pos, b)][j] += 1;
      else if (m.slot(pos) == b) rows[m.with_slot(pos, a)][j] += sb;
    }
  }
  std::vector<IntRow> out;
  for (const auto& [img, entries] : rows) {
    IntRow r;
    for (const auto& [j, v] : entries)
      if (v != 0) r.emplace_back(j, v);
    if (!r.empty()) out.push_back(std::move(r));
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const IntRow& x, const IntRow& y) { return x.size() < y.size(); });
  return out;
}

// Scaled so the first coefficient in monomial order is 1.
FormalPolynomial normalized(const FormalPolynomial& p) {
  if (p.is_zero()) return p;
  const mpq_class lead = p.terms().begin()->second;
  const mpq_class inv = 1 / lead;
  return inv * p;
}

}  // namespace

// ---------------------------------------------------------------- monomials

FormalMonomial::FormalMonomial(int dim, const std::vector<Pair>& l, const std::vector<Quad>& g,
                               Pair out) {
  check_dim(dim);
  const std::size_t slots = 2 * (l.size() + 2 * g.size() + 1);
  if (slots > slots_.size()) throw DomainError("monomial has too many factors");
  dim_ = static_cast<std::uint8_t>(dim);
  k_ = static_cast<std::uint8_t>(l.size());
  ell_ = static_cast<std::uint8_t>(g.size());
  std::size_t p = 0;
  auto put = [&](int v) {
    if (v < 1 || v > dim) throw DomainError("monomial index out of range");
    slots_[p++] = static_cast<std::uint8_t>(v);
  };
  for (const auto& [a, b] : l) { put(a); put(b); }
  for (const auto& q : g)
    for (int v : q) put(v);
  put(out.first);
  put(out.second);
  canonicalize();
}

void FormalMonomial::canonicalize() {
  auto order2 = [](std::uint8_t* s) {
    if (s[0] > s[1]) std::swap(s[0], s[1]);
  };
  // Pack each factor into an integer whose order is the tuple order.
  std::array<std::uint16_t, kMaxFormalDim + 1> ls{};
  std::array<std::uint32_t, kMaxFormalDim + 1> gs{};
  for (int t = 0; t < k_; ++t) {
    std::uint8_t* s = &slots_[static_cast<std::size_t>(2 * t)];
    order2(s);
    ls[static_cast<std::size_t>(t)] = static_cast<std::uint16_t>(s[0] << 8 | s[1]);
  }
  for (int t = 0; t < ell_; ++t) {
    std::uint8_t* s = &slots_[static_cast<std::size_t>(2 * k_ + 4 * t)];
    order2(s);
    order2(s + 2);
    gs[static_cast<std::size_t>(t)] =
        static_cast<std::uint32_t>(s[0]) << 24 | static_cast<std::uint32_t>(s[1]) << 16 |
        static_cast<std::uint32_t>(s[2]) << 8 | s[3];
  }
  std::sort(ls.begin(), ls.begin() + k_);
  std::sort(gs.begin(), gs.begin() + ell_);
  std::size_t p = 0;
  for (int t = 0; t < k_; ++t) {
    slots_[p++] = static_cast<std::uint8_t>(ls[static_cast<std::size_t>(t)] >> 8);
    slots_[p++] = static_cast<std::uint8_t>(ls[static_cast<std::size_t>(t)]);
  }
  for (int t = 0; t < ell_; ++t)
    for (int sh : {24, 16, 8, 0})
      slots_[p++] = static_cast<std::uint8_t>(gs[static_cast<std::size_t>(t)] >> sh);
  order2(&slots_[p]);
}

int FormalMonomial::degree(int w) const {
  int d = 0;
  for (int p = 0; p < slot_count(); ++p) d += slot(p) == w;
  return d;
}

bool FormalMonomial::touches_itself(int w) const {
  for (int p = 0; p + 1 < slot_count(); p += 2)
    if (slot(p) == w && slot(p + 1) == w) return true;
  return false;
}

std::vector<FormalMonomial::Pair> FormalMonomial::l_factors() const {
  std::vector<Pair> out;
  for (int t = 0; t < k_; ++t) out.emplace_back(slot(2 * t), slot(2 * t + 1));
  return out;
}

std::vector<FormalMonomial::Quad> FormalMonomial::g_factors() const {
  std::vector<Quad> out;
  for (int t = 0; t < ell_; ++t) {
    const int b = 2 * k_ + 4 * t;
    out.push_back({slot(b), slot(b + 1), slot(b + 2), slot(b + 3)});
  }
  return out;
}

std::string FormalMonomial::to_string() const {
  std::ostringstream os;
  for (const auto& [a, b] : l_factors()) os << "L" << a << b << " ";
  for (const auto& q : g_factors()) os << "g" << q[0] << q[1] << "/" << q[2] << q[3] << " ";
  const auto [u, v] = output();
  os << "e" << u << ".e" << v;
  return os.str();
}

FormalMonomial FormalMonomial::with_slot(int pos, int w) const {
  FormalMonomial m = *this;
  m.slots_[static_cast<std::size_t>(pos)] = static_cast<std::uint8_t>(w);
  m.canonicalize();
  return m;
}

FormalMonomial FormalMonomial::with_slots(const std::vector<std::pair<int, int>>& changes) const {
  FormalMonomial m = *this;
  for (const auto& [pos, w] : changes) m.slots_[static_cast<std::size_t>(pos)] = static_cast<std::uint8_t>(w);
  m.canonicalize();
  return m;
}

// -------------------------------------------------------------- polynomials

mpq_class FormalPolynomial::coefficient(const FormalMonomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? mpq_class(0) : it->second;
}

void FormalPolynomial::add(const FormalMonomial& m, const mpq_class& c) {
  if (m.dim() != dim_) throw DomainError("monomial dimension differs from polynomial");
  if (c == 0) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

FormalPolynomial FormalPolynomial::component(int k) const {
  FormalPolynomial out(dim_);
  for (const auto& [m, c] : terms_)
    if (m.ord_l() == k) out.terms_.emplace(m, c);
  return out;
}

FormalPolynomial& FormalPolynomial::operator+=(const FormalPolynomial& o) {
  if (o.dim_ != dim_) throw DomainError("polynomial dimensions differ");
  for (const auto& [m, c] : o.terms_) add(m, c);
  return *this;
}

FormalPolynomial& FormalPolynomial::operator-=(const FormalPolynomial& o) {
  if (o.dim_ != dim_) throw DomainError("polynomial dimensions differ");
  for (const auto& [m, c] : o.terms_) add(m, -c);
  return *this;
}

FormalPolynomial& FormalPolynomial::operator*=(const mpq_class& s) {
  if (s == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [m, c] : terms_) c *= s;
  return *this;
}

std::string FormalPolynomial::to_string() const {
  std::ostringstream os;
  for (const auto& [m, c] : terms_) os << c.get_str() << " * " << m.to_string() << "\n";
  return os.str();
}

// --------------------------------------------------------------- operations

std::vector<FormalMonomial> enumerate_admissible(int dim, const Signature& signs) {
  check_dim(dim);
  if (signs.dim() != dim) throw DomainError("signature length differs from dimension");
  std::vector<FormalMonomial> out;
  for (int k = (dim - 1) % 2; k <= dim - 1; k += 2) {
    const int ell = (dim - 1 - k) / 2;
    const int n = 2 * dim;
    // Factor boundaries: each slot knows its factor start and width.
    std::vector<int> start(static_cast<std::size_t>(n)), width(static_cast<std::size_t>(n));
    for (int p = 0; p < n; ++p) {
      if (p < 2 * k) {
        start[static_cast<std::size_t>(p)] = p - p % 2;
        width[static_cast<std::size_t>(p)] = 2;
      } else if (p < 2 * k + 4 * ell) {
        start[static_cast<std::size_t>(p)] = p - (p - 2 * k) % 4;
        width[static_cast<std::size_t>(p)] = 4;
      } else {
        start[static_cast<std::size_t>(p)] = 2 * k + 4 * ell;
        width[static_cast<std::size_t>(p)] = 2;
      }
    }
    FormalMonomial m;
    m.dim_ = static_cast<std::uint8_t>(dim);
    m.k_ = static_cast<std::uint8_t>(k);
    m.ell_ = static_cast<std::uint8_t>(ell);
    std::vector<int> count(static_cast<std::size_t>(dim + 1), 0);
    std::function<void(int)> fill = [&](int p) {
      if (p == n) {
        out.push_back(m);
        return;
      }
      const int s = start[static_cast<std::size_t>(p)];
      const int w = width[static_cast<std::size_t>(p)];
      const int off = p - s;
      int lo = 1;
      // a <= b inside each unordered pair.
      if (off % 2 == 1) lo = std::max(lo, static_cast<int>(m.slots_[static_cast<std::size_t>(p - 1)]));
      // Factors of the same kind are non-decreasing as tuples.
      const bool same_kind_before =
          (s >= 2 && s < 2 * k) || (s >= 2 * k + 4 && s < 2 * k + 4 * ell);
      if (same_kind_before) {
        bool equal_prefix = true;
        for (int q = 0; q < off; ++q)
          if (m.slots_[static_cast<std::size_t>(s + q)] != m.slots_[static_cast<std::size_t>(s - w + q)])
            equal_prefix = false;
        if (equal_prefix) lo = std::max(lo, static_cast<int>(m.slots_[static_cast<std::size_t>(s - w + off)]));
      }
      for (int v = lo; v <= dim; ++v) {
        if (count[static_cast<std::size_t>(v)] == 2) continue;
        ++count[static_cast<std::size_t>(v)];
        m.slots_[static_cast<std::size_t>(p)] = static_cast<std::uint8_t>(v);
        fill(p + 1);
        --count[static_cast<std::size_t>(v)];
      }
      m.slots_[static_cast<std::size_t>(p)] = 0;
    };
    fill(0);
  }
  return out;
}

FormalPolynomial infinitesimal_action(const FormalPolynomial& p, int a, int b,
                                      const Signature& signs) {
  check_pair(a, b, signs);
  if (signs.dim() != p.dim()) throw DomainError("signature length differs from dimension");
  const int sb = b_sign(a, b, signs);
  FormalPolynomial out(p.dim());
  for (const auto& [m, c] : p.terms()) {
    for (int pos = 0; pos < m.slot_count(); ++pos) {
      if (m.slot(pos) == a) out.add(m.with_slot(pos, b), c);
      else if (m.slot(pos) == b) out.add(m.with_slot(pos, a), sb * c);
    }
  }
  return out;
}

NumericPolynomial finite_action(const FormalPolynomial& p, int a, int b, double theta,
                                const Signature& signs) {
  check_pair(a, b, signs);
  if (signs.dim() != p.dim()) throw DomainError("signature length differs from dimension");
  const bool rotation = signs(a) == signs(b);
  const double c = rotation ? std::cos(theta) : std::cosh(theta);
  const double s = rotation ? std::sin(theta) : std::sinh(theta);
  // a -> c a + s b ; b -> (-s or +s) a + c b
  const double ba = rotation ? -s : s;
  NumericPolynomial out;
  for (const auto& [m, coeff] : p.terms()) {
    std::vector<int> pos;
    for (int q = 0; q < m.slot_count(); ++q)
      if (m.slot(q) == a || m.slot(q) == b) pos.push_back(q);
    const std::size_t choices = std::size_t{1} << pos.size();
    for (std::size_t mask = 0; mask < choices; ++mask) {
      std::vector<std::pair<int, int>> changes;
      double w = coeff.get_d();
      for (std::size_t t = 0; t < pos.size(); ++t) {
        const bool flip = (mask >> t) & 1U;
        const int q = pos[t];
        if (m.slot(q) == a) {
          w *= flip ? s : c;
          if (flip) changes.emplace_back(q, b);
        } else {
          w *= flip ? ba : c;
          if (flip) changes.emplace_back(q, a);
        }
      }
      if (w != 0.0) out[m.with_slots(changes)] += w;
    }
  }
  return out;
}

bool is_invariant(const FormalPolynomial& p, const Signature& signs) {
  for (int a = 1; a <= p.dim(); ++a)
    for (int b = a + 1; b <= p.dim(); ++b)
      if (!infinitesimal_action(p, a, b, signs).is_zero()) return false;
  return true;
}

std::vector<FormalPolynomial> invariant_subspace(int dim, const Signature& signs,
                                                 KernelMethod method) {
  const std::vector<FormalMonomial> all = enumerate_admissible(dim, signs);
  std::vector<FormalPolynomial> basis;
  // Adjacent generators first: they already generate the Lie algebra.
  std::vector<std::pair<int, int>> pairs;
  for (int a = 1; a < dim; ++a) pairs.emplace_back(a, a + 1);
  for (int a = 1; a <= dim; ++a)
    for (int b = a + 2; b <= dim; ++b) pairs.emplace_back(a, b);

  // X_{a,b} preserves the L-order, so the kernel splits by it.
  for (int k = (dim - 1) % 2; k <= dim - 1; k += 2) {
    std::vector<FormalMonomial> cols;
    for (const auto& m : all)
      if (m.ord_l() == k) cols.push_back(m);
    const int n = static_cast<int>(cols.size());
    // Q_k is an exactly verified kernel element, so once the rank reaches
    // n - 1 no further row can change the kernel.
    const FormalPolynomial q = q_polynomial(dim, k, signs);
    const bool q_known = !q.is_zero() && is_invariant(q, signs);
    const int target = q_known ? n - 1 : n;

    if (method == KernelMethod::Certified) {
      // rank mod p <= rank over Q <= target, so reaching target mod p pins
      // the rational kernel to span(Q_k) (or to zero).
      ModEchelon ech;
      for (const auto& [a, b] : pairs) {
        if (ech.rank() == target) break;
        for (auto& r : generator_rows(cols, a, b, signs)) {
          if (ech.rank() == target) break;
          ech.insert(to_mod_row(r));
        }
      }
      if (ech.rank() == target) {
        if (q_known) basis.push_back(normalized(q));
        continue;
      }
    }

    Echelon ech(n);
    for (const auto& [a, b] : pairs) {
      if (ech.rank() == target) break;
      for (auto& r : generator_rows(cols, a, b, signs)) {
        if (ech.rank() == target) break;
        Row row;
        for (const auto& [j, v] : r) row.emplace_back(j, mpq_class(v));
        ech.insert(std::move(row));
      }
    }
    for (auto& v : ech.kernel()) {
      FormalPolynomial p(dim);
      for (int j = 0; j < n; ++j)
        p.add(cols[static_cast<std::size_t>(j)], v[static_cast<std::size_t>(j)]);
      basis.push_back(normalized(p));
    }
  }
  return basis;
}

FormalPolynomial q_polynomial(int dim, int k, const Signature& signs) {
  check_dim(dim);
  if (signs.dim() != dim) throw DomainError("signature length differs from dimension");
  if (k < 0 || k > dim - 1 || (dim - 1 - k) % 2 != 0)
    throw DomainError("Q_k needs 0 <= k <= dim-1 and k = dim-1 mod 2");
  const int ell = (dim - 1 - k) / 2;
  int xi = 1;
  for (int s : signs.signs()) xi *= s;
  FormalPolynomial out(dim);
  std::vector<int> alpha(static_cast<std::size_t>(dim));
  std::iota(alpha.begin(), alpha.end(), 1);
  std::map<FormalMonomial, long> acc;
  do {
    const int sa = permutation_parity(alpha);
    std::vector<int> beta(static_cast<std::size_t>(dim));
    std::iota(beta.begin(), beta.end(), 1);
    do {
      std::vector<FormalMonomial::Pair> l;
      std::vector<FormalMonomial::Quad> g;
      std::size_t t = 0;
      for (int i = 0; i < k; ++i, ++t) l.emplace_back(alpha[t], beta[t]);
      for (int i = 0; i < ell; ++i, t += 2)
        g.push_back({alpha[t], beta[t], alpha[t + 1], beta[t + 1]});
      acc[FormalMonomial(dim, l, g, {alpha[t], beta[t]})] += sa * permutation_parity(beta) * xi;
    } while (std::next_permutation(beta.begin(), beta.end()));
  } while (std::next_permutation(alpha.begin(), alpha.end()));
  for (const auto& [m, c] : acc) out.add(m, mpq_class(c));
  return out;
}

int rational_rank(const std::vector<FormalPolynomial>& family) {
  std::map<FormalMonomial, int> index;
  for (const auto& p : family)
    for (const auto& [m, c] : p.terms()) index.try_emplace(m, 0);
  int next = 0;
  for (auto& [m, j] : index) j = next++;
  Echelon ech(next);
  for (const auto& p : family) {
    Row r;
    for (const auto& [m, c] : p.terms()) r.emplace_back(index.at(m), c);
    ech.insert(std::move(r));
  }
  return ech.rank();
}

std::vector<ExchangeViolation> exchange_check(const FormalPolynomial& p, int a, int b,
                                              const Signature& signs) {
  check_pair(a, b, signs);
  if (!is_invariant(p, signs))
    throw NotInvariantError("exchange check needs an invariant polynomial");
  std::vector<ExchangeViolation> out;
  // Every C arises from an admissible monomial by changing one b into a.
  std::vector<FormalMonomial> cs;
  for (const FormalMonomial& x : enumerate_admissible(p.dim(), signs))
    for (int pos = 0; pos < x.slot_count(); ++pos)
      if (x.slot(pos) == b) {
        FormalMonomial c = x.with_slot(pos, a);
        if (c.touches_itself(a)) cs.push_back(c);
      }
  std::sort(cs.begin(), cs.end());
  cs.erase(std::unique(cs.begin(), cs.end()), cs.end());
  for (const FormalMonomial& c : cs) {
    std::vector<FormalMonomial> pre;
    for (int pos = 0; pos < c.slot_count(); ++pos)
      if (c.slot(pos) == a) pre.push_back(c.with_slot(pos, b));
    std::sort(pre.begin(), pre.end());
    pre.erase(std::unique(pre.begin(), pre.end()), pre.end());
    if (pre.size() != 2) {
      out.push_back({c, c, c, "expected exactly two preimages, found " + std::to_string(pre.size())});
      continue;
    }
    // A keeps the self-touching factor broken; B keeps it intact.
    const FormalMonomial& first = pre[0];
    const FormalMonomial& second = pre[1];
    const bool first_is_b = first.touches_itself(a);
    const FormalMonomial& am = first_is_b ? second : first;
    const FormalMonomial& bm = first_is_b ? first : second;
    const bool ha = p.coefficient(am) != 0;
    const bool hb = p.coefficient(bm) != 0;
    if (ha != hb)
      out.push_back({c, am, bm, ha ? "A is a monomial of P but B is not"
                                   : "B is a monomial of P but A is not"});
  }
  return out;
}

FormalPolynomial restrict_polynomial(const FormalPolynomial& p) {
  if (p.dim() < 2) throw DomainError("restriction needs dimension at least 2");
  FormalPolynomial out(p.dim() - 1);
  for (const auto& [m, c] : p.terms()) {
    if (m.contains(p.dim())) continue;
    out.add(FormalMonomial(p.dim() - 1, m.l_factors(), m.g_factors(), m.output()), c);
  }
  return out;
}

}  // namespace gbcurv
