#pragma once

// Orthonormal-frame tensor primitives: signatures, the generalized Kronecker
// delta and algebraic curvature tensors.
//
// Index convention: every public accessor takes 1-based indices. The `at0`
// accessors are the 0-based fast path used by the evaluators.

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace gbcurv {

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Sign pattern xi_i = g(e_i, e_i) of an orthonormal frame.
class Signature {
 public:
  explicit Signature(std::vector<int> signs);

  static Signature riemannian(int dim);
  /// First `timelike` directions are negative, the rest positive.
  static Signature with_timelike(int dim, int timelike);

  int dim() const { return static_cast<int>(signs_.size()); }
  int p() const { return p_; }
  int q() const { return dim() - p_; }

  /// 1-based.
  int operator()(int i) const;
  int at0(int i) const { return signs_[static_cast<std::size_t>(i)]; }
  std::span<const int> signs() const { return signs_; }
  Eigen::MatrixXd eta() const;

  Signature appended(int sign) const;
  /// Drops the first entry (normal direction of a boundary-adapted frame).
  Signature tangential() const;

  std::string to_string() const;
  bool operator==(const Signature&) const = default;

 private:
  std::vector<int> signs_;
  int p_ = 0;
};

/// det(g(e^{i_mu}, e^{j_nu})) for 1-based index lists.
double generalized_delta(const Signature& signs, std::span<const int> upper,
                         std::span<const int> lower);

/// Symmetric 2-tensor in an orthonormal frame. Components are stored exactly
/// symmetric.
class SymTwoTensor {
 public:
  explicit SymTwoTensor(int dim);
  /// Symmetrizes (A + A^T) / 2.
  explicit SymTwoTensor(const Eigen::MatrixXd& a);

  static SymTwoTensor zero(int dim) { return SymTwoTensor(dim); }

  int dim() const { return static_cast<int>(m_.rows()); }
  double operator()(int i, int j) const { return m_(i - 1, j - 1); }
  double at0(int i, int j) const { return m_(i, j); }
  void set(int i, int j, double v);
  const Eigen::MatrixXd& matrix() const { return m_; }

  /// sum_ij a_ij b_ij, the frame pairing used by the variational formulas.
  double pair(const SymTwoTensor& other) const;

  /// Components in the frame e'_i = sum_a O_ai e_a, treating the stored
  /// values as covariant (O^T A O).
  SymTwoTensor covariant_transform(const Eigen::MatrixXd& o) const;
  /// Same frame change for contravariant components (O^-1 A O^-T).
  SymTwoTensor contravariant_transform(const Eigen::MatrixXd& o) const;

 private:
  Eigen::MatrixXd m_;
};

/// Second fundamental form L_ab on the boundary. Indices a,b run over the
/// tangential labels 2..m of the ambient boundary-adapted frame.
class SecondFundamentalForm {
 public:
  explicit SecondFundamentalForm(SymTwoTensor components);
  explicit SecondFundamentalForm(const Eigen::MatrixXd& a)
      : SecondFundamentalForm(SymTwoTensor(a)) {}

  int boundary_dim() const { return l_.dim(); }
  /// a, b in 2..m.
  double operator()(int a, int b) const { return l_(a - 1, b - 1); }
  double at0(int a, int b) const { return l_.at0(a, b); }
  const SymTwoTensor& components() const { return l_; }

 private:
  SymTwoTensor l_;
};

/// Rank-4 tensor with R_ijkl = -R_jikl = R_klij holding exactly and the first
/// Bianchi identity holding to rounding.
class AlgebraicCurvature {
 public:
  /// Zero tensor.
  explicit AlgebraicCurvature(int dim);

  /// Averages the 8 images of each component under the pair symmetries. No
  /// Bianchi projection; use `project` for arbitrary input.
  static AlgebraicCurvature symmetrized(int dim, std::span<const double> raw);
  /// Full projection onto the curvature-symmetry subspace.
  static AlgebraicCurvature project(int dim, std::span<const double> raw);

  int dim() const { return dim_; }
  double operator()(int i, int j, int k, int l) const {
    return at0(i - 1, j - 1, k - 1, l - 1);
  }
  double at0(int i, int j, int k, int l) const {
    return c_[offset(i, j, k, l)];
  }
  /// Writes the value through all 8 symmetry images (1-based).
  void set(int i, int j, int k, int l, double v);

  std::span<const double> components() const { return c_; }
  double max_abs() const;
  /// max |R_ijkl + R_jkil + R_kijl| / max(1, max |R|).
  double bianchi_residual() const;
  /// max over components of |R_ijkl + R_jikl| + |R_ijkl - R_klij|.
  double symmetry_residual() const;

  /// Components in the frame e'_i = sum_a O_ai e_a.
  AlgebraicCurvature transformed(const Eigen::MatrixXd& o) const;
  /// Restriction to the indices 2..m (boundary tangential block).
  AlgebraicCurvature tangential() const;

 private:
  std::size_t offset(int i, int j, int k, int l) const {
    const auto m = static_cast<std::size_t>(dim_);
    return ((static_cast<std::size_t>(i) * m + static_cast<std::size_t>(j)) * m +
            static_cast<std::size_t>(k)) * m + static_cast<std::size_t>(l);
  }
  void set0(int i, int j, int k, int l, double v);

  int dim_;
  std::vector<double> c_;
};

AlgebraicCurvature random_curvature(int dim, std::uint64_t seed);

/// Space form: R_ijji = kappa xi_i xi_j for i != j.
AlgebraicCurvature constant_curvature(int dim, double kappa,
                                      const Signature& signs);

/// Product of the plane transformations T_{a,b}(theta) with random angles,
/// an element of the identity component of O(p,q). Rotations in definite
/// planes, boosts in mixed planes. Boost angles are drawn from
/// [-boost_range, boost_range].
Eigen::MatrixXd random_frame_change(const Signature& signs, std::uint64_t seed,
                                    double boost_range = 0.5);

/// T_{a,b}(theta) as a matrix acting on frame vectors by columns (1-based a, b).
Eigen::MatrixXd plane_transformation(const Signature& signs, int a, int b,
                                     double theta);

}  // namespace gbcurv
