#pragma once

// Pointwise curvature functionals built from contractions against the
// generalized Kronecker delta: the Euler form, its interior Euler-Lagrange
// tensor, the boundary transgression form and the boundary Euler-Lagrange
// tensor.
//
// The contractions are expanded once per (signature, degree, free indices)
// into a merged list of monomials in R and L and cached, so that evaluation at
// a quadrature node is a short loop over products.
//
// Boundary inputs are indexed by the tangential labels 2..m of the boundary
// adapted frame, stored 0-based (tangential label a sits at slot a - 2).

#include "gbcurv/tensor_core.hpp"

#include <optional>

namespace gbcurv {

/// Vol(S^k) = 2 pi^{(k+1)/2} / Gamma((k+1)/2).
double sphere_volume(int k);

/// E_{m,n}. Zero for odd n and for n > m; 1 for n = 0.
double euler_form(const AlgebraicCurvature& r, const Signature& signs, int n);

/// Contravariant components of the interior Euler-Lagrange tensor.
SymTwoTensor interior_el_tensor(const AlgebraicCurvature& r, const Signature& signs, int n);

/// F_{m,n-1,nu} when `nu` is given, otherwise the sum over 0 <= 2 nu <= n-1.
/// `r_tan` holds ambient curvature restricted to tangential indices.
double boundary_transgression(const AlgebraicCurvature& r_tan, const SecondFundamentalForm& l,
                              const Signature& signs_tan, int n,
                              std::optional<int> nu = std::nullopt);

/// Tangential tensor F_{m,n-1,(nu),ab}; same conventions as the transgression.
SymTwoTensor boundary_el_tensor(const AlgebraicCurvature& r_tan, const SecondFundamentalForm& l,
                                const Signature& signs_tan, int n,
                                std::optional<int> nu = std::nullopt);

/// Number of merged monomials in the cached expansion; exposed for tests.
std::size_t expansion_size(const Signature& signs, int r_factors, int l_factors,
                           std::optional<std::pair<int, int>> free_pair = std::nullopt);

}  // namespace gbcurv
