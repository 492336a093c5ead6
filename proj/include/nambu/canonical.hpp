#pragma once

#include <optional>

#include "nambu/skew_tensor.hpp"

namespace nambu {

/// Linear change of basis y = T x; T must be invertible.
struct BasisChange {
    Eigen::MatrixXd t;
};

// Change-of-basis transform of an order-3 skew tensor. Covariant components
// contract T slotwise, contravariant components contract T^{-1}; either way
// the pullback law composes as transform(transform(A,T1),T2) =
// transform(A, T1*T2) and an inverse pair stays an inverse pair.
SkewTensor3 transform(const SkewTensor3& a, const BasisChange& t, double det_tol = 1e-12);

/// max-norm of transform(A,T) - E(m,s); A covariant constant, n = 3m+s.
double verify_canonicalizing_map(const SkewTensor3& a, const BasisChange& t, int m, int s);

/// Witness that a tensor is E(m,s) up to an index permutation and per-triplet
/// scalings. `axis_map[old] = new` and `map` is the assembled BasisChange
/// with verify_canonicalizing_map(a, map, m, s) ~ 0.
struct BlockFormWitness {
    int m = 0, s = 0;
    std::vector<int> axis_map;
    std::vector<double> scalings; // one per triplet, in detection order
    BasisChange map;
};

// Limited detector: succeeds only when the support triples are pairwise
// disjoint, i.e. the tensor is a relabeled, rescaled E(m,s). Returns nothing
// otherwise; no claim is made about tensors it cannot handle.
std::optional<BlockFormWitness> detect_block_form(const SkewTensor3& a, double tol = 1e-10);

} // namespace nambu
