#pragma once

#include <cstdint>

#include "nambu/skew_tensor.hpp"

namespace nambu {

/// Orthonormal basis of ker(J): directions c with J^{ijk} c_k = 0.
struct KernelBasis {
    int n = 0;
    std::vector<Covector> basis;

    int dimension() const { return static_cast<int>(basis.size()); }
};

/// Covector pair with J(u,v) = 0 while J(u) != 0 and J(v) != 0, plus the
/// certificate norms backing those three statements.
struct SemiCasimirPair {
    Covector u, v;
    double norm_ju = 0, norm_jv = 0, norm_juv = 0;
};

struct SemiCasimirCheck {
    bool accepted = false;
    std::string rejection; // failed condition, empty when accepted
    SemiCasimirPair pair;  // certificates populated either way
};

/// Nullspace of the n^2 x n matrix M[(i,j),k] = J^{ijk}, constant J only.
KernelBasis casimir_space(const SkewTensor3& j, double tol = 1e-10);

/// Checks the three semi-Casimir conditions; rejects proportional covectors.
/// Throws on a zero input covector.
SemiCasimirCheck verify_semi_casimir(const SkewTensor3& j, const Covector& u, const Covector& v,
                                     double tol = 1e-8);

// Heuristic search: candidate u of the form e_i, e_i +- e_j and random draws
// (Casimir components projected out), partners v taken from the nullspace of
// the middle-slot pairing matrix, accepted pairs deduplicated by the
// principal angle between their 2-planes. No completeness claim.
std::vector<SemiCasimirPair> find_semi_casimir_pairs(const SkewTensor3& j, int attempts,
                                                     std::uint64_t seed, double tol = 1e-8);

} // namespace nambu
