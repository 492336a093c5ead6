#pragma once

#include <Eigen/Dense>
#include <array>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "nambu/expr.hpp"

namespace nambu {

struct TensorError : std::runtime_error {
    explicit TensorError(const std::string& msg) : std::runtime_error(msg) {}
};

enum class Variance { covariant, contravariant };

/// Constant covector (a 1-form with constant coefficients).
using Covector = std::vector<double>;

struct TripleEntry {
    int i, j, k; // 0-based, any order
    double value;
};

// Fully antisymmetric order-3 tensor, dense over the n(n-1)(n-2)/6
// independent components with i<j<k. Every other component is derived by the
// permutation sign rule; repeated indices evaluate to zero.
class SkewTensor3 {
public:
    SkewTensor3(int n, Variance variance);

    int dim() const { return n_; }
    Variance variance() const { return variance_; }

    /// Signed component for arbitrary index order; throws on out-of-range.
    double component(int i, int j, int k) const;

    /// Canonical component (requires i<j<k).
    double& canonical(int i, int j, int k);
    double canonical(int i, int j, int k) const;

    /// All canonical triples (i<j<k) in lexicographic order.
    const std::vector<std::array<int, 3>>& triples() const { return triples_; }

    std::size_t triple_count() const { return triples_.size(); }

    /// Position of the canonical triple i<j<k within triples().
    std::size_t canonical_index(int i, int j, int k) const { return index_of(i, j, k); }

    double max_abs() const;

    bool operator==(const SkewTensor3&) const = default;

private:
    int n_;
    Variance variance_;
    std::vector<double> c_;
    std::vector<std::array<int, 3>> triples_;

    std::size_t index_of(int i, int j, int k) const; // i<j<k
};

/// Canonicalizes arbitrary-order entries with sign adjustment. Throws on
/// out-of-range indices, repeated indices, and duplicate canonical triples.
SkewTensor3 make_skew3(int n, Variance variance, std::span<const TripleEntry> entries);

/// The n=3 Levi-Civita symbol: component(0,1,2) = 1.
SkewTensor3 levi_civita(Variance variance = Variance::contravariant);

/// Generalized Levi-Civita symbol E on n = 3m+s: component(a,b,c) is the
/// permutation sign when {a,b,c} = {i, m+i, 2m+i} for some i in [0,m), else 0.
SkewTensor3 generalized_E(int m, int s, Variance variance = Variance::contravariant);

/// The n x n^2 row-major flattening w_{i(jk)}; column (j,k) sits at j*n+k.
struct FlatMatrix {
    int n = 0;
    Eigen::MatrixXd m; // n rows, n^2 columns
};

FlatMatrix flatten(const SkewTensor3& t);

/// Numerical rank: count of singular values >= tol * sigma_max.
int flat_rank(const FlatMatrix& fm, double tol = 1e-10);

struct RankDeficiencyError : TensorError {
    explicit RankDeficiencyError(const std::string& msg) : TensorError(msg) {}
};
struct NoSkewInverseError : TensorError {
    explicit NoSkewInverseError(const std::string& msg) : TensorError(msg) {}
};

// Right inverse of a covariant 3-tensor through the n x n^2 flattening:
// returns contravariant J with sum_{j<k} w_ijk J^{jkl} = delta_i^l
// (full-sum contraction w_ijk J^{jkl} = 2 delta_i^l). Among the right
// inverses of the flattened matrix the minimal-Frobenius-norm one is taken,
// projected onto fully antisymmetric tensors, and the inverse identity is
// re-verified; failure of that verification throws NoSkewInverseError.
// Also accepts a contravariant tensor, returning its covariant inverse.
SkewTensor3 right_inverse(const SkewTensor3& w, double tol = 1e-10);

/// max_{i,l} |sum_{j<k} w_ijk J^{jkl} - delta_i^l| for an inverse candidate.
double inverse_residual(const SkewTensor3& w, const SkewTensor3& j);

/// Bivector J(du): M^{ij} = sum_k J^{ijk} u_k (a skew n x n matrix).
Eigen::MatrixXd contract_last(const SkewTensor3& j, const Covector& u);

/// Vector J(du,dv): X^i = sum_{jk} J^{ijk} u_j v_k.
Eigen::VectorXd contract_last2(const SkewTensor3& j, const Covector& u, const Covector& v);

/// Residual of the pairing w_ijk J^{klm} = f (d_i^l d_j^m - d_i^m d_j^l):
/// max over index quadruples, constant-f version.
double check_inv2(const SkewTensor3& w, const SkewTensor3& j, double f);

/// Field-f version, maximized over the given sample points as well.
double check_inv2(const SkewTensor3& w, const SkewTensor3& j, const ScalarField& f,
                  std::span<const State> points);

} // namespace nambu
