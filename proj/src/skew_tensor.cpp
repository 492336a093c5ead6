#include "nambu/skew_tensor.hpp"

#include <algorithm>
#include <cmath>

namespace nambu {

namespace {

// sorts (i,j,k) ascending and returns the permutation sign; 0 on repeats
int sort_sign(int& i, int& j, int& k) {
    int sign = 1;
    if (i > j) { std::swap(i, j); sign = -sign; }
    if (j > k) { std::swap(j, k); sign = -sign; }
    if (i > j) { std::swap(i, j); sign = -sign; }
    if (i == j || j == k) return 0;
    return sign;
}

void check_range(int n, int i, int j, int k) {
    if (i < 0 || i >= n || j < 0 || j >= n || k < 0 || k >= n)
        throw TensorError("tensor index out of range for dimension " + std::to_string(n));
}

} // namespace

SkewTensor3::SkewTensor3(int n, Variance variance) : n_(n), variance_(variance) {
    if (n < 3) throw TensorError("skew order-3 tensor needs dimension >= 3");
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            for (int k = j + 1; k < n; ++k) triples_.push_back({i, j, k});
    c_.assign(triples_.size(), 0.0);
}

std::size_t SkewTensor3::index_of(int i, int j, int k) const {
    // lexicographic rank of the combination i<j<k
    auto c2 = [](long m) { return m * (m - 1) / 2; };
    auto c3 = [](long m) { return m * (m - 1) * (m - 2) / 6; };
    long idx = c3(n_) - c3(n_ - i) + c2(n_ - i - 1) - c2(n_ - j) + (k - j - 1);
    return static_cast<std::size_t>(idx);
}

double SkewTensor3::component(int i, int j, int k) const {
    check_range(n_, i, j, k);
    int sign = sort_sign(i, j, k);
    if (sign == 0) return 0.0;
    return sign * c_[index_of(i, j, k)];
}

double& SkewTensor3::canonical(int i, int j, int k) { return c_[index_of(i, j, k)]; }
double SkewTensor3::canonical(int i, int j, int k) const { return c_[index_of(i, j, k)]; }

double SkewTensor3::max_abs() const {
    double m = 0.0;
    for (double v : c_) m = std::max(m, std::abs(v));
    return m;
}

SkewTensor3 make_skew3(int n, Variance variance, std::span<const TripleEntry> entries) {
    SkewTensor3 t(n, variance);
    std::vector<bool> seen(t.triple_count(), false);
    for (const auto& e : entries) {
        check_range(n, e.i, e.j, e.k);
        int i = e.i, j = e.j, k = e.k;
        int sign = sort_sign(i, j, k);
        if (sign == 0)
            throw TensorError("repeated index in triple (" + std::to_string(e.i + 1) + "," +
                              std::to_string(e.j + 1) + "," + std::to_string(e.k + 1) + ")");
        std::size_t pos = t.canonical_index(i, j, k);
        if (seen[pos])
            throw TensorError("duplicate entry for triple (" + std::to_string(i + 1) + "," +
                              std::to_string(j + 1) + "," + std::to_string(k + 1) + ")");
        seen[pos] = true;
        t.canonical(i, j, k) = sign * e.value;
    }
    return t;
}

SkewTensor3 levi_civita(Variance variance) {
    SkewTensor3 t(3, variance);
    t.canonical(0, 1, 2) = 1.0;
    return t;
}

SkewTensor3 generalized_E(int m, int s, Variance variance) {
    if (m < 0 || s < 0 || 3 * m + s < 3)
        throw TensorError("generalized_E needs m >= 0, s >= 0, 3m+s >= 3");
    SkewTensor3 t(3 * m + s, variance);
    for (int i = 0; i < m; ++i) t.canonical(i, m + i, 2 * m + i) = 1.0;
    return t;
}

FlatMatrix flatten(const SkewTensor3& t) {
    const int n = t.dim();
    FlatMatrix fm;
    fm.n = n;
    fm.m = Eigen::MatrixXd::Zero(n, n * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                if (i == j || j == k || i == k) continue;
                fm.m(i, j * n + k) = t.component(i, j, k);
            }
    return fm;
}

int flat_rank(const FlatMatrix& fm, double tol) {
    if (tol <= 0) throw TensorError("rank tolerance must be positive");
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(fm.m);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) == 0.0) return 0;
    int r = 0;
    for (Eigen::Index q = 0; q < sv.size(); ++q)
        if (sv(q) >= tol * sv(0)) ++r;
    return r;
}

SkewTensor3 right_inverse(const SkewTensor3& w, double tol) {
    const int n = w.dim();
    FlatMatrix fm = flatten(w);

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(fm.m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    int rank = 0;
    for (Eigen::Index q = 0; q < sv.size(); ++q)
        if (sv(0) > 0 && sv(q) >= tol * sv(0)) ++rank;
    if (rank < n)
        throw RankDeficiencyError("flattened tensor has rank " + std::to_string(rank) +
                                  " < n = " + std::to_string(n) + "; no right inverse");

    // minimal-Frobenius-norm solution of A B = 2 I_n
    Eigen::MatrixXd b = svd.matrixV() * sv.head(n).cwiseInverse().asDiagonal() *
                        svd.matrixU().transpose() * 2.0;

    // full antisymmetrizer over (j,k,l)
    Variance out_var =
        w.variance() == Variance::covariant ? Variance::contravariant : Variance::covariant;
    SkewTensor3 j(n, out_var);
    auto raw = [&](int a, int p, int q) { return b(a * n + p, q); };
    for (const auto& tr : j.triples()) {
        int a = tr[0], p = tr[1], q = tr[2];
        j.canonical(a, p, q) = (raw(a, p, q) - raw(p, a, q) + raw(p, q, a) -
                                raw(q, p, a) + raw(q, a, p) - raw(a, q, p)) / 6.0;
    }

    double res = inverse_residual(w, j);
    if (res > tol * std::max(1.0, j.max_abs() * w.max_abs()))
        throw NoSkewInverseError(
            "no skew-symmetric inverse found by this method (residual " +
            std::to_string(res) + ")");
    return j;
}

double inverse_residual(const SkewTensor3& w, const SkewTensor3& j) {
    const int n = w.dim();
    if (j.dim() != n) throw TensorError("inverse_residual: dimension mismatch");
    double worst = 0.0;
    for (int i = 0; i < n; ++i)
        for (int l = 0; l < n; ++l) {
            double sum = 0.0;
            for (int p = 0; p < n; ++p)
                for (int q = p + 1; q < n; ++q) sum += w.component(i, p, q) * j.component(p, q, l);
            worst = std::max(worst, std::abs(sum - (i == l ? 1.0 : 0.0)));
        }
    return worst;
}

Eigen::MatrixXd contract_last(const SkewTensor3& j, const Covector& u) {
    const int n = j.dim();
    if (static_cast<int>(u.size()) != n) throw TensorError("contract_last: dimension mismatch");
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (const auto& tr : j.triples()) {
        double v = j.canonical(tr[0], tr[1], tr[2]);
        if (v == 0.0) continue;
        // distribute J^{abc} u_c over the three cyclic placements
        int a = tr[0], b = tr[1], c = tr[2];
        m(a, b) += v * u[static_cast<std::size_t>(c)];
        m(b, a) -= v * u[static_cast<std::size_t>(c)];
        m(b, c) += v * u[static_cast<std::size_t>(a)];
        m(c, b) -= v * u[static_cast<std::size_t>(a)];
        m(c, a) += v * u[static_cast<std::size_t>(b)];
        m(a, c) -= v * u[static_cast<std::size_t>(b)];
    }
    return m;
}

Eigen::VectorXd contract_last2(const SkewTensor3& j, const Covector& u, const Covector& v) {
    const int n = j.dim();
    if (static_cast<int>(u.size()) != n || static_cast<int>(v.size()) != n)
        throw TensorError("contract_last2: dimension mismatch");
    // X^i = sum_j [sum_k J^{ijk} v_k] u_j
    Eigen::MatrixXd m = contract_last(j, v);
    Eigen::VectorXd uu = Eigen::Map<const Eigen::VectorXd>(u.data(), n);
    return m * uu;
}

double check_inv2(const SkewTensor3& w, const SkewTensor3& j, double f) {
    const int n = w.dim();
    if (j.dim() != n) throw TensorError("check_inv2: dimension mismatch");
    double worst = 0.0;
    for (int i = 0; i < n; ++i)
        for (int jj = 0; jj < n; ++jj)
            for (int l = 0; l < n; ++l)
                for (int mu = 0; mu < n; ++mu) {
                    double sum = 0.0;
                    for (int k = 0; k < n; ++k) sum += w.component(i, jj, k) * j.component(k, l, mu);
                    double target = f * ((i == l && jj == mu ? 1.0 : 0.0) -
                                         (i == mu && jj == l ? 1.0 : 0.0));
                    worst = std::max(worst, std::abs(sum - target));
                }
    return worst;
}

double check_inv2(const SkewTensor3& w, const SkewTensor3& j, const ScalarField& f,
                  std::span<const State> points) {
    double worst = 0.0;
    for (const auto& x : points) worst = std::max(worst, check_inv2(w, j, f.eval(x)));
    return worst;
}

} // namespace nambu
