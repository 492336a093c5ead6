#include "nambu/kernel.hpp"

#include <cmath>

#include "nambu/rng.hpp"

namespace nambu {

namespace {

Eigen::VectorXd to_vec(const Covector& c) {
    return Eigen::Map<const Eigen::VectorXd>(c.data(), static_cast<Eigen::Index>(c.size()));
}

Covector to_cov(const Eigen::VectorXd& v) {
    return Covector(v.data(), v.data() + v.size());
}

/// sin of the largest principal angle between the column spans of two
/// orthonormal n x 2 blocks
double plane_gap(const Eigen::MatrixXd& q1, const Eigen::MatrixXd& q2) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(q1.transpose() * q2);
    double smin = svd.singularValues().minCoeff();
    smin = std::min(1.0, std::max(-1.0, smin));
    return std::sqrt(std::max(0.0, 1.0 - smin * smin));
}

} // namespace

KernelBasis casimir_space(const SkewTensor3& j, double tol) {
    const int n = j.dim();
    Eigen::MatrixXd m(n * n, n);
    for (int i = 0; i < n; ++i)
        for (int p = 0; p < n; ++p)
            for (int k = 0; k < n; ++k)
                m(i * n + p, k) = j.component(i, p, k); // 0 on repeated indices


    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    double smax = sv.size() ? sv(0) : 0.0;

    KernelBasis kb;
    kb.n = n;
    for (int q = 0; q < n; ++q) {
        double s = q < sv.size() ? sv(q) : 0.0;
        if (smax == 0.0 || s < tol * smax) kb.basis.push_back(to_cov(svd.matrixV().col(q)));
    }
    return kb;
}

SemiCasimirCheck verify_semi_casimir(const SkewTensor3& j, const Covector& u, const Covector& v,
                                     double tol) {
    const int n = j.dim();
    if (static_cast<int>(u.size()) != n || static_cast<int>(v.size()) != n)
        throw TensorError("verify_semi_casimir: dimension mismatch");
    Eigen::VectorXd uu = to_vec(u), vv = to_vec(v);
    if (uu.norm() == 0.0 || vv.norm() == 0.0)
        throw TensorError("verify_semi_casimir: zero covector");

    SemiCasimirCheck out;
    out.pair.u = u;
    out.pair.v = v;
    out.pair.norm_ju = contract_last(j, u).norm();
    out.pair.norm_jv = contract_last(j, v).norm();
    out.pair.norm_juv = contract_last2(j, u, v).norm();

    double jscale = std::max(1.0, j.max_abs());
    double cosang = std::abs(uu.dot(vv)) / (uu.norm() * vv.norm());
    if (cosang > 1.0 - 1e-12) {
        out.rejection = "proportional covectors";
        return out;
    }
    if (out.pair.norm_ju <= tol * jscale * uu.norm()) {
        out.rejection = "J(u) = 0 (u is a Casimir direction)";
        return out;
    }
    if (out.pair.norm_jv <= tol * jscale * vv.norm()) {
        out.rejection = "J(v) = 0 (v is a Casimir direction)";
        return out;
    }
    if (out.pair.norm_juv > tol * jscale * uu.norm() * vv.norm()) {
        out.rejection = "J(u,v) != 0";
        return out;
    }
    out.accepted = true;
    return out;
}

std::vector<SemiCasimirPair> find_semi_casimir_pairs(const SkewTensor3& j, int attempts,
                                                     std::uint64_t seed, double tol) {
    const int n = j.dim();
    Rng rng(seed ^ 0x5851f42d4c957f2dull);

    KernelBasis cas = casimir_space(j, tol);
    Eigen::MatrixXd c(n, cas.dimension());
    for (int q = 0; q < cas.dimension(); ++q) c.col(q) = to_vec(cas.basis[static_cast<std::size_t>(q)]);

    auto project_out = [&](Eigen::VectorXd x, const Eigen::MatrixXd& span) {
        for (Eigen::Index q = 0; q < span.cols(); ++q) x -= span.col(q).dot(x) * span.col(q);
        return x;
    };

    // candidate pool: coordinate vectors, signed coordinate pairs, then
    // random draws up to `attempts`
    std::vector<Eigen::VectorXd> pool;
    for (int i = 0; i < n; ++i) pool.push_back(Eigen::VectorXd::Unit(n, i));
    for (int i = 0; i < n; ++i)
        for (int q = i + 1; q < n; ++q) {
            Eigen::VectorXd d = Eigen::VectorXd::Unit(n, i) - Eigen::VectorXd::Unit(n, q);
            Eigen::VectorXd s = Eigen::VectorXd::Unit(n, i) + Eigen::VectorXd::Unit(n, q);
            pool.push_back(d);
            pool.push_back(s);
        }
    while (static_cast<int>(pool.size()) < attempts) {
        Eigen::VectorXd r(n);
        for (int i = 0; i < n; ++i) r(i) = rng.uniform(-1.0, 1.0);
        pool.push_back(r);
    }
    if (static_cast<int>(pool.size()) > attempts) pool.resize(static_cast<std::size_t>(attempts));

    std::vector<SemiCasimirPair> found;
    std::vector<Eigen::MatrixXd> planes;

    for (const auto& raw : pool) {
        Eigen::VectorXd u = project_out(raw, c);
        if (u.norm() < 1e-8) continue;
        u.normalize();

        // partners solve M(u) v = 0 with u in the middle slot; M(u) equals
        // -contract_last(J,u), so the nullspaces coincide
        Eigen::MatrixXd nm = contract_last(j, to_cov(u));
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(nm, Eigen::ComputeFullV);
        const auto& sv = svd.singularValues();
        double smax = sv.size() ? sv(0) : 0.0;
        if (smax == 0.0) continue; // u itself is in the kernel

        for (int q = 0; q < n; ++q) {
            double s = q < sv.size() ? sv(q) : 0.0;
            if (s >= tol * smax) continue;
            Eigen::VectorXd v = project_out(svd.matrixV().col(q), c);
            v -= u.dot(v) * u;
            if (v.norm() < 1e-6) continue;
            v.normalize();

            SemiCasimirCheck chk = verify_semi_casimir(j, to_cov(u), to_cov(v), tol);
            if (!chk.accepted) continue;

            Eigen::MatrixXd plane(n, 2);
            plane.col(0) = u;
            plane.col(1) = v;
            bool dup = false;
            for (const auto& p : planes)
                if (plane_gap(plane, p) <= 1e-6) { dup = true; break; }
            if (dup) continue;

            planes.push_back(plane);
            found.push_back(chk.pair);
        }
    }
    return found;
}

} // namespace nambu
