#include "nambu/canonical.hpp"

#include <cmath>

namespace nambu {

SkewTensor3 transform(const SkewTensor3& a, const BasisChange& t, double det_tol) {
    const int n = a.dim();
    if (t.t.rows() != n || t.t.cols() != n)
        throw TensorError("transform: basis change has wrong shape");

    Eigen::PartialPivLU<Eigen::MatrixXd> lu(t.t);
    double det = lu.determinant();
    if (std::abs(det) <= det_tol) throw TensorError("transform: singular basis change");

    // covariant slots contract T, contravariant slots contract T^{-1}
    Eigen::MatrixXd m = a.variance() == Variance::covariant
                            ? t.t
                            : Eigen::MatrixXd(lu.inverse().transpose());

    SkewTensor3 out(n, a.variance());
    for (const auto& dst : out.triples()) {
        double sum = 0.0;
        for (const auto& src : a.triples()) {
            double v = a.canonical(src[0], src[1], src[2]);
            if (v == 0.0) continue;
            // full antisymmetrized contraction = 3x3 minor determinant
            double m00 = m(src[0], dst[0]), m01 = m(src[0], dst[1]), m02 = m(src[0], dst[2]);
            double m10 = m(src[1], dst[0]), m11 = m(src[1], dst[1]), m12 = m(src[1], dst[2]);
            double m20 = m(src[2], dst[0]), m21 = m(src[2], dst[1]), m22 = m(src[2], dst[2]);
            double minor = m00 * (m11 * m22 - m12 * m21) - m01 * (m10 * m22 - m12 * m20) +
                           m02 * (m10 * m21 - m11 * m20);
            sum += v * minor;
        }
        out.canonical(dst[0], dst[1], dst[2]) = sum;
    }
    return out;
}

double verify_canonicalizing_map(const SkewTensor3& a, const BasisChange& t, int m, int s) {
    const int n = a.dim();
    if (n != 3 * m + s) throw TensorError("verify_canonicalizing_map: n != 3m+s");
    SkewTensor3 got = transform(a, t);
    SkewTensor3 want = generalized_E(m, s, a.variance());
    double worst = 0.0;
    for (const auto& tr : got.triples())
        worst = std::max(worst, std::abs(got.canonical(tr[0], tr[1], tr[2]) -
                                         want.canonical(tr[0], tr[1], tr[2])));
    return worst;
}

std::optional<BlockFormWitness> detect_block_form(const SkewTensor3& a, double tol) {
    const int n = a.dim();
    double scale = a.max_abs();
    if (scale == 0.0) return std::nullopt; // zero tensor is E(0,n) only for n=s; reject

    // support triples, which must be pairwise disjoint
    std::vector<std::array<int, 3>> sup;
    std::vector<double> vals;
    for (const auto& tr : a.triples()) {
        double v = a.canonical(tr[0], tr[1], tr[2]);
        if (std::abs(v) > tol * scale) {
            sup.push_back(tr);
            vals.push_back(v);
        }
    }
    if (sup.empty()) return std::nullopt;

    std::vector<int> used(static_cast<std::size_t>(n), 0);
    for (const auto& tr : sup)
        for (int ix : tr)
            if (used[static_cast<std::size_t>(ix)]++) return std::nullopt; // shared index

    const int m = static_cast<int>(sup.size());
    const int s = n - 3 * m;

    BlockFormWitness w;
    w.m = m;
    w.s = s;
    w.axis_map.assign(static_cast<std::size_t>(n), -1);
    w.scalings = vals;

    for (int r = 0; r < m; ++r) {
        auto [p, q, rr] = std::tuple{sup[static_cast<std::size_t>(r)][0],
                                     sup[static_cast<std::size_t>(r)][1],
                                     sup[static_cast<std::size_t>(r)][2]};
        // a negative value is absorbed by an odd relabeling inside the triplet
        if (vals[static_cast<std::size_t>(r)] < 0.0) std::swap(q, rr);
        w.axis_map[static_cast<std::size_t>(p)] = r;
        w.axis_map[static_cast<std::size_t>(q)] = m + r;
        w.axis_map[static_cast<std::size_t>(rr)] = 2 * m + r;
    }
    int next_kernel = 3 * m;
    for (int i = 0; i < n; ++i)
        if (w.axis_map[static_cast<std::size_t>(i)] < 0) w.axis_map[static_cast<std::size_t>(i)] = next_kernel++;

    // columns of T are scaled indicators: new axis j pulls from old axis
    // axis_map^{-1}(j) with the cube-root-of-scale weight of its triplet
    w.map.t = Eigen::MatrixXd::Zero(n, n);
    for (int old = 0; old < n; ++old) {
        int nu = w.axis_map[static_cast<std::size_t>(old)];
        double d = 1.0;
        if (nu < 3 * m) {
            int triplet = nu % m; // new layout places triplet r at (r, m+r, 2m+r)
            double v = std::abs(vals[static_cast<std::size_t>(triplet)]);
            d = a.variance() == Variance::covariant ? std::pow(v, -1.0 / 3.0)
                                                    : std::pow(v, 1.0 / 3.0);
        }
        w.map.t(old, nu) = d;
    }

    // belt check before claiming success
    if (a.variance() == Variance::covariant) {
        if (verify_canonicalizing_map(a, w.map, m, s) > 1e-9 * std::max(1.0, scale))
            return std::nullopt;
    } else {
        SkewTensor3 got = transform(a, w.map);
        SkewTensor3 want = generalized_E(m, s, a.variance());
        double worst = 0.0;
        for (const auto& tr : got.triples())
            worst = std::max(worst, std::abs(got.canonical(tr[0], tr[1], tr[2]) -
                                             want.canonical(tr[0], tr[1], tr[2])));
        if (worst > 1e-9 * std::max(1.0, scale)) return std::nullopt;
    }
    return w;
}

} // namespace nambu
