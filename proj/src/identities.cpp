#include "nambu/identities.hpp"

#include <cmath>

namespace nambu {

ScalarField TwoForm::component_field(int j, int k) const {
    if (j == k) return ScalarField::constant(0.0, n);
    bool flip = j > k;
    if (flip) std::swap(j, k);
    auto it = comps.find({j, k});
    if (it == comps.end()) return ScalarField::constant(0.0, n);
    return flip ? -it->second : it->second;
}

SymplecticForm3 exterior_derivative(const TwoForm& sigma) {
    const int n = sigma.n;
    std::map<std::array<int, 3>, ScalarField> entries;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            for (int k = j + 1; k < n; ++k) {
                // (d sigma)_{ijk} = d_i sigma_{jk} - d_j sigma_{ik} + d_k sigma_{ij}
                ScalarField c = sigma.component_field(j, k).diff(i) -
                                sigma.component_field(i, k).diff(j) +
                                sigma.component_field(i, j).diff(k);
                double v;
                if (c.is_constant(&v) && v == 0.0) continue;
                entries.emplace(std::array<int, 3>{i, j, k}, std::move(c));
            }
    return SymplecticForm3::field(n, Variance::covariant, std::move(entries));
}

ResidualReport closure_residual(const SymplecticForm3& w, std::span<const State> points) {
    const int n = w.dim();
    ResidualReport rep;

    // four-term sums, built symbolically once per index quadruple
    std::vector<std::pair<std::array<int, 4>, ScalarField>> sums;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            for (int k = j + 1; k < n; ++k)
                for (int l = k + 1; l < n; ++l) {
                    ScalarField s = w.component_field(i, j, k).diff(l) +
                                    w.component_field(i, l, j).diff(k) +
                                    w.component_field(i, k, l).diff(j) +
                                    w.component_field(j, l, k).diff(i);
                    double v;
                    if (s.is_constant(&v) && v == 0.0) continue;
                    sums.push_back({{i, j, k, l}, std::move(s)});
                }

    for (const auto& x : points) {
        for (const auto& [idx, s] : sums)
            rep.consider(s.eval(x), x, {idx[0], idx[1], idx[2], idx[3]});
        ++rep.samples;
        if (sums.empty()) rep.consider(0.0, x, {});
    }
    return rep;
}

namespace {

void verify_pairing(const PoissonOperator3& j, const SymplecticForm3& w, const State& x,
                    double tol) {
    const int n = j.dim();
    for (int i = 0; i < n; ++i)
        for (int l = 0; l < n; ++l) {
            double sum = 0.0;
            for (int p = 0; p < n; ++p)
                for (int q = p + 1; q < n; ++q)
                    sum += w.component_at(i, p, q, x) * j.component_at(p, q, l, x);
            double err = std::abs(sum - (i == l ? 1.0 : 0.0));
            if (err > tol)
                throw PairingError("operator/form pair violates the inverse identity by " +
                                   std::to_string(err) + " at a sample point");
        }
}

} // namespace

ResidualReport jacobi_necessary_residual(const PoissonOperator3& j, const SymplecticForm3& w,
                                         std::span<const State> points, const NcjOptions& opts) {
    const int n = j.dim();
    if (w.dim() != n) throw TensorError("jacobi_necessary_residual: dimension mismatch");

    // dJ^{abc}/dx^l for every stored triple, computed once
    auto support = j.support();
    std::map<std::array<int, 3>, std::vector<ScalarField>> dj;
    for (const auto& tr : support) {
        std::vector<ScalarField> per_l;
        per_l.reserve(static_cast<std::size_t>(n));
        ScalarField comp = j.component_field(tr[0], tr[1], tr[2]);
        for (int l = 0; l < n; ++l) per_l.push_back(comp.diff(l));
        dj.emplace(tr, std::move(per_l));
    }
    // signed derivative lookup for arbitrary index order
    auto dj_at = [&](int a, int b, int c, int l) -> ScalarField {
        int i = a, jj = b, k = c, sign = 1;
        if (i > jj) { std::swap(i, jj); sign = -sign; }
        if (jj > k) { std::swap(jj, k); sign = -sign; }
        if (i > jj) { std::swap(i, jj); sign = -sign; }
        if (i == jj || jj == k) return ScalarField::constant(0.0, n);
        auto it = dj.find({i, jj, k});
        if (it == dj.end()) return ScalarField::constant(0.0, n);
        const ScalarField& d = it->second[static_cast<std::size_t>(l)];
        return sign == 1 ? d : -d;
    };

    auto wsupport = w.support();

    // residual field per (alpha, beta); the final displayed sum carries an
    // overall factor of 4
    std::vector<std::pair<std::array<int, 2>, ScalarField>> res;
    for (int alpha = 0; alpha < n; ++alpha)
        for (int beta = 0; beta < n; ++beta) {
            ScalarField total = ScalarField::constant(0.0, n);
            for (const auto& tr : wsupport) {
                int i = tr[0], jj = tr[1], k = tr[2];
                ScalarField inner = ScalarField::constant(0.0, n);
                for (int l = 0; l < n; ++l) {
                    inner = inner + j.component_field(beta, k, l) * dj_at(alpha, i, jj, l)
                                  + j.component_field(alpha, i, l) * dj_at(beta, jj, k, l)
                                  + j.component_field(alpha, jj, l) * dj_at(beta, k, i, l)
                                  + j.component_field(beta, jj, l) * dj_at(alpha, k, i, l)
                                  + j.component_field(alpha, k, l) * dj_at(beta, i, jj, l)
                                  + j.component_field(beta, i, l) * dj_at(alpha, jj, k, l);
                }
                total = total + w.component_field(i, jj, k) * inner;
            }
            total = 4.0 * total;
            double v;
            if (total.is_constant(&v) && v == 0.0) continue;
            res.push_back({{alpha, beta}, std::move(total)});
        }

    ResidualReport rep;
    for (const auto& x : points) {
        if (opts.check_pairing) verify_pairing(j, w, x, opts.pairing_tol);
        for (const auto& [ab, field] : res) rep.consider(field.eval(x), x, {ab[0], ab[1]});
        ++rep.samples;
        if (res.empty()) rep.consider(0.0, x, {});
    }
    return rep;
}

ResidualReport classical_jacobi_residual(const OperatorMatrix& p, std::span<const State> points) {
    const int n = p.n;

    // dP^{ab}/dx^m precomputed for a<b
    std::vector<std::vector<ScalarField>> dp(static_cast<std::size_t>(n * n));
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) {
            auto& per_m = dp[static_cast<std::size_t>(a * n + b)];
            per_m.reserve(static_cast<std::size_t>(n));
            for (int m = 0; m < n; ++m) per_m.push_back(p.at(a, b).diff(m));
        }
    auto dP = [&](int a, int b, int m) -> ScalarField {
        if (a == b) return ScalarField::constant(0.0, n);
        if (a < b) return dp[static_cast<std::size_t>(a * n + b)][static_cast<std::size_t>(m)];
        return -dp[static_cast<std::size_t>(b * n + a)][static_cast<std::size_t>(m)];
    };

    std::vector<std::pair<std::array<int, 3>, ScalarField>> sums;
    for (int i = 0; i < n; ++i)
        for (int jj = i + 1; jj < n; ++jj)
            for (int k = jj + 1; k < n; ++k) {
                ScalarField s = ScalarField::constant(0.0, n);
                for (int m = 0; m < n; ++m) {
                    s = s + p.at(i, m) * dP(jj, k, m)
                          + p.at(jj, m) * dP(k, i, m)
                          + p.at(k, m) * dP(i, jj, m);
                }
                double v;
                if (s.is_constant(&v) && v == 0.0) continue;
                sums.push_back({{i, jj, k}, std::move(s)});
            }

    ResidualReport rep;
    for (const auto& x : points) {
        for (const auto& [idx, s] : sums) rep.consider(s.eval(x), x, {idx[0], idx[1], idx[2]});
        ++rep.samples;
        if (sums.empty()) rep.consider(0.0, x, {});
    }
    return rep;
}

ResidualReport fundamental_identity_residual(const PoissonOperator3& j,
                                             const std::array<ScalarField, 5>& f,
                                             std::span<const State> points) {
    const ScalarField& f1 = f[0];
    const ScalarField& f2 = f[1];
    const ScalarField& f3 = f[2];
    const ScalarField& f4 = f[3];
    const ScalarField& f5 = f[4];

    ScalarField lhs = nambu_bracket(j, nambu_bracket(j, f1, f2, f3), f4, f5);
    ScalarField rhs = nambu_bracket(j, nambu_bracket(j, f1, f4, f5), f2, f3) +
                      nambu_bracket(j, f1, nambu_bracket(j, f2, f4, f5), f3) +
                      nambu_bracket(j, f1, f2, nambu_bracket(j, f3, f4, f5));
    ScalarField gap = lhs - rhs;

    ResidualReport rep;
    for (const auto& x : points) {
        rep.consider(gap.eval(x), x, {});
        ++rep.samples;
    }
    return rep;
}

AxiomReport axiom_residuals(const PoissonOperator3& j, std::span<const State> points,
                            std::uint64_t seed, int rounds) {
    const int n = j.dim();
    Rng rng(seed ^ 0x9e3779b97f4a7c15ull);
    AxiomReport rep;

    static const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                    {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    static const int signs[6] = {+1, -1, -1, +1, +1, -1};

    for (int round = 0; round < rounds; ++round) {
        ScalarField f1 = random_polynomial(n, 3, rng);
        ScalarField f2 = random_polynomial(n, 3, rng);
        ScalarField f3 = random_polynomial(n, 3, rng);
        ScalarField f4 = random_polynomial(n, 3, rng);
        double a = rng.uniform(-2.0, 2.0), b = rng.uniform(-2.0, 2.0);

        ScalarField tri = nambu_bracket(j, ScalarField::constant(a, n) * f1 +
                                               ScalarField::constant(b, n) * f2,
                                        f3, f4) -
                          ScalarField::constant(a, n) * nambu_bracket(j, f1, f3, f4) -
                          ScalarField::constant(b, n) * nambu_bracket(j, f2, f3, f4);

        ScalarField base = nambu_bracket(j, f1, f2, f3);
        std::array<const ScalarField*, 3> args = {&f1, &f2, &f3};
        std::vector<ScalarField> skews;
        for (int pi = 1; pi < 6; ++pi) {
            ScalarField perm = nambu_bracket(j, *args[static_cast<std::size_t>(perms[pi][0])],
                                             *args[static_cast<std::size_t>(perms[pi][1])],
                                             *args[static_cast<std::size_t>(perms[pi][2])]);
            skews.push_back(perm - ScalarField::constant(signs[pi], n) * base);
        }

        ScalarField leib = nambu_bracket(j, f1 * f2, f3, f4) -
                           f1 * nambu_bracket(j, f2, f3, f4) -
                           f2 * nambu_bracket(j, f1, f3, f4);

        for (const auto& x : points) {
            rep.trilinearity.consider(tri.eval(x), x, {round});
            for (std::size_t q = 0; q < skews.size(); ++q)
                rep.skew_symmetry.consider(skews[q].eval(x), x, {round, static_cast<int>(q) + 1});
            rep.leibniz.consider(leib.eval(x), x, {round});
        }
    }
    rep.trilinearity.samples = rep.skew_symmetry.samples = rep.leibniz.samples =
        static_cast<int>(points.size()) * rounds;
    return rep;
}

} // namespace nambu
