#include <doctest.h>

#include "nambu/skew_tensor.hpp"
#include "support/oracles.hpp"

using namespace nambu;

namespace {

SkewTensor3 tensor_of(int n, Variance v, std::initializer_list<TripleEntry> entries) {
    std::vector<TripleEntry> e(entries);
    return make_skew3(n, v, e);
}

/// two-block tensor on R^6: d1 ^ (d2 ^ d3 + d4 ^ d5)
SkewTensor3 r6_example(Variance v = Variance::contravariant) {
    return tensor_of(6, v, {{0, 1, 2, 1.0}, {0, 3, 4, 1.0}});
}

} // namespace

TEST_CASE("make_skew3 canonicalizes with sign adjustment") {
    SkewTensor3 t = tensor_of(3, Variance::contravariant, {{1, 0, 2, 1.0}});
    CHECK(t.component(0, 1, 2) == -1.0);
    CHECK(t.component(1, 0, 2) == 1.0);

    CHECK_THROWS_AS(tensor_of(4, Variance::covariant, {{0, 1, 1, 5.0}}), TensorError);
    CHECK_THROWS_AS(tensor_of(4, Variance::covariant, {{0, 1, 5, 1.0}}), TensorError);
    CHECK_THROWS_AS(tensor_of(4, Variance::covariant, {{0, 1, 2, 1.0}, {1, 0, 2, 2.0}}),
                    TensorError);
}

TEST_CASE("component obeys the permutation sign rule everywhere (n <= 6)") {
    Rng rng(3);
    for (int n = 3; n <= 6; ++n) {
        SkewTensor3 t(n, Variance::contravariant);
        for (const auto& tr : t.triples()) t.canonical(tr[0], tr[1], tr[2]) = rng.uniform(-2, 2);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) {
                    int sign = oracles::perm_sign({i, j, k});
                    if (sign == 0) {
                        CHECK(t.component(i, j, k) == 0.0);
                    } else {
                        std::array<int, 3> s = {i, j, k};
                        std::sort(s.begin(), s.end());
                        CHECK(t.component(i, j, k) == sign * t.canonical(s[0], s[1], s[2]));
                    }
                }
        CHECK_THROWS_AS(t.component(0, 1, n), TensorError);
    }
}

TEST_CASE("levi_civita") {
    SkewTensor3 eps = levi_civita();
    CHECK(eps.component(0, 1, 2) == 1.0);
    CHECK(eps.component(1, 2, 0) == 1.0);
    CHECK(eps.component(2, 1, 0) == -1.0);
    CHECK(eps.component(0, 0, 1) == 0.0);
    int nonzero = 0;
    FlatMatrix fm = flatten(eps);
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 9; ++c)
            if (fm.m(r, c) != 0.0) ++nonzero;
    CHECK(nonzero == 6); // 3! permutations
}

TEST_CASE("generalized_E matches brute-force enumeration of the triplet layout") {
    for (auto [m, s] : {std::pair{1, 0}, {2, 0}, {1, 2}, {3, 1}}) {
        SkewTensor3 e = generalized_E(m, s);
        const int n = 3 * m + s;
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                for (int c = 0; c < n; ++c)
                    CHECK(e.component(a, b, c) ==
                          doctest::Approx(oracles::reference_E_component(m, a, b, c)));
    }

    SkewTensor3 e6 = generalized_E(2, 0);
    int support = 0;
    for (const auto& tr : e6.triples())
        if (e6.canonical(tr[0], tr[1], tr[2]) != 0.0) ++support;
    CHECK(support == 2);
    CHECK(e6.canonical(0, 2, 4) == 1.0);
    CHECK(e6.canonical(1, 3, 5) == 1.0);
    CHECK(e6.component(3, 4, 5) == 0.0);

    SkewTensor3 e12 = generalized_E(1, 2);
    CHECK(e12.dim() == 5);
    for (int a = 0; a < 5; ++a)
        for (int b = 0; b < 5; ++b) {
            CHECK(e12.component(a, b, 3) == 0.0);
            CHECK(e12.component(a, b, 4) == 0.0);
        }
}

TEST_CASE("flatten reproduces the displayed 3x9 epsilon matrix") {
    FlatMatrix fm = flatten(levi_civita(Variance::covariant));
    // rows i, columns (j,k) at j*3+k
    double expect[3][9] = {{0, 0, 0, 0, 0, 1, 0, -1, 0},
                           {0, 0, -1, 0, 0, 0, 1, 0, 0},
                           {0, 1, 0, -1, 0, 0, 0, 0, 0}};
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 9; ++c) CHECK(fm.m(r, c) == expect[r][c]);
}

TEST_CASE("flatten is lossless and mirrored in (j,k)") {
    SkewTensor3 e6 = generalized_E(2, 0);
    FlatMatrix fm = flatten(e6);
    int nonzero = 0;
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j)
            for (int k = 0; k < 6; ++k) {
                CHECK(fm.m(i, j * 6 + k) == e6.component(i, j, k));
                if (fm.m(i, j * 6 + k) != 0.0) ++nonzero;
                CHECK(fm.m(i, j * 6 + k) == -fm.m(i, k * 6 + j));
            }
    CHECK(nonzero == 12); // two triplets, 3! entries each

    FlatMatrix zero = flatten(SkewTensor3(4, Variance::covariant));
    CHECK(zero.m.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("dimension and tolerance guards") {
    CHECK_THROWS_AS(flat_rank(flatten(levi_civita()), 0.0), TensorError);
    CHECK_THROWS_AS(contract_last(levi_civita(), Covector{1, 0}), TensorError);
    CHECK_THROWS_AS(contract_last2(levi_civita(), {1, 0, 0}, {1, 0}), TensorError);
    CHECK_THROWS_AS(check_inv2(levi_civita(Variance::covariant),
                               generalized_E(2, 0), 1.0),
                    TensorError);
    CHECK_THROWS_AS(SkewTensor3(2, Variance::covariant), TensorError);
}

TEST_CASE("flat_rank agrees with Gaussian elimination") {
    CHECK(flat_rank(flatten(levi_civita())) == 3);
    CHECK(flat_rank(flatten(SkewTensor3(4, Variance::covariant))) == 0);
    CHECK(flat_rank(flatten(generalized_E(2, 0))) == 6);
    CHECK(flat_rank(flatten(generalized_E(1, 2))) == 3);
    CHECK(flat_rank(flatten(r6_example())) == 5);

    Rng rng(17);
    for (int round = 0; round < 10; ++round) {
        SkewTensor3 t(5, Variance::covariant);
        for (const auto& tr : t.triples())
            if (rng.next_unit() < 0.6) t.canonical(tr[0], tr[1], tr[2]) = rng.uniform(-1, 1);
        FlatMatrix fm = flatten(t);
        CHECK(flat_rank(fm) == oracles::ge_rank(fm.m));
    }
}

TEST_CASE("right_inverse of epsilon is epsilon") {
    SkewTensor3 j = right_inverse(levi_civita(Variance::covariant));
    CHECK(j.variance() == Variance::contravariant);
    CHECK(j.component(0, 1, 2) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(inverse_residual(levi_civita(Variance::covariant), j) <= 1e-12);
    CHECK(oracles::brute_inverse_residual(levi_civita(Variance::covariant), j) <= 1e-12);
}

TEST_CASE("right_inverse of E6 is E6, verified by brute-force contraction") {
    SkewTensor3 w = generalized_E(2, 0, Variance::covariant);
    SkewTensor3 j = right_inverse(w);
    for (const auto& tr : j.triples())
        CHECK(j.canonical(tr[0], tr[1], tr[2]) ==
              doctest::Approx(w.canonical(tr[0], tr[1], tr[2])).epsilon(1e-13));
    CHECK(oracles::brute_inverse_residual(w, j) <= 1e-12);
}

TEST_CASE("right_inverse error paths") {
    CHECK_THROWS_AS(right_inverse(SkewTensor3(3, Variance::covariant)), RankDeficiencyError);
    CHECK_THROWS_AS(right_inverse(generalized_E(1, 2, Variance::covariant)), RankDeficiencyError);
    CHECK_THROWS_AS(right_inverse(r6_example(Variance::covariant)), RankDeficiencyError);
}

TEST_CASE("a full-rank tensor can still lack a skew right inverse") {
    // w = dx3^dx4^dx5 + dx1^dx2^dx5 on R^5 has full flattened rank but the
    // shared index forces the two triples to fight over the inverse rows
    SkewTensor3 w = tensor_of(5, Variance::covariant, {{2, 3, 4, 1.0}, {0, 1, 4, 1.0}});
    CHECK(flat_rank(flatten(w)) == 5);
    CHECK_THROWS_AS(right_inverse(w), NoSkewInverseError);
}

TEST_CASE("contract_last examples") {
    SkewTensor3 eps = levi_civita();
    Eigen::MatrixXd m = contract_last(eps, {0, 0, 1});
    CHECK(m(0, 1) == 1.0);
    CHECK(m(1, 0) == -1.0);
    CHECK(m.cwiseAbs().sum() == 2.0);

    // the R^6 two-block tensor annihilates dx6
    Eigen::MatrixXd z = contract_last(r6_example(), {0, 0, 0, 0, 0, 1});
    CHECK(z.cwiseAbs().maxCoeff() == 0.0);

    // J(dx2 - dx4) = d1 ^ (d5 - d3)
    Eigen::MatrixXd ju = contract_last(r6_example(), {0, 1, 0, -1, 0, 0});
    CHECK(ju(0, 4) == 1.0);
    CHECK(ju(0, 2) == -1.0);
    CHECK(ju(4, 0) == -1.0);
    CHECK(ju(2, 0) == 1.0);
    CHECK(ju.cwiseAbs().sum() == 4.0);

    // E6 contracted with e0 hits only the (2,4) plane
    Eigen::MatrixXd e = contract_last(generalized_E(2, 0), {1, 0, 0, 0, 0, 0});
    CHECK(e(2, 4) == 1.0);
    CHECK(e(4, 2) == -1.0);
    CHECK(e.cwiseAbs().sum() == 2.0);
}

TEST_CASE("contract_last2 examples") {
    SkewTensor3 eps = levi_civita();
    Eigen::VectorXd x = contract_last2(eps, {0, 1, 0}, {0, 0, 1});
    CHECK(x(0) == 1.0);
    CHECK(x(1) == 0.0);
    CHECK(x(2) == 0.0);

    // J(dx2-dx4, dx3+dx5) = 0
    Eigen::VectorXd z =
        contract_last2(r6_example(), {0, 1, 0, -1, 0, 0}, {0, 0, 1, 0, 1, 0});
    CHECK(z.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("contract_last2(J,u,u) vanishes for random tensors") {
    Rng rng(23);
    for (int round = 0; round < 10; ++round) {
        SkewTensor3 t(6, Variance::contravariant);
        for (const auto& tr : t.triples()) t.canonical(tr[0], tr[1], tr[2]) = rng.uniform(-1, 1);
        Covector u(6);
        for (auto& v : u) v = rng.uniform(-1, 1);
        CHECK(contract_last2(t, u, u).cwiseAbs().maxCoeff() <= 1e-14);
    }
}

TEST_CASE("check_inv2") {
    SkewTensor3 epsc = levi_civita(Variance::covariant);
    SkewTensor3 eps = levi_civita();
    CHECK(check_inv2(epsc, eps, 1.0) == 0.0);

    SkewTensor3 zc(4, Variance::covariant), z(4, Variance::contravariant);
    CHECK(check_inv2(zc, z, 0.0) == 0.0);

    // cross-triplet quadruples break the delta pattern for E6
    CHECK(check_inv2(generalized_E(2, 0, Variance::covariant), generalized_E(2, 0), 1.0) >= 1.0);
}

TEST_CASE("three-triplet block behaves like the smaller ones") {
    SkewTensor3 e9 = generalized_E(3, 0, Variance::covariant);
    CHECK(flat_rank(flatten(e9)) == 9);
    SkewTensor3 j = right_inverse(e9);
    CHECK(oracles::brute_inverse_residual(e9, j) <= 1e-12);
    CHECK(flat_rank(flatten(generalized_E(3, 1))) == 9); // one kernel direction
}

TEST_CASE("check_inv2 with a field factor") {
    SkewTensor3 epsc = levi_civita(Variance::covariant);
    SkewTensor3 eps = levi_civita();
    auto pts = sample_points(Box::unit(3), 10, 77);
    CHECK(check_inv2(epsc, eps, ScalarField::constant(1.0, 3), pts) == 0.0);
    // a wrong factor leaves a residual of max |1 - f(x)|
    double res = check_inv2(epsc, eps, parse_field("x1", 3), pts);
    CHECK(res > 0.5);
    CHECK(res <= 2.0);
}

TEST_CASE("right inverse survives orthogonal mixes and triplet scalings") {
    Rng rng(101);
    for (int round = 0; round < 5; ++round) {
        SkewTensor3 w(6, Variance::covariant);
        double b1 = rng.uniform(0.5, 2.0), b2 = rng.uniform(0.5, 2.0);
        w.canonical(0, 2, 4) = b1;
        w.canonical(1, 3, 5) = b2;
        // random rotation from QR of a Gaussian-ish matrix
        Eigen::MatrixXd g(6, 6);
        for (int r = 0; r < 6; ++r)
            for (int c = 0; c < 6; ++c) g(r, c) = rng.uniform(-1, 1);
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
        Eigen::MatrixXd q = qr.householderQ();

        SkewTensor3 mixed(6, Variance::covariant);
        for (const auto& dst : mixed.triples()) {
            double sum = 0.0;
            for (const auto& src : w.triples()) {
                double v = w.canonical(src[0], src[1], src[2]);
                if (v == 0.0) continue;
                Eigen::Matrix3d minor;
                for (int r = 0; r < 3; ++r)
                    for (int c = 0; c < 3; ++c) minor(r, c) = q(src[r], dst[c]);
                sum += v * minor.determinant();
            }
            mixed.canonical(dst[0], dst[1], dst[2]) = sum;
        }

        CHECK(flat_rank(flatten(mixed)) == 6);
        SkewTensor3 j = right_inverse(mixed);
        CHECK(oracles::brute_inverse_residual(mixed, j) <= 1e-10);
    }
}
