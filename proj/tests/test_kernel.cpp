#include <doctest.h>

#include "nambu/kernel.hpp"
#include "support/oracles.hpp"

using namespace nambu;

namespace {

SkewTensor3 r6_example() {
    std::vector<TripleEntry> e = {{0, 1, 2, 1.0}, {0, 3, 4, 1.0}};
    return make_skew3(6, Variance::contravariant, e);
}

double plane_gap_oracle(const Covector& u1, const Covector& v1, const Covector& u2,
                        const Covector& v2) {
    const Eigen::Index n = static_cast<Eigen::Index>(u1.size());
    Eigen::MatrixXd a(n, 2), b(n, 2);
    a.col(0) = Eigen::Map<const Eigen::VectorXd>(u1.data(), n);
    a.col(1) = Eigen::Map<const Eigen::VectorXd>(v1.data(), n);
    b.col(0) = Eigen::Map<const Eigen::VectorXd>(u2.data(), n);
    b.col(1) = Eigen::Map<const Eigen::VectorXd>(v2.data(), n);
    Eigen::HouseholderQR<Eigen::MatrixXd> qa(a), qb(b);
    Eigen::MatrixXd ta = qa.householderQ() * Eigen::MatrixXd::Identity(n, 2);
    Eigen::MatrixXd tb = qb.householderQ() * Eigen::MatrixXd::Identity(n, 2);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(ta.transpose() * tb);
    double smin = std::min(1.0, svd.singularValues().minCoeff());
    return std::sqrt(std::max(0.0, 1.0 - smin * smin));
}

} // namespace

TEST_CASE("casimir space of the two-block R6 tensor is the x6 direction") {
    KernelBasis kb = casimir_space(r6_example());
    REQUIRE(kb.dimension() == 1);
    for (int i = 0; i < 5; ++i) CHECK(std::abs(kb.basis[0][static_cast<std::size_t>(i)]) <= 1e-12);
    CHECK(std::abs(kb.basis[0][5]) == doctest::Approx(1.0));

    // each basis covector annihilates the operator
    Eigen::MatrixXd m = contract_last(r6_example(), kb.basis[0]);
    CHECK(m.cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("casimir space edge cases") {
    CHECK(casimir_space(levi_civita()).dimension() == 0);

    KernelBasis e12 = casimir_space(generalized_E(1, 2));
    CHECK(e12.dimension() == 2);
    for (const auto& c : e12.basis) {
        CHECK(std::abs(c[0]) <= 1e-12);
        CHECK(std::abs(c[1]) <= 1e-12);
        CHECK(std::abs(c[2]) <= 1e-12);
        CHECK(contract_last(generalized_E(1, 2), c).cwiseAbs().maxCoeff() <= 1e-10);
    }

    // zero tensor: everything is in the kernel
    CHECK(casimir_space(SkewTensor3(4, Variance::contravariant)).dimension() == 4);
}

TEST_CASE("casimir dimension agrees with elimination nullity") {
    Rng rng(19);
    for (int round = 0; round < 8; ++round) {
        SkewTensor3 t(5, Variance::contravariant);
        for (const auto& tr : t.triples())
            if (rng.next_unit() < 0.4) t.canonical(tr[0], tr[1], tr[2]) = rng.uniform(-1, 1);
        Eigen::MatrixXd m(25, 5);
        for (int i = 0; i < 5; ++i)
            for (int p = 0; p < 5; ++p)
                for (int k = 0; k < 5; ++k) m(i * 5 + p, k) = t.component(i, p, k);
        KernelBasis kb = casimir_space(t);
        CHECK(kb.dimension() == oracles::ge_nullity(m));
        // every returned direction annihilates the operator, and the basis
        // is orthonormal
        for (std::size_t a = 0; a < kb.basis.size(); ++a) {
            CHECK(contract_last(t, kb.basis[a]).cwiseAbs().maxCoeff() <= 1e-10);
            for (std::size_t b = 0; b <= a; ++b) {
                double dot = 0.0;
                for (int i = 0; i < 5; ++i)
                    dot += kb.basis[a][static_cast<std::size_t>(i)] *
                           kb.basis[b][static_cast<std::size_t>(i)];
                CHECK(std::abs(dot - (a == b ? 1.0 : 0.0)) <= 1e-12);
            }
        }
    }
}

TEST_CASE("verify_semi_casimir accepts (dx2-dx4, dx3+dx5) with nonzero certificates") {
    // u = dx2 - dx4, v = dx3 + dx5 (1-based)
    SemiCasimirCheck chk =
        verify_semi_casimir(r6_example(), {0, 1, 0, -1, 0, 0}, {0, 0, 1, 0, 1, 0});
    CHECK(chk.accepted);
    CHECK(chk.pair.norm_juv <= 1e-12);
    CHECK(chk.pair.norm_ju > 0.5);
    CHECK(chk.pair.norm_jv > 0.5);
}

TEST_CASE("verify_semi_casimir rejections") {
    SkewTensor3 j = r6_example();
    // full Casimir direction
    SemiCasimirCheck cas = verify_semi_casimir(j, {0, 0, 0, 0, 0, 1}, {0, 1, 0, 0, 0, 0});
    CHECK(!cas.accepted);
    CHECK(cas.rejection.find("J(u) = 0") != std::string::npos);

    // proportional covectors
    SemiCasimirCheck prop = verify_semi_casimir(j, {0, 1, 0, -1, 0, 0}, {0, 2, 0, -2, 0, 0});
    CHECK(!prop.accepted);
    CHECK(prop.rejection == "proportional covectors");

    // zero covector is an error, not a rejection
    CHECK_THROWS_AS(verify_semi_casimir(j, {0, 0, 0, 0, 0, 0}, {0, 1, 0, 0, 0, 0}), TensorError);

    // a pair that simply fails J(u,v) = 0
    SemiCasimirCheck bad = verify_semi_casimir(j, {0, 1, 0, 0, 0, 0}, {0, 0, 1, 0, 0, 0});
    CHECK(!bad.accepted);
    CHECK(bad.rejection == "J(u,v) != 0");
}

TEST_CASE("find_semi_casimir_pairs recovers the (dx2-dx4, dx3+dx5) plane on R6") {
    auto pairs = find_semi_casimir_pairs(r6_example(), 120, 2024);
    CHECK(!pairs.empty());

    bool found_reference_plane = false;
    for (const auto& p : pairs) {
        // certificates hold as stated
        CHECK(p.norm_juv <= 1e-8);
        CHECK(p.norm_ju > 1e-8);
        CHECK(p.norm_jv > 1e-8);
        if (plane_gap_oracle(p.u, p.v, {0, 1, 0, -1, 0, 0}, {0, 0, 1, 0, 1, 0}) <= 1e-9)
            found_reference_plane = true;
    }
    CHECK(found_reference_plane);
}

TEST_CASE("find_semi_casimir_pairs is empty where it must be") {
    CHECK(find_semi_casimir_pairs(levi_civita(), 60, 1).empty());
    CHECK(find_semi_casimir_pairs(SkewTensor3(4, Variance::contravariant), 60, 1).empty());
}

TEST_CASE("accepted pairs are distinct planes") {
    auto pairs = find_semi_casimir_pairs(r6_example(), 120, 7);
    for (std::size_t a = 0; a < pairs.size(); ++a)
        for (std::size_t b = a + 1; b < pairs.size(); ++b)
            CHECK(plane_gap_oracle(pairs[a].u, pairs[a].v, pairs[b].u, pairs[b].v) > 1e-6);
}
