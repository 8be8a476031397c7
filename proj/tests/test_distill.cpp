#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bephase/distill.hpp"
#include "bephase/fixture.hpp"
#include "test_util.hpp"

using namespace bephase;

namespace {

BipartiteVector singlet() {
    BipartiteVector v(2, 2);
    v.at(0, 1) = 1.0 / std::sqrt(2.0);
    v.at(1, 0) = -1.0 / std::sqrt(2.0);
    return v;
}

BipartiteVector two_term_vector(double lam) {
    BipartiteVector v(2, 2);
    v.at(0, 0) = std::sqrt(lam);
    v.at(1, 1) = std::sqrt(1.0 - lam);
    return v;
}

// NPT 2x2 state by rejection sampling
DensityOperator random_npt_2x2(std::uint64_t seed) {
    for (std::uint64_t t = 0;; ++t) {
        auto rho = random_density(2, 2, 1 + (seed + t) % 4, derive_seed(seed, t));
        if (!ppt_check(rho).ppt) return rho;
    }
}

}  // namespace

TEST_CASE("pt_rank2_spectral_decomp closed form") {
    // lam = 1/2: eigenvalues {1/2, 1/2, 1/2, -1/2}
    auto sp_half = pt_rank2_spectral_decomp(two_term_vector(0.5));
    REQUIRE(sp_half.eigenvalues.size() == 4);
    CHECK(sp_half.eigenvalues[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(sp_half.eigenvalues[2] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(sp_half.eigenvalues[3] == doctest::Approx(-0.5).epsilon(1e-12));

    // lam = 0.8: {0.8, 0.4, 0.2, -0.4} = {lam, +sqrt(lam(1-lam)), 1-lam, -sqrt(..)}
    auto sp = pt_rank2_spectral_decomp(two_term_vector(0.8));
    REQUIRE(sp.eigenvalues.size() == 4);
    CHECK(sp.eigenvalues[0] == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(sp.eigenvalues[1] == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(sp.eigenvalues[2] == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(sp.eigenvalues[3] == doctest::Approx(-0.4).epsilon(1e-12));

    CHECK_THROWS_AS(pt_rank2_spectral_decomp(maximally_entangled(3)), WrongRankError);
    BipartiteVector prod(2, 2);
    prod.at(0, 0) = 1.0;
    CHECK_THROWS_AS(pt_rank2_spectral_decomp(prod), WrongRankError);
}

TEST_CASE("pt_rank2_spectral_decomp is invariant under embedding with local rotations") {
    // embed sqrt(.8)|00> + sqrt(.2)|11> into 5x5 with random local unitaries
    Rng rng(515);
    auto ua = haar_unitary(5, rng);
    auto ub = haar_unitary(5, rng);
    BipartiteVector psi(5, 5);
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 5; ++j)
            psi.at(i, j) = std::sqrt(0.8) * ua(i, 0) * ub(j, 0) + std::sqrt(0.2) * ua(i, 1) * ub(j, 1);

    auto sp = pt_rank2_spectral_decomp(psi);
    REQUIRE(sp.eigenvalues.size() == 4);
    CHECK(sp.eigenvalues[0] == doctest::Approx(0.8).epsilon(1e-10));
    CHECK(sp.eigenvalues[1] == doctest::Approx(0.4).epsilon(1e-10));
    CHECK(sp.eigenvalues[2] == doctest::Approx(0.2).epsilon(1e-10));
    CHECK(sp.eigenvalues[3] == doctest::Approx(-0.4).epsilon(1e-10));

    // eigenvectors stay in the 2x2 subspace spanned by the Schmidt pairs
    auto sd = schmidt_decompose(psi, 1e-9);
    for (std::size_t k = 0; k < 4; ++k) {
        auto v = sp.eigenvectors;
        std::vector<cplx> vec(25);
        for (std::size_t i = 0; i < 25; ++i) vec[i] = v(i, k);
        // project onto span{e_a (x) conj-side pairs}: components along the
        // 2x2 product basis of left/right Schmidt vectors must carry all mass
        double mass = 0.0;
        for (std::size_t a = 0; a < 2; ++a)
            for (std::size_t b = 0; b < 2; ++b) {
                std::vector<cplx> basis(25);
                for (std::size_t i = 0; i < 5; ++i)
                    for (std::size_t j = 0; j < 5; ++j)
                        basis[i * 5 + j] = sd.left(i, a) * std::conj(sd.right(j, b));
                mass += std::norm(vdot(basis, vec));
            }
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("rank2_witness_search finds the singlet optimum") {
    auto cert = rank2_witness_search(projector(singlet()), 1, {.restarts = 8, .seed = 5});
    REQUIRE(cert.has_value());
    CHECK(cert->epsilon == doctest::Approx(-0.5).epsilon(1e-9));
    CHECK(cert->n_copies == 1);
    // revalidation from raw data
    CHECK(recompute_certificate_value(projector(singlet()), *cert) ==
          doctest::Approx(cert->epsilon).epsilon(1e-10));
    CHECK(schmidt_decompose(cert->psi, 1e-6).rank <= 2);
}

TEST_CASE("certificate projectors reproduce epsilon through the projected form") {
    for (std::uint64_t s : {4u, 5u, 6u}) {
        DensityOperator rho;
        for (std::uint64_t probe = 0;; ++probe) {
            rho = random_density(3, 3, 2 + s % 3, derive_seed(s, probe));
            if (!ppt_check(rho).ppt) break;
        }
        auto cert = rank2_witness_search(rho, 1, {.restarts = 8, .seed = s});
        REQUIRE(cert.has_value());

        auto [pa, pb] = certificate_projectors(*cert);
        // projectors: idempotent Hermitian of rank <= 2
        CHECK(bephase::test::max_entry_distance(pa * pa, pa) < 1e-12);
        CHECK(bephase::test::max_entry_distance(pb * pb, pb) < 1e-12);

        // psi = (P_A (x) P_B^T) psi
        auto big = kron(pa, pb.transpose());
        auto projected = big * cert->psi.amps;
        double diff = 0.0;
        for (std::size_t i = 0; i < projected.size(); ++i)
            diff = std::max(diff, std::abs(projected[i] - cert->psi.amps[i]));
        CHECK(diff < 1e-10);

        // <Psi|((P_A x P_B) rho (P_A x P_B))^T_B|Psi> = epsilon
        auto sandwich = kron(pa, pb);
        ComplexMatrix pinched = sandwich * rho.mat * sandwich;
        auto pt = partial_transpose(pinched, 3, 3, Side::B);
        CHECK(expectation(pt, cert->psi.amps) == doctest::Approx(cert->epsilon).epsilon(1e-10));
    }
}

TEST_CASE("rank2_witness_search on maximally entangled 3x3 reaches -1/3") {
    auto rho = projector(maximally_entangled(3));
    auto cert = rank2_witness_search(rho, 1, {.restarts = 16, .seed = 11});
    REQUIRE(cert.has_value());
    CHECK(cert->epsilon == doctest::Approx(-1.0 / 3.0).epsilon(1e-8));
}

TEST_CASE("rank2_witness_search reaches the PT minimum when its eigenvector has rank 2") {
    // NPT isotropic states: the minimal PT eigenvector is antisymmetric,
    // hence Schmidt rank 2, so the constrained optimum is the global one
    auto iso = isotropic(3, 0.6);
    const double pt_min = ppt_check(iso).min_eigenvalue;
    REQUIRE(pt_min == doctest::Approx(-2.0 / 15.0).epsilon(1e-12));
    auto cert = rank2_witness_search(iso, 1, {.restarts = 16, .seed = 61});
    REQUIRE(cert.has_value());
    CHECK(cert->epsilon == doctest::Approx(pt_min).epsilon(1e-9));
}

TEST_CASE("rank2_witness_search is sound on PPT inputs") {
    auto bes = cv_bes({0.4, 0.6, 4});
    auto cert = rank2_witness_search(bes, 1, {.restarts = 32, .seed = 3});
    CHECK(!cert.has_value());

    auto sep = random_density(2, 1, 2, 15);
    DensityOperator prod{2, 2, kron(sep.mat, random_density(2, 1, 2, 16).mat)};
    CHECK(!rank2_witness_search(prod, 1, {.restarts = 8, .seed = 4}).has_value());
    CHECK(!rank2_witness_search(prod, 2, {.restarts = 8, .seed = 4}).has_value());
}

TEST_CASE("rank2_witness_search respects the dimension cap") {
    auto rho = random_density(4, 4, 4, 77);
    CHECK_THROWS_AS(rank2_witness_search(rho, 3, {}), DimensionCapExceededError);
}

TEST_CASE("certify_distillable") {
    // every NPT 2x2 state certifies at n=1 (global PT eigenvector has rank <= 2)
    for (int t = 0; t < 40; ++t) {
        auto rho = random_npt_2x2(derive_seed(2024, t));
        auto res = certify_distillable(rho, 1, {.restarts = 4, .seed = derive_seed(7, t)});
        REQUIRE(res.certificate.has_value());
        CHECK(res.certificate->epsilon < -1e-9);
        CHECK(std::abs(recompute_certificate_value(rho, *res.certificate) -
                       res.certificate->epsilon) < 1e-10);
    }

    // isotropic(3, 0.9) is NPT: certificate at n=1
    auto iso = isotropic(3, 0.9);
    CHECK(!ppt_check(iso).ppt);
    auto res = certify_distillable(iso, 1, {.restarts = 8, .seed = 21});
    REQUIRE(res.certificate.has_value());
    CHECK(res.certificate->epsilon < -1e-9);

    // separable stays inconclusive through n_max
    DensityOperator prod{2, 2, kron(random_density(2, 1, 2, 31).mat,
                                    random_density(2, 1, 2, 32).mat)};
    auto none = certify_distillable(prod, 2, {.restarts = 6, .seed = 9});
    CHECK(!none.certificate.has_value());
    CHECK(none.n_reached == 2);
}

TEST_CASE("stability radii formulas") {
    DistillCertificate c1{1, singlet(), -0.5};
    CHECK(stability_radius(c1) == doctest::Approx(0.125));
    DistillCertificate c2{1, singlet(), -1.0 / 3.0};
    CHECK(stability_radius(c2) == doctest::Approx(1.0 / 12.0));
    DistillCertificate c3{2, singlet(), -0.1};
    CHECK(stability_radius(c3) == doctest::Approx(0.0125));

    WitnessValue w1{-0.25, maximally_entangled(4), 3};
    CHECK(p_stability_radius(w1) == doctest::Approx(1.0 / 6.0));
    WitnessValue w2{-0.5, maximally_entangled(2), 2};
    CHECK(p_stability_radius(w2) == doctest::Approx(0.25));
    WitnessValue w3{1.0 / 3.0 - 0.35, maximally_entangled(3), 3};
    CHECK(p_stability_radius(w3) == doctest::Approx((0.35 - 1.0 / 3.0) / 1.5).epsilon(1e-12));

    WitnessValue bad{0.1, maximally_entangled(2), 2};
    CHECK_THROWS_AS(p_stability_radius(bad), NonNegativeWitnessError);
}

TEST_CASE("perturb_and_verify inside the certified ball") {
    auto rho = projector(singlet());
    auto cert = rank2_witness_search(rho, 1, {.restarts = 4, .seed = 2}).value();

    // eta = 0: nothing moves
    auto frozen = perturb_and_verify(rho, cert, 0.0, 3, 99);
    CHECK(frozen.violations == 0);
    CHECK(frozen.max_value == doctest::Approx(cert.epsilon).epsilon(1e-12));

    auto report = perturb_and_verify(rho, cert, 0.9 * stability_radius(cert), 50, 1234);
    CHECK(report.violations == 0);
    CHECK(report.max_distance <= 0.9 * stability_radius(cert) + 1e-12);
    CHECK(report.max_value < 0.0);

    CHECK_THROWS_AS(perturb_and_verify(rho, cert, -1.0, 5, 1), InvalidEtaError);
}

TEST_CASE("perturb_and_verify for the Lambda_p witness ball") {
    auto iso = isotropic(3, 0.7);
    auto wv = p_reduction_value(iso, maximally_entangled(3), 3);
    REQUIRE(wv.value < 0.0);
    auto report = perturb_and_verify(iso, wv, 0.9 * p_stability_radius(wv), 50, 4242);
    CHECK(report.violations == 0);
    CHECK(report.max_value < 0.0);
}

TEST_CASE("tensor-power perturbation bound |sum lam_k <phi_k|rho^n - rho'^n|phi_k>| <= 4 eta n") {
    for (int t = 0; t < 12; ++t) {
        auto rho = random_density(2, 2, 3, derive_seed(3000, t));
        auto other = random_density(2, 2, 4, derive_seed(3001, t));
        // blend so the pair is close; eta measured, not prescribed
        ComplexMatrix mix = rho.mat;
        ComplexMatrix step = other.mat;
        step -= rho.mat;
        step *= cplx(0.05 + 0.01 * t, 0.0);
        mix += step;
        DensityOperator rho_p{2, 2, mix};
        ComplexMatrix diff0 = rho.mat;
        diff0 -= rho_p.mat;
        const double eta = operator_norm(diff0);

        for (std::size_t n = 1; n <= 3; ++n) {
            auto pow_a = tensor_power(rho, n);
            auto pow_b = tensor_power(rho_p, n);
            Rng rng(derive_seed(3002, 10 * t + n));
            auto ea = random_orthonormal_columns(pow_a.dim_a, 2, rng);
            auto fb = random_orthonormal_columns(pow_a.dim_b, 2, rng);
            const double lam = rng.uniform(0.0, 1.0);
            BipartiteVector psi(pow_a.dim_a, pow_a.dim_b);
            for (std::size_t i = 0; i < pow_a.dim_a; ++i)
                for (std::size_t j = 0; j < pow_a.dim_b; ++j)
                    psi.at(i, j) = std::sqrt(lam) * ea(i, 0) * fb(j, 0) +
                                   std::sqrt(1.0 - lam) * ea(i, 1) * fb(j, 1);

            // sum_k lam_k <phi_k|M|phi_k> = Tr[M (|psi><psi|)^T_B]
            auto pt_proj = partial_transpose(projector(psi));
            ComplexMatrix delta = pow_a.mat;
            delta -= pow_b.mat;
            cplx weighted = 0.0;
            for (std::size_t i = 0; i < delta.rows(); ++i)
                for (std::size_t j = 0; j < delta.cols(); ++j)
                    weighted += delta(i, j) * pt_proj(j, i);
            CHECK(std::abs(weighted.real()) <= 4.0 * eta * double(n) + 1e-12);
        }
    }
}

TEST_CASE("density_demo closed-form distances and certificates") {
    BipartiteVector ground(8, 8);
    ground.at(0, 0) = 1.0;
    auto rho = projector(ground);

    auto rows = density_demo(rho, 2, 6);
    REQUIRE(rows.size() == 5);
    double prev = 1.0;
    for (const auto& row : rows) {
        const double n = double(row.n_trunc);
        CHECK(row.distance == doctest::Approx(2.0 / (n + 1.0)).epsilon(1e-10));
        CHECK(row.cert.epsilon == doctest::Approx(-1.0 / (2.0 * (n + 1.0))).epsilon(1e-9));
        CHECK(row.distance < prev);
        prev = row.distance;
    }
}

TEST_CASE("density_demo_p certifies with negative Lambda_p witness values") {
    BipartiteVector ground(8, 8);
    ground.at(0, 0) = 1.0;
    auto rho = projector(ground);

    auto rows = density_demo_p(rho, 3, 3, 3);
    REQUIRE(rows.size() == 1);
    // (K_N/N)(1/p - 1/(p-1)) with K_3 = 3/4: (1/4)(1/3 - 1/2) = -1/24
    CHECK(rows[0].witness.value == doctest::Approx(-1.0 / 24.0).epsilon(1e-10));
}
