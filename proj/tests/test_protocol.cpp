#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bephase/protocol.hpp"
#include "test_util.hpp"

using namespace bephase;
using bephase::test::max_entry_distance;

namespace {

BipartiteVector singlet() {
    BipartiteVector v(2, 2);
    v.at(0, 1) = 1.0 / std::sqrt(2.0);
    v.at(1, 0) = -1.0 / std::sqrt(2.0);
    return v;
}

}  // namespace

TEST_CASE("truncation_dim_search closed forms on the large maximally entangled stand-in") {
    // rho = psi = maximally entangled, d = 20: projected witness is 1/m - 1/(p-1)
    auto psi = maximally_entangled(20);
    auto rho = projector(psi);

    // p = 2: eps_full = 1/20 - 1 = -0.95; m = 2 gives -0.5 <= -0.475
    auto r2 = truncation_dim_search(rho, psi, 2);
    CHECK(r2.m == 2);
    CHECK(r2.value == doctest::Approx(-0.5).epsilon(1e-12));

    // p = 3: eps_full = 0.05 - 0.5 = -0.45; need 1/m <= 0.275 -> m = 4
    auto r3 = truncation_dim_search(rho, psi, 3);
    CHECK(r3.m == 4);
    CHECK(r3.value == doctest::Approx(0.25 - 0.5).epsilon(1e-12));
}

TEST_CASE("truncation_dim_search is the identity for already-supported states") {
    auto iso = isotropic(3, 0.8);
    auto res = truncation_dim_search(iso, maximally_entangled(3), 3);
    CHECK(res.m == 3);
    CHECK(max_entry_distance(res.rho_m.mat, iso.mat) < 1e-13);
    CHECK(res.value == doctest::Approx(1.0 / 3.0 - 0.4).epsilon(1e-12));
}

TEST_CASE("truncation_dim_search reports an exhausted ambient space") {
    // entanglement across the high B indices: every leading m x m corner with
    // m <= 2 annihilates psi, so no truncation keeps half the violation
    BipartiteVector psi(2, 4);
    psi.at(0, 2) = 1.0 / std::sqrt(2.0);
    psi.at(1, 3) = 1.0 / std::sqrt(2.0);
    auto rho = projector(psi);
    REQUIRE(p_reduction_value(rho, psi, 2).value == doctest::Approx(-0.5));
    CHECK_THROWS_AS(truncation_dim_search(rho, psi, 2), NotReachedError);
}

TEST_CASE("truncation_dim_search rejects nonnegative witness values") {
    DensityOperator prod{2, 2, kron(random_density(2, 1, 2, 3).mat,
                                    random_density(2, 1, 2, 4).mat)};
    Rng rng(5);
    auto e = random_unit_vector(2, rng);
    auto f = random_unit_vector(2, rng);
    BipartiteVector psi(2, 2, kron_vec(e, f));
    CHECK_THROWS_AS(truncation_dim_search(prod, psi, 2), NoViolationError);
}

TEST_CASE("filter_from_violation matricization") {
    // Psi_+ maps to the identity
    auto m_plus = filter_from_violation(maximally_entangled(3));
    CHECK(max_entry_distance(m_plus, ComplexMatrix::identity(3)) < 1e-14);

    // sqrt(.8)|00> + sqrt(.2)|11>: M = diag(sqrt(1.6), sqrt(0.4))
    BipartiteVector two(2, 2);
    two.at(0, 0) = std::sqrt(0.8);
    two.at(1, 1) = std::sqrt(0.2);
    auto m = filter_from_violation(two);
    CHECK(m(0, 0).real() == doctest::Approx(std::sqrt(1.6)).epsilon(1e-13));
    CHECK(m(1, 1).real() == doctest::Approx(std::sqrt(0.4)).epsilon(1e-13));
    CHECK(std::abs(m(0, 1)) == 0.0);

    // normalization identity Tr(M^dag M) = m on seeded vectors
    for (int t = 0; t < 20; ++t) {
        Rng rng(derive_seed(42, t));
        BipartiteVector psi(4, 4, rng.gaussian_vector(16));
        psi.normalize();
        auto f = filter_from_violation(psi);
        CHECK((f.adjoint() * f).trace().real() == doctest::Approx(4.0).epsilon(1e-12));
    }

    BipartiteVector rect(2, 3, std::vector<cplx>(6, cplx(0.4, 0)));
    CHECK_THROWS_AS(filter_from_violation(rect), NonSquareLocalDimsError);
}

TEST_CASE("apply_filter") {
    auto iso = isotropic(3, 0.7);

    // identity filter is a no-op
    auto same = apply_filter(iso, ComplexMatrix::identity(3));
    CHECK(max_entry_distance(same.sigma.mat, iso.mat) < 1e-14);
    CHECK(same.norm == doctest::Approx(1.0).epsilon(1e-12));

    // M = I case of the key identity: witness -1/60... < 0 and F = 0.7 > 2/3
    auto wv = p_reduction_value(iso, maximally_entangled(3), 3);
    CHECK(wv.value < 0.0);
    auto filtered = apply_filter(iso, filter_from_violation(maximally_entangled(3)));
    const double fid = expectation(filtered.sigma.mat, maximally_entangled(3).amps);
    CHECK(fid == doctest::Approx(0.7).epsilon(1e-12));

    ComplexMatrix zero(3, 3);
    CHECK_THROWS_AS(apply_filter(iso, zero), FilterAnnihilatesStateError);
}

TEST_CASE("filter-fidelity sign equivalence over seeded triples") {
    int checked = 0;
    for (int t = 0; t < 150; ++t) {
        Rng rng(derive_seed(7000, t));
        auto rho = random_density(3, 3, 1 + t % 9, derive_seed(7001, t));
        BipartiteVector psi(3, 3, rng.gaussian_vector(9));
        psi.normalize();
        const int p = 2 + t % 2;

        const double value = p_reduction_value(rho, psi, p).value;
        FilteredState filtered;
        try {
            filtered = apply_filter(rho, filter_from_violation(psi));
        } catch (const FilterAnnihilatesStateError&) {
            continue;
        }
        const double fid = expectation(filtered.sigma.mat, maximally_entangled(3).amps);
        const double margin = fid - (p - 1.0) / 3.0;
        if (std::abs(value) < 1e-9 || std::abs(margin) < 1e-9) continue;  // dead zone
        CHECK(value * margin < 0.0);
        ++checked;
    }
    CHECK(checked > 100);
}

TEST_CASE("twirl_exact fixed points and fidelity preservation") {
    auto plus = projector(maximally_entangled(3));
    CHECK(max_entry_distance(twirl_exact(plus).mat, plus.mat) < 1e-13);

    ComplexMatrix mixed = ComplexMatrix::identity(9);
    mixed *= cplx(1.0 / 9.0, 0.0);
    DensityOperator white{3, 3, mixed};
    CHECK(max_entry_distance(twirl_exact(white).mat, white.mat) < 1e-14);

    for (int t = 0; t < 10; ++t) {
        auto rho = random_density(3, 3, 1 + t % 9, derive_seed(888, t));
        auto tw = twirl_exact(rho);
        tw.validate();
        const double before = expectation(rho.mat, maximally_entangled(3).amps);
        const double after = expectation(tw.mat, maximally_entangled(3).amps);
        CHECK(after == doctest::Approx(before).epsilon(1e-12));
        // idempotent
        CHECK(max_entry_distance(twirl_exact(tw).mat, tw.mat) < 1e-13);
    }
}

TEST_CASE("twirl term at U = I returns the state") {
    auto rho = random_density(3, 3, 4, 17);
    auto term = conjugate_twirl_term(rho, ComplexMatrix::identity(3));
    CHECK(max_entry_distance(term.mat, rho.mat) < 1e-15);
}

TEST_CASE("twirl_sample_oracle converges to twirl_exact") {
    auto rho = random_density(3, 3, 5, 23);
    auto exact = twirl_exact(rho);

    // every sample average preserves the Psi_+ fidelity exactly
    for (int samples : {1, 7, 40}) {
        auto avg = twirl_sample_oracle(rho, samples, 515);
        const double f_avg = expectation(avg.mat, maximally_entangled(3).amps);
        const double f_rho = expectation(rho.mat, maximally_entangled(3).amps);
        CHECK(f_avg == doctest::Approx(f_rho).epsilon(1e-10));
    }

    // moderate sample count already tracks the exact projection
    auto avg = twirl_sample_oracle(rho, 4000, 616);
    CHECK(max_entry_distance(avg.mat, exact.mat) < 2e-2);
}

TEST_CASE("run_protocol end to end") {
    // isotropic(3, 0.8), p=3: transparent pipeline, certificate (3, 0.8, 3)
    auto cert = run_protocol(isotropic(3, 0.8), maximally_entangled(3), 3);
    CHECK(cert.m == 3);
    CHECK(cert.fidelity == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(cert.p == 3);
    CHECK(cert.fidelity > (cert.p - 1.0) / double(cert.m) + 1e-9);

    // singlet, p=2: (m=2, F=1)
    auto scert = run_protocol(projector(singlet()), singlet(), 2);
    CHECK(scert.m == 2);
    CHECK(scert.fidelity == doctest::Approx(1.0).epsilon(1e-12));

    // rotated isotropic: generic 3x3 state violating the p=2 test
    Rng rng(31337);
    auto ua = haar_unitary(3, rng);
    auto ub = haar_unitary(3, rng);
    auto big = kron(ua, ub);
    auto iso = isotropic(3, 0.9);
    DensityOperator rotated{3, 3, big * iso.mat * big.adjoint()};
    rotated.mat.symmetrize();
    BipartiteVector psi(3, 3, big * maximally_entangled(3).amps);
    auto rcert = run_protocol(rotated, psi, 2);
    CHECK(rcert.fidelity > 1.0 / 3.0 + 1e-9);
    CHECK(rcert.witness.value < 0.0);
}
