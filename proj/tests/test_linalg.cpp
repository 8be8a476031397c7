#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <doctest.h>

#include "bephase/linalg.hpp"
#include "test_util.hpp"

using namespace bephase;
using bephase::test::gaussian_density_matrix;
using bephase::test::max_entry_distance;
using bephase::test::reconstruct;

TEST_CASE("eig_hermitian on fixed 2x2 matrices") {
    ComplexMatrix d(2, 2);
    d(0, 0) = 1.0;
    d(1, 1) = 2.0;
    auto sp = eig_hermitian(d);
    CHECK(sp.eigenvalues[0] == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(sp.eigenvalues[1] == doctest::Approx(1.0).epsilon(1e-14));

    ComplexMatrix x(2, 2);
    x(0, 1) = 1.0;
    x(1, 0) = 1.0;
    auto spx = eig_hermitian(x);
    CHECK(spx.eigenvalues[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(spx.eigenvalues[1] == doctest::Approx(-1.0).epsilon(1e-14));
}

TEST_CASE("eig_hermitian rejects bad input") {
    ComplexMatrix rect(2, 3);
    CHECK_THROWS_AS(eig_hermitian(rect), NonSquareError);

    ComplexMatrix nh(2, 2);
    nh(0, 1) = 1.0;
    nh(1, 0) = 2.0;
    CHECK_THROWS_AS(eig_hermitian(nh), NonHermitianError);
}

TEST_CASE("eig_hermitian tie-break keeps original index order") {
    auto sp = eig_hermitian(ComplexMatrix::identity(4));
    for (std::size_t k = 0; k < 4; ++k) {
        CHECK(sp.eigenvalues[k] == doctest::Approx(1.0));
        CHECK(std::abs(sp.eigenvectors(k, k) - cplx(1.0, 0.0)) < 1e-14);
    }
}

TEST_CASE("eig_hermitian reconstruction oracle, seeded 8x8") {
    Rng rng(41);
    ComplexMatrix m = random_hermitian(8, rng);
    auto sp = eig_hermitian(m);
    m.symmetrize();
    CHECK(max_entry_distance(reconstruct(sp), m) < 1e-10 * (1.0 + m.max_abs()));
}

TEST_CASE("eig_hermitian reconstruction + orthonormality over 1000 seeded matrices up to 64x64") {
    // sizes skew small so the sweep stays fast; 64 is exercised
    const std::size_t sizes[] = {2, 3, 4, 5, 6, 8, 12, 16, 24, 32};
    for (int trial = 0; trial < 1000; ++trial) {
        Rng rng(derive_seed(1001, trial));
        std::size_t n = (trial < 990) ? sizes[trial % 10] : 64;
        ComplexMatrix m = random_hermitian(n, rng);
        auto sp = eig_hermitian(m);
        m.symmetrize();

        const double scale = 1.0 + operator_norm(m);
        CHECK(max_entry_distance(reconstruct(sp), m) < 1e-10 * scale);
        if (trial % 50 == 0) {
            ComplexMatrix diff = reconstruct(sp);
            diff -= m;
            CHECK(operator_norm(diff) < 1e-10 * scale);
        }

        for (std::size_t a = 0; a < n; ++a) {
            CHECK(std::is_sorted(sp.eigenvalues.rbegin(), sp.eigenvalues.rend()));
            for (std::size_t b = a; b < n; ++b) {
                cplx g = vdot(sp.eigenvector(a), sp.eigenvector(b));
                CHECK(std::abs(g - (a == b ? 1.0 : 0.0)) < 1e-10);
            }
        }
    }
}

TEST_CASE("eig_hermitian handles clustered and wide-range spectra") {
    // near-degenerate cluster split by 1e-13 plus an outlier at 1e6
    Rng rng(271);
    auto u = haar_unitary(5, rng);
    std::vector<double> lam{1e6, 1.0, 1.0 + 1e-13, 1.0 - 1e-13, -3.0};
    ComplexMatrix m(5, 5);
    for (std::size_t k = 0; k < 5; ++k) {
        std::vector<cplx> col(5);
        for (std::size_t i = 0; i < 5; ++i) col[i] = u(i, k);
        ComplexMatrix term = outer(col, col);
        term *= cplx(lam[k], 0.0);
        m += term;
    }
    m.symmetrize();
    auto sp = eig_hermitian(m);
    CHECK(sp.eigenvalues[0] == doctest::Approx(1e6).epsilon(1e-12));
    CHECK(sp.eigenvalues[4] == doctest::Approx(-3.0).epsilon(1e-9));
    ComplexMatrix diff = test::reconstruct(sp);
    diff -= m;
    CHECK(operator_norm(diff) < 1e-10 * (1.0 + 1e6));
}

TEST_CASE("trace_norm examples") {
    // orthogonal projectors: || |0><0| - |1><1| ||_T = 2
    ComplexMatrix m(2, 2);
    m(0, 0) = 1.0;
    m(1, 1) = -1.0;
    CHECK(trace_norm(m) == doctest::Approx(2.0).epsilon(1e-13));

    // nilpotent shift [[0,1],[0,0]]: A^dag A = diag(0,1), singular values {1, 0}
    ComplexMatrix shift(2, 2);
    shift(0, 1) = 1.0;
    CHECK(trace_norm(shift) == doctest::Approx(1.0).epsilon(1e-12));

    // any density operator has trace norm 1
    Rng rng(7);
    auto rho = gaussian_density_matrix(6, 6, rng);
    CHECK(trace_norm(rho) == doctest::Approx(1.0).epsilon(1e-12));

    ComplexMatrix rect(2, 3);
    CHECK_THROWS_AS(trace_norm(rect), NonSquareError);
}

TEST_CASE("operator_norm examples and norm inequality") {
    CHECK(operator_norm(ComplexMatrix::identity(4)) == doctest::Approx(1.0));

    Rng rng(11);
    auto v = random_unit_vector(5, rng);
    CHECK(operator_norm(outer(v, v)) == doctest::Approx(1.0).epsilon(1e-12));

    // operator norm <= trace norm, 500 seeded Hermitian matrices
    for (int trial = 0; trial < 500; ++trial) {
        Rng r(derive_seed(52, trial));
        ComplexMatrix m = random_hermitian(2 + trial % 7, r);
        CHECK(operator_norm(m) <= trace_norm(m) + 1e-12);
    }
}

TEST_CASE("svd reassembles rectangular matrices") {
    Rng rng(99);
    ComplexMatrix m(6, 4);
    for (auto& z : m.entries()) z = rng.gaussian_cplx();

    auto d = svd(m);
    ComplexMatrix rebuilt(6, 4);
    for (std::size_t k = 0; k < d.values.size(); ++k)
        for (std::size_t i = 0; i < 6; ++i)
            for (std::size_t j = 0; j < 4; ++j)
                rebuilt(i, j) += d.values[k] * d.left(i, k) * std::conj(d.right(j, k));
    CHECK(max_entry_distance(rebuilt, m) < 1e-11 * (1.0 + m.max_abs()));

    // cross-route oracle: squared singular values are eigenvalues of M^dag M
    auto gram_eigs = eigenvalues_hermitian(m.adjoint() * m);
    for (std::size_t k = 0; k < d.values.size(); ++k)
        CHECK(d.values[k] * d.values[k] == doctest::Approx(gram_eigs[k]).epsilon(1e-9));
}

TEST_CASE("svd handles rank deficiency with orthonormal completion") {
    Rng rng(123);
    auto u = random_unit_vector(4, rng);
    auto v = random_unit_vector(3, rng);
    ComplexMatrix m = outer(u, v);  // rank 1
    auto d = svd(m);
    CHECK(d.values[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(d.values[1] < 1e-12);
    CHECK(d.values[2] < 1e-12);
    for (std::size_t a = 0; a < 3; ++a)
        for (std::size_t b = a; b < 3; ++b) {
            std::vector<cplx> la(4), lb(4), ra(3), rb(3);
            for (std::size_t i = 0; i < 4; ++i) la[i] = d.left(i, a), lb[i] = d.left(i, b);
            for (std::size_t i = 0; i < 3; ++i) ra[i] = d.right(i, a), rb[i] = d.right(i, b);
            CHECK(std::abs(vdot(la, lb) - (a == b ? 1.0 : 0.0)) < 1e-10);
            CHECK(std::abs(vdot(ra, rb) - (a == b ? 1.0 : 0.0)) < 1e-10);
        }
}

TEST_CASE("kron basics") {
    auto i6 = kron(ComplexMatrix::identity(2), ComplexMatrix::identity(3));
    CHECK(max_entry_distance(i6, ComplexMatrix::identity(6)) == 0.0);

    Rng rng(3);
    auto rho = gaussian_density_matrix(3, 3, rng);
    CHECK(kron(rho, rho).trace().real() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("kron spectrum is the product set, seeded 3x3 pairs") {
    for (int trial = 0; trial < 20; ++trial) {
        Rng rng(derive_seed(77, trial));
        ComplexMatrix a = random_hermitian(3, rng);
        ComplexMatrix b = random_hermitian(3, rng);
        auto ea = eigenvalues_hermitian(a);
        auto eb = eigenvalues_hermitian(b);
        std::vector<double> products;
        for (double x : ea)
            for (double y : eb) products.push_back(x * y);
        std::sort(products.begin(), products.end());

        auto ek = eigenvalues_hermitian(kron(a, b));
        std::sort(ek.begin(), ek.end());
        REQUIRE(ek.size() == products.size());
        for (std::size_t i = 0; i < ek.size(); ++i)
            CHECK(ek[i] == doctest::Approx(products[i]).epsilon(1e-9));
    }
}

TEST_CASE("kron associativity") {
    // integer entries make the products exact, so this pins the index map
    Rng irng(8);
    ComplexMatrix ia(2, 2), ib(3, 3), ic(2, 2);
    for (auto* m : {&ia, &ib, &ic})
        for (auto& z : m->entries()) z = cplx(std::floor(irng.uniform(-4.0, 5.0)), 0.0);
    CHECK(max_entry_distance(kron(kron(ia, ib), ic), kron(ia, kron(ib, ic))) == 0.0);

    // generic entries agree up to one multiplication rounding
    Rng rng(9);
    ComplexMatrix a = random_hermitian(2, rng);
    ComplexMatrix b = random_hermitian(3, rng);
    ComplexMatrix c = random_hermitian(2, rng);
    auto lhs = kron(kron(a, b), c);
    auto rhs = kron(a, kron(b, c));
    CHECK(max_entry_distance(lhs, rhs) <= 1e-15 * (1.0 + lhs.max_abs()));
}

TEST_CASE("partial_trace basic identities") {
    Rng rng(5);
    auto rho_a = gaussian_density_matrix(4, 4, rng);
    auto rho_b = gaussian_density_matrix(3, 3, rng);
    auto prod = kron(rho_a, rho_b);

    auto back_a = partial_trace(prod, 4, 3, Side::A);
    CHECK(max_entry_distance(back_a, rho_a) < 1e-13);
    auto back_b = partial_trace(prod, 4, 3, Side::B);
    CHECK(max_entry_distance(back_b, rho_b) < 1e-13);

    CHECK_THROWS_AS(partial_trace(prod, 5, 3, Side::A), DimensionMismatchError);
}

TEST_CASE("partial_trace preserves trace, PSD, and contracts the trace norm") {
    for (int trial = 0; trial < 25; ++trial) {
        Rng rng(derive_seed(31, trial));
        auto rho = gaussian_density_matrix(12, 1 + trial % 12, rng);
        auto red = partial_trace(rho, 4, 3, trial % 2 ? Side::A : Side::B);

        CHECK(red.trace().real() == doctest::Approx(1.0).epsilon(1e-12));
        auto ev = eigenvalues_hermitian(red);
        CHECK(ev.back() >= -1e-10);
        CHECK(trace_norm(red) <= trace_norm(rho) + 1e-10);
    }
}

TEST_CASE("partial_transpose on both sides") {
    Rng rng(14);
    auto rho = gaussian_density_matrix(12, 5, rng);
    auto ptb = partial_transpose(rho, 3, 4, Side::B);
    auto pta = partial_transpose(rho, 3, 4, Side::A);

    // involution, trace preservation
    CHECK(max_entry_distance(partial_transpose(ptb, 3, 4, Side::B), rho) == 0.0);
    CHECK(ptb.trace().real() == doctest::Approx(1.0).epsilon(1e-14));
    // T_A then T_B is the full transpose
    CHECK(max_entry_distance(partial_transpose(pta, 3, 4, Side::B), rho.transpose()) == 0.0);
}

TEST_CASE("gram_schmidt and completion") {
    Rng rng(21);
    ComplexMatrix g(5, 3);
    for (auto& z : g.entries()) z = rng.gaussian_cplx();
    auto q = gram_schmidt(g);
    REQUIRE(q.cols() == 3);
    auto full = complete_orthonormal(q);
    REQUIRE(full.cols() == 5);
    auto gram = full.adjoint() * full;
    CHECK(max_entry_distance(gram, ComplexMatrix::identity(5)) < 1e-12);
}

TEST_CASE("haar_unitary is unitary and seed-deterministic") {
    Rng rng(17);
    auto u = haar_unitary(4, rng);
    CHECK(max_entry_distance(u.adjoint() * u, ComplexMatrix::identity(4)) < 1e-12);

    Rng r1(29), r2(29);
    auto u1 = haar_unitary(3, r1);
    auto u2 = haar_unitary(3, r2);
    CHECK(max_entry_distance(u1, u2) == 0.0);
}
