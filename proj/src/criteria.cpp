#include "bephase/criteria.hpp"

#include <cmath>

namespace bephase {

ComplexMatrix partial_transpose(const DensityOperator& rho, Side side) {
    return partial_transpose(rho.mat, rho.dim_a, rho.dim_b, side);
}

PptResult ppt_check(const DensityOperator& rho, const Tolerances& tol) {
    auto sp = eig_hermitian(partial_transpose(rho), tol);
    PptResult out;
    out.min_eigenvalue = sp.eigenvalues.back();
    out.eigenvector = sp.eigenvector(sp.eigenvalues.size() - 1);
    out.ppt = out.min_eigenvalue >= -tol.psd * (1.0 + std::abs(sp.eigenvalues.front()));
    return out;
}

ComplexMatrix lambda_p_apply(const ComplexMatrix& x, int p) {
    if (p < 2) throw PTooSmallError("Lambda_p requires p >= 2");
    if (!x.square()) throw NonSquareError("Lambda_p requires a square matrix");
    ComplexMatrix out = ComplexMatrix::identity(x.rows());
    out *= x.trace();
    ComplexMatrix scaled = x;
    scaled *= cplx(1.0 / (p - 1.0), 0.0);
    out -= scaled;
    return out;
}

WitnessValue p_reduction_value(const DensityOperator& rho, const BipartiteVector& psi, int p) {
    if (p < 2) throw PTooSmallError("p_reduction_value requires p >= 2");
    if (psi.dim_a != rho.dim_a || psi.dim_b != rho.dim_b)
        throw DimensionMismatchError("psi dimensions do not match rho");
    if (std::abs(psi.norm() - 1.0) > 1e-8) throw NotNormalizedError("psi must be normalized");

    const ComplexMatrix rho_a = rho.reduced(Side::A);

    // <psi| rho_A (x) I |psi> = Tr(rho_A . redA(|psi><psi|))
    cplx term_a = 0.0;
    for (std::size_t i = 0; i < rho.dim_a; ++i)
        for (std::size_t ip = 0; ip < rho.dim_a; ++ip) {
            cplx overlap = 0.0;
            for (std::size_t j = 0; j < rho.dim_b; ++j)
                overlap += std::conj(psi.at(i, j)) * psi.at(ip, j);
            term_a += overlap * rho_a(i, ip);
        }
    const double term_rho = expectation(rho.mat, psi.amps);

    WitnessValue out;
    out.value = term_a.real() - term_rho / (p - 1.0);
    out.psi = psi;
    out.p = p;
    return out;
}

double witness_value_recompute(const DensityOperator& rho, const WitnessValue& wv) {
    if (wv.p < 2) throw PTooSmallError("witness p must be >= 2");
    // [I (x) Lambda_p](rho), assembled B-block by B-block
    const std::size_t da = rho.dim_a, db = rho.dim_b;
    ComplexMatrix mapped(da * db, da * db);
    for (std::size_t i = 0; i < da; ++i)
        for (std::size_t j = 0; j < da; ++j) {
            ComplexMatrix block(db, db);
            for (std::size_t k = 0; k < db; ++k)
                for (std::size_t l = 0; l < db; ++l) block(k, l) = rho.mat(i * db + k, j * db + l);
            ComplexMatrix out_block = lambda_p_apply(block, wv.p);
            for (std::size_t k = 0; k < db; ++k)
                for (std::size_t l = 0; l < db; ++l) mapped(i * db + k, j * db + l) = out_block(k, l);
        }
    return vdot(wv.psi.amps, mapped * wv.psi.amps).real();
}

double realignment_value(const DensityOperator& rho) {
    const std::size_t da = rho.dim_a, db = rho.dim_b;
    ComplexMatrix r(da * da, db * db);
    for (std::size_t i = 0; i < da; ++i)
        for (std::size_t j = 0; j < da; ++j)
            for (std::size_t k = 0; k < db; ++k)
                for (std::size_t l = 0; l < db; ++l)
                    r(i * da + j, k * db + l) = rho.mat(i * db + k, j * db + l);
    double sum = 0.0;
    for (double s : singular_values(r)) sum += s;
    return sum;
}

int isotropic_schmidt_bound(std::size_t m, double fidelity, double slack) {
    if (m < 2) throw ZeroDimensionError("isotropic_schmidt_bound requires m >= 2");
    if (fidelity < 0.0 || fidelity > 1.0)
        throw FidelityOutOfRangeError("fidelity must lie in [0, 1]");
    const int p = static_cast<int>(std::floor(static_cast<double>(m) * fidelity - slack)) + 1;
    return std::max(1, p);
}

FilterReport local_filter_invariance_check(const DensityOperator& rho, const ComplexMatrix& a) {
    if (!a.square() || a.rows() != rho.dim_a)
        throw DimensionMismatchError("filter must be square of size dim_a");

    const ComplexMatrix big = kron(a, ComplexMatrix::identity(rho.dim_b));
    ComplexMatrix filtered = big * rho.mat * big.adjoint();
    const double norm = filtered.trace().real();
    if (norm <= 1e-12) throw DegenerateFilterError("filter annihilates the state");
    filtered *= cplx(1.0 / norm, 0.0);
    filtered.symmetrize();

    FilterReport report;
    report.filter_trace = norm;
    report.filtered = DensityOperator{rho.dim_a, rho.dim_b, std::move(filtered)};

    auto before = ppt_check(rho);
    auto after = ppt_check(report.filtered);
    report.input_ppt = before.ppt;
    report.output_ppt = after.ppt;
    report.input_min_eigenvalue = before.min_eigenvalue;
    report.output_min_eigenvalue = after.min_eigenvalue;
    return report;
}

FilterTrialsReport local_filter_invariance_trials(const DensityOperator& rho, int trials,
                                                  std::uint64_t seed) {
    FilterTrialsReport report;
    report.trials = trials;
    report.input_ppt = ppt_check(rho).ppt;
    for (int t = 0; t < trials; ++t) {
        Rng rng(derive_seed(seed, t));
        // Gaussian + diagonal shift keeps the draw comfortably invertible
        ComplexMatrix a(rho.dim_a, rho.dim_a);
        for (auto& z : a.entries()) z = rng.gaussian_cplx();
        for (std::size_t i = 0; i < rho.dim_a; ++i) a(i, i) += 2.0;
        auto rep = local_filter_invariance_check(rho, a);
        if (rep.output_ppt) ++report.ppt_preserved;
    }
    return report;
}

}  // namespace bephase
