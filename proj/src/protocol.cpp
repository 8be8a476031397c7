#include "bephase/protocol.hpp"

#include <cmath>

namespace bephase {

namespace {

// projection of rho onto the leading m (x) m computational support, normalized
DensityOperator project_leading(const DensityOperator& rho, std::size_t m, double* weight) {
    ComplexMatrix out(m * m, m * m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t k = 0; k < m; ++k)
            for (std::size_t j = 0; j < m; ++j)
                for (std::size_t l = 0; l < m; ++l)
                    out(i * m + k, j * m + l) = rho.mat(i * rho.dim_b + k, j * rho.dim_b + l);
    const double tr = out.trace().real();
    if (weight) *weight = tr;
    if (tr <= 1e-14) return DensityOperator{m, m, std::move(out)};
    out *= cplx(1.0 / tr, 0.0);
    return DensityOperator{m, m, std::move(out)};
}

}  // namespace

TruncationResult truncation_dim_search(const DensityOperator& rho, const BipartiteVector& psi,
                                       int p) {
    const double epsilon_full = p_reduction_value(rho, psi, p).value;
    if (epsilon_full >= 0.0)
        throw NoViolationError("truncation search needs a negative full-space witness value");

    const std::size_t ambient = std::min(rho.dim_a, rho.dim_b);
    for (std::size_t m = 1; m <= ambient; ++m) {
        double state_weight = 0.0;
        auto rho_m = project_leading(rho, m, &state_weight);
        if (state_weight <= 1e-14) continue;

        BipartiteVector psi_m(m, m);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j) psi_m.at(i, j) = psi.at(i, j);
        if (psi_m.norm() <= 1e-12) continue;
        psi_m.normalize();

        const double value = p_reduction_value(rho_m, psi_m, p).value;
        if (value <= epsilon_full / 2.0)
            return TruncationResult{m, std::move(rho_m), std::move(psi_m), value};
    }
    throw NotReachedError("no truncation dimension kept half the violation");
}

ComplexMatrix filter_from_violation(const BipartiteVector& psi) {
    if (psi.dim_a != psi.dim_b)
        throw NonSquareLocalDimsError("matricization filter needs square local dims");
    const std::size_t m = psi.dim_a;
    ComplexMatrix out(m, m);
    const double scale = std::sqrt(static_cast<double>(m));
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) out(i, j) = scale * psi.at(i, j);
    return out;
}

FilteredState apply_filter(const DensityOperator& rho, const ComplexMatrix& m) {
    if (!m.square() || m.rows() != rho.dim_a)
        throw DimensionMismatchError("filter must be square of size dim_a");
    const ComplexMatrix big = kron(m, ComplexMatrix::identity(rho.dim_b));
    ComplexMatrix sigma = big.adjoint() * rho.mat * big;
    const double norm = sigma.trace().real();
    if (norm <= 1e-12) throw FilterAnnihilatesStateError("filter annihilates the state");
    sigma *= cplx(1.0 / norm, 0.0);
    sigma.symmetrize();
    return FilteredState{DensityOperator{rho.dim_a, rho.dim_b, std::move(sigma)}, norm};
}

DensityOperator twirl_exact(const DensityOperator& rho) {
    if (rho.dim_a != rho.dim_b)
        throw NonSquareLocalDimsError("twirl needs square local dims");
    const std::size_t m = rho.dim_a;
    const auto plus = maximally_entangled(m);
    const double fidelity = expectation(rho.mat, plus.amps);

    ComplexMatrix p = outer(plus.amps, plus.amps);
    ComplexMatrix rest = ComplexMatrix::identity(m * m);
    rest -= p;
    rest *= cplx((1.0 - fidelity) / static_cast<double>(m * m - 1), 0.0);
    p *= cplx(fidelity, 0.0);
    p += rest;
    return DensityOperator{m, m, std::move(p)};
}

DensityOperator conjugate_twirl_term(const DensityOperator& rho, const ComplexMatrix& u) {
    if (rho.dim_a != rho.dim_b || !u.square() || u.rows() != rho.dim_a)
        throw DimensionMismatchError("twirl term needs square local dims matching the unitary");
    const std::size_t m = rho.dim_a;

    // (U (x) U*) rho (U (x) U*)^dag as four single-index contractions of the
    // rank-4 tensor rho[(i,j),(k,l)]; avoids m^6 kron matmuls
    auto contract = [m](const std::vector<cplx>& ten, const ComplexMatrix& w, bool conjugate,
                        int slot) {
        std::vector<cplx> out(ten.size(), cplx(0.0, 0.0));
        const std::size_t stride[4] = {m * m * m, m * m, m, 1};
        const std::size_t s = stride[slot];
        for (std::size_t base = 0; base < ten.size(); ++base) {
            const std::size_t digit = (base / s) % m;
            if (digit != 0) continue;  // visit each fiber once
            for (std::size_t i = 0; i < m; ++i) {
                cplx acc = 0.0;
                for (std::size_t a = 0; a < m; ++a) {
                    const cplx w_ia = conjugate ? std::conj(w(i, a)) : w(i, a);
                    acc += w_ia * ten[base + a * s];
                }
                out[base + i * s] = acc;
            }
        }
        return out;
    };

    std::vector<cplx> ten(rho.mat.entries().begin(), rho.mat.entries().end());
    ten = contract(ten, u, false, 0);  // U on the row A index
    ten = contract(ten, u, true, 1);   // U* on the row B index
    ten = contract(ten, u, true, 2);   // U* (adjoint side) on the column A index
    ten = contract(ten, u, false, 3);  // U on the column B index

    ComplexMatrix out(m * m, m * m, std::move(ten));
    out.symmetrize();
    return DensityOperator{m, m, std::move(out)};
}

DensityOperator twirl_sample_oracle(const DensityOperator& rho, int samples, std::uint64_t seed) {
    if (rho.dim_a != rho.dim_b)
        throw NonSquareLocalDimsError("twirl needs square local dims");
    if (samples < 1) throw InvalidParamsError("twirl oracle needs samples >= 1");

    ComplexMatrix acc(rho.dim(), rho.dim());
    for (int s = 0; s < samples; ++s) {
        Rng rng(derive_seed(seed, s));
        acc += conjugate_twirl_term(rho, haar_unitary(rho.dim_a, rng)).mat;
    }
    acc *= cplx(1.0 / samples, 0.0);
    return DensityOperator{rho.dim_a, rho.dim_b, std::move(acc)};
}

SchmidtCertificate run_protocol(const DensityOperator& rho, const BipartiteVector& psi, int p) {
    auto truncated = truncation_dim_search(rho, psi, p);
    ComplexMatrix filter = filter_from_violation(truncated.psi_m);
    auto filtered = apply_filter(truncated.rho_m, filter);
    auto iso = twirl_exact(filtered.sigma);

    SchmidtCertificate cert;
    cert.m = truncated.m;
    cert.p = p;
    cert.filter = std::move(filter);
    cert.witness = WitnessValue{truncated.value, truncated.psi_m, p};
    cert.fidelity = expectation(iso.mat, maximally_entangled(truncated.m).amps);

    // cross-check: the isotropic witness closed form 1/m - F/(p-1) is negative
    const double iso_value =
        p_reduction_value(iso, maximally_entangled(truncated.m), p).value;
    const double closed_form = 1.0 / static_cast<double>(cert.m) - cert.fidelity / (p - 1.0);
    if (std::abs(iso_value - closed_form) > 1e-10 || iso_value >= 0.0)
        throw NoViolationError("protocol produced a non-certifying isotropic state");
    return cert;
}

}  // namespace bephase
