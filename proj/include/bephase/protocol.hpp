#pragma once

#include <cstdint>

#include "bephase/criteria.hpp"
#include "bephase/states.hpp"

namespace bephase {

struct NoViolationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct NotReachedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NonSquareLocalDimsError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct FilterAnnihilatesStateError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Isotropic parameters certifying Schmidt number >= p, together with the
// filter that produced them and the witness that started the pipeline.
struct SchmidtCertificate {
    std::size_t m = 0;       // local dimension after truncation
    double fidelity = 0.0;   // F = <Psi_+| sigma |Psi_+>, strictly above (p-1)/m
    int p = 2;
    ComplexMatrix filter;
    WitnessValue witness;    // violation on the truncated pair
};

struct TruncationResult {
    std::size_t m = 0;
    DensityOperator rho_m;   // normalized projection onto the leading m (x) m support
    BipartiteVector psi_m;   // normalized projection of psi
    double value = 0.0;      // witness value of the projected pair
};

// Smallest m whose leading-m (x) m projection keeps the witness value at or
// below half the full violation. Linear scan; NotReached reports an exhausted
// ambient space honestly.
TruncationResult truncation_dim_search(const DensityOperator& rho, const BipartiteVector& psi,
                                       int p);

// Matricization filter M(i, j) = sqrt(m) psi[i*m + j], the unique choice with
// |psi> = (M (x) I)|Phi_+> and Tr(M^dag M) = m.
ComplexMatrix filter_from_violation(const BipartiteVector& psi);

struct FilteredState {
    DensityOperator sigma;  // (M^dag (x) I) rho (M (x) I) / norm
    double norm = 0.0;
};

// Key identity, for M = filter_from_violation(psi):
//   (M (x) I)|Phi_+> = |psi>  =>  <Phi_+| (M^dag (x) I) rho (M (x) I) |Phi_+> = <psi|rho|psi>,
//   norm = Tr[(M M^dag (x) I) rho] = m <psi| rho_A (x) I |psi>,
//   so F - (p-1)/m = [<psi|rho|psi> - (p-1) <psi| rho_A (x) I |psi>] / norm,
// which is positive exactly when the p-reduction witness value is negative.
FilteredState apply_filter(const DensityOperator& rho, const ComplexMatrix& m);

// Analytic U (x) U* twirl: projects onto the isotropic family, preserving the
// Psi_+ fidelity exactly.
DensityOperator twirl_exact(const DensityOperator& rho);

// (U (x) conj(U)) rho (U (x) conj(U))^dag
DensityOperator conjugate_twirl_term(const DensityOperator& rho, const ComplexMatrix& u);

// Monte-Carlo average over seeded Haar unitaries; converges to twirl_exact.
DensityOperator twirl_sample_oracle(const DensityOperator& rho, int samples, std::uint64_t seed);

// Full single-copy pipeline: truncate, filter, twirl, certify F > (p-1)/m.
SchmidtCertificate run_protocol(const DensityOperator& rho, const BipartiteVector& psi, int p);

}  // namespace bephase
