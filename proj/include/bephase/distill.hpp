#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "bephase/criteria.hpp"
#include "bephase/states.hpp"

namespace bephase {

struct WrongRankError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct DimensionCapExceededError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct NonNegativeWitnessError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct InvalidEtaError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Witness data certifying distillability: a Schmidt-rank-<=2 vector on the
// n-copy A^n | B^n cut with <Psi| (rho^(x)n)^T_B |Psi> = epsilon < 0. The
// rank-2 projectors of the subspace form are recoverable from Psi's Schmidt
// vectors (P_B from the conjugated B-side family).
struct DistillCertificate {
    std::size_t n_copies = 1;
    BipartiteVector psi;
    double epsilon = 0.0;
};

// Re-evaluates <Psi|(rho^(x)n)^T_B|Psi> from raw state data.
double recompute_certificate_value(const DensityOperator& rho, const DistillCertificate& cert);

// The local rank-<=2 projectors implied by the certificate vector: P_A spans
// psi's A-side Schmidt vectors, P_B the conjugated B-side ones, so that
// psi = (P_A (x) P_B^T) psi and the projected form
// <Psi|((P_A (x) P_B) sigma (P_A (x) P_B))^T_B|Psi> reproduces epsilon.
std::pair<ComplexMatrix, ComplexMatrix> certificate_projectors(const DistillCertificate& cert);

struct Rank2SearchParams {
    int restarts = 32;
    int max_iters = 200;
    double improvement_tol = 1e-12;
    double certificate_threshold = 1e-9;  // certify when value < -threshold
    std::size_t dim_cap = 4096;           // refuse n-copy matrices above this size
    std::uint64_t seed = 1;
};

// The <= 4 nonzero eigenpairs of (|Psi><Psi|)^T_B for a Schmidt-rank-2 vector;
// eigenvalues lie in [-1/2, 1].
Spectrum pt_rank2_spectral_decomp(const BipartiteVector& psi,
                                  const Tolerances& tol = default_tolerances());

// Minimizes <Psi|(rho^(x)n)^T_B|Psi> over normalized Schmidt-rank-<=2 vectors
// by alternating compressed eigenproblems: with the B-side pair fixed, the
// optimal A-side pair and coefficients are the minimal eigenpair of the
// compressed operator, and symmetrically. NotFound (nullopt) is inconclusive,
// never a non-distillability proof.
std::optional<DistillCertificate> rank2_witness_search(const DensityOperator& rho, std::size_t n,
                                                       const Rank2SearchParams& params = {});

struct CertifyResult {
    std::optional<DistillCertificate> certificate;
    std::size_t n_reached = 0;  // highest copy count searched
};

// Runs rank2_witness_search for n = 1..n_max and returns the first certificate.
CertifyResult certify_distillable(const DensityOperator& rho, std::size_t n_max,
                                  const Rank2SearchParams& params = {});

// |epsilon| / (4 n): uniform-norm ball radius, valid for the trace-norm ball
// as well since ||.|| <= ||.||_T.
double stability_radius(const DistillCertificate& cert);

// |value| / (1 + (p-1)^{-1}): trace-norm radius of the Lambda_p witness ball.
double p_stability_radius(const WitnessValue& wv);

struct BallReport {
    double eta = 0.0;
    std::size_t n_copies = 0;  // 0 for Lambda_p witnesses
    double epsilon = 0.0;
    int samples = 0;
    int violations = 0;     // witness value >= 0 on the perturbed state
    double max_value = 0.0; // largest witness value observed
    double max_distance = 0.0;  // largest realized trace distance (<= eta)
};

// Draws seeded traceless Hermitian perturbations with ||Delta||_T = eta,
// projects back to the state cone (clip + renormalize, then shrink toward rho
// so the realized trace distance stays <= eta), and re-evaluates the witness.
BallReport perturb_and_verify(const DensityOperator& rho, const DistillCertificate& cert,
                              double eta, int samples, std::uint64_t seed);
BallReport perturb_and_verify(const DensityOperator& rho, const WitnessValue& wv, double eta,
                              int samples, std::uint64_t seed);

struct DensityDemoRow {
    std::size_t n_trunc = 0;
    double distance = 0.0;
    DistillCertificate cert;
};

// Density-of-distillable-states sequence: for each N builds rho_N, measures ||rho_N -
// rho||_T, and certifies distillability at n = 1 with the PT-negative
// eigenvector of the complement block.
std::vector<DensityDemoRow> density_demo(const DensityOperator& rho, std::size_t n_begin,
                                         std::size_t n_end);

struct DensityDemoPRow {
    std::size_t n_trunc = 0;
    double distance = 0.0;
    WitnessValue witness;  // p_reduction_value on the rank-p complement block
};

// Schmidt-rank-p variant: the complement block carries a maximally entangled
// vector of rank p and the certificate is a negative Lambda_p witness value.
std::vector<DensityDemoPRow> density_demo_p(const DensityOperator& rho, std::size_t n_begin,
                                            std::size_t n_end, int p);

}  // namespace bephase
