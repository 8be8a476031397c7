#pragma once

#include <cstdint>
#include <vector>

#include "bephase/states.hpp"

namespace bephase {

struct PTooSmallError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct NotNormalizedError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct DegenerateFilterError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Transpose of the B-factor indices: <m,mu| rho^T_B |n,nu> = rho_{m nu, n mu}.
ComplexMatrix partial_transpose(const DensityOperator& rho, Side side = Side::B);

struct PptResult {
    bool ppt = false;
    double min_eigenvalue = 0.0;
    std::vector<cplx> eigenvector;  // eigenvector of the minimal PT eigenvalue
};

PptResult ppt_check(const DensityOperator& rho, const Tolerances& tol = default_tolerances());

// Lambda_p(X) = Tr(X) I - (p-1)^{-1} X; (p-1)-positive but not p-positive.
ComplexMatrix lambda_p_apply(const ComplexMatrix& x, int p);

struct WitnessValue {
    double value = 0.0;
    BipartiteVector psi;
    int p = 2;
};

// <psi| (rho_A (x) I - (p-1)^{-1} rho) |psi>, the Schmidt-number witness of
// the map I (x) Lambda_p. Negative values feed the single-copy protocol.
WitnessValue p_reduction_value(const DensityOperator& rho, const BipartiteVector& psi, int p);

// Independent route used to revalidate witness values: applies Lambda_p to
// each B-block of rho and evaluates the quadratic form.
double witness_value_recompute(const DensityOperator& rho, const WitnessValue& wv);

// Trace norm of the realigned matrix R[(i,j),(k,l)] = rho[(i,k),(j,l)];
// values above 1 certify entanglement.
double realignment_value(const DensityOperator& rho);

// Largest p >= 1 with F > (p-1)/m + slack.
int isotropic_schmidt_bound(std::size_t m, double fidelity, double slack = 1e-9);

struct FilterReport {
    bool input_ppt = false;
    bool output_ppt = false;
    double input_min_eigenvalue = 0.0;
    double output_min_eigenvalue = 0.0;
    double filter_trace = 0.0;
    DensityOperator filtered;
};

// rho -> (A (x) I) rho (A^dag (x) I) / trace, with the PT spectrum before and
// after. PPT in implies PPT out; NPT is reported, not asserted.
FilterReport local_filter_invariance_check(const DensityOperator& rho, const ComplexMatrix& a);

struct FilterTrialsReport {
    int trials = 0;
    int ppt_preserved = 0;
    bool input_ppt = false;
};

// Seeded random invertible filters A (x) I applied to rho.
FilterTrialsReport local_filter_invariance_trials(const DensityOperator& rho, int trials,
                                                  std::uint64_t seed);

}  // namespace bephase
