#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bephase/linalg.hpp"

namespace bephase {

struct ZeroDimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct FidelityOutOfRangeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct InvalidParamsError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct WrongBlockInputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct EmptyWeightsError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct AmbientTooSmallError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct ZeroVectorError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct RankOutOfRangeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct InvalidStateError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Pure state on a dim_a (x) dim_b space; |i>_A (x) |j>_B sits at i*dim_b + j.
struct BipartiteVector {
    std::size_t dim_a = 0, dim_b = 0;
    std::vector<cplx> amps;

    BipartiteVector() = default;
    BipartiteVector(std::size_t da, std::size_t db)
        : dim_a(da), dim_b(db), amps(da * db, cplx(0.0, 0.0)) {}
    BipartiteVector(std::size_t da, std::size_t db, std::vector<cplx> a);

    cplx& at(std::size_t i, std::size_t j) { return amps[i * dim_b + j]; }
    const cplx& at(std::size_t i, std::size_t j) const { return amps[i * dim_b + j]; }
    double norm() const { return vnorm(amps); }
    void normalize();
    // amps reshaped as a dim_a x dim_b matrix
    ComplexMatrix reshape() const;
};

struct DensityOperator {
    std::size_t dim_a = 0, dim_b = 0;
    ComplexMatrix mat;

    std::size_t dim() const { return dim_a * dim_b; }
    // Hermitian, PSD, unit trace; throws InvalidStateError otherwise.
    void validate(const Tolerances& tol = default_tolerances()) const;
    ComplexMatrix reduced(Side keep) const { return partial_trace(mat, dim_a, dim_b, keep); }
};

// |psi><psi| as a density operator (normalizes first).
DensityOperator projector(const BipartiteVector& psi);

struct SchmidtDecomposition {
    std::vector<double> coeffs;  // descending, length min(dim_a, dim_b)
    ComplexMatrix left;          // dim_a x k columns, A-side Schmidt vectors
    ComplexMatrix right;         // dim_b x k columns, B-side Schmidt vectors
    std::size_t rank = 0;        // coeffs > rank_tolerance
};

struct CvBesParams {
    double a = 0.4;
    double c = 0.6;
    std::size_t truncation = 6;  // labels n = 1..N stored at local indices 0..N-1
};

// 1/sqrt(m) sum_i |i, i>
BipartiteVector maximally_entangled(std::size_t m);

// F * P_+ + (1 - F) * (I - P_+) / (m^2 - 1)
DensityOperator isotropic(std::size_t m, double fidelity);

// Unnormalized |Psi><Psi| + sum_{m>n} |Psi_mn><Psi_mn| with a_n = a^n,
// c_n = c^n, truncated to n, m <= N; NxN local dimensions.
ComplexMatrix cv_bes_unnormalized(const CvBesParams& params);
// Trace-normalized truncation; PPT by construction.
DensityOperator cv_bes(const CvBesParams& params);

// Block-diagonal direct sum of `blocks` weighted copies of a 3x3 sigma, block
// n occupying local indices [3n, 3n+3) on each side. Weights renormalize.
DensityOperator spurious_block_state(const DensityOperator& sigma, std::size_t blocks,
                                     std::span<const double> weights);

struct ApproximantResult {
    DensityOperator rho_n;
    BipartiteVector phi;    // the entangled complement-block vector
    double discarded_mass;  // spectral + Schmidt mass dropped by compression
};

// rho_N = K_N (rho~_N + (1/N) |Phi><Phi|) with rho~_N the top-N spectral /
// top-N Schmidt compression of rho and Phi maximally entangled of rank
// `entangled_rank` on the complement indices N..N+rank-1 of each side.
ApproximantResult distillable_approximant(const DensityOperator& rho, std::size_t n,
                                std::size_t entangled_rank = 2);

SchmidtDecomposition schmidt_decompose(const BipartiteVector& v, double rank_tolerance);

struct Purification {
    BipartiteVector vec;  // cut (A*B) | ancilla: dim_a = da*db, dim_b = ancilla dim
    std::size_t dim_a = 0, dim_b = 0, dim_ancilla = 0;
};

// Eigendecomposition purification; ancilla dimension equals rank(rho).
Purification purify(const DensityOperator& rho);

// Gaussian-factor state of the requested numerical rank; deterministic per seed.
DensityOperator random_density(std::size_t dim_a, std::size_t dim_b, std::size_t rank,
                               std::uint64_t seed);

// rho^(x n) reordered to the A^n | B^n cut: index digits (a_1..a_n), (b_1..b_n)
// with the first copy most significant.
DensityOperator tensor_power(const DensityOperator& rho, std::size_t n);

// Exchanges the two factors: out[(j,i),(l,k)] = rho[(i,j),(k,l)]. A-side map
// variants are taken by swapping, applying the B-side map, and swapping back.
DensityOperator swap_subsystems(const DensityOperator& rho);

}  // namespace bephase
