#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "bephase/criteria.hpp"
#include "bephase/states.hpp"

namespace bephase {

struct NotPptError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct ZeroEpsilonError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InfeasibleConstraintsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RangeKernel {
    ComplexMatrix range;   // orthonormal columns, eigenvalue > tol * ||rho||_op
    ComplexMatrix kernel;  // orthonormal columns, the complement
};

RangeKernel range_kernel(const DensityOperator& rho, double tol = 1e-9);

// PSD penalty term <e^(c), f| op |e^(c), f> with e conjugated when
// conjugate_a is set (the T_A side of witness expectations).
struct ProductConstraint {
    ComplexMatrix op;
    bool conjugate_a = false;
};

struct ProductVector {
    std::vector<cplx> e, f;  // unit local vectors
    double residual = 0.0;   // final penalty value
};

struct ProductSearchParams {
    int restarts = 32;
    int max_iters = 200;
    double success_tol = 1e-9;
    double improvement_tol = 1e-14;
    std::uint64_t seed = 1;
};

// Alternating minimization of the summed penalties over unit product vectors:
// with f fixed the optimal e is the minimal eigenvector of the compressed
// operator (conjugated for T_A-side terms), and symmetrically. Returns the
// best vector found across restarts; success is the caller's threshold call.
ProductVector minimize_product_penalty(std::size_t dim_a, std::size_t dim_b,
                                       std::span<const ProductConstraint> constraints,
                                       const ProductSearchParams& params);

// Product vector inside the span of `basis` (orthonormal columns over the
// bipartite space); nullopt when the residual never reaches success_tol.
std::optional<ProductVector> product_vector_in_subspace(const ComplexMatrix& basis,
                                                        std::size_t dim_a, std::size_t dim_b,
                                                        const ProductSearchParams& params = {});

// Pair constraint of the edge-state definition: |e,f> in span(basis) and
// |e*,f> in span(basis_conj).
std::optional<ProductVector> product_vector_conjugate_pair(const ComplexMatrix& basis,
                                                           const ComplexMatrix& basis_conj,
                                                           std::size_t dim_a, std::size_t dim_b,
                                                           const ProductSearchParams& params = {});

enum class EdgeStatus {
    not_edge,      // witnessing product vector found
    edge_numeric,  // restarts exhausted: edge within numerical resolution, inconclusive
};

struct EdgeReport {
    EdgeStatus status = EdgeStatus::edge_numeric;
    std::optional<ProductVector> vec;
    double best_residual = 0.0;
};

// Searches R(delta) x R(delta^T_A) for a conjugate product pair; finding one
// disproves edge-ness, exhaustion is reported as inconclusive.
EdgeReport is_edge_state(const DensityOperator& delta, const ProductSearchParams& params = {});

// r(delta) + r(delta^T_A) = 2n^2 - 2n + 1, the generic maximal-rank label.
bool has_maximal_edge_ranks(const DensityOperator& delta, double tol = 1e-9);

// W = P + Q^T_A - epsilon I with P, Q projectors onto K(delta), K(delta^T_A);
// Tr(W delta) = -epsilon exactly by range/kernel orthogonality.
struct EdgeWitness {
    std::size_t dim_a = 0, dim_b = 0;
    ComplexMatrix p, q;
    double epsilon = 0.0;

    ComplexMatrix matrix() const;  // P + Q^T_A - epsilon I
};

struct WitnessBuildParams {
    int restarts = 24;
    int samples = 2000;       // extra uniform product samples
    double margin = 0.9;      // epsilon = margin * found minimum
    std::uint64_t seed = 1;
};

// Lowest <e,f| P + Q^T_A |e,f> found by see-saw restarts plus uniform random
// product sampling; an upper bound on the true infimum.
double witness_epsilon(const ComplexMatrix& p, const ComplexMatrix& q, std::size_t dim_a,
                       std::size_t dim_b, int restarts, int samples, std::uint64_t seed);

EdgeWitness build_edge_witness(const DensityOperator& delta,
                               const WitnessBuildParams& params = {});

// Schmidt-number probe psi^s = sum_i l_i |e_i, f_i>.
struct SchmidtProbe {
    int s = 0;
    std::vector<cplx> coefficients;
    std::vector<std::vector<cplx>> es, fs;
    BipartiteVector psi;
    double value = 0.0;  // <psi^s| W + eps I |psi^s>, normalized
};

// Constraint data of the probe construction: P = P1 + |Psi><Psi| with the
// singled-out projector, Q annihilating the conjugated products. Empty
// members (zero rows) mean the constraint is absent.
struct ProbeConstraints {
    ComplexMatrix q;
    ComplexMatrix p1;
    std::vector<cplx> psi;  // hyperplane <psi^s|Psi> = 0
};

// Collects constrained product vectors, assembles the Hermitian coefficient
// form of W + eps I, intersects its negative subspace with the hyperplane,
// and returns a probe when the normalized expectation drops to <= 1e-10.
std::optional<SchmidtProbe> schmidt_probe_search(const ComplexMatrix& w_plus_eps,
                                                 std::size_t dim_a, std::size_t dim_b, int s,
                                                 const ProbeConstraints& constraints,
                                                 const ProductSearchParams& params = {});

}  // namespace bephase
