#include "bephase/states.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace bephase {

BipartiteVector::BipartiteVector(std::size_t da, std::size_t db, std::vector<cplx> a)
    : dim_a(da), dim_b(db), amps(std::move(a)) {
    if (amps.size() != da * db)
        throw DimensionMismatchError("amplitude count does not match dim_a*dim_b");
}

void BipartiteVector::normalize() {
    if (norm() == 0.0) throw ZeroVectorError("cannot normalize zero vector");
    vnormalize(amps);
}

ComplexMatrix BipartiteVector::reshape() const {
    ComplexMatrix m(dim_a, dim_b);
    for (std::size_t i = 0; i < dim_a; ++i)
        for (std::size_t j = 0; j < dim_b; ++j) m(i, j) = at(i, j);
    return m;
}

void DensityOperator::validate(const Tolerances& tol) const {
    if (!mat.square() || mat.rows() != dim())
        throw InvalidStateError("matrix size does not match dim_a*dim_b");
    if (!mat.is_hermitian(tol.hermiticity)) throw InvalidStateError("state is not Hermitian");
    if (std::abs(mat.trace().real() - 1.0) > tol.unit_trace || std::abs(mat.trace().imag()) > tol.unit_trace)
        throw InvalidStateError("state trace is not 1");
    auto ev = eigenvalues_hermitian(mat, tol);
    const double floor = -tol.psd * (1.0 + (ev.empty() ? 0.0 : std::abs(ev.front())));
    if (!ev.empty() && ev.back() < floor) throw InvalidStateError("state has a negative eigenvalue");
}

DensityOperator projector(const BipartiteVector& psi) {
    BipartiteVector v = psi;
    v.normalize();
    return DensityOperator{v.dim_a, v.dim_b, outer(v.amps, v.amps)};
}

BipartiteVector maximally_entangled(std::size_t m) {
    if (m == 0) throw ZeroDimensionError("maximally_entangled requires m >= 1");
    BipartiteVector v(m, m);
    const double amp = 1.0 / std::sqrt(static_cast<double>(m));
    for (std::size_t i = 0; i < m; ++i) v.at(i, i) = amp;
    return v;
}

DensityOperator isotropic(std::size_t m, double fidelity) {
    if (m < 2) throw ZeroDimensionError("isotropic requires m >= 2");
    if (fidelity < 0.0 || fidelity > 1.0)
        throw FidelityOutOfRangeError("fidelity must lie in [0, 1]");
    const auto plus = maximally_entangled(m);
    ComplexMatrix p = outer(plus.amps, plus.amps);
    ComplexMatrix rest = ComplexMatrix::identity(m * m);
    rest -= p;
    rest *= cplx((1.0 - fidelity) / static_cast<double>(m * m - 1), 0.0);
    p *= cplx(fidelity, 0.0);
    p += rest;
    return DensityOperator{m, m, std::move(p)};
}

ComplexMatrix cv_bes_unnormalized(const CvBesParams& params) {
    if (!(params.a > 0.0 && params.a < 1.0 && params.c > 0.0 && params.c < 1.0))
        throw InvalidParamsError("cv_bes requires a, c in (0, 1)");
    if (!(params.a < params.c)) throw InvalidParamsError("cv_bes requires a < c");
    if (params.truncation == 0) throw InvalidParamsError("cv_bes requires N >= 1");

    const std::size_t n = params.truncation;
    // label k in 1..N lives at local index k-1
    auto idx = [n](std::size_t row, std::size_t col) { return (row - 1) * n + (col - 1); };

    std::vector<cplx> psi(n * n, cplx(0.0, 0.0));
    for (std::size_t k = 1; k <= n; ++k) psi[idx(k, k)] = std::pow(params.a, double(k));
    ComplexMatrix rho = outer(psi, psi);

    for (std::size_t lo = 1; lo <= n; ++lo) {
        for (std::size_t hi = lo + 1; hi <= n; ++hi) {
            std::vector<cplx> v(n * n, cplx(0.0, 0.0));
            v[idx(lo, hi)] = std::pow(params.c, double(hi)) * std::pow(params.a, double(lo));
            v[idx(hi, lo)] = std::pow(params.c, -double(hi)) * std::pow(params.a, double(hi));
            rho += outer(v, v);
        }
    }
    return rho;
}

DensityOperator cv_bes(const CvBesParams& params) {
    ComplexMatrix rho = cv_bes_unnormalized(params);
    rho *= cplx(1.0 / rho.trace().real(), 0.0);
    return DensityOperator{params.truncation, params.truncation, std::move(rho)};
}

DensityOperator spurious_block_state(const DensityOperator& sigma, std::size_t blocks,
                                     std::span<const double> weights) {
    if (sigma.dim_a != 3 || sigma.dim_b != 3)
        throw WrongBlockInputError("spurious_block_state requires a 3x3 sigma");
    if (blocks == 0 || weights.empty()) throw EmptyWeightsError("no blocks or weights");
    if (weights.size() < blocks) throw EmptyWeightsError("fewer weights than blocks");

    double total = 0.0;
    for (std::size_t b = 0; b < blocks; ++b) {
        if (weights[b] <= 0.0) throw EmptyWeightsError("weights must be positive");
        total += weights[b];
    }

    const std::size_t local = 3 * blocks;
    ComplexMatrix out(local * local, local * local);
    for (std::size_t b = 0; b < blocks; ++b) {
        const double w = weights[b] / total;
        // block b occupies local indices [3b, 3b+3) on each side
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t k = 0; k < 3; ++k)
                for (std::size_t j = 0; j < 3; ++j)
                    for (std::size_t l = 0; l < 3; ++l)
                        out((3 * b + i) * local + (3 * b + k), (3 * b + j) * local + (3 * b + l)) =
                            w * sigma.mat(i * 3 + k, j * 3 + l);
    }
    return DensityOperator{local, local, std::move(out)};
}

ApproximantResult distillable_approximant(const DensityOperator& rho, std::size_t n,
                                std::size_t entangled_rank) {
    if (n == 0) throw InvalidParamsError("distillable_approximant requires N >= 1");
    if (entangled_rank < 2) throw InvalidParamsError("entangled rank must be >= 2");
    if (rho.dim_a < n + entangled_rank || rho.dim_b < n + entangled_rank)
        throw AmbientTooSmallError("ambient dimensions must be at least N + rank");

    // top-N spectral terms
    auto sp = eig_hermitian(rho.mat);
    ComplexMatrix compressed(rho.dim(), rho.dim());
    for (std::size_t term = 0; term < std::min<std::size_t>(n, sp.eigenvalues.size()); ++term) {
        const double p = sp.eigenvalues[term];
        if (p <= 0.0) break;

        // top-N Schmidt terms of this eigenvector; no per-term renormalization
        BipartiteVector vec(rho.dim_a, rho.dim_b, sp.eigenvector(term));
        auto sd = schmidt_decompose(vec, 0.0);
        BipartiteVector truncated(rho.dim_a, rho.dim_b);
        for (std::size_t k = 0; k < std::min<std::size_t>(n, sd.coeffs.size()); ++k) {
            for (std::size_t i = 0; i < rho.dim_a; ++i)
                for (std::size_t j = 0; j < rho.dim_b; ++j)
                    truncated.at(i, j) += sd.coeffs[k] * sd.left(i, k) * sd.right(j, k);
        }
        ComplexMatrix term_mat = outer(truncated.amps, truncated.amps);
        term_mat *= cplx(p, 0.0);
        compressed += term_mat;
    }

    const double kept_mass = compressed.trace().real();

    // entangled vector on complement basis indices N .. N+rank-1
    BipartiteVector phi(rho.dim_a, rho.dim_b);
    const double amp = 1.0 / std::sqrt(static_cast<double>(entangled_rank));
    for (std::size_t i = 0; i < entangled_rank; ++i) phi.at(n + i, n + i) = amp;

    ComplexMatrix block = outer(phi.amps, phi.amps);
    block *= cplx(1.0 / static_cast<double>(n), 0.0);
    compressed += block;

    const double k_n = 1.0 / compressed.trace().real();
    compressed *= cplx(k_n, 0.0);
    compressed.symmetrize();

    ApproximantResult result;
    result.rho_n = DensityOperator{rho.dim_a, rho.dim_b, std::move(compressed)};
    result.phi = std::move(phi);
    result.discarded_mass = 1.0 - kept_mass;
    return result;
}

SchmidtDecomposition schmidt_decompose(const BipartiteVector& v, double rank_tolerance) {
    if (v.norm() == 0.0) throw ZeroVectorError("schmidt_decompose of zero vector");
    auto dec = svd(v.reshape());

    SchmidtDecomposition out;
    out.coeffs = dec.values;
    out.left = dec.left;
    // B-side Schmidt vectors absorb the conjugation of the right singular family
    out.right = dec.right.conj();
    out.rank = 0;
    for (double c : out.coeffs)
        if (c > rank_tolerance) ++out.rank;
    return out;
}

Purification purify(const DensityOperator& rho) {
    auto sp = eig_hermitian(rho.mat);
    const double cutoff = default_tolerances().rank * (1.0 + std::abs(sp.eigenvalues.front()));
    std::size_t rank = 0;
    for (double p : sp.eigenvalues)
        if (p > cutoff) ++rank;
    if (rank == 0) throw InvalidStateError("purify: state has no positive spectral mass");

    Purification out;
    out.dim_a = rho.dim_a;
    out.dim_b = rho.dim_b;
    out.dim_ancilla = rank;
    out.vec = BipartiteVector(rho.dim(), rank);
    for (std::size_t k = 0; k < rank; ++k) {
        const double w = std::sqrt(sp.eigenvalues[k]);
        for (std::size_t x = 0; x < rho.dim(); ++x) out.vec.at(x, k) = w * sp.eigenvectors(x, k);
    }
    return out;
}

DensityOperator random_density(std::size_t dim_a, std::size_t dim_b, std::size_t rank,
                               std::uint64_t seed) {
    const std::size_t dim = dim_a * dim_b;
    if (rank < 1 || rank > dim) throw RankOutOfRangeError("rank must lie in [1, dim_a*dim_b]");
    Rng rng(seed);
    ComplexMatrix g(dim, rank);
    for (auto& z : g.entries()) z = rng.gaussian_cplx();
    ComplexMatrix rho = g * g.adjoint();
    rho *= cplx(1.0 / rho.trace().real(), 0.0);
    rho.symmetrize();
    return DensityOperator{dim_a, dim_b, std::move(rho)};
}

DensityOperator swap_subsystems(const DensityOperator& rho) {
    const std::size_t da = rho.dim_a, db = rho.dim_b;
    ComplexMatrix out(da * db, da * db);
    for (std::size_t i = 0; i < da; ++i)
        for (std::size_t j = 0; j < db; ++j)
            for (std::size_t k = 0; k < da; ++k)
                for (std::size_t l = 0; l < db; ++l)
                    out(j * da + i, l * da + k) = rho.mat(i * db + j, k * db + l);
    return DensityOperator{db, da, std::move(out)};
}

DensityOperator tensor_power(const DensityOperator& rho, std::size_t n) {
    if (n == 0) throw InvalidParamsError("tensor_power requires n >= 1");
    if (n == 1) return rho;

    const std::size_t da = rho.dim_a, db = rho.dim_b;
    std::size_t big_a = 1, big_b = 1;
    for (std::size_t k = 0; k < n; ++k) {
        big_a *= da;
        big_b *= db;
    }
    const std::size_t dim = big_a * big_b;

    auto digits = [](std::size_t value, std::size_t base, std::size_t count,
                     std::vector<std::size_t>& out) {
        for (std::size_t k = count; k-- > 0;) {
            out[k] = value % base;
            value /= base;
        }
    };

    ComplexMatrix out(dim, dim);
    std::vector<std::size_t> ar(n), br(n), ac(n), bc(n);
    for (std::size_t row = 0; row < dim; ++row) {
        digits(row / big_b, da, n, ar);
        digits(row % big_b, db, n, br);
        for (std::size_t col = 0; col < dim; ++col) {
            digits(col / big_b, da, n, ac);
            digits(col % big_b, db, n, bc);
            cplx v = 1.0;
            for (std::size_t k = 0; k < n; ++k) {
                v *= rho.mat((ar[k] * db + br[k]), (ac[k] * db + bc[k]));
                if (v == cplx(0.0, 0.0)) break;
            }
            out(row, col) = v;
        }
    }
    return DensityOperator{big_a, big_b, std::move(out)};
}

}  // namespace bephase
