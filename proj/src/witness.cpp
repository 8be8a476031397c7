#include "bephase/witness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bephase {

namespace {

// A(f)[i][i'] = sum_{j,j'} conj(f_j) G[(i,j),(i',j')] f_j'
ComplexMatrix compress_over_f(const ComplexMatrix& g, std::size_t da, std::size_t db,
                              std::span<const cplx> f) {
    ComplexMatrix out(da, da);
    for (std::size_t i = 0; i < da; ++i)
        for (std::size_t ip = 0; ip < da; ++ip) {
            cplx acc = 0.0;
            for (std::size_t j = 0; j < db; ++j) {
                cplx row = 0.0;
                for (std::size_t jp = 0; jp < db; ++jp) row += g(i * db + j, ip * db + jp) * f[jp];
                acc += std::conj(f[j]) * row;
            }
            out(i, ip) = acc;
        }
    return out;
}

// C(e)[j][j'] = sum_{i,i'} conj(e_i) G[(i,j),(i',j')] e_i'
ComplexMatrix compress_over_e(const ComplexMatrix& g, std::size_t da, std::size_t db,
                              std::span<const cplx> e) {
    ComplexMatrix out(db, db);
    for (std::size_t j = 0; j < db; ++j)
        for (std::size_t jp = 0; jp < db; ++jp) {
            cplx acc = 0.0;
            for (std::size_t i = 0; i < da; ++i) {
                cplx row = 0.0;
                for (std::size_t ip = 0; ip < da; ++ip) row += g(i * db + j, ip * db + jp) * e[ip];
                acc += std::conj(e[i]) * row;
            }
            out(j, jp) = acc;
        }
    return out;
}

double product_objective(std::span<const ProductConstraint> constraints,
                         std::span<const cplx> e, std::span<const cplx> f) {
    std::vector<cplx> ec(e.begin(), e.end());
    for (auto& z : ec) z = std::conj(z);
    const auto plain = kron_vec(e, f);
    const auto conj_a = kron_vec(ec, f);
    double total = 0.0;
    for (const auto& con : constraints)
        total += expectation(con.op, con.conjugate_a ? conj_a : plain);
    return total;
}

std::vector<cplx> min_eigvec(const ComplexMatrix& m, double* value) {
    auto sp = eig_hermitian(m);
    const std::size_t last = sp.eigenvalues.size() - 1;
    if (value) *value = sp.eigenvalues[last];
    return sp.eigenvector(last);
}

}  // namespace

RangeKernel range_kernel(const DensityOperator& rho, double tol) {
    auto sp = eig_hermitian(rho.mat);
    const double top = sp.eigenvalues.empty() ? 0.0 : std::abs(sp.eigenvalues.front());
    const double cut = tol * std::max(top, 1e-300);

    std::vector<std::size_t> range_idx, kernel_idx;
    for (std::size_t k = 0; k < sp.eigenvalues.size(); ++k)
        (sp.eigenvalues[k] > cut ? range_idx : kernel_idx).push_back(k);

    RangeKernel out;
    out.range = ComplexMatrix(rho.dim(), range_idx.size());
    out.kernel = ComplexMatrix(rho.dim(), kernel_idx.size());
    for (std::size_t c = 0; c < range_idx.size(); ++c)
        for (std::size_t i = 0; i < rho.dim(); ++i)
            out.range(i, c) = sp.eigenvectors(i, range_idx[c]);
    for (std::size_t c = 0; c < kernel_idx.size(); ++c)
        for (std::size_t i = 0; i < rho.dim(); ++i)
            out.kernel(i, c) = sp.eigenvectors(i, kernel_idx[c]);
    return out;
}

ProductVector minimize_product_penalty(std::size_t dim_a, std::size_t dim_b,
                                       std::span<const ProductConstraint> constraints,
                                       const ProductSearchParams& params) {
    for (const auto& con : constraints)
        if (!con.op.square() || con.op.rows() != dim_a * dim_b)
            throw DimensionMismatchError("constraint operator size mismatch");

    ProductVector best;
    best.residual = std::numeric_limits<double>::infinity();

    for (int r = 0; r < params.restarts; ++r) {
        Rng rng(derive_seed(params.seed, r));
        auto e = random_unit_vector(dim_a, rng);
        auto f = random_unit_vector(dim_b, rng);

        double prev = std::numeric_limits<double>::infinity();
        for (int iter = 0; iter < params.max_iters; ++iter) {
            // optimal e for fixed f: minimal eigenvector of the summed
            // compressions, conjugated for T_A-side terms
            ComplexMatrix on_e(dim_a, dim_a);
            for (const auto& con : constraints) {
                ComplexMatrix part = compress_over_f(con.op, dim_a, dim_b, f);
                on_e += con.conjugate_a ? part.conj() : part;
            }
            e = min_eigvec(on_e, nullptr);

            // optimal f for fixed e; conjugate-side terms compress with e*
            std::vector<cplx> ec = e;
            for (auto& z : ec) z = std::conj(z);
            ComplexMatrix on_f(dim_b, dim_b);
            for (const auto& con : constraints)
                on_f += compress_over_e(con.op, dim_a, dim_b, con.conjugate_a ? ec : e);
            double value = 0.0;
            f = min_eigvec(on_f, &value);

            if (prev - value >= 0.0 && prev - value < params.improvement_tol) {
                prev = value;
                break;
            }
            prev = value;
        }

        const double residual = product_objective(constraints, e, f);
        if (residual < best.residual) {
            best.e = std::move(e);
            best.f = std::move(f);
            best.residual = residual;
        }
        if (best.residual < params.success_tol && constraints.empty()) break;
    }
    if (constraints.empty()) best.residual = 0.0;
    return best;
}

std::optional<ProductVector> product_vector_in_subspace(const ComplexMatrix& basis,
                                                        std::size_t dim_a, std::size_t dim_b,
                                                        const ProductSearchParams& params) {
    if (basis.cols() == 0) throw DimensionMismatchError("empty subspace");
    ComplexMatrix penalty = ComplexMatrix::identity(dim_a * dim_b);
    penalty -= basis * basis.adjoint();

    std::vector<ProductConstraint> cons{{std::move(penalty), false}};
    auto best = minimize_product_penalty(dim_a, dim_b, cons, params);
    if (best.residual < params.success_tol) return best;
    return std::nullopt;
}

std::optional<ProductVector> product_vector_conjugate_pair(const ComplexMatrix& basis,
                                                           const ComplexMatrix& basis_conj,
                                                           std::size_t dim_a, std::size_t dim_b,
                                                           const ProductSearchParams& params) {
    if (basis.cols() == 0 || basis_conj.cols() == 0)
        throw DimensionMismatchError("empty subspace");
    ComplexMatrix pen_plain = ComplexMatrix::identity(dim_a * dim_b);
    pen_plain -= basis * basis.adjoint();
    ComplexMatrix pen_conj = ComplexMatrix::identity(dim_a * dim_b);
    pen_conj -= basis_conj * basis_conj.adjoint();

    std::vector<ProductConstraint> cons{{std::move(pen_plain), false}, {std::move(pen_conj), true}};
    auto best = minimize_product_penalty(dim_a, dim_b, cons, params);
    if (best.residual < params.success_tol) return best;
    return std::nullopt;
}

EdgeReport is_edge_state(const DensityOperator& delta, const ProductSearchParams& params) {
    if (!ppt_check(delta).ppt) throw NotPptError("edge analysis expects a PPT state");

    auto rk = range_kernel(delta);
    DensityOperator pt_a{delta.dim_a, delta.dim_b, partial_transpose(delta, Side::A)};
    auto rk_pt = range_kernel(pt_a);

    EdgeReport report;
    if (rk.range.cols() == 0 || rk_pt.range.cols() == 0) return report;

    ComplexMatrix pen_plain = ComplexMatrix::identity(delta.dim());
    pen_plain -= rk.range * rk.range.adjoint();
    ComplexMatrix pen_conj = ComplexMatrix::identity(delta.dim());
    pen_conj -= rk_pt.range * rk_pt.range.adjoint();
    std::vector<ProductConstraint> cons{{std::move(pen_plain), false}, {std::move(pen_conj), true}};

    auto best = minimize_product_penalty(delta.dim_a, delta.dim_b, cons, params);
    report.best_residual = best.residual;
    if (best.residual < params.success_tol) {
        report.status = EdgeStatus::not_edge;
        report.vec = std::move(best);
    }
    return report;
}

bool has_maximal_edge_ranks(const DensityOperator& delta, double tol) {
    if (delta.dim_a != delta.dim_b) return false;
    const std::size_t n = delta.dim_a;
    auto rk = range_kernel(delta, tol);
    DensityOperator pt_a{delta.dim_a, delta.dim_b, partial_transpose(delta, Side::A)};
    auto rk_pt = range_kernel(pt_a, tol);
    return rk.range.cols() + rk_pt.range.cols() == 2 * n * n - 2 * n + 1;
}

ComplexMatrix EdgeWitness::matrix() const {
    ComplexMatrix w = p;
    w += partial_transpose(q, dim_a, dim_b, Side::A);
    ComplexMatrix shift = ComplexMatrix::identity(dim_a * dim_b);
    shift *= cplx(epsilon, 0.0);
    w -= shift;
    return w;
}

double witness_epsilon(const ComplexMatrix& p, const ComplexMatrix& q, std::size_t dim_a,
                       std::size_t dim_b, int restarts, int samples, std::uint64_t seed) {
    // <e,f| P + Q^T_A |e,f> = <e,f|P|e,f> + <e*,f|Q|e*,f>
    std::vector<ProductConstraint> cons{{p, false}, {q, true}};
    ProductSearchParams params;
    params.restarts = restarts;
    params.seed = seed;
    auto best = minimize_product_penalty(dim_a, dim_b, cons, params);
    double min_value = best.residual;

    Rng rng(derive_seed(seed, 0xABCDu));
    for (int s = 0; s < samples; ++s) {
        auto e = random_unit_vector(dim_a, rng);
        auto f = random_unit_vector(dim_b, rng);
        min_value = std::min(min_value, product_objective(cons, e, f));
    }
    return min_value;
}

EdgeWitness build_edge_witness(const DensityOperator& delta, const WitnessBuildParams& params) {
    if (!ppt_check(delta).ppt) throw NotPptError("edge witness expects a PPT state");

    auto rk = range_kernel(delta);
    DensityOperator pt_a{delta.dim_a, delta.dim_b, partial_transpose(delta, Side::A)};
    auto rk_pt = range_kernel(pt_a);

    EdgeWitness w;
    w.dim_a = delta.dim_a;
    w.dim_b = delta.dim_b;
    w.p = rk.kernel * rk.kernel.adjoint();
    w.q = rk_pt.kernel * rk_pt.kernel.adjoint();
    if (rk.kernel.cols() == 0 && rk_pt.kernel.cols() == 0)
        throw ZeroEpsilonError("state and its partial transpose have full rank");

    const double found = witness_epsilon(w.p, w.q, delta.dim_a, delta.dim_b, params.restarts,
                                         params.samples, params.seed);
    if (found <= 1e-10)
        throw ZeroEpsilonError("product vectors reach the kernel pair; witness degenerates");
    w.epsilon = params.margin * found;
    return w;
}

std::optional<SchmidtProbe> schmidt_probe_search(const ComplexMatrix& w_plus_eps,
                                                 std::size_t dim_a, std::size_t dim_b, int s,
                                                 const ProbeConstraints& constraints,
                                                 const ProductSearchParams& params) {
    if (s < 1) throw InvalidParamsError("probe Schmidt number must be >= 1");
    if (!w_plus_eps.square() || w_plus_eps.rows() != dim_a * dim_b)
        throw DimensionMismatchError("witness operator size mismatch");

    const bool has_q = constraints.q.rows() > 0;
    const bool has_p1 = constraints.p1.rows() > 0;
    const bool has_plane = !constraints.psi.empty();

    // Unconstrained full-rank probes reduce to the global minimal eigenvector.
    if (!has_q && !has_p1 && !has_plane &&
        static_cast<std::size_t>(s) >= std::min(dim_a, dim_b)) {
        double value = 0.0;
        auto vec = min_eigvec(w_plus_eps, &value);
        if (value > 1e-10) return std::nullopt;
        BipartiteVector psi(dim_a, dim_b, vec);
        auto sd = schmidt_decompose(psi, 1e-12);

        SchmidtProbe probe;
        probe.s = static_cast<int>(sd.rank);
        probe.psi = std::move(psi);
        probe.value = value;
        for (std::size_t k = 0; k < sd.rank; ++k) {
            probe.coefficients.push_back(sd.coeffs[k]);
            std::vector<cplx> e(dim_a), f(dim_b);
            for (std::size_t i = 0; i < dim_a; ++i) e[i] = sd.left(i, k);
            for (std::size_t j = 0; j < dim_b; ++j) f[j] = sd.right(j, k);
            probe.es.push_back(std::move(e));
            probe.fs.push_back(std::move(f));
        }
        return probe;
    }

    // Collect product vectors satisfying Q|e*,f> = 0 and P1|e,f> = 0. Without
    // constraint operators, local minimizers of the witness expectation (plus
    // randoms) stand in as candidates.
    std::vector<ProductConstraint> cons;
    if (has_p1) cons.push_back({constraints.p1, false});
    if (has_q) cons.push_back({constraints.q, true});
    const bool constrained = !cons.empty();
    if (!constrained) cons.push_back({w_plus_eps, false});

    std::vector<ProductVector> candidates;
    const int hunts = std::max(params.restarts, 4 * s);
    for (int r = 0; r < hunts && candidates.size() < static_cast<std::size_t>(2 * s); ++r) {
        ProductSearchParams one = params;
        one.restarts = 1;
        one.seed = derive_seed(params.seed, r);
        auto got = minimize_product_penalty(dim_a, dim_b, cons, one);
        if (constrained && got.residual >= params.success_tol) continue;

        auto vec = kron_vec(got.e, got.f);
        bool duplicate = false;
        for (const auto& c : candidates)
            if (std::abs(vdot(kron_vec(c.e, c.f), vec)) > 1.0 - 1e-8) {
                duplicate = true;
                break;
            }
        if (!duplicate) candidates.push_back(std::move(got));
    }
    if (constrained && candidates.empty())
        throw InfeasibleConstraintsError("no product vectors satisfy the kernel constraints");
    if (candidates.empty()) return std::nullopt;

    const std::size_t t = std::min<std::size_t>(s, candidates.size());
    std::vector<std::vector<cplx>> prods;
    for (std::size_t i = 0; i < t; ++i) prods.push_back(kron_vec(candidates[i].e, candidates[i].f));

    // coefficient form and Gram matrix over the candidates
    ComplexMatrix h(t, t), gram(t, t);
    for (std::size_t i = 0; i < t; ++i)
        for (std::size_t j = 0; j < t; ++j) {
            h(i, j) = vdot(prods[i], w_plus_eps * prods[j]);
            gram(i, j) = vdot(prods[i], prods[j]);
        }
    h.symmetrize();
    gram.symmetrize();

    // hyperplane <psi^s|Psi> = 0: restrict l to the orthogonal complement of c
    ComplexMatrix plane_basis = ComplexMatrix::identity(t);
    if (has_plane) {
        std::vector<cplx> c(t);
        for (std::size_t i = 0; i < t; ++i) c[i] = vdot(prods[i], constraints.psi);
        if (vnorm(c) > 1e-14) {
            vnormalize(c);
            ComplexMatrix cm(t, 1);
            for (std::size_t i = 0; i < t; ++i) cm(i, 0) = c[i];
            auto full = complete_orthonormal(cm);
            plane_basis = ComplexMatrix(t, t - 1);
            for (std::size_t col = 1; col < t; ++col)
                for (std::size_t i = 0; i < t; ++i) plane_basis(i, col - 1) = full(i, col);
        }
    }
    if (plane_basis.cols() == 0) return std::nullopt;

    // generalized minimal eigenvalue of (H, G) on the hyperplane
    ComplexMatrix hp = plane_basis.adjoint() * h * plane_basis;
    ComplexMatrix gp = plane_basis.adjoint() * gram * plane_basis;
    auto gsp = eig_hermitian(gp);
    std::vector<std::size_t> keep;
    for (std::size_t k = 0; k < gsp.eigenvalues.size(); ++k)
        if (gsp.eigenvalues[k] > 1e-10 * std::max(gsp.eigenvalues.front(), 1e-300))
            keep.push_back(k);
    if (keep.empty()) return std::nullopt;

    ComplexMatrix whiten(gp.rows(), keep.size());
    for (std::size_t c = 0; c < keep.size(); ++c) {
        const double scale = 1.0 / std::sqrt(gsp.eigenvalues[keep[c]]);
        for (std::size_t i = 0; i < gp.rows(); ++i)
            whiten(i, c) = gsp.eigenvectors(i, keep[c]) * scale;
    }
    ComplexMatrix reduced = whiten.adjoint() * hp * whiten;
    reduced.symmetrize();
    double value = 0.0;
    auto y = min_eigvec(reduced, &value);
    if (value > 1e-10) return std::nullopt;

    auto ly = whiten * y;
    auto l = plane_basis * std::span<const cplx>(ly);

    SchmidtProbe probe;
    probe.s = static_cast<int>(t);
    probe.coefficients = l;
    probe.psi = BipartiteVector(dim_a, dim_b);
    for (std::size_t i = 0; i < t; ++i) {
        probe.es.push_back(candidates[i].e);
        probe.fs.push_back(candidates[i].f);
        for (std::size_t x = 0; x < dim_a * dim_b; ++x) probe.psi.amps[x] += l[i] * prods[i][x];
    }
    probe.psi.normalize();
    probe.value = expectation(w_plus_eps, probe.psi.amps);
    if (probe.value > 1e-10) return std::nullopt;  // round-trip guard
    return probe;
}

}  // namespace bephase
