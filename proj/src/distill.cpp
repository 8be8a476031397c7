#include "bephase/distill.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bephase {

namespace {

// (I_A (x) F)^dag X (I_A (x) F) for a d_B x k isometry F; index (a, s) = a*k + s.
ComplexMatrix compress_b_side(const ComplexMatrix& x, std::size_t da, std::size_t db,
                              const ComplexMatrix& f) {
    const std::size_t k = f.cols();
    // half[(a,b),(a',s')] = sum_b' X[(a,b),(a',b')] F[b',s']
    ComplexMatrix out(da * k, da * k);
    for (std::size_t a = 0; a < da; ++a)
        for (std::size_t ap = 0; ap < da; ++ap)
            for (std::size_t s = 0; s < k; ++s)
                for (std::size_t sp = 0; sp < k; ++sp) {
                    cplx acc = 0.0;
                    for (std::size_t b = 0; b < db; ++b) {
                        cplx row = 0.0;
                        for (std::size_t bp = 0; bp < db; ++bp)
                            row += x(a * db + b, ap * db + bp) * f(bp, sp);
                        acc += std::conj(f(b, s)) * row;
                    }
                    out(a * k + s, ap * k + sp) = acc;
                }
    return out;
}

// (E (x) I_B)^dag X (E (x) I_B) for a d_A x k isometry E; index (s, b) = s*db + b.
ComplexMatrix compress_a_side(const ComplexMatrix& x, std::size_t da, std::size_t db,
                              const ComplexMatrix& e) {
    const std::size_t k = e.cols();
    ComplexMatrix out(k * db, k * db);
    for (std::size_t s = 0; s < k; ++s)
        for (std::size_t sp = 0; sp < k; ++sp)
            for (std::size_t b = 0; b < db; ++b)
                for (std::size_t bp = 0; bp < db; ++bp) {
                    cplx acc = 0.0;
                    for (std::size_t a = 0; a < da; ++a) {
                        cplx row = 0.0;
                        for (std::size_t apx = 0; apx < da; ++apx)
                            row += x(a * db + b, apx * db + bp) * e(apx, sp);
                        acc += std::conj(e(a, s)) * row;
                    }
                    out(s * db + b, sp * db + bp) = acc;
                }
    return out;
}

// top-k Schmidt vectors of psi on one side, completed to k orthonormal
// columns when the rank collapses
ComplexMatrix schmidt_side(const BipartiteVector& psi, Side side, std::size_t k) {
    auto sd = schmidt_decompose(psi, 0.0);
    const std::size_t dim = (side == Side::A) ? psi.dim_a : psi.dim_b;
    ComplexMatrix cols(dim, std::min(k, sd.coeffs.size()));
    for (std::size_t c = 0; c < cols.cols(); ++c)
        for (std::size_t i = 0; i < dim; ++i)
            cols(i, c) = (side == Side::A) ? sd.left(i, c) : sd.right(i, c);
    if (cols.cols() == k) return cols;
    auto full = complete_orthonormal(cols);
    ComplexMatrix out(dim, k);
    for (std::size_t c = 0; c < k; ++c)
        for (std::size_t i = 0; i < dim; ++i) out(i, c) = full(i, c);
    return out;
}

struct SearchState {
    BipartiteVector psi;
    double value = 0.0;
};

// One alternating descent from a seeded B-side pair. X is (rho^(x)n)^T_B on
// the grouped cut.
SearchState alternating_descent(const ComplexMatrix& x, std::size_t da, std::size_t db,
                                const Rank2SearchParams& params, std::uint64_t seed) {
    Rng rng(seed);
    const std::size_t kb = std::min<std::size_t>(2, db);
    const std::size_t ka = std::min<std::size_t>(2, da);
    ComplexMatrix f = random_orthonormal_columns(db, kb, rng);

    SearchState st;
    st.value = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < params.max_iters; ++iter) {
        // optimal A-side pair and coefficients for fixed F
        auto yb = compress_b_side(x, da, db, f);
        auto spb = eig_hermitian(yb);
        const std::size_t last_b = spb.eigenvalues.size() - 1;
        auto xi = spb.eigenvector(last_b);
        BipartiteVector psi(da, db);
        for (std::size_t a = 0; a < da; ++a)
            for (std::size_t s = 0; s < kb; ++s)
                for (std::size_t b = 0; b < db; ++b) psi.at(a, b) += xi[a * kb + s] * f(b, s);

        ComplexMatrix e = schmidt_side(psi, Side::A, ka);

        // optimal B-side pair and coefficients for fixed E
        auto za = compress_a_side(x, da, db, e);
        auto spa = eig_hermitian(za);
        const std::size_t last_a = spa.eigenvalues.size() - 1;
        auto eta = spa.eigenvector(last_a);
        BipartiteVector psi2(da, db);
        for (std::size_t s = 0; s < ka; ++s)
            for (std::size_t b = 0; b < db; ++b)
                for (std::size_t a = 0; a < da; ++a) psi2.at(a, b) += eta[s * db + b] * e(a, s);
        psi2.normalize();

        const double value = spa.eigenvalues[last_a];
        f = schmidt_side(psi2, Side::B, kb);
        const double improvement = st.value - value;
        st.psi = std::move(psi2);
        st.value = value;
        if (improvement >= 0.0 && improvement < params.improvement_tol) break;
    }
    st.value = expectation(x, st.psi.amps);
    return st;
}

DensityOperator grouped_power(const DensityOperator& rho, std::size_t n,
                              const Rank2SearchParams& params) {
    // cap is exclusive: 2x2 up to n=5, 3x3 up to n=3, 4x4 up to n=2 at 4096
    double projected = 1.0;
    for (std::size_t k = 0; k < n; ++k) projected *= static_cast<double>(rho.dim());
    if (projected >= static_cast<double>(params.dim_cap))
        throw DimensionCapExceededError("n-copy matrix exceeds the configured dimension cap");
    return tensor_power(rho, n);
}

ComplexMatrix random_trace_norm_perturbation(std::size_t dim, double eta, Rng& rng) {
    ComplexMatrix delta = random_traceless_hermitian(dim, rng);
    const double tn = trace_norm(delta);
    delta *= cplx(eta / tn, 0.0);
    return delta;
}

// Clip negative eigenvalues, renormalize, then shrink toward rho so the
// realized trace distance never exceeds eta.
DensityOperator project_to_ball(const DensityOperator& rho, const ComplexMatrix& candidate,
                                double eta, double* realized_distance) {
    auto sp = eig_hermitian(candidate);
    ComplexMatrix projected(candidate.rows(), candidate.cols());
    double mass = 0.0;
    for (std::size_t k = 0; k < sp.eigenvalues.size(); ++k) {
        const double ev = sp.eigenvalues[k];
        if (ev <= 0.0) continue;
        mass += ev;
        const auto v = sp.eigenvector(k);
        for (std::size_t i = 0; i < projected.rows(); ++i)
            for (std::size_t j = 0; j < projected.cols(); ++j)
                projected(i, j) += ev * v[i] * std::conj(v[j]);
    }
    projected *= cplx(1.0 / mass, 0.0);

    ComplexMatrix diff = projected;
    diff -= rho.mat;
    double dist = trace_norm(diff);
    if (dist > eta && dist > 0.0) {
        const double t = eta / dist;
        ComplexMatrix pulled = rho.mat;
        diff *= cplx(t, 0.0);
        pulled += diff;
        projected = std::move(pulled);
        diff = projected;
        diff -= rho.mat;
        dist = trace_norm(diff);
    }
    projected.symmetrize();
    if (realized_distance) *realized_distance = dist;
    return DensityOperator{rho.dim_a, rho.dim_b, std::move(projected)};
}

template <typename Evaluator>
BallReport run_ball(const DensityOperator& rho, double eta, int samples, std::uint64_t seed,
                    std::size_t n_copies, double epsilon, Evaluator&& evaluate) {
    if (eta < 0.0) throw InvalidEtaError("eta must be nonnegative");
    if (samples < 1) throw InvalidEtaError("samples must be >= 1");

    BallReport report;
    report.eta = eta;
    report.n_copies = n_copies;
    report.epsilon = epsilon;
    report.samples = samples;
    report.max_value = -std::numeric_limits<double>::infinity();
    for (int s = 0; s < samples; ++s) {
        Rng rng(derive_seed(seed, s));
        DensityOperator perturbed = rho;
        double dist = 0.0;
        if (eta > 0.0) {
            ComplexMatrix candidate = rho.mat;
            candidate += random_trace_norm_perturbation(rho.dim(), eta, rng);
            perturbed = project_to_ball(rho, candidate, eta, &dist);
        }
        const double value = evaluate(perturbed);
        report.max_value = std::max(report.max_value, value);
        report.max_distance = std::max(report.max_distance, dist);
        if (value >= 0.0) ++report.violations;
    }
    return report;
}

}  // namespace

double recompute_certificate_value(const DensityOperator& rho, const DistillCertificate& cert) {
    Rank2SearchParams guard;  // default cap applies to revalidation too
    auto sigma = grouped_power(rho, cert.n_copies, guard);
    if (cert.psi.dim_a != sigma.dim_a || cert.psi.dim_b != sigma.dim_b)
        throw DimensionMismatchError("certificate vector does not match the n-copy cut");
    auto x = partial_transpose(sigma.mat, sigma.dim_a, sigma.dim_b, Side::B);
    return expectation(x, cert.psi.amps);
}

std::pair<ComplexMatrix, ComplexMatrix> certificate_projectors(const DistillCertificate& cert) {
    auto sd = schmidt_decompose(cert.psi, default_tolerances().rank);
    ComplexMatrix pa(cert.psi.dim_a, cert.psi.dim_a);
    ComplexMatrix pb(cert.psi.dim_b, cert.psi.dim_b);
    for (std::size_t k = 0; k < sd.rank; ++k) {
        for (std::size_t i = 0; i < cert.psi.dim_a; ++i)
            for (std::size_t j = 0; j < cert.psi.dim_a; ++j)
                pa(i, j) += sd.left(i, k) * std::conj(sd.left(j, k));
        for (std::size_t i = 0; i < cert.psi.dim_b; ++i)
            for (std::size_t j = 0; j < cert.psi.dim_b; ++j)
                pb(i, j) += std::conj(sd.right(i, k)) * sd.right(j, k);
    }
    return {std::move(pa), std::move(pb)};
}

Spectrum pt_rank2_spectral_decomp(const BipartiteVector& psi, const Tolerances& tol) {
    auto sd = schmidt_decompose(psi, tol.rank);
    if (sd.rank != 2) throw WrongRankError("pt_rank2_spectral_decomp requires Schmidt rank 2");

    auto pt = partial_transpose(projector(psi));
    auto sp = eig_hermitian(pt, tol);

    Spectrum out;
    out.eigenvectors = ComplexMatrix(pt.rows(), 0);
    std::vector<std::vector<cplx>> kept;
    for (std::size_t k = 0; k < sp.eigenvalues.size(); ++k) {
        if (std::abs(sp.eigenvalues[k]) <= tol.rank) continue;
        out.eigenvalues.push_back(sp.eigenvalues[k]);
        kept.push_back(sp.eigenvector(k));
    }
    out.eigenvectors = ComplexMatrix(pt.rows(), kept.size());
    for (std::size_t c = 0; c < kept.size(); ++c)
        for (std::size_t i = 0; i < pt.rows(); ++i) out.eigenvectors(i, c) = kept[c][i];
    return out;
}

std::optional<DistillCertificate> rank2_witness_search(const DensityOperator& rho, std::size_t n,
                                                       const Rank2SearchParams& params) {
    if (n < 1) throw InvalidParamsError("rank2_witness_search requires n >= 1");
    auto sigma = grouped_power(rho, n, params);
    auto x = partial_transpose(sigma.mat, sigma.dim_a, sigma.dim_b, Side::B);

    SearchState best;
    best.value = std::numeric_limits<double>::infinity();
    for (int r = 0; r < params.restarts; ++r) {
        auto st = alternating_descent(x, sigma.dim_a, sigma.dim_b, params,
                                      derive_seed(params.seed, r));
        if (st.value < best.value) best = std::move(st);
    }

    if (best.value < -params.certificate_threshold) {
        return DistillCertificate{n, std::move(best.psi), best.value};
    }
    return std::nullopt;
}

CertifyResult certify_distillable(const DensityOperator& rho, std::size_t n_max,
                                  const Rank2SearchParams& params) {
    CertifyResult result;
    for (std::size_t n = 1; n <= n_max; ++n) {
        result.n_reached = n;
        auto cert = rank2_witness_search(rho, n, params);
        if (cert) {
            result.certificate = std::move(cert);
            return result;
        }
    }
    return result;
}

double stability_radius(const DistillCertificate& cert) {
    return std::abs(cert.epsilon) / (4.0 * static_cast<double>(cert.n_copies));
}

double p_stability_radius(const WitnessValue& wv) {
    if (wv.value >= 0.0) throw NonNegativeWitnessError("witness value must be negative");
    return std::abs(wv.value) / (1.0 + 1.0 / (wv.p - 1.0));
}

BallReport perturb_and_verify(const DensityOperator& rho, const DistillCertificate& cert,
                              double eta, int samples, std::uint64_t seed) {
    return run_ball(rho, eta, samples, seed, cert.n_copies, cert.epsilon,
                    [&](const DensityOperator& state) {
                        return recompute_certificate_value(state, cert);
                    });
}

BallReport perturb_and_verify(const DensityOperator& rho, const WitnessValue& wv, double eta,
                              int samples, std::uint64_t seed) {
    return run_ball(rho, eta, samples, seed, 0, wv.value, [&](const DensityOperator& state) {
        return p_reduction_value(state, wv.psi, wv.p).value;
    });
}

std::vector<DensityDemoRow> density_demo(const DensityOperator& rho, std::size_t n_begin,
                                         std::size_t n_end) {
    std::vector<DensityDemoRow> rows;
    for (std::size_t n = n_begin; n <= n_end; ++n) {
        auto res = distillable_approximant(rho, n);

        DensityDemoRow row;
        row.n_trunc = n;
        ComplexMatrix diff = res.rho_n.mat;
        diff -= rho.mat;
        row.distance = trace_norm(diff);

        // PT-negative eigenvector of the complement block: the rank-2 singlet
        // partner of Phi = (|N,N> + |N+1,N+1>)/sqrt(2)
        BipartiteVector psi(rho.dim_a, rho.dim_b);
        psi.at(n, n + 1) = 1.0 / std::sqrt(2.0);
        psi.at(n + 1, n) = -1.0 / std::sqrt(2.0);

        row.cert.n_copies = 1;
        row.cert.psi = std::move(psi);
        row.cert.epsilon = recompute_certificate_value(res.rho_n, row.cert);
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<DensityDemoPRow> density_demo_p(const DensityOperator& rho, std::size_t n_begin,
                                            std::size_t n_end, int p) {
    if (p < 2) throw PTooSmallError("density_demo_p requires p >= 2");
    std::vector<DensityDemoPRow> rows;
    for (std::size_t n = n_begin; n <= n_end; ++n) {
        auto res = distillable_approximant(rho, n, static_cast<std::size_t>(p));

        DensityDemoPRow row;
        row.n_trunc = n;
        ComplexMatrix diff = res.rho_n.mat;
        diff -= rho.mat;
        row.distance = trace_norm(diff);
        row.witness = p_reduction_value(res.rho_n, res.phi, p);
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace bephase
