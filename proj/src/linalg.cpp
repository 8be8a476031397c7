#include "bephase/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace bephase {

namespace {
const Tolerances kFactoryDefaults{};
Tolerances g_tolerances = kFactoryDefaults;
}  // namespace

const Tolerances& default_tolerances() { return g_tolerances; }
void set_default_tolerances(const Tolerances& tol) { g_tolerances = tol; }

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (data_.size() != rows_ * cols_)
        throw DimensionMismatchError("entry count does not match rows*cols");
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const double> d) {
    ComplexMatrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
    ComplexMatrix out(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) out(j, i) = std::conj((*this)(i, j));
    return out;
}

ComplexMatrix ComplexMatrix::transpose() const {
    ComplexMatrix out(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
    return out;
}

ComplexMatrix ComplexMatrix::conj() const {
    ComplexMatrix out(rows_, cols_);
    for (std::size_t k = 0; k < data_.size(); ++k) out.data_[k] = std::conj(data_[k]);
    return out;
}

cplx ComplexMatrix::trace() const {
    if (!square()) throw NonSquareError("trace of non-square matrix");
    cplx t = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
    return t;
}

double ComplexMatrix::frobenius_norm() const {
    double s = 0.0;
    for (const auto& z : data_) s += std::norm(z);
    return std::sqrt(s);
}

double ComplexMatrix::max_abs() const {
    double m = 0.0;
    for (const auto& z : data_) m = std::max(m, std::abs(z));
    return m;
}

bool ComplexMatrix::is_hermitian(double tol) const {
    if (!square()) return false;
    const double bound = tol * (1.0 + max_abs());
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = i; j < cols_; ++j)
            if (std::abs((*this)(i, j) - std::conj((*this)(j, i))) > bound) return false;
    return true;
}

void ComplexMatrix::symmetrize() {
    for (std::size_t i = 0; i < rows_; ++i) {
        (*this)(i, i) = cplx((*this)(i, i).real(), 0.0);
        for (std::size_t j = i + 1; j < cols_; ++j) {
            cplx avg = 0.5 * ((*this)(i, j) + std::conj((*this)(j, i)));
            (*this)(i, j) = avg;
            (*this)(j, i) = std::conj(avg);
        }
    }
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& o) {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw DimensionMismatchError("matrix add shape");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& o) {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw DimensionMismatchError("matrix sub shape");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(cplx s) {
    for (auto& z : data_) z *= s;
    return *this;
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols() != b.rows()) throw DimensionMismatchError("matrix product shape");
    ComplexMatrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const cplx aik = a(i, k);
            if (aik == cplx(0.0, 0.0)) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
        }
    }
    return out;
}

std::vector<cplx> operator*(const ComplexMatrix& m, std::span<const cplx> v) {
    if (m.cols() != v.size()) throw DimensionMismatchError("matrix-vector shape");
    std::vector<cplx> out(m.rows(), cplx(0.0, 0.0));
    for (std::size_t i = 0; i < m.rows(); ++i) {
        cplx acc = 0.0;
        for (std::size_t j = 0; j < m.cols(); ++j) acc += m(i, j) * v[j];
        out[i] = acc;
    }
    return out;
}

cplx vdot(std::span<const cplx> u, std::span<const cplx> v) {
    if (u.size() != v.size()) throw DimensionMismatchError("vdot length");
    cplx s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s += std::conj(u[i]) * v[i];
    return s;
}

double vnorm(std::span<const cplx> v) {
    double s = 0.0;
    for (const auto& z : v) s += std::norm(z);
    return std::sqrt(s);
}

void vnormalize(std::vector<cplx>& v) {
    double n = vnorm(v);
    if (n == 0.0) throw std::invalid_argument("cannot normalize zero vector");
    for (auto& z : v) z /= n;
}

ComplexMatrix outer(std::span<const cplx> u, std::span<const cplx> v) {
    ComplexMatrix out(u.size(), v.size());
    for (std::size_t i = 0; i < u.size(); ++i)
        for (std::size_t j = 0; j < v.size(); ++j) out(i, j) = u[i] * std::conj(v[j]);
    return out;
}

double expectation(const ComplexMatrix& m, std::span<const cplx> u) {
    return vdot(u, m * u).real();
}

std::vector<cplx> Spectrum::eigenvector(std::size_t k) const {
    std::vector<cplx> v(eigenvectors.rows());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = eigenvectors(i, k);
    return v;
}

namespace {

double offdiag_frobenius(const ComplexMatrix& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            if (i != j) s += std::norm(a(i, j));
    return std::sqrt(s);
}

// Cyclic Jacobi on a Hermitian matrix; if `vectors` is non-null it
// accumulates the unitary. Diagonal of `a` holds the eigenvalues on exit.
void jacobi_hermitian(ComplexMatrix& a, ComplexMatrix* vectors, double rel_target) {
    const std::size_t n = a.rows();
    const double fro = a.frobenius_norm();
    if (fro == 0.0) return;
    const double target = rel_target * fro;
    const int max_sweeps = 60;

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        if (offdiag_frobenius(a) <= target) return;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const cplx apq = a(p, q);
                const double g = std::abs(apq);
                if (g == 0.0) continue;
                const cplx phase = apq / g;  // a(p,q) = g * phase
                const double alpha = a(p, p).real();
                const double beta = a(q, q).real();

                // Real symmetric Schur rotation for [[alpha, g], [g, beta]].
                const double tau = (beta - alpha) / (2.0 * g);
                const double t = (tau >= 0.0) ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                              : 1.0 / (tau - std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;

                // Unitary plane rotation U with U(p,p)=c, U(p,q)=s,
                // U(q,p)=-s*conj(phase), U(q,q)=c*conj(phase); A <- U^H A U.
                const cplx pc = std::conj(phase);
                for (std::size_t k = 0; k < n; ++k) {
                    if (k == p || k == q) continue;
                    const cplx akp = a(k, p);
                    const cplx akq = a(k, q);
                    a(k, p) = c * akp - s * pc * akq;
                    a(k, q) = s * akp + c * pc * akq;
                    a(p, k) = std::conj(a(k, p));
                    a(q, k) = std::conj(a(k, q));
                }
                a(p, p) = alpha - t * g;
                a(q, q) = beta + t * g;
                a(p, q) = 0.0;
                a(q, p) = 0.0;

                if (vectors) {
                    ComplexMatrix& v = *vectors;
                    for (std::size_t k = 0; k < n; ++k) {
                        const cplx vkp = v(k, p);
                        const cplx vkq = v(k, q);
                        v(k, p) = c * vkp - s * pc * vkq;
                        v(k, q) = s * vkp + c * pc * vkq;
                    }
                }
            }
        }
    }
    if (offdiag_frobenius(a) > target)
        throw ConvergenceError("jacobi eigensolver did not converge in 60 sweeps");
}

void check_hermitian_input(const ComplexMatrix& m, const Tolerances& tol) {
    if (!m.square()) throw NonSquareError("eig_hermitian requires a square matrix");
    if (!m.is_hermitian(tol.hermiticity))
        throw NonHermitianError("matrix is not Hermitian within tolerance");
}

std::vector<std::size_t> descending_order(std::span<const double> values) {
    std::vector<std::size_t> idx(values.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t i, std::size_t j) { return values[i] > values[j]; });
    return idx;
}

}  // namespace

Spectrum eig_hermitian(const ComplexMatrix& m, const Tolerances& tol) {
    check_hermitian_input(m, tol);
    const std::size_t n = m.rows();
    ComplexMatrix a = m;
    a.symmetrize();
    ComplexMatrix v = ComplexMatrix::identity(n);
    jacobi_hermitian(a, &v, tol.jacobi);

    std::vector<double> diag(n);
    for (std::size_t i = 0; i < n; ++i) diag[i] = a(i, i).real();
    const auto order = descending_order(diag);

    Spectrum out;
    out.eigenvalues.resize(n);
    out.eigenvectors = ComplexMatrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        out.eigenvalues[k] = diag[order[k]];
        for (std::size_t i = 0; i < n; ++i) out.eigenvectors(i, k) = v(i, order[k]);
    }
    return out;
}

std::vector<double> eigenvalues_hermitian(const ComplexMatrix& m, const Tolerances& tol) {
    check_hermitian_input(m, tol);
    ComplexMatrix a = m;
    a.symmetrize();
    jacobi_hermitian(a, nullptr, tol.jacobi);
    std::vector<double> diag(a.rows());
    for (std::size_t i = 0; i < diag.size(); ++i) diag[i] = a(i, i).real();
    std::sort(diag.begin(), diag.end(), std::greater<>());
    return diag;
}

Svd svd(const ComplexMatrix& m, const Tolerances& tol) {
    const std::size_t r = m.rows(), c = m.cols();
    const std::size_t k = std::min(r, c);

    // Hermitian embedding: eigenpairs (+s, (x; y)) give M y' = s x' after
    // normalizing each half separately.
    ComplexMatrix h(r + c, r + c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) {
            h(i, r + j) = m(i, j);
            h(r + j, i) = std::conj(m(i, j));
        }
    Spectrum sp = eig_hermitian(h, tol);

    Svd out;
    out.values.assign(k, 0.0);
    out.left = ComplexMatrix(r, k);
    out.right = ComplexMatrix(c, k);

    const double smax = sp.eigenvalues.empty() ? 0.0 : std::max(sp.eigenvalues.front(), 0.0);
    const double cutoff = 1e3 * 2.220446049250313e-16 * std::max(smax, 1e-300) + 1e-300;

    std::vector<std::vector<cplx>> us, vs;
    std::vector<std::size_t> deferred;
    for (std::size_t i = 0; i < k; ++i) {
        const double s = sp.eigenvalues[i];
        out.values[i] = std::max(s, 0.0);
        if (s <= cutoff) {
            deferred.push_back(i);
            continue;
        }
        std::vector<cplx> x(r), y(c);
        for (std::size_t a = 0; a < r; ++a) x[a] = sp.eigenvectors(a, i);
        for (std::size_t b = 0; b < c; ++b) y[b] = sp.eigenvectors(r + b, i);
        vnormalize(x);
        vnormalize(y);
        for (std::size_t a = 0; a < r; ++a) out.left(a, i) = x[a];
        for (std::size_t b = 0; b < c; ++b) out.right(b, i) = y[b];
        us.push_back(std::move(x));
        vs.push_back(std::move(y));
    }

    // Numerically-zero singular directions: complete both families to
    // orthonormal sets; the coefficients they carry are ~0.
    auto complete = [](std::vector<std::vector<cplx>>& have, std::size_t dim) -> std::vector<cplx> {
        for (std::size_t e = 0; e < dim; ++e) {
            std::vector<cplx> cand(dim, cplx(0.0, 0.0));
            cand[e] = 1.0;
            for (const auto& u : have) {
                const cplx ov = vdot(u, cand);
                for (std::size_t a = 0; a < dim; ++a) cand[a] -= ov * u[a];
            }
            if (vnorm(cand) > 0.5) {
                vnormalize(cand);
                have.push_back(cand);
                return have.back();
            }
        }
        throw ConvergenceError("orthonormal completion failed");
    };
    for (std::size_t i : deferred) {
        const auto u = complete(us, r);
        const auto v = complete(vs, c);
        for (std::size_t a = 0; a < r; ++a) out.left(a, i) = u[a];
        for (std::size_t b = 0; b < c; ++b) out.right(b, i) = v[b];
    }
    return out;
}

std::vector<double> singular_values(const ComplexMatrix& m, const Tolerances& tol) {
    // Eigenvalues of the embedding come in +/- pairs; keep the top half.
    ComplexMatrix h(m.rows() + m.cols(), m.rows() + m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) {
            h(i, m.rows() + j) = m(i, j);
            h(m.rows() + j, i) = std::conj(m(i, j));
        }
    auto ev = eigenvalues_hermitian(h, tol);
    const std::size_t k = std::min(m.rows(), m.cols());
    std::vector<double> out(k);
    for (std::size_t i = 0; i < k; ++i) out[i] = std::max(ev[i], 0.0);
    return out;
}

double trace_norm(const ComplexMatrix& m, const Tolerances& tol) {
    if (!m.square()) throw NonSquareError("trace_norm requires a square matrix");
    if (m.is_hermitian(tol.hermiticity)) {
        double s = 0.0;
        for (double ev : eigenvalues_hermitian(m, tol)) s += std::abs(ev);
        return s;
    }
    double s = 0.0;
    for (double sv : singular_values(m, tol)) s += sv;
    return s;
}

double operator_norm(const ComplexMatrix& m, const Tolerances& tol) {
    if (!m.square()) throw NonSquareError("operator_norm requires a square matrix");
    if (m.is_hermitian(tol.hermiticity)) {
        double s = 0.0;
        for (double ev : eigenvalues_hermitian(m, tol)) s = std::max(s, std::abs(ev));
        return s;
    }
    auto sv = singular_values(m, tol);
    return sv.empty() ? 0.0 : sv.front();
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) {
            const cplx aij = a(i, j);
            if (aij == cplx(0.0, 0.0)) continue;
            for (std::size_t k = 0; k < b.rows(); ++k)
                for (std::size_t l = 0; l < b.cols(); ++l)
                    out(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
        }
    return out;
}

std::vector<cplx> kron_vec(std::span<const cplx> a, std::span<const cplx> b) {
    std::vector<cplx> out(a.size() * b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) out[i * b.size() + j] = a[i] * b[j];
    return out;
}

ComplexMatrix partial_trace(const ComplexMatrix& m, std::size_t d1, std::size_t d2, Side keep) {
    if (!m.square() || m.rows() != d1 * d2)
        throw DimensionMismatchError("partial_trace: matrix size is not d1*d2");
    if (keep == Side::A) {
        ComplexMatrix out(d1, d1);
        for (std::size_t i = 0; i < d1; ++i)
            for (std::size_t j = 0; j < d1; ++j) {
                cplx s = 0.0;
                for (std::size_t k = 0; k < d2; ++k) s += m(i * d2 + k, j * d2 + k);
                out(i, j) = s;
            }
        return out;
    }
    ComplexMatrix out(d2, d2);
    for (std::size_t k = 0; k < d2; ++k)
        for (std::size_t l = 0; l < d2; ++l) {
            cplx s = 0.0;
            for (std::size_t i = 0; i < d1; ++i) s += m(i * d2 + k, i * d2 + l);
            out(k, l) = s;
        }
    return out;
}

ComplexMatrix partial_transpose(const ComplexMatrix& m, std::size_t d1, std::size_t d2, Side side) {
    if (!m.square() || m.rows() != d1 * d2)
        throw DimensionMismatchError("partial_transpose: matrix size is not d1*d2");
    ComplexMatrix out(d1 * d2, d1 * d2);
    for (std::size_t i = 0; i < d1; ++i)
        for (std::size_t k = 0; k < d2; ++k)
            for (std::size_t j = 0; j < d1; ++j)
                for (std::size_t l = 0; l < d2; ++l) {
                    if (side == Side::B)
                        out(i * d2 + k, j * d2 + l) = m(i * d2 + l, j * d2 + k);
                    else
                        out(i * d2 + k, j * d2 + l) = m(j * d2 + k, i * d2 + l);
                }
    return out;
}

ComplexMatrix gram_schmidt(const ComplexMatrix& m, double drop_tol) {
    std::vector<std::vector<cplx>> cols;
    for (std::size_t j = 0; j < m.cols(); ++j) {
        std::vector<cplx> v(m.rows());
        for (std::size_t i = 0; i < m.rows(); ++i) v[i] = m(i, j);
        const double orig = vnorm(v);
        for (const auto& u : cols) {
            const cplx ov = vdot(u, v);
            for (std::size_t i = 0; i < v.size(); ++i) v[i] -= ov * u[i];
        }
        if (vnorm(v) <= drop_tol * std::max(orig, 1.0)) continue;
        vnormalize(v);
        cols.push_back(std::move(v));
    }
    ComplexMatrix out(m.rows(), cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j)
        for (std::size_t i = 0; i < m.rows(); ++i) out(i, j) = cols[j][i];
    return out;
}

ComplexMatrix complete_orthonormal(const ComplexMatrix& basis) {
    const std::size_t n = basis.rows();
    std::vector<std::vector<cplx>> cols;
    for (std::size_t j = 0; j < basis.cols(); ++j) {
        std::vector<cplx> v(n);
        for (std::size_t i = 0; i < n; ++i) v[i] = basis(i, j);
        cols.push_back(std::move(v));
    }
    for (std::size_t e = 0; e < n && cols.size() < n; ++e) {
        std::vector<cplx> v(n, cplx(0.0, 0.0));
        v[e] = 1.0;
        for (const auto& u : cols) {
            const cplx ov = vdot(u, v);
            for (std::size_t i = 0; i < n; ++i) v[i] -= ov * u[i];
        }
        if (vnorm(v) > 0.5) {
            vnormalize(v);
            cols.push_back(std::move(v));
        }
    }
    if (cols.size() != n) throw ConvergenceError("orthonormal completion failed");
    ComplexMatrix out(n, n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) out(i, j) = cols[j][i];
    return out;
}

std::vector<cplx> random_unit_vector(std::size_t n, Rng& rng) {
    auto v = rng.gaussian_vector(n);
    vnormalize(v);
    return v;
}

ComplexMatrix random_hermitian(std::size_t n, Rng& rng) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, i) = rng.gaussian();
        for (std::size_t j = i + 1; j < n; ++j) {
            const cplx z = rng.gaussian_cplx();
            m(i, j) = z;
            m(j, i) = std::conj(z);
        }
    }
    return m;
}

ComplexMatrix random_traceless_hermitian(std::size_t n, Rng& rng) {
    ComplexMatrix m = random_hermitian(n, rng);
    const cplx shift = m.trace() / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) -= shift;
    return m;
}

ComplexMatrix haar_unitary(std::size_t n, Rng& rng) {
    ComplexMatrix g(n, n);
    for (auto& z : g.entries()) z = rng.gaussian_cplx();
    ComplexMatrix q = gram_schmidt(g, 0.0);
    if (q.cols() != n) return haar_unitary(n, rng);  // measure-zero degenerate draw
    return q;
}

ComplexMatrix random_orthonormal_columns(std::size_t n, std::size_t k, Rng& rng) {
    if (k > n) throw DimensionMismatchError("cannot draw more orthonormal columns than dim");
    ComplexMatrix g(n, k);
    for (auto& z : g.entries()) z = rng.gaussian_cplx();
    ComplexMatrix q = gram_schmidt(g, 0.0);
    if (q.cols() != k) return random_orthonormal_columns(n, k, rng);
    return q;
}

}  // namespace bephase
