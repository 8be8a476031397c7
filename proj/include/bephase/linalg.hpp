#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "bephase/rng.hpp"
#include "bephase/tolerances.hpp"

namespace bephase {

struct NonSquareError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct NonHermitianError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct DimensionMismatchError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct ConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Side { A, B };

// Dense row-major complex matrix. All toolkit operators (states, witnesses,
// partial transposes) live in this one representation.
class ComplexMatrix {
public:
    ComplexMatrix() = default;
    ComplexMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, cplx(0.0, 0.0)) {}
    ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries);

    static ComplexMatrix identity(std::size_t n);
    static ComplexMatrix diagonal(std::span<const double> d);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }

    cplx& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const cplx& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<const cplx> entries() const { return data_; }
    std::span<cplx> entries() { return data_; }

    ComplexMatrix adjoint() const;
    ComplexMatrix transpose() const;
    ComplexMatrix conj() const;

    cplx trace() const;
    double frobenius_norm() const;
    double max_abs() const;

    // max_{i,j} |M(i,j) - conj(M(j,i))| <= tol * (1 + max|M|)
    bool is_hermitian(double tol) const;
    // replaces M by (M + M^dagger)/2
    void symmetrize();

    ComplexMatrix& operator+=(const ComplexMatrix& o);
    ComplexMatrix& operator-=(const ComplexMatrix& o);
    ComplexMatrix& operator*=(cplx s);

    friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
    friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
    friend ComplexMatrix operator*(cplx s, ComplexMatrix m) { return m *= s; }
    friend ComplexMatrix operator*(ComplexMatrix m, cplx s) { return m *= s; }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<cplx> data_;
};

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
std::vector<cplx> operator*(const ComplexMatrix& m, std::span<const cplx> v);

// <u|v> = sum conj(u_i) v_i
cplx vdot(std::span<const cplx> u, std::span<const cplx> v);
double vnorm(std::span<const cplx> v);
void vnormalize(std::vector<cplx>& v);
// |u><v|
ComplexMatrix outer(std::span<const cplx> u, std::span<const cplx> v);
// <u|M|u>, M Hermitian; returns the real part
double expectation(const ComplexMatrix& m, std::span<const cplx> u);

// Eigendecomposition of a Hermitian matrix, eigenvalues descending,
// eigenvectors as matching orthonormal columns.
struct Spectrum {
    std::vector<double> eigenvalues;
    ComplexMatrix eigenvectors;

    std::vector<cplx> eigenvector(std::size_t k) const;
};

// Cyclic complex Jacobi. Converged when the off-diagonal Frobenius mass drops
// below tol.jacobi * ||M||_F. Ties in the descending order keep the ascending
// original-index order of eigenvectors.
Spectrum eig_hermitian(const ComplexMatrix& m, const Tolerances& tol = default_tolerances());

// Eigenvalues only (descending); skips eigenvector accumulation.
std::vector<double> eigenvalues_hermitian(const ComplexMatrix& m,
                                          const Tolerances& tol = default_tolerances());

// Singular value decomposition via the Hermitian embedding [[0, M], [M^t, 0]].
// m = sum_k values[k] * |left_k><right_k|; columns of `right` are NOT
// conjugated, i.e. M * right_k = values[k] * left_k.
struct Svd {
    std::vector<double> values;  // descending, length min(rows, cols)
    ComplexMatrix left;          // rows x k
    ComplexMatrix right;         // cols x k
};
Svd svd(const ComplexMatrix& m, const Tolerances& tol = default_tolerances());

std::vector<double> singular_values(const ComplexMatrix& m,
                                    const Tolerances& tol = default_tolerances());

// Tr sqrt(M^dagger M): sum of singular values.
double trace_norm(const ComplexMatrix& m, const Tolerances& tol = default_tolerances());
// Largest singular value.
double operator_norm(const ComplexMatrix& m, const Tolerances& tol = default_tolerances());

// (a (x) b)[(i*rb + k), (j*cb + l)] = a(i, j) * b(k, l)
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
std::vector<cplx> kron_vec(std::span<const cplx> a, std::span<const cplx> b);

// Trace out one factor of a d1 (x) d2 operator.
ComplexMatrix partial_trace(const ComplexMatrix& m, std::size_t d1, std::size_t d2, Side keep);

// Transpose the indices of one factor of a d1 (x) d2 operator.
ComplexMatrix partial_transpose(const ComplexMatrix& m, std::size_t d1, std::size_t d2, Side side);

// Orthonormalizes the columns of `m` by modified Gram-Schmidt, dropping
// columns whose residual norm falls below `drop_tol`.
ComplexMatrix gram_schmidt(const ComplexMatrix& m, double drop_tol = 1e-12);

// Extends the orthonormal columns of `basis` to a full orthonormal basis by
// sweeping standard basis vectors.
ComplexMatrix complete_orthonormal(const ComplexMatrix& basis);

std::vector<cplx> random_unit_vector(std::size_t n, Rng& rng);
ComplexMatrix random_hermitian(std::size_t n, Rng& rng);
ComplexMatrix random_traceless_hermitian(std::size_t n, Rng& rng);
// Ginibre matrix with modified Gram-Schmidt and the positive-diagonal
// convention, i.e. Haar distributed.
ComplexMatrix haar_unitary(std::size_t n, Rng& rng);
ComplexMatrix random_orthonormal_columns(std::size_t n, std::size_t k, Rng& rng);

}  // namespace bephase
