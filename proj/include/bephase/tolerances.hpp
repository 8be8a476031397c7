#pragma once

namespace bephase {

// Central numerical tolerances. Every criterion module reads these defaults;
// the CLI may override them once at startup before any work is dispatched.
struct Tolerances {
    double hermiticity = 1e-12;   // |M(i,j) - conj(M(j,i))| <= hermiticity * (1 + max|M|)
    double psd = 1e-10;           // eigenvalue >= -psd * (1 + ||M||_op) counts as nonnegative
    double unit_trace = 1e-10;    // |Tr(rho) - 1| <= unit_trace
    double jacobi = 1e-14;        // off-diagonal Frobenius target, relative to ||M||_F
    double rank = 1e-9;           // Schmidt coefficient / eigenvalue rank threshold
    double residual = 1e-9;       // product-vector solver success threshold
    double witness = 1e-9;        // certificate negativity threshold and strictness slack
};

const Tolerances& default_tolerances();

// Replaces the process-wide defaults. Call before spawning work; reads are
// not synchronized against concurrent writes.
void set_default_tolerances(const Tolerances& tol);

}  // namespace bephase
