#ifndef IMPLO_LINALG_HPP
#define IMPLO_LINALG_HPP

// Dense nonsymmetric eigensolver (LAPACK dgeev) and a shift-invert Arnoldi
// on banded storage (zgbtrf/zgbtrs) for the unstable-eigenvalue census.

#include <complex>
#include <vector>

#include "implo/errors.hpp"

namespace implo {

using cplx = std::complex<double>;

// Real banded matrix: diag(d) holds A[i, i + d] for d in [-kb, kb].
struct BandMat {
    int n = 0, kb = 0;
    std::vector<double> a; // a[(d + kb) * n + i] = A[i, i + d]

    void init(int n_, int kb_) {
        n = n_;
        kb = kb_;
        a.assign(static_cast<std::size_t>(2 * kb + 1) * n, 0.0);
    }
    double& at(int i, int j) { return a[static_cast<std::size_t>(j - i + kb) * n + i]; }
    double get(int i, int j) const {
        const int d = j - i;
        if (d < -kb || d > kb || j < 0 || j >= n) return 0.0;
        return a[static_cast<std::size_t>(d + kb) * n + i];
    }
    void apply(const cplx* x, cplx* y) const;
    std::vector<double> dense() const; // column-major n x n
};

// Eigenvalues of a real dense column-major matrix (destroys the copy).
std::vector<cplx> dense_eigenvalues(std::vector<double> a, int n);

// Eigenvalues and right eigenvectors (complex pairs unpacked).
void dense_eigen(std::vector<double> a, int n, std::vector<cplx>& values,
                 std::vector<std::vector<cplx>>& vectors);

// LU of (A - sigma I) in LAPACK complex banded storage.
struct ShiftedBandLU {
    int n = 0, kl = 0, ku = 0;
    std::vector<cplx> ab;
    std::vector<int> ipiv;

    ShiftedBandLU(const BandMat& A, cplx sigma);
    void solve(std::vector<cplx>& x) const; // in place
};

struct RitzPair {
    cplx value;              // lambda = sigma + 1/mu
    std::vector<cplx> vec;   // Ritz vector in the original space
    double residual = 0.0;   // |A v - lambda v| / |v| computed against A
};

// Shift-invert Arnoldi about sigma; returns Ritz pairs with residuals
// validated against A. Deterministic (fixed RNG seed).
std::vector<RitzPair> arnoldi_shift_invert(const BandMat& A, cplx sigma, int krylov_dim,
                                           double residual_tol);

} // namespace implo

#endif
