#include "implo/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <lapacke.h>

namespace implo {

void BandMat::apply(const cplx* x, cplx* y) const {
    for (int i = 0; i < n; ++i) {
        cplx acc = 0.0;
        const int jlo = std::max(0, i - kb), jhi = std::min(n - 1, i + kb);
        for (int j = jlo; j <= jhi; ++j)
            acc += a[static_cast<std::size_t>(j - i + kb) * n + i] * x[j];
        y[i] = acc;
    }
}

std::vector<double> BandMat::dense() const {
    std::vector<double> d(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) {
        const int jlo = std::max(0, i - kb), jhi = std::min(n - 1, i + kb);
        for (int j = jlo; j <= jhi; ++j)
            d[static_cast<std::size_t>(j) * n + i] = a[static_cast<std::size_t>(j - i + kb) * n + i];
    }
    return d;
}

std::vector<cplx> dense_eigenvalues(std::vector<double> a, int n) {
    std::vector<double> wr(n), wi(n);
    const int info = LAPACKE_dgeev(LAPACK_COL_MAJOR, 'N', 'N', n, a.data(), n,
                                   wr.data(), wi.data(), nullptr, 1, nullptr, 1);
    if (info != 0) throw NoConvergence("dgeev failed with info " + std::to_string(info));
    std::vector<cplx> out(n);
    for (int i = 0; i < n; ++i) out[i] = {wr[i], wi[i]};
    return out;
}

void dense_eigen(std::vector<double> a, int n, std::vector<cplx>& values,
                 std::vector<std::vector<cplx>>& vectors) {
    std::vector<double> wr(n), wi(n), vr(static_cast<std::size_t>(n) * n);
    const int info = LAPACKE_dgeev(LAPACK_COL_MAJOR, 'N', 'V', n, a.data(), n,
                                   wr.data(), wi.data(), nullptr, 1, vr.data(), n);
    if (info != 0) throw NoConvergence("dgeev failed with info " + std::to_string(info));
    values.resize(n);
    vectors.assign(n, std::vector<cplx>(n));
    for (int j = 0; j < n; ++j) {
        values[j] = {wr[j], wi[j]};
        if (wi[j] > 0.0) {
            for (int i = 0; i < n; ++i) {
                vectors[j][i] = {vr[j * n + i], vr[(j + 1) * n + i]};
                vectors[j + 1][i] = {vr[j * n + i], -vr[(j + 1) * n + i]};
            }
        } else if (wi[j] == 0.0) {
            for (int i = 0; i < n; ++i) vectors[j][i] = vr[j * n + i];
        }
    }
}

ShiftedBandLU::ShiftedBandLU(const BandMat& A, cplx sigma) {
    n = A.n;
    kl = A.kb;
    ku = A.kb;
    const int ldab = 2 * kl + ku + 1;
    ab.assign(static_cast<std::size_t>(ldab) * n, 0.0);
    // LAPACK banded layout: AB(kl + ku + i - j, j) = M(i, j), column-major
    for (int j = 0; j < n; ++j) {
        const int ilo = std::max(0, j - ku), ihi = std::min(n - 1, j + kl);
        for (int i = ilo; i <= ihi; ++i) {
            cplx v = A.get(i, j);
            if (i == j) v -= sigma;
            ab[static_cast<std::size_t>(j) * ldab + (kl + ku + i - j)] = v;
        }
    }
    ipiv.resize(n);
    const int info = LAPACKE_zgbtrf(LAPACK_COL_MAJOR, n, n, kl, ku,
                                    reinterpret_cast<lapack_complex_double*>(ab.data()),
                                    ldab, ipiv.data());
    if (info != 0)
        throw NoConvergence("zgbtrf failed with info " + std::to_string(info)
                            + " (shift coincides with an eigenvalue?)");
}

void ShiftedBandLU::solve(std::vector<cplx>& x) const {
    const int ldab = 2 * kl + ku + 1;
    const int info = LAPACKE_zgbtrs(LAPACK_COL_MAJOR, 'N', n, kl, ku, 1,
                                    reinterpret_cast<const lapack_complex_double*>(ab.data()),
                                    ldab, ipiv.data(),
                                    reinterpret_cast<lapack_complex_double*>(x.data()), n);
    if (info != 0) throw NoConvergence("zgbtrs failed with info " + std::to_string(info));
}

std::vector<RitzPair> arnoldi_shift_invert(const BandMat& A, cplx sigma, int krylov_dim,
                                           double residual_tol) {
    const int n = A.n;
    const int m = std::min(krylov_dim, n);
    ShiftedBandLU lu(A, sigma);

    // fixed seed: spectra must be reproducible run to run
    std::mt19937_64 rng(0x5eed1234abcdULL);
    std::normal_distribution<double> gauss(0.0, 1.0);

    std::vector<std::vector<cplx>> V;
    V.reserve(m + 1);
    {
        std::vector<cplx> v0(n);
        double nrm = 0.0;
        for (auto& x : v0) {
            x = {gauss(rng), gauss(rng)};
            nrm += std::norm(x);
        }
        nrm = std::sqrt(nrm);
        for (auto& x : v0) x /= nrm;
        V.push_back(std::move(v0));
    }

    std::vector<cplx> H(static_cast<std::size_t>(m + 1) * m, 0.0); // H(i,j) = H[j*(m+1)+i]
    int steps = m;
    for (int j = 0; j < m; ++j) {
        std::vector<cplx> w = V[j];
        lu.solve(w);
        // modified Gram-Schmidt with one reorthogonalization pass
        for (int pass = 0; pass < 2; ++pass) {
            for (int i = 0; i <= j; ++i) {
                cplx hij = 0.0;
                for (int q = 0; q < n; ++q) hij += std::conj(V[i][q]) * w[q];
                for (int q = 0; q < n; ++q) w[q] -= hij * V[i][q];
                H[static_cast<std::size_t>(j) * (m + 1) + i] += hij;
            }
        }
        double nrm = 0.0;
        for (const auto& x : w) nrm += std::norm(x);
        nrm = std::sqrt(nrm);
        H[static_cast<std::size_t>(j) * (m + 1) + j + 1] = nrm;
        if (nrm < 1e-12) {
            steps = j + 1;
            break;
        }
        for (auto& x : w) x /= nrm;
        V.push_back(std::move(w));
    }

    // eigen-decomposition of the m x m Hessenberg block
    const int k = steps;
    std::vector<cplx> Hk(static_cast<std::size_t>(k) * k);
    for (int j = 0; j < k; ++j)
        for (int i = 0; i < k; ++i)
            Hk[static_cast<std::size_t>(j) * k + i] = H[static_cast<std::size_t>(j) * (m + 1) + i];
    std::vector<cplx> mu(k), Y(static_cast<std::size_t>(k) * k);
    {
        const int info = LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'V', k,
                                       reinterpret_cast<lapack_complex_double*>(Hk.data()), k,
                                       reinterpret_cast<lapack_complex_double*>(mu.data()),
                                       nullptr, 1,
                                       reinterpret_cast<lapack_complex_double*>(Y.data()), k);
        if (info != 0) throw NoConvergence("zgeev failed on the Hessenberg block");
    }

    std::vector<RitzPair> out;
    std::vector<cplx> x(n), ax(n);
    for (int j = 0; j < k; ++j) {
        if (std::abs(mu[j]) < 1e-14) continue;
        RitzPair rp;
        rp.value = sigma + 1.0 / mu[j];
        std::fill(x.begin(), x.end(), cplx(0.0));
        for (int i = 0; i < k; ++i) {
            const cplx yi = Y[static_cast<std::size_t>(j) * k + i];
            for (int q = 0; q < n; ++q) x[q] += yi * V[i][q];
        }
        double xn = 0.0;
        for (const auto& v : x) xn += std::norm(v);
        xn = std::sqrt(xn);
        if (xn < 1e-300) continue;
        A.apply(x.data(), ax.data());
        double res = 0.0;
        for (int q = 0; q < n; ++q) res += std::norm(ax[q] - rp.value * x[q]);
        rp.residual = std::sqrt(res) / (xn * (1.0 + std::abs(rp.value)));
        if (rp.residual > residual_tol) continue;
        rp.vec.resize(n);
        for (int q = 0; q < n; ++q) rp.vec[q] = x[q] / xn;
        out.push_back(std::move(rp));
    }
    return out;
}

} // namespace implo
