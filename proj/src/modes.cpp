#include "implo/modes.hpp"

#include <algorithm>
#include <cmath>

namespace implo {

namespace {
enum { CW = 0, CZ = 1, CP = 2, CF = 3 }; // W, Z, U_Psi, U_Phi
}

ModeSystem assemble_mode(const Profile& prof, const CutoffConfig& cfg,
                         const FluidParams& params, int n1, AssembleVariant variant) {
    if (n1 < 0) throw OutOfRange("n1 must be >= 0");
    if (cfg.grid_n < 256) throw OutOfRange("grid_n must be >= 256");
    const double Rmax = 3.0 * cfg.C0;
    if (!prof.covers(Rmax))
        throw ProfileTooShort("profile table does not cover (0, 3 C0]");

    ModeSystem ms;
    ms.n1 = n1;
    ms.cfg = cfg;
    ms.params = params;
    ms.block = (n1 == 0) ? 2 : 4;
    ms.grid_n = cfg.grid_n;
    const std::size_t N = cfg.grid_n;
    const double h = Rmax / static_cast<double>(N);
    ms.h = h;

    ms.radial_grid.resize(N);
    ms.chi1_tab.resize(N);
    ms.chi2_tab.resize(N);
    ms.U_bar.resize(N);
    ms.S_bar.resize(N);
    ms.dU_dR.resize(N);
    ms.dS_dR.resize(N);
    for (std::size_t i = 0; i < N; ++i) {
        const double R = h * static_cast<double>(i + 1);
        ms.radial_grid[i] = R;
        switch (variant) {
            case AssembleVariant::Standard:
                ms.chi1_tab[i] = chi1(R, cfg.C0);
                ms.chi2_tab[i] = chi2(R, cfg.C0);
                break;
            case AssembleVariant::Chi2Zero:
                ms.chi1_tab[i] = chi1(R, cfg.C0);
                ms.chi2_tab[i] = 0.0;
                break;
            case AssembleVariant::Extended:
                ms.chi1_tab[i] = 1.0; // no damping term
                ms.chi2_tab[i] = 1.0;
                break;
        }
        const auto p = prof.at_R(R);
        ms.U_bar[i] = p.U_bar;
        ms.S_bar[i] = p.S_bar;
        ms.dU_dR[i] = p.dU_dR;
        ms.dS_dR[i] = p.dS_dR;
    }

    const int b = ms.block;
    const double a = params.alpha, r = params.r, J = cfg.J;
    const double L = static_cast<double>(n1) * (n1 + 1);
    ms.A.init(static_cast<int>(N) * b, b);

    auto add = [&ms](int row, int col, double v) { ms.A.at(row, col) += v; };

    for (std::size_t i = 0; i < N; ++i) {
        const double R = ms.radial_grid[i];
        const double x2 = ms.chi2_tab[i], x1 = ms.chi1_tab[i];
        const double Ub = ms.U_bar[i], Sb = ms.S_bar[i];
        const double dU = ms.dU_dR[i], dS = ms.dS_dR[i];
        const double damping = -J * (1.0 - x1);
        const int base = static_cast<int>(i) * b;

        // transport -c dF/dR, upwinded by the sign of c; at the inner end
        // modes with n1 >= 1 vanish (zero ghost) and n1 = 0 is Neumann-type
        auto transport = [&](int comp, double c) {
            const int row = base + comp;
            if (c > 0.0) {
                add(row, row, -c / h);
                if (i > 0) {
                    add(row, row - b, c / h);
                } else if (n1 == 0) {
                    add(row, row, c / h); // ghost F(-h) = F(h=0 point)
                }
            } else if (c < 0.0) {
                add(row, row, c / h);
                if (i + 1 < N) add(row, row + b, -c / h); // outer ghost = 0
            }
        };

        transport(CW, x2 * (R + Ub + a * Sb));
        transport(CZ, x2 * (R + Ub - a * Sb));
        if (b == 4) {
            transport(CP, x2 * (R + Ub));
            transport(CF, x2 * (R + Ub));
        }

        for (int c = 0; c < b; ++c) add(base + c, base + c, damping);

        // zero-order terms of the mode system
        const double aWW = -(r - 1.0) - a * dS - 0.5 * (1.0 + a) * dU - a * (Sb + Ub) / R;
        const double aWZ = -0.5 * (1.0 - a) * dU - a * (Sb - Ub) / R;
        const double aZZ = -(r - 1.0) + a * dS - 0.5 * (1.0 + a) * dU - a * (Sb - Ub) / R;
        const double aZW = -0.5 * (1.0 - a) * dU - a * (Sb + Ub) / R;
        add(base + CW, base + CW, x2 * aWW);
        add(base + CW, base + CZ, x2 * aWZ);
        add(base + CZ, base + CZ, x2 * aZZ);
        add(base + CZ, base + CW, x2 * aZW);

        if (b == 4) {
            // the W/Z <-> U_Psi coupling enters with exactly opposite signs;
            // shared subexpressions keep the skew relations exact
            const double t = x2 * a * Sb / R;
            add(base + CW, base + CP, t * L);
            add(base + CZ, base + CP, -(t * L));
            add(base + CP, base + CW, -(t * 0.5));
            add(base + CP, base + CZ, t * 0.5);
            const double diag_pf = -x2 * ((r - 1.0) + Ub / R);
            add(base + CP, base + CP, diag_pf);
            add(base + CF, base + CF, diag_pf);
        }
    }
    return ms;
}

namespace {

std::vector<cplx> census_filter(const std::vector<cplx>& values, double threshold) {
    std::vector<cplx> out;
    for (const auto& v : values)
        if (v.real() > threshold) out.push_back(v);
    std::sort(out.begin(), out.end(), [](const cplx& a, const cplx& b) {
        if (a.real() != b.real()) return a.real() > b.real();
        return a.imag() < b.imag();
    });
    return out;
}

} // namespace

Spectrum mode_spectrum(const ModeSystem& ms, const CutoffConfig& cfg, EigMethod method) {
    Spectrum sp;
    sp.n1 = ms.n1;
    const double threshold = -0.5 * cfg.delta_g;
    const int n = ms.dim();
    if (method == EigMethod::Auto)
        method = n <= 2600 ? EigMethod::Dense : EigMethod::Arnoldi;

    if (method == EigMethod::Dense) {
        sp.method = "dense";
        sp.eigenvalues = dense_eigenvalues(ms.dense(), n);
        std::sort(sp.eigenvalues.begin(), sp.eigenvalues.end(),
                  [](const cplx& a, const cplx& b) {
                      if (a.real() != b.real()) return a.real() > b.real();
                      return a.imag() < b.imag();
                  });
        sp.unstable = census_filter(sp.eigenvalues, threshold);
        sp.dim_unstable = static_cast<int>(sp.unstable.size());
        return sp;
    }

    // Shift-invert Arnoldi about a ladder of shifts right of the census
    // line; conjugate symmetry of the real matrix supplies Im < 0.
    sp.method = "arnoldi";
    std::vector<cplx> found;
    for (const cplx sigma : {cplx(0.5, 0.0), cplx(0.5, 6.0), cplx(0.5, 12.0), cplx(0.5, 18.0)}) {
        std::vector<RitzPair> pairs;
        try {
            pairs = arnoldi_shift_invert(ms.A, sigma, 140, 1e-8);
        } catch (const NoConvergence&) {
            continue;
        }
        for (const auto& rp : pairs) {
            if (rp.value.real() <= threshold - 0.5) continue;
            bool dup = false;
            for (const auto& v : found)
                if (std::abs(v - rp.value) < 1e-6) dup = true;
            if (!dup) {
                found.push_back(rp.value);
                if (std::fabs(rp.value.imag()) > 1e-9)
                    found.push_back(std::conj(rp.value));
            }
        }
    }
    sp.eigenvalues = found;
    std::sort(sp.eigenvalues.begin(), sp.eigenvalues.end(), [](const cplx& a, const cplx& b) {
        if (a.real() != b.real()) return a.real() > b.real();
        return a.imag() < b.imag();
    });
    sp.unstable = census_filter(sp.eigenvalues, threshold);
    sp.dim_unstable = static_cast<int>(sp.unstable.size());
    return sp;
}

std::vector<double> spherical_energy(const ModeSystem& ms, const std::vector<cplx>& vec, int k) {
    if (k < 0 || k > 2)
        throw UnsupportedOrder("spherical energy supports derivative orders k <= 2");
    const std::size_t N = ms.grid_n;
    const int b = ms.block;
    if (vec.size() != N * static_cast<std::size_t>(b))
        throw OutOfRange("mode vector length does not match the system");

    // split components, then apply the centered discrete derivative k times
    std::vector<std::vector<cplx>> comp(4, std::vector<cplx>(N, 0.0));
    for (std::size_t i = 0; i < N; ++i)
        for (int c = 0; c < b; ++c) comp[c][i] = vec[i * b + c];
    for (int pass = 0; pass < k; ++pass) {
        for (int c = 0; c < b; ++c) {
            std::vector<cplx> d(N, 0.0);
            for (std::size_t i = 1; i + 1 < N; ++i)
                d[i] = (comp[c][i + 1] - comp[c][i - 1]) / (2.0 * ms.h);
            if (N > 1) {
                d[0] = (comp[c][1] - comp[c][0]) / ms.h;
                d[N - 1] = (comp[c][N - 1] - comp[c][N - 2]) / ms.h;
            }
            comp[c] = std::move(d);
        }
    }

    const double a = ms.params.alpha;
    const double L = static_cast<double>(ms.n1) * (ms.n1 + 1);
    std::vector<double> E(N);
    for (std::size_t i = 0; i < N; ++i) {
        const double R = ms.radial_grid[i], Ub = ms.U_bar[i], Sb = ms.S_bar[i];
        double e = 0.5 * (R + Ub + a * Sb) * std::norm(comp[CW][i])
                 + 0.5 * (R + Ub - a * Sb) * std::norm(comp[CZ][i]);
        if (b == 4)
            e += (R + Ub) * (std::norm(comp[CP][i]) + std::norm(comp[CF][i])) * (L + 1.0);
        E[i] = e;
    }
    return E;
}

double rayleigh_probe(const ModeSystem& ms, const std::vector<cplx>& vec) {
    const std::size_t N = ms.grid_n;
    const int b = ms.block;
    if (vec.size() != N * static_cast<std::size_t>(b))
        throw OutOfRange("mode vector length does not match the system");
    double nrm2 = 0.0;
    for (const auto& v : vec) nrm2 += std::norm(v);
    if (nrm2 == 0.0) throw ZeroVector("rayleigh probe needs a nonzero vector");

    std::vector<cplx> av(vec.size());
    ms.A.apply(vec.data(), av.data());

    // plain L^2 on the ball restricted to the mode: weight R^2 h, component
    // weights 1/2 for W and Z, n1(n1+1) for U_Psi and U_Phi
    const double L = static_cast<double>(ms.n1) * (ms.n1 + 1);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        const double w = ms.radial_grid[i] * ms.radial_grid[i] * ms.h;
        for (int c = 0; c < b; ++c) {
            const double cw = (c < 2) ? 0.5 : L;
            const std::size_t q = i * b + c;
            num += cw * w * (std::conj(vec[q]) * av[q]).real();
            den += cw * w * std::norm(vec[q]);
        }
    }
    if (den == 0.0) throw ZeroVector("vector has no weight in the mode inner product");
    return num / den;
}

double energy_identity_residual(const ModeSystem& ms, const std::vector<cplx>& vec,
                                cplx lambda) {
    const std::size_t N = ms.grid_n;
    const int b = ms.block;
    const double a = ms.params.alpha, r = ms.params.r, J = ms.cfg.J;
    const double L = static_cast<double>(ms.n1) * (ms.n1 + 1);
    auto E = spherical_energy(ms, vec, 0);

    double worst = 0.0, scale = 0.0;
    for (std::size_t i = 1; i + 1 < N; ++i) {
        if (ms.chi2_tab[i] < 0.5) continue;
        const double dE = (E[i + 1] - E[i - 1]) / (2.0 * ms.h);
        const double R = ms.radial_grid[i], Ub = ms.U_bar[i], Sb = ms.S_bar[i];
        const cplx W = vec[i * b + CW], Z = vec[i * b + CZ];
        const cplx P = b == 4 ? vec[i * b + CP] : 0.0;
        const cplx F = b == 4 ? vec[i * b + CF] : 0.0;
        const double x2 = ms.chi2_tab[i], x1 = ms.chi1_tab[i];
        const double aWW = -(r - 1.0) - a * ms.dS_dR[i] - 0.5 * (1.0 + a) * ms.dU_dR[i]
                         - a * (Sb + Ub) / R;
        const double aWZ = -0.5 * (1.0 - a) * ms.dU_dR[i] - a * (Sb - Ub) / R;
        const double aZZ = -(r - 1.0) + a * ms.dS_dR[i] - 0.5 * (1.0 + a) * ms.dU_dR[i]
                         - a * (Sb - Ub) / R;
        const double aZW = -0.5 * (1.0 - a) * ms.dU_dR[i] - a * (Sb + Ub) / R;

        const double q2 = std::norm(W) + std::norm(Z) + 2.0 * (L + 1.0) * (std::norm(P) + std::norm(F));
        double rhs = 0.5 * (1.0 + ms.dU_dR[i] + a * ms.dS_dR[i]) * std::norm(W)
                   + 0.5 * (1.0 + ms.dU_dR[i] - a * ms.dS_dR[i]) * std::norm(Z)
                   + (1.0 + ms.dU_dR[i]) * (L + 1.0) * (std::norm(P) + std::norm(F));
        double inner = -(lambda.real() + J * (1.0 - x1)) * q2;
        inner += (std::conj(W) * cplx(x2 * aWW) * W + std::conj(W) * cplx(x2 * aWZ) * Z).real();
        inner += (std::conj(Z) * cplx(x2 * aZZ) * Z + std::conj(Z) * cplx(x2 * aZW) * W).real();
        if (b == 4) {
            const double dpf = -x2 * ((r - 1.0) + Ub / R);
            inner += 2.0 * (L + 1.0) * dpf * (std::norm(P) + std::norm(F));
            const double t = x2 * a * Sb / R;
            inner += -t * (std::conj(P) * (W - Z)).real();
        }
        rhs += inner / x2;
        worst = std::fmax(worst, std::fabs(dE - rhs));
        scale = std::fmax(scale, std::fabs(dE));
    }
    return scale > 0.0 ? worst / scale : 0.0;
}

} // namespace implo
