#include "implo/evolve.hpp"

#include <algorithm>
#include <cmath>

namespace implo {

SelfSimPoint to_selfsimilar(double u, double sigma, double x, double t,
                            const TransformSpec& spec) {
    if (t >= spec.T) throw TimeBeyondBlowup("t must be below the blow-up time");
    const double tau = spec.T - t;
    SelfSimPoint p;
    p.s = -std::log(tau) / spec.r;
    p.y = x * std::pow(tau, -1.0 / spec.r);
    const double amp = spec.r * std::pow(tau, 1.0 - 1.0 / spec.r);
    p.U = amp * u;
    p.S = amp * sigma;
    return p;
}

PhysicalPoint from_selfsimilar(double U, double S, double y, double s,
                               const TransformSpec& spec) {
    PhysicalPoint p;
    const double tau = std::exp(-spec.r * s);
    p.t = spec.T - tau;
    p.x = y * std::pow(tau, 1.0 / spec.r);
    const double amp = std::pow(tau, 1.0 / spec.r - 1.0) / spec.r;
    p.u = amp * U;
    p.sigma = amp * S;
    return p;
}

double sigma_from_rho(double rho, double alpha) { return std::pow(rho, alpha) / alpha; }
double rho_from_sigma(double sigma, double alpha) { return std::pow(alpha * sigma, 1.0 / alpha); }

SimState state_from_profile(const Profile& prof, const FluidParams& params,
                            double R_max, std::size_t n, double s0) {
    if (n < 16) throw OutOfRange("grid too small");
    if (!prof.covers(R_max)) throw ProfileTooShort("profile does not cover R_max");
    SimState st;
    st.s = s0;
    st.params = params;
    st.R_grid.resize(n);
    st.U.resize(n);
    st.S.resize(n);
    const double h = R_max / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        const double R = h * static_cast<double>(i);
        st.R_grid[i] = R;
        if (i == 0) {
            st.U[0] = 0.0;
            st.S[0] = prof.w0_fit;
        } else {
            const auto p = prof.at_R(R);
            st.U[i] = p.U_bar;
            st.S[i] = p.S_bar;
        }
    }
    return st;
}

namespace {

// centered first and second derivative tables with parity ghosts at R = 0
// (U odd, S even); outer ghosts either hold a fixed value (torus) or follow
// the far-field decay exponent (whole space)
struct Stencil {
    const std::vector<double>& f;
    double h;
    double parity; // -1 odd, +1 even
    double outer_ghost;     // used when decay_exponent == 0
    double decay_exponent = 0.0;

    double val(std::ptrdiff_t i) const {
        const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(f.size());
        if (i < 0) return parity * f[-i];
        if (i >= n) {
            if (decay_exponent == 0.0) return outer_ghost;
            const double Rl = static_cast<double>(n - 1);
            return f[n - 1] * std::pow(static_cast<double>(i) / Rl, decay_exponent);
        }
        return f[i];
    }
    double d1(std::size_t i) const {
        return (val(static_cast<std::ptrdiff_t>(i) + 1) - val(static_cast<std::ptrdiff_t>(i) - 1))
             / (2.0 * h);
    }
    double d1_upwind(std::size_t i, double c) const {
        const auto k = static_cast<std::ptrdiff_t>(i);
        if (c >= 0.0) return (3.0 * val(k) - 4.0 * val(k - 1) + val(k - 2)) / (2.0 * h);
        return (-3.0 * val(k) + 4.0 * val(k + 1) - val(k + 2)) / (2.0 * h);
    }
    double d2(std::size_t i) const {
        const auto k = static_cast<std::ptrdiff_t>(i);
        return (val(k + 1) - 2.0 * val(k) + val(k - 1)) / (h * h);
    }
};

} // namespace

void rhs_selfsimilar(const SimState& state, std::vector<double>& dU, std::vector<double>& dS) {
    const std::size_t n = state.R_grid.size();
    dU.assign(n, 0.0);
    dS.assign(n, 0.0);
    const double h = state.h();
    const double a = state.params.alpha, r = state.params.r;
    const int nu = state.params.nu;
    const bool torus = state.torus_L > 0.0;
    const double decay = torus ? 0.0 : 1.0 - r;
    const Stencil su{state.U, h, -1.0, state.U.back(), decay};
    const Stencil ss{state.S, h, +1.0, state.S.back(), decay};

    const double kappa = nu ? state.params.c_dis * std::exp(-state.params.delta_dis * state.s)
                            : 0.0;

    const std::size_t last = torus ? n - 1 : n;
    for (std::size_t i = 1; i < last; ++i) {
        const double R = state.R_grid[i], U = state.U[i], S = state.S[i];
        const double c = R + U;
        const double dUdR = state.upwind_transport ? su.d1_upwind(i, c) : su.d1(i);
        const double dSdR = state.upwind_transport ? ss.d1_upwind(i, c) : ss.d1(i);
        dU[i] = -(r - 1.0) * U - c * dUdR - a * S * ss.d1(i);
        dS[i] = -(r - 1.0) * S - c * dSdR - a * S * (su.d1(i) + 2.0 * U / R);
        if (nu) {
            if (S < state.vacuum_floor)
                throw VacuumEncountered("S below the vacuum floor at R = " + std::to_string(R));
            const double lap = su.d2(i) + 2.0 * su.d1(i) / R - 2.0 * U / (R * R);
            dU[i] += kappa * lap / std::pow(S, 1.0 / a);
        }
    }
    // R = 0: U is odd (stays 0); S is even, transport vanishes and
    // 2U/R -> 2 dU/dR
    {
        const double S0 = state.S[0];
        const double du0 = state.U[1] / h; // (U[1] - U[-1]) / 2h with U odd
        dU[0] = 0.0;
        dS[0] = -(r - 1.0) * S0 - a * S0 * 3.0 * du0;
    }
    // torus runs hold the outer boundary at its initial far-field value;
    // whole-space runs evolve it with the decay-extrapolated ghost
    if (torus) {
        dU[n - 1] = 0.0;
        dS[n - 1] = 0.0;
    }
}

EvolveDiagnostics evolve(SimState& state, double s_end, double cfl, double out_every) {
    if (!(s_end > state.s)) throw OutOfRange("s_end must exceed the current s");
    if (state.torus_L > 0.0) {
        // expanding periodic domain: the grid must cover e^{s} L throughout
        if (std::exp(s_end) * state.torus_L > state.R_grid.back() * (1.0 + 1e-12))
            throw OutOfRange("grid does not cover the torus domain e^{s_end} L");
    }

    const std::size_t n = state.R_grid.size();
    const double h = state.h();
    const std::vector<double> U0 = state.U, S0 = state.S;
    EvolveDiagnostics diag;

    std::vector<double> k1u, k1s, k2u, k2s, k3u, k3s, k4u, k4s;
    std::vector<double> tu(n), ts(n);
    double next_out = state.s;

    auto record = [&] {
        double du = 0.0, ds = 0.0, mins = 1e300;
        for (std::size_t i = 0; i < n; ++i) {
            du = std::fmax(du, std::fabs(state.U[i] - U0[i]));
            ds = std::fmax(ds, std::fabs(state.S[i] - S0[i]));
            mins = std::fmin(mins, state.S[i]);
        }
        diag.s.push_back(state.s);
        diag.sup_U_dev.push_back(du);
        diag.sup_S_dev.push_back(ds);
        diag.min_S.push_back(mins);
        diag.E_K.push_back(weighted_energy(state));
        double dis = 0.0;
        if (state.params.nu) {
            const double kappa = state.params.c_dis
                               * std::exp(-state.params.delta_dis * state.s);
            const Stencil su{state.U, h, -1.0, state.U.back(),
                             state.torus_L > 0.0 ? 0.0 : 1.0 - state.params.r};
            for (std::size_t i = 1; i + 1 < n; ++i) {
                const double R = state.R_grid[i];
                const double lap = su.d2(i) + 2.0 * su.d1(i) / R
                                 - 2.0 * state.U[i] / (R * R);
                dis = std::fmax(dis, std::fabs(kappa * lap
                                   / std::pow(state.S[i], 1.0 / state.params.alpha)));
            }
        }
        diag.dis_sup.push_back(dis);
    };
    record();
    next_out += out_every;

    while (state.s < s_end - 1e-14) {
        double maxc = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            maxc = std::fmax(maxc, std::fabs(state.R_grid[i] + state.U[i]));
        double dt = cfl * h / std::fmax(maxc, 1e-8);
        dt = std::fmin(dt, s_end - state.s);
        if (dt < 1e-12) throw CflViolation("time step collapsed");

        // classical RK4
        rhs_selfsimilar(state, k1u, k1s);
        SimState tmp = state;
        auto stage = [&](const std::vector<double>& ku, const std::vector<double>& ks,
                         double frac) {
            for (std::size_t i = 0; i < n; ++i) {
                tmp.U[i] = state.U[i] + frac * dt * ku[i];
                tmp.S[i] = state.S[i] + frac * dt * ks[i];
            }
            tmp.s = state.s + frac * dt;
        };
        stage(k1u, k1s, 0.5);
        rhs_selfsimilar(tmp, k2u, k2s);
        stage(k2u, k2s, 0.5);
        rhs_selfsimilar(tmp, k3u, k3s);
        stage(k3u, k3s, 1.0);
        rhs_selfsimilar(tmp, k4u, k4s);
        for (std::size_t i = 0; i < n; ++i) {
            state.U[i] += dt / 6.0 * (k1u[i] + 2.0 * k2u[i] + 2.0 * k3u[i] + k4u[i]);
            state.S[i] += dt / 6.0 * (k1s[i] + 2.0 * k2s[i] + 2.0 * k3s[i] + k4s[i]);
        }
        state.s += dt;
        if (state.S[0] < state.vacuum_floor) {
            state.valid = false;
            throw VacuumEncountered("vacuum at the origin");
        }
        if (state.s >= next_out - 1e-12 || state.s >= s_end - 1e-14) {
            record();
            next_out += out_every;
        }
    }
    return diag;
}

double weighted_energy(const SimState& state) {
    const std::size_t n = state.R_grid.size();
    const double h = state.h();
    const double decay = state.torus_L > 0.0 ? 0.0 : 1.0 - state.params.r;
    const Stencil su{state.U, h, -1.0, state.U.back(), decay};
    const Stencil ss{state.S, h, +1.0, state.S.back(), decay};
    double e = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double R = state.R_grid[i];
        const double gu = su.d1(i), gs = ss.d1(i);
        const double ang = state.U[i] / R;
        const double phi = weight_phi(R, state.weight_R0, state.weight_eta);
        e += (gu * gu + 2.0 * ang * ang + gs * gs) * phi * R * R * h;
    }
    return 4.0 * M_PI * e;
}

TruncationTerms truncation_terms(const Profile& prof, const FluidParams& params,
                                 double s, const std::vector<double>& R) {
    TruncationTerms out;
    out.R = R;
    out.E_u.resize(R.size());
    out.E_s.resize(R.size());
    const double a = params.alpha;
    const double es = std::exp(s);
    for (std::size_t i = 0; i < R.size(); ++i) {
        if (R[i] <= 0.0) {
            out.E_u[i] = 0.0;
            out.E_s[i] = 0.0;
            continue;
        }
        const auto p = prof.at_R(R[i]);
        const double X = truncation_bump(R[i] / es);
        const double dX = truncation_bump_deriv(R[i] / es) / es;
        const double X2mX = X * X - X;
        out.E_u[i] = -X2mX * p.U_bar * p.dU_dR - X * p.U_bar * dX * p.U_bar
                   - a * X2mX * p.S_bar * p.dS_dR - a * X * p.S_bar * dX * p.S_bar;
        out.E_s[i] = -X2mX * p.U_bar * p.dS_dR - (a + 1.0) * X * p.U_bar * dX * p.S_bar
                   - a * X2mX * p.S_bar * (p.dU_dR + 2.0 * p.U_bar / R[i]);
    }
    return out;
}

TruncatedVsExtended truncated_vs_extended(const Profile& prof, const CutoffConfig& cfg,
                                          const FluidParams& params, double s_len,
                                          bool outer_data_differs) {
    // degree-0 linearizations share the discretization; they differ only in
    // the cutoff factors, so any influence inside B(0, C0) is numerical
    auto trunc = assemble_mode(prof, cfg, params, 0, AssembleVariant::Standard);
    auto ext = assemble_mode(prof, cfg, params, 0, AssembleVariant::Extended);

    const std::size_t N = cfg.grid_n;
    const double h = trunc.h;
    const auto bump = [](double R, double c, double w) {
        const double t = (R - c) / w;
        return std::fabs(t) < 1.0 ? std::exp(-1.0 / (1.0 - t * t)) * std::exp(1.0) : 0.0;
    };

    // stacked (W, Z) data: a smooth bump well inside B(0, C0)
    std::vector<cplx> vt(2 * N, 0.0), ve(2 * N, 0.0);
    for (std::size_t i = 0; i < N; ++i) {
        const double R = trunc.radial_grid[i];
        const double base = bump(R, 0.3 * cfg.C0, 0.15 * cfg.C0);
        ve[2 * i] = base;
        ve[2 * i + 1] = 0.5 * base;
        if (outer_data_differs) {
            const double extra = bump(R, 1.5 * cfg.C0, 0.3 * cfg.C0);
            ve[2 * i] += extra;
            ve[2 * i + 1] += 0.7 * extra;
        }
        vt[2 * i] = bump(R, 0.3 * cfg.C0, 0.15 * cfg.C0);
        vt[2 * i + 1] = 0.5 * bump(R, 0.3 * cfg.C0, 0.15 * cfg.C0);
    }

    double maxc = 0.0;
    for (std::size_t i = 0; i < N; ++i)
        maxc = std::fmax(maxc, std::fabs(trunc.radial_grid[i] + trunc.U_bar[i])
                                  + params.alpha * std::fabs(trunc.S_bar[i]));
    const double dt = 0.45 * h / maxc;
    const auto steps = static_cast<std::size_t>(std::ceil(s_len / dt));
    const double dt_eff = s_len / static_cast<double>(steps);

    std::vector<cplx> k1(2 * N), k2(2 * N), k3(2 * N), k4(2 * N), tmp(2 * N);
    auto rk4 = [&](const BandMat& A, std::vector<cplx>& v) {
        A.apply(v.data(), k1.data());
        for (std::size_t q = 0; q < 2 * N; ++q) tmp[q] = v[q] + 0.5 * dt_eff * k1[q];
        A.apply(tmp.data(), k2.data());
        for (std::size_t q = 0; q < 2 * N; ++q) tmp[q] = v[q] + 0.5 * dt_eff * k2[q];
        A.apply(tmp.data(), k3.data());
        for (std::size_t q = 0; q < 2 * N; ++q) tmp[q] = v[q] + dt_eff * k3[q];
        A.apply(tmp.data(), k4.data());
        for (std::size_t q = 0; q < 2 * N; ++q)
            v[q] += dt_eff / 6.0 * (k1[q] + 2.0 * k2[q] + 2.0 * k3[q] + k4[q]);
    };
    for (std::size_t it = 0; it < steps; ++it) {
        rk4(trunc.A, vt);
        rk4(ext.A, ve);
    }

    TruncatedVsExtended rep;
    rep.h = h;
    for (std::size_t i = 0; i < N; ++i) {
        rep.data_scale = std::fmax(rep.data_scale, std::abs(ve[2 * i]));
        if (trunc.radial_grid[i] > cfg.C0) continue;
        rep.max_diff_inside_C0 = std::fmax(
            rep.max_diff_inside_C0,
            std::fmax(std::abs(vt[2 * i] - ve[2 * i]), std::abs(vt[2 * i + 1] - ve[2 * i + 1])));
    }
    rep.bound = 10.0 * h * h * std::fmax(rep.data_scale, 1e-300);
    rep.within_bound = rep.max_diff_inside_C0 <= rep.bound;
    return rep;
}

} // namespace implo
