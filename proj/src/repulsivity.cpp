#include "implo/repulsivity.hpp"

#include <algorithm>
#include <cmath>

#include "implo/cutoffs.hpp"

namespace implo {

RepulsivityReport check_pointwise_repulsivity(const Profile& prof, const FluidParams& params) {
    RepulsivityReport rep;
    const double a = params.alpha;
    double eta_r = 1e300, eta_a = 1e300;
    for (std::size_t i = 0; i < prof.R.size(); ++i) {
        const double m_r = 1.0 + prof.dU_dR[i] - a * std::fabs(prof.dS_dR[i]);
        const double m_a = 1.0 + prof.U_bar[i] / prof.R[i] - a * std::fabs(prof.dS_dR[i]);
        eta_r = std::fmin(eta_r, m_r);
        eta_a = std::fmin(eta_a, m_a);
    }
    rep.eta_radial = eta_r;
    rep.eta_angular = eta_a;
    // R -> 0: dU_bar/dR -> w1, U_bar/R -> w1 and dS_bar/dR -> 0, so both
    // margins approach 1 + w1; R -> inf: the profile decays and both -> 1.
    rep.limit_origin = 1.0 + prof.w1_fit;
    if (!prof.R.empty()) {
        const std::size_t j = prof.R.size() - 1;
        rep.limit_farfield_radial = 1.0 + prof.dU_dR[j] - a * std::fabs(prof.dS_dR[j]);
        rep.limit_farfield_angular =
            1.0 + prof.U_bar[j] / prof.R[j] - a * std::fabs(prof.dS_dR[j]);
    }

    // D_Z sign pattern along the trajectory: negative left of the sonic
    // point, positive right of it.
    bool ok = true;
    const double h = prof.xi.size() > 1 ? prof.xi[1] - prof.xi[0] : 0.0;
    for (std::size_t i = 0; i < prof.xi.size(); ++i) {
        if (std::fabs(prof.xi[i]) <= 2.0 * h) continue;
        const double U = prof.U_bar[i] / prof.R[i], S = prof.S_bar[i] / prof.R[i];
        const double dz = 1.0 + U - a * S;
        if (prof.xi[i] < 0.0 ? dz >= 0.0 : dz <= 0.0) ok = false;
    }
    rep.dz_pattern_ok = ok;
    return rep;
}

double check_integrated_repulsivity(const Profile& prof, const FluidParams& params) {
    const double a = params.alpha;
    std::size_t in_12 = 0;
    for (std::size_t i = 0; i < prof.R.size(); ++i)
        if (prof.R[i] > 1.0 && prof.R[i] < 2.0) ++in_12;
    if (in_12 < 64) throw GridTooCoarse("need at least 64 samples in R in (1, 2)");

    const double h = prof.xi[1] - prof.xi[0];
    double worst = 1e300;
    for (std::size_t i = 0; i < prof.R.size(); ++i) {
        if (prof.xi[i] <= 1.5 * h) continue; // the ratio is 0/0 at R = 1
        const double R = prof.R[i];
        worst = std::fmin(worst, (R + prof.U_bar[i] - a * prof.S_bar[i]) / (R - 1.0));
    }
    return worst;
}

std::vector<BarrierCheck> check_phase_barriers(const Profile& prof, const SonicData& sd,
                                               const FluidParams& params) {
    std::vector<BarrierCheck> out;
    const double u_psbar = sd.P_s_bar.U();

    BarrierCheck part1{"NW*DZ+NZ*DW>0 (xi<0)", 1e300, 0.0, false};
    BarrierCheck nw_neg{"N_W<0 (xi>0)", 1e300, 0.0, false};
    BarrierCheck xi1_pos{"Xi1>0 (xi>0)", 1e300, 0.0, false};
    BarrierCheck xi2_pos{"Xi2/S>0 (xi>0)", 1e300, 0.0, false};
    BarrierCheck u_above{"U>U(Pbar_s) (xi>0)", 1e300, 0.0, false};

    for (std::size_t i = 0; i < prof.xi.size(); ++i) {
        const double x = prof.xi[i];
        const double U = prof.U_bar[i] / prof.R[i], S = prof.S_bar[i] / prof.R[i];
        if (x < 0.0) {
            const double v = barrier_combination_us(U, S, params);
            if (v < part1.min_margin) {
                part1.min_margin = v;
                part1.location_xi = x;
            }
        } else if (x > 0.0) {
            const PhasePoint p{U + S, U - S};
            const PhasePolys v = eval_phase_polynomials(p, params);
            if (-v.N_W < nw_neg.min_margin) {
                nw_neg.min_margin = -v.N_W;
                nw_neg.location_xi = x;
            }
            const double x1 = xi1(p, params);
            if (x1 < xi1_pos.min_margin) {
                xi1_pos.min_margin = x1;
                xi1_pos.location_xi = x;
            }
            const double x2s = xi2_over_s_us(U, S, params);
            if (x2s < xi2_pos.min_margin) {
                xi2_pos.min_margin = x2s;
                xi2_pos.location_xi = x;
            }
            const double du = U - u_psbar;
            if (du < u_above.min_margin) {
                u_above.min_margin = du;
                u_above.location_xi = x;
            }
        }
    }
    // strict inequalities away from the sonic point; Xi1 and Xi2 vanish at
    // P_s itself, which the margin tolerance in certified() absorbs
    const double tol = -1e-9;
    for (auto* b : {&part1, &nw_neg, &xi1_pos, &xi2_pos, &u_above}) {
        b->holds = b->min_margin > tol;
        out.push_back(*b);
    }
    return out;
}

RepulsivityReport repulsivity_report(const Profile& prof, const FluidParams& params) {
    RepulsivityReport rep = check_pointwise_repulsivity(prof, params);
    rep.eta_integrated = check_integrated_repulsivity(prof, params);
    {
        const auto p1 = prof.at_R(1.0);
        rep.sonic_identity = std::fabs(1.0 + p1.U_bar - params.alpha * p1.S_bar);
        rep.integrated_limit_at_1 = 1.0 + p1.dU_dR - params.alpha * p1.dS_dR;
    }
    rep.barrier_checks = check_phase_barriers(prof, sonic_data(params), params);
    return rep;
}

namespace {

// Profile value with far-field power-law extension beyond the table range.
struct FarField {
    const Profile& prof;
    double Rmax;

    Profile::Point at(double R) const {
        if (R <= Rmax) return prof.at_R(R);
        const double r = prof.params.r;
        const double au = prof.farfield_amp_u, as = prof.farfield_amp_s;
        const double pu = -au * std::pow(R, 1.0 - r); // U_bar < 0 in the far field
        const double ps = as * std::pow(R, 1.0 - r);
        return {R, pu, ps, -(1.0 - r) * au * std::pow(R, -r), (1.0 - r) * as * std::pow(R, -r)};
    }
};

} // namespace

C0Report lemma_c0_conditions(const Profile& prof, double C0, double s0) {
    if (!(C0 >= 10.0)) throw OutOfRange("C0 must be >= 10");
    if (!(s0 >= 1.0)) throw OutOfRange("s0 must be >= 1");

    C0Report rep;
    rep.C0 = C0;
    rep.s0 = s0;
    const double r = prof.params.r, a = prof.params.alpha;
    rep.C2 = 100.0;
    rep.C = 100.0;
    rep.C1 = (32.0 / (r - 1.0)) * std::pow(1.0 / rep.C2, 1.0 / 20.0) * rep.C2;

    const FarField ff{prof, std::exp(prof.xi_max)};
    const double es = std::exp(s0);

    auto evaluate = [&](double c0) {
        // sampled sup norms of the truncated profile on |y| >= c0; the
        // truncation support bounds the domain at e^{s0}
        double sup_u = 0.0, sup_s = 0.0, sup_du = 0.0, sup_ds = 0.0;
        double l8_2nd = 0.0, h345 = 0.0;
        const double hi = std::fmax(es, c0 * 1.0001);
        const int n = 600;
        double prev_R = 0.0, prev_l8 = 0.0;
        for (int i = 0; i <= n; ++i) {
            const double R = c0 * std::pow(hi / c0, static_cast<double>(i) / n);
            const auto p = ff.at(R);
            const double X = truncation_bump(R / es);
            const double dX = truncation_bump_deriv(R / es) / es;
            sup_u = std::fmax(sup_u, std::fabs(X * p.U_bar));
            sup_s = std::fmax(sup_s, a * std::fabs(X * p.S_bar));
            const double du = std::fabs(X * p.dU_dR + dX * p.U_bar);
            const double ds = a * std::fabs(X * p.dS_dR + dX * p.S_bar);
            sup_du = std::fmax(sup_du, du);
            sup_ds = std::fmax(sup_ds, ds);
            // radial surrogate of |grad^2| for the L^8 norm: power-law decay
            // model of the second derivative plus curvature of the bump
            const double d2 = std::fabs(p.dU_dR) * (r + 1.0) / R + std::fabs(p.dS_dR) * (r + 1.0) / R
                            + 2.0 * std::fabs(dX) * (std::fabs(p.dU_dR) + std::fabs(p.dS_dR))
                            + 2.0 * (std::fabs(p.U_bar) + std::fabs(p.S_bar)) / (es * es)
                                  * std::fabs(truncation_bump_deriv(R / es));
            const double l8_density = std::pow(d2, 8.0) * R * R;
            if (i > 0) l8_2nd += 0.5 * (l8_density + prev_l8) * (R - prev_R);
            prev_R = R;
            prev_l8 = l8_density;
        }
        l8_2nd = std::pow(4.0 * M_PI * l8_2nd, 1.0 / 8.0);
        // H^j seminorms, j = 3..5, from the far-field power-law model:
        // |grad^j f| ~ amp * prod |1-r-l| * R^{1-r-j}
        for (int j = 3; j <= 5; ++j) {
            double cj = 1.0;
            for (int l = 0; l < j; ++l) cj *= std::fabs(1.0 - r - l);
            const double amp = (prof.farfield_amp_u + prof.farfield_amp_s) * cj;
            // integral of amp^2 R^{2(1-r-j)} R^2 dR from c0 to e^{s0}
            const double q = 2.0 * (1.0 - r - j) + 2.0;
            const double integral = amp * amp / (-(q + 1.0))
                                  * (std::pow(c0, q + 1.0) - std::pow(es, q + 1.0));
            h345 += std::sqrt(4.0 * M_PI * std::fmax(integral, 0.0));
        }
        struct Vals {
            double cond1, cond4, cond2, cond3;
        };
        return Vals{std::fmax(std::fmax(sup_u, sup_s), std::fmax(sup_du, sup_ds)),
                    sup_du + sup_ds, l8_2nd, h345};
    };

    const auto v = evaluate(C0);
    const double b1 = 1.0 / (100.0 * rep.C1);
    const double bC = 1.0 / (rep.C * rep.C2);
    rep.conditions = {
        {"sup|X U|,|a X S|,|grad| <= 1/(100 C1)", v.cond1, b1, v.cond1 <= b1},
        {"sup|grad(X U)|+|grad(X S)| <= 1/(C C2)", v.cond4, bC, v.cond4 <= bC},
        {"L8 |grad^2| <= 1/(C C2)", v.cond2, bC, v.cond2 <= bC},
        {"sum_j H^j (j=3..5) <= 1/(C C2)", v.cond3, bC, v.cond3 <= bC},
    };
    rep.all_hold = std::all_of(rep.conditions.begin(), rep.conditions.end(),
                               [](const C0Condition& c) { return c.holds; });

    // smallest passing C0 on the doubling grid
    rep.smallest_passing_C0 = 0.0;
    for (double c0 = 10.0; c0 < 4.0 * es; c0 *= 2.0) {
        const auto w = evaluate(c0);
        if (w.cond1 <= b1 && w.cond4 <= bC && w.cond2 <= bC && w.cond3 <= bC) {
            rep.smallest_passing_C0 = c0;
            break;
        }
    }
    // decay-model threshold independent of the truncation support
    const double amp = std::fmax(prof.farfield_amp_u,
                                 std::fmax(a * prof.farfield_amp_s, 1e-300));
    rep.decay_threshold_C0 = std::pow(amp / b1, 1.0 / (r - 1.0));
    return rep;
}

} // namespace implo
