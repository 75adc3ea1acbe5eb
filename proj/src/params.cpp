#include "implo/params.hpp"

#include <cmath>

namespace implo {

FluidParams FluidParams::make(double gamma, double r, int nu) {
    if (!(gamma > 1.0)) throw OutOfRange("gamma must be > 1");
    if (!(r > 1.0)) throw OutOfRange("r must be > 1");
    if (nu != 0 && nu != 1) throw OutOfRange("nu must be 0 or 1");
    FluidParams p;
    p.gamma = gamma;
    p.alpha = 0.5 * (gamma - 1.0);
    p.r = r;
    p.nu = nu;
    p.c_dis = std::pow(r, 1.0 + 1.0 / p.alpha) / std::pow(p.alpha, 1.0 / p.alpha);
    p.delta_dis = (r - 1.0) / p.alpha + r - 2.0;
    return p;
}

namespace {

// D_Z(W, Z) = D(Z, W) and N_Z(W, Z) = N(Z, W): evaluating both through the
// same helpers keeps the mirror symmetry exact in floating point.
inline double poly_d(double x, double y, double g) {
    return 1.0 + 0.25 * (1.0 + g) * x + 0.25 * (3.0 - g) * y;
}
inline double poly_n(double x, double y, double g, double r) {
    return -r * x + 0.25 * (g - 1.0) * y * y + 0.25 * (g - 3.0) * x * y - 0.5 * g * x * x;
}

} // namespace

PhasePolys eval_phase_polynomials(const PhasePoint& p, const FluidParams& params) {
    const double g = params.gamma, r = params.r;
    PhasePolys v;
    v.D_W = poly_d(p.W, p.Z, g);
    v.D_Z = poly_d(p.Z, p.W, g);
    v.N_W = poly_n(p.W, p.Z, g, r);
    v.N_Z = poly_n(p.Z, p.W, g, r);
    return v;
}

double dNW_dW(const PhasePoint& p, const FluidParams& params) {
    return -params.r + 0.25 * (params.gamma - 3.0) * p.Z - params.gamma * p.W;
}
double dNW_dZ(const PhasePoint& p, const FluidParams& params) {
    return 0.5 * (params.gamma - 1.0) * p.Z + 0.25 * (params.gamma - 3.0) * p.W;
}
double dNZ_dW(const PhasePoint& p, const FluidParams& params) {
    return 0.5 * (params.gamma - 1.0) * p.W + 0.25 * (params.gamma - 3.0) * p.Z;
}
double dNZ_dZ(const PhasePoint& p, const FluidParams& params) {
    return -params.r + 0.25 * (params.gamma - 3.0) * p.W - params.gamma * p.Z;
}

double barrier_combination_us(double U, double S, const FluidParams& params) {
    const double g = params.gamma, r = params.r;
    return 0.5 * (g - 1.0) * S * S * (3.0 * (g - 1.0) * U + 2.0 * r - 2.0)
         - 2.0 * U * (U + 1.0) * (r + U);
}

double xi1(const PhasePoint& p, const FluidParams& params) {
    const PhasePolys v = eval_phase_polynomials(p, params);
    const double a = params.alpha;
    return v.D_W * v.D_W * v.D_Z + 0.5 * a * v.N_W * v.D_Z - 0.5 * a * v.N_Z * v.D_W;
}

double xi2(const PhasePoint& p, const FluidParams& params) {
    const PhasePolys v = eval_phase_polynomials(p, params);
    return v.N_Z * v.D_W - v.N_W * v.D_Z;
}

double xi2_over_s_us(double U, double S, const FluidParams& params) {
    const double g = params.gamma, r = params.r;
    return r * (2.0 - (g - 3.0) * U) + U * (2.0 * g * U + 3.0 * g - 1.0)
         - 0.5 * (g - 1.0) * (g - 1.0) * S * S;
}

double r_star(double gamma) {
    if (!(gamma > 1.0)) throw OutOfRange("gamma must be > 1");
    if (gamma < 5.0 / 3.0) {
        const double t = 1.0 + std::sqrt(2.0 / (gamma - 1.0));
        return 1.0 + 2.0 / (t * t);
    }
    return (3.0 * gamma - 1.0) / (2.0 + std::sqrt(3.0) * (gamma - 1.0));
}

double dz_at_pstar_threshold(double gamma) {
    if (!(gamma > 1.0)) throw OutOfRange("gamma must be > 1");
    return (3.0 * gamma - 1.0) / (2.0 + std::sqrt(3.0) * (gamma - 1.0));
}

SonicData sonic_data(const FluidParams& params) {
    const double g = params.gamma, r = params.r;
    const double gm1 = g - 1.0;
    const double denom = 4.0 * gm1 * gm1;

    const double rad1 = g * g * (r - 3.0) * (r - 3.0)
                      - 2.0 * g * (3.0 * r * r - 6.0 * r + 7.0)
                      + (9.0 * r * r - 14.0 * r + 9.0);
    if (rad1 < 0.0) throw NegativeRadicand("R1 radicand negative at gamma=" + std::to_string(g) + " r=" + std::to_string(r));
    const double R1 = std::sqrt(rad1);

    SonicData sd;
    sd.R1 = R1;

    const double common_W = g * g * r - 3.0 * g * g - 2.0 * g * r + 10.0 * g - 3.0 * r - 3.0;
    const double common_Z = g * g * r - 3.0 * g * g - 6.0 * g * r + 6.0 * g + 9.0 * r - 7.0;
    sd.P_s.W = (common_W + (g + 1.0) * R1) / denom;
    sd.P_s.Z = (common_Z + (g - 3.0) * R1) / denom;
    sd.P_s_bar.W = (common_W - (g + 1.0) * R1) / denom;
    sd.P_s_bar.Z = (common_Z + (3.0 - g) * R1) / denom;

    const double s3 = std::sqrt(3.0);
    sd.P_star.W = 2.0 * (s3 - 1.0) * r / (3.0 * g - 1.0);
    sd.P_star.Z = -2.0 * (1.0 + s3) * r / (3.0 * g - 1.0);

    sd.W1 = (g * (-3.0 * (R1 + 6.0) - 3.0 * g * (r - 3.0) + 2.0 * r) + R1 + 5.0 * r + 5.0) / denom;

    const double rad2 = g * ((76.0 - 27.0 * g) * g - 71.0)
                      - (3.0 * g - 5.0) * ((g - 5.0) * g + 2.0) * r * r
                      + (g * (g * (18.0 * g - 52.0) + 50.0) - 8.0) * r
                      + R1 * (9.0 * (g - 2.0) * g + ((2.0 - 3.0 * g) * g + 5.0) * r + 5.0)
                      + 18.0;
    if (rad2 < 0.0) throw NegativeRadicand("R2 radicand negative at gamma=" + std::to_string(g) + " r=" + std::to_string(r));
    const double R2 = std::sqrt(rad2) / gm1;
    sd.R2 = R2;

    const double z1_num_base = -(3.0 * g * g * g - 7.0 * g * g + g + 11.0) * r
                             + g * (g * (9.0 * g - 3.0 * R1 - 25.0) + 10.0 * R1 + 27.0)
                             - 3.0 * R1 - 3.0;
    const double z1_den = denom * (g + 1.0);
    // R2 enters as -4 gamma (gamma-1) R2 + 4 (gamma-1) R2 = -4 (gamma-1)^2 R2.
    sd.Z1 = (z1_num_base - 4.0 * gm1 * gm1 * R2) / z1_den;
    sd.Z1_other = (z1_num_base + 4.0 * gm1 * gm1 * R2) / z1_den;
    return sd;
}

namespace {

double rel_dz(const PhasePoint& p, const FluidParams& params) {
    const double g = params.gamma;
    const double scale = 1.0 + std::fabs(0.25 * (3.0 - g) * p.W) + std::fabs(0.25 * (1.0 + g) * p.Z);
    return std::fabs(eval_phase_polynomials(p, params).D_Z) / scale;
}

double rel_poly(double value, double a, double b, double c, double d) {
    const double scale = std::fabs(a) + std::fabs(b) + std::fabs(c) + std::fabs(d) + 1e-300;
    return std::fabs(value) / scale;
}

double rel_nz(const PhasePoint& p, const FluidParams& params) {
    const double g = params.gamma, r = params.r;
    const PhasePolys v = eval_phase_polynomials(p, params);
    return rel_poly(v.N_Z, r * p.Z, 0.25 * (g - 1.0) * p.W * p.W,
                    0.25 * (g - 3.0) * p.W * p.Z, 0.5 * g * p.Z * p.Z);
}

double rel_nw(const PhasePoint& p, const FluidParams& params) {
    const double g = params.gamma, r = params.r;
    const PhasePolys v = eval_phase_polynomials(p, params);
    return rel_poly(v.N_W, r * p.W, 0.25 * (g - 1.0) * p.Z * p.Z,
                    0.25 * (g - 3.0) * p.W * p.Z, 0.5 * g * p.W * p.W);
}

} // namespace

double SonicResiduals::max() const {
    double m = nz_ps;
    for (double v : {dz_ps, nz_psbar, dz_psbar, nw_pstar, nz_pstar}) m = std::fmax(m, v);
    return m;
}

SonicResiduals sonic_residuals(const SonicData& sd, const FluidParams& params) {
    SonicResiduals r;
    r.nz_ps = rel_nz(sd.P_s, params);
    r.dz_ps = rel_dz(sd.P_s, params);
    r.nz_psbar = rel_nz(sd.P_s_bar, params);
    r.dz_psbar = rel_dz(sd.P_s_bar, params);
    r.nw_pstar = rel_nw(sd.P_star, params);
    r.nz_pstar = rel_nz(sd.P_star, params);
    return r;
}

AdmissibilityReport admissibility(const FluidParams& params) {
    AdmissibilityReport rep;
    const double rs = r_star(params.gamma);
    rep.margin_r_star = rs - params.r;
    rep.margin_sqrt3 = std::sqrt(3.0) - params.r;
    rep.margin_two_inv = 2.0 - 1.0 / params.gamma - params.r;
    rep.delta_dis = params.delta_dis;
    rep.in_range_r = params.r < rs;
    rep.rough_bounds = rep.margin_sqrt3 > 0.0 && rep.margin_two_inv > 0.0;
    rep.ns_ok = params.delta_dis > 0.0;
    rep.admissible = rep.in_range_r && rep.rough_bounds && params.r > 1.0;
    return rep;
}

std::vector<InequalityCheck> auxiliary_inequalities(const FluidParams& params) {
    const double g = params.gamma, r = params.r;
    if (!(r > 1.0 && r < r_star(g)))
        throw OutOfRange("auxiliary inequalities need 1 < r < r_star(gamma)");

    const SonicData sd = sonic_data(params);
    const double W0 = sd.P_s.W, Z0 = sd.P_s.Z, R1 = sd.R1;
    const double Ups = sd.P_s.U();
    const double Upsb = sd.P_s_bar.U();
    const double Upst = sd.P_star.U();

    std::vector<InequalityCheck> out;
    auto add = [&out](const std::string& name, double value, bool holds) {
        out.push_back({name, value, holds});
    };

    const double i1 = sd.W1 + sd.Z1;
    add("W1+Z1<0", i1, i1 < 0.0);

    const double i2 = 0.25 * (g * (r - 1.0) + r * (2.0 * Z0 - 1.0) + 2.0 * W0 + 5.0);
    add("dZ_Xi1_at_Ps>0", i2, i2 > 0.0);

    const double i3 = 0.125 * (g * g * (-r + 3.0 * Z0 + 2.0) + 4.0 * g * r - 3.0 * r
                               + 12.0 * W0 + 9.0 * Z0 + 22.0);
    add("d2Z_Xi1_at_Ps>0", i3, i3 > 0.0);

    const double i4 = 3.0 * g * g * (r - 3.0) + g * (-14.0 * r - 3.0 * R1 + 22.0)
                    + 15.0 * r + 5.0 * R1 - 17.0;
    add("Xi3_slope_comb<0", i4, i4 < 0.0);

    const double u_upper = -2.0 * (r - 1.0) / (3.0 * (g - 1.0));
    const bool i5_holds = (-1.0 < Ups) && (Ups < u_upper) && (u_upper < 0.0);
    add("-1<U(Ps)<-2(r-1)/(3(g-1))<0", Ups, i5_holds);

    const bool i6_holds = (-1.0 < Upsb) && (Upsb < 0.0);
    add("-1<U(Psbar)<0", Upsb, i6_holds);

    const double i7 = -1.0 + 3.0 * r + g * (3.0 - r + 4.0 * Upst);
    bool i7_holds = i7 > 0.0;
    double i7_value = i7;
    const double dz_pstar = eval_phase_polynomials(sd.P_star, params).D_Z;
    if (dz_pstar < 0.0) {
        // P_star lies left of the D_Z = 0 line; the barrier argument then
        // needs the same sign condition at U(P_s_bar) as well.
        const double i7b = -1.0 + 3.0 * r + g * (3.0 - r + 4.0 * Upsb);
        i7_holds = i7_holds && i7b > 0.0;
        i7_value = std::min(i7, i7b);
    }
    add("-1+3r+g(3-r+4U)>0", i7_value, i7_holds);

    return out;
}

} // namespace implo
