#ifndef IMPLO_PARAMS_HPP
#define IMPLO_PARAMS_HPP

// Closed-form objects of the (W, Z) phase portrait for the self-similar
// compressible Euler profiles: admissible parameter ranges, the sonic
// points, the first Taylor coefficients there, and the sign conditions
// the construction requires.

#include <array>
#include <string>
#include <vector>

#include "implo/errors.hpp"

namespace implo {

struct FluidParams {
    double gamma = 0.0; // adiabatic exponent, > 1
    double alpha = 0.0; // (gamma - 1) / 2
    double r = 0.0;     // self-similar exponent, > 1
    int nu = 0;         // 0 = Euler, 1 = Navier-Stokes
    double c_dis = 0.0;     // r^{1 + 1/alpha} / alpha^{1/alpha}
    double delta_dis = 0.0; // (r - 1)/alpha + r - 2

    static FluidParams make(double gamma, double r, int nu = 0);
};

struct PhasePoint {
    double W = 0.0; // U + S
    double Z = 0.0; // U - S

    double U() const { return 0.5 * (W + Z); }
    double S() const { return 0.5 * (W - Z); }
};

// The four phase-portrait polynomials, dW/dxi = N_W/D_W, dZ/dxi = N_Z/D_Z.
struct PhasePolys {
    double N_W, D_W, N_Z, D_Z;
};

PhasePolys eval_phase_polynomials(const PhasePoint& p, const FluidParams& params);

// Derivatives of the polynomials, used by barrier normals and Taylor solves.
double dNW_dW(const PhasePoint& p, const FluidParams& params);
double dNW_dZ(const PhasePoint& p, const FluidParams& params);
double dNZ_dW(const PhasePoint& p, const FluidParams& params);
double dNZ_dZ(const PhasePoint& p, const FluidParams& params);

// N_W D_Z + N_Z D_W expressed through (U, S); identical to the (W, Z) form.
double barrier_combination_us(double U, double S, const FluidParams& params);

// Xi_1 = D_W^2 D_Z + (alpha/2) N_W D_Z - (alpha/2) N_Z D_W
// Xi_2 = N_Z D_W - N_W D_Z   (and Xi_2 / S in (U, S) variables)
double xi1(const PhasePoint& p, const FluidParams& params);
double xi2(const PhasePoint& p, const FluidParams& params);
double xi2_over_s_us(double U, double S, const FluidParams& params);

struct SonicData {
    double R1 = 0.0; // discriminant-type radical
    double R2 = 0.0; // radical entering Z1
    PhasePoint P_s;     // rightmost solution of N_Z = D_Z = 0
    PhasePoint P_s_bar; // the other solution
    PhasePoint P_star;  // N_W = N_Z = 0 in the halfplane W > Z
    double W1 = 0.0; // first Taylor coefficient of W at P_s
    double Z1 = 0.0; // first Taylor coefficient of Z at P_s (selected branch)
    double Z1_other = 0.0; // rejected branch, kept for negative tests
};

SonicData sonic_data(const FluidParams& params);

// Relative residuals of the defining equations at the three special points;
// each |value| is normalized by the sum of magnitudes of the polynomial terms.
struct SonicResiduals {
    double nz_ps, dz_ps, nz_psbar, dz_psbar, nw_pstar, nz_pstar;
    double max() const;
};

SonicResiduals sonic_residuals(const SonicData& sd, const FluidParams& params);

// Upper end of the admissible r-range.
double r_star(double gamma);

// (3 gamma - 1) / (2 + sqrt(3)(gamma - 1)); D_Z(P_star) < 0 iff r exceeds it.
double dz_at_pstar_threshold(double gamma);

struct AdmissibilityReport {
    bool in_range_r = false; // r < r_star(gamma)
    bool rough_bounds = false; // r < sqrt(3) and r < 2 - 1/gamma
    bool ns_ok = false;        // delta_dis > 0
    bool admissible = false;   // in_range_r && rough_bounds && r > 1
    double margin_r_star = 0.0;   // r_star - r
    double margin_sqrt3 = 0.0;    // sqrt(3) - r
    double margin_two_inv = 0.0;  // 2 - 1/gamma - r
    double delta_dis = 0.0;
};

AdmissibilityReport admissibility(const FluidParams& params);

struct InequalityCheck {
    std::string name;
    double value = 0.0; // the signed quantity whose sign the lemma asserts
    bool holds = false;
};

// The seven sign conditions at the sonic points; requires 1 < r < r_star.
std::vector<InequalityCheck> auxiliary_inequalities(const FluidParams& params);

} // namespace implo

#endif
