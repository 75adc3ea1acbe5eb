#ifndef IMPLO_PROFILE_HPP
#define IMPLO_PROFILE_HPP

// Construction of the self-similar profile: Taylor seed at the sonic point
// (placed at R = 1), bidirectional phase-portrait integration in xi = log R,
// physical tables, and the near-origin / far-field fits.

#include <string>
#include <vector>

#include "implo/ode.hpp"
#include "implo/params.hpp"
#include "implo/series.hpp"

namespace implo {

struct TaylorSeed {
    int order = 6;
    std::vector<double> coeffs_W, coeffs_Z; // index k multiplies xi^k
    double step_eps = 1e-3;

    double eval_W(double xi) const;
    double eval_Z(double xi) const;
    double eval_dW(double xi) const;
    double eval_dZ(double xi) const;
    double eval_U(double xi) const { return 0.5 * (eval_W(xi) + eval_Z(xi)); }
    double eval_S(double xi) const { return 0.5 * (eval_W(xi) - eval_Z(xi)); }
    double eval_dU(double xi) const { return 0.5 * (eval_dW(xi) + eval_dZ(xi)); }
    double eval_dS(double xi) const { return 0.5 * (eval_dW(xi) - eval_dZ(xi)); }
};

// Higher coefficients by differentiating dW/dxi * D_W = N_W and
// dZ/dxi * D_Z = N_Z order by order; the Z relation is degenerate at the
// sonic point and its order-k equation determines z_k one order later.
TaylorSeed taylor_seed(const SonicData& sd, const FluidParams& params, int order,
                       bool other_z1_branch = false);

// Max residual of the truncated seed in the two defining relations at xi.
double taylor_seed_residual(const TaylorSeed& seed, const FluidParams& params, double xi);

struct Profile {
    FluidParams params;
    TaylorSeed seed;
    double xi_min = -8.0, xi_max = 8.0, tol = 1e-10;

    std::vector<double> xi, W, Z;                     // trajectory tables
    std::vector<double> R, U_bar, S_bar, dU_dR, dS_dR; // physical tables

    double w0_fit = 0.0;   // near-origin amplitude, R*S -> w0
    double w1_fit = 0.0;   // U -> w1 as R -> 0
    double w3_fit = 0.0;   // R^2 coefficient of U near the origin
    double farfield_exponent_fit = 0.0; // slope of log|U_bar| vs log R
    double farfield_amp_u = 0.0;        // |U_bar| ~ amp * R^exponent
    double farfield_amp_s = 0.0;        // |S_bar| ~ amp * R^exponent

    // The sonic point is a degenerate node (slow/fast rate ratio mu2/mu1 can
    // exceed 30) and the profile is its slow branch, so plain shooting off a
    // low-order seed cannot stay on the branch. Construction:
    //   core  — internal high-order series at the sonic point, valid on
    //           |xi| <= core_radius (chosen so the series tail is ~1e-11);
    //   left  — integration from the near-origin asymptotics (the attracting
    //           side), shifted in xi so its sonic arrival matches the core:
    //           branch(xi) = left(xi + left_shift);
    //   right — the better of two candidates, judged by an independent
    //           finite-difference defect across the core seam: (a) forward
    //           integration from the series edge (works when the series
    //           radius clears the node zone), (b) backward integration from
    //           the far field anchored at the sonic arrival (works when the
    //           fan-out ratio is mild): branch(xi) = right(xi + right_shift).
    // State is (U, S) = ((W+Z)/2, (W-Z)/2); near the origin W and Z grow like
    // w0/R while U stays O(1), so (U, S) avoids the cancellation.
    TaylorSeed core;
    double core_radius = 0.0;
    Dopri5<2>::Solution left, right;
    double left_shift = 0.0, right_shift = 0.0;
    // Defect of the selected right candidate near the sonic seam, which
    // candidate won ("series-forward" or "farfield-backward"), and the
    // defects of both candidates (-1 when a candidate was unavailable).
    double right_defect = 0.0;
    std::string right_method;
    double defect_series_forward = -1.0, defect_farfield_backward = -1.0;

    struct Point {
        double R, U_bar, S_bar, dU_dR, dS_dR;
    };

    // Trajectory and physical values at arbitrary xi = log R inside the
    // integrated range (Taylor core for |xi| <= step_eps).
    void eval_xi_us(double x, double& u, double& s) const;
    void eval_xi_us_deriv(double x, double& du, double& ds) const;
    void eval_xi(double x, double& w, double& z) const;
    Point at_R(double Rq) const;

    bool covers(double Rmax) const { return Rmax <= std::exp(xi_max) * (1.0 + 1e-12); }
};

Profile integrate_profile(const TaylorSeed& seed, const FluidParams& params,
                          double xi_min, double xi_max, double tol,
                          std::size_t grid_n = 4096);

// Stationarity residual of the physical tables under the radial profile
// equations, with derivatives taken by finite differences of the stored
// tables (independent of the ODE right-hand side that built them).
double profile_residual(const Profile& prof, const FluidParams& params);

// Cubic-in-R coefficient of W near the origin for a given amplitude w0.
double w3_nearorigin(const FluidParams& params, double w0);

// d(U, S)/dxi of the autonomous phase-portrait system in (U, S) variables.
std::array<double, 2> us_rhs(const FluidParams& params, double U, double S);

} // namespace implo

#endif
