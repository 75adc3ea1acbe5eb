#ifndef IMPLO_CUTOFFS_HPP
#define IMPLO_CUTOFFS_HPP

// Smooth bump machinery shared by the truncation, the operator cutoffs and
// the energy weight. All derivatives are analytic; the plateaus and supports
// are exact (the transition branch is only entered strictly inside it).

#include <cstddef>

namespace implo {

// 1 for t <= 0, 0 for t >= 1, C-infinity monotone in between.
double smooth_step(double t);
double smooth_step_deriv(double t);

// chi1 == 1 on [0, C0], supported in [0, 3C0/2];
// chi2 == 1 on [0, 2C0], supported in [0, 5C0/2], > 0 inside.
double chi1(double R, double C0);
double chi1_deriv(double R, double C0);
double chi2(double R, double C0);
double chi2_deriv(double R, double C0);

// Radial truncation bump: 1 on [0, 1/2], supported in [0, 1], |d/dx| <= 10.
double truncation_bump(double x);
double truncation_bump_deriv(double x);

// Energy weight: 1 on [0, R0], R^{2(1-eta)} / (2 R0^{2(1-eta)}) beyond 4 R0,
// C^2 monotone quintic blend on (R0, 4 R0).
double weight_phi(double R, double R0, double eta);

struct CutoffConfig {
    double C0 = 25.0;
    double J = 40.0;
    double delta_g = 0.1;
    std::size_t grid_n = 1024;
};

} // namespace implo

#endif
