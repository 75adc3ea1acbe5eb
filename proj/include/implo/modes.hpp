#ifndef IMPLO_MODES_HPP
#define IMPLO_MODES_HPP

// Per-spherical-harmonic-degree discretization of the cut-off linearized
// operator and its spectrum. Unknowns per radial point: (W, Z, U_Psi, U_Phi)
// for degree >= 1, (W, Z) for degree 0; first-order upwind transport.

#include <complex>
#include <string>
#include <vector>

#include "implo/cutoffs.hpp"
#include "implo/linalg.hpp"
#include "implo/profile.hpp"

namespace implo {

struct ModeSystem {
    int n1 = 0;
    CutoffConfig cfg;
    FluidParams params;
    int block = 4;        // unknowns per radial point (2 for n1 = 0)
    std::size_t grid_n = 0;
    double h = 0.0;       // radial spacing; grid point i sits at (i+1) h
    std::vector<double> radial_grid;
    // coefficient tables along the grid
    std::vector<double> chi1_tab, chi2_tab, U_bar, S_bar, dU_dR, dS_dR;
    BandMat A;

    int dim() const { return static_cast<int>(grid_n) * block; }
    std::vector<double> dense() const { return A.dense(); }
};

// Standard: the cut-off operator; Chi2Zero: the chi2 == 0 test
// configuration (pure damping); Extended: no cutoffs and no damping (the
// linearized operator itself, used by the truncated-vs-extended comparison).
enum class AssembleVariant { Standard, Chi2Zero, Extended };

ModeSystem assemble_mode(const Profile& prof, const CutoffConfig& cfg,
                         const FluidParams& params, int n1,
                         AssembleVariant variant = AssembleVariant::Standard);

struct Spectrum {
    int n1 = 0;
    std::vector<cplx> eigenvalues;      // all (dense) or validated (arnoldi)
    std::vector<cplx> unstable;         // Re > -delta_g / 2
    int dim_unstable = 0;
    std::string method;
};

enum class EigMethod { Auto, Dense, Arnoldi };

Spectrum mode_spectrum(const ModeSystem& ms, const CutoffConfig& cfg,
                       EigMethod method = EigMethod::Auto);

// Spherical energy table E_{n,k}(R) for a stacked mode vector; k <= 2.
std::vector<double> spherical_energy(const ModeSystem& ms, const std::vector<cplx>& vec,
                                     int k);

// Re<A v, v> / <v, v> in the mode restriction of the m = 0 inner product.
double rayleigh_probe(const ModeSystem& ms, const std::vector<cplx>& vec);

// Discretized defect of the spherical-energy differential identity along an
// eigenvector; reported diagnostic (sup over the chi2 >= 1/2 region).
double energy_identity_residual(const ModeSystem& ms, const std::vector<cplx>& vec,
                                cplx lambda);

} // namespace implo

#endif
