#ifndef IMPLO_EVOLVE_HPP
#define IMPLO_EVOLVE_HPP

// Radial method-of-lines evolution of the self-similar system, coordinate
// transforms between physical and self-similar descriptions, truncation
// error terms, and the truncated-vs-extended linear comparison.

#include <vector>

#include "implo/cutoffs.hpp"
#include "implo/modes.hpp"
#include "implo/profile.hpp"

namespace implo {

struct TransformSpec {
    double T = 1.0; // blow-up time
    double r = 1.2; // self-similar exponent
};

struct SelfSimPoint {
    double y = 0.0, s = 0.0, U = 0.0, S = 0.0;
};

// u, sigma at (x, t) -> self-similar (y, s, U, S); throws TimeBeyondBlowup.
SelfSimPoint to_selfsimilar(double u, double sigma, double x, double t,
                            const TransformSpec& spec);
// inverse direction: (U, S) at (y, s) -> physical (u, sigma, x, t)
struct PhysicalPoint {
    double x = 0.0, t = 0.0, u = 0.0, sigma = 0.0;
};
PhysicalPoint from_selfsimilar(double U, double S, double y, double s,
                               const TransformSpec& spec);

double sigma_from_rho(double rho, double alpha); // rho^alpha / alpha
double rho_from_sigma(double sigma, double alpha);

struct SimState {
    double s = 0.0;
    std::vector<double> R_grid; // uniform on [0, R_max]
    std::vector<double> U, S;
    FluidParams params;
    double torus_L = 0.0;      // > 0: physical half-period, domain e^s L
    double weight_R0 = 10.0, weight_eta = 0.05;
    double vacuum_floor = 1e-12;
    bool upwind_transport = false;
    bool valid = true;

    double h() const { return R_grid.size() > 1 ? R_grid[1] - R_grid[0] : 0.0; }
};

// Sample the stationary profile onto [0, R_max] with n points.
SimState state_from_profile(const Profile& prof, const FluidParams& params,
                            double R_max, std::size_t n, double s0 = 0.0);

// Right-hand side tables (dU/ds, dS/ds); throws VacuumEncountered when the
// dissipation denominator would dip below the configured floor.
void rhs_selfsimilar(const SimState& state, std::vector<double>& dU,
                     std::vector<double>& dS);

struct EvolveDiagnostics {
    std::vector<double> s, sup_U_dev, sup_S_dev, min_S, E_K, dis_sup;
};

// Explicit adaptive evolution to s_end; deviations are measured against the
// initial state (the truncated profile when initialized from one).
EvolveDiagnostics evolve(SimState& state, double s_end, double cfl = 0.9,
                         double out_every = 0.05);

// Truncation error terms at self-similar time s on the given radii.
struct TruncationTerms {
    std::vector<double> R, E_u, E_s;
};
TruncationTerms truncation_terms(const Profile& prof, const FluidParams& params,
                                 double s, const std::vector<double>& R);

// Evolve the truncated and extended linearizations (degree 0) side by side
// from data agreeing on B(0, C0); reports the sup difference there.
struct TruncatedVsExtended {
    double max_diff_inside_C0 = 0.0;
    double data_scale = 0.0;
    double h = 0.0;
    double bound = 0.0; // 10 h^2 data_scale
    bool within_bound = false;
};
TruncatedVsExtended truncated_vs_extended(const Profile& prof, const CutoffConfig& cfg,
                                          const FluidParams& params, double s_len,
                                          bool outer_data_differs = false);

// First-order weighted energy: integral of (|grad U|^2 + |grad S|^2) phi.
double weighted_energy(const SimState& state);

} // namespace implo

#endif
