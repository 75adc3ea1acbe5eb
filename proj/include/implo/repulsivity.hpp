#ifndef IMPLO_REPULSIVITY_HPP
#define IMPLO_REPULSIVITY_HPP

// Certification of the pointwise, integrated and phase-portrait inequalities
// the stability argument rests on, evaluated on a computed profile.

#include <string>
#include <vector>

#include "implo/profile.hpp"

namespace implo {

struct BarrierCheck {
    std::string name;
    double min_margin = 0.0;
    double location_xi = 0.0; // xi of the minimizing sample
    bool holds = false;
};

struct RepulsivityReport {
    // min over the grid of 1 + dU_bar/dR - alpha |dS_bar/dR|
    double eta_radial = 0.0;
    // min over the grid of 1 + U_bar/R - alpha |dS_bar/dR|
    double eta_angular = 0.0;
    // min over R > 1 of (R + U_bar - alpha S_bar) / (R - 1)
    double eta_integrated = 0.0;
    // both pointwise margins approach 1 + w1 as R -> 0 and 1 as R -> inf
    double limit_origin = 0.0;
    double limit_farfield_radial = 0.0, limit_farfield_angular = 0.0;
    // |R + U_bar - alpha S_bar| at R = 1 (D_Z(P_s) = 0 restated)
    double sonic_identity = 0.0;
    // limit of the integrated ratio as R -> 1+
    double integrated_limit_at_1 = 0.0;
    std::vector<BarrierCheck> barrier_checks;
    bool dz_pattern_ok = false;

    bool certified(double margin_tol = -1e-9) const {
        if (!(eta_radial > 0.0 && eta_angular > 0.0 && eta_integrated > 0.0))
            return false;
        if (!dz_pattern_ok) return false;
        for (const auto& b : barrier_checks)
            if (b.min_margin < margin_tol) return false;
        return true;
    }
};

// Pointwise margins and their limiting values (partial report).
RepulsivityReport check_pointwise_repulsivity(const Profile& prof, const FluidParams& params);

// min over R > 1 of (R + U_bar - alpha S_bar)/(R - 1); throws GridTooCoarse
// if fewer than 64 samples lie in R in (1, 2).
double check_integrated_repulsivity(const Profile& prof, const FluidParams& params);

// The five trajectory barrier checks of the phase-portrait argument.
std::vector<BarrierCheck> check_phase_barriers(const Profile& prof, const SonicData& sd,
                                               const FluidParams& params);

// Full report.
RepulsivityReport repulsivity_report(const Profile& prof, const FluidParams& params);

struct C0Condition {
    std::string name;
    double value = 0.0; // evaluated norm
    double bound = 0.0; // required upper bound
    bool holds = false;
};

struct C0Report {
    double C0 = 0.0, s0 = 0.0;
    double C1 = 0.0, C2 = 100.0, C = 100.0;
    std::vector<C0Condition> conditions;
    bool all_hold = false;
    // smallest C0 on the doubling grid {10, 20, 40, ...} passing all
    // conditions at this s0 (the truncation support makes this finite)
    double smallest_passing_C0 = 0.0;
    // parameter-only threshold from the far-field decay model: the sup
    // conditions hold for any C0 above this regardless of the truncation
    double decay_threshold_C0 = 0.0;
};

C0Report lemma_c0_conditions(const Profile& prof, double C0, double s0);

} // namespace implo

#endif
