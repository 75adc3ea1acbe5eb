#include "doctest.h"

#include <cmath>

#include "implo/cutoffs.hpp"
#include "implo/repulsivity.hpp"

using namespace implo;

namespace {

Profile reference_profile(double gamma, double r) {
    auto p = FluidParams::make(gamma, r);
    auto seed = taylor_seed(sonic_data(p), p, 6);
    return integrate_profile(seed, p, -8.0, 8.0, 1e-10);
}

} // namespace

TEST_CASE("pointwise margins are positive and have the right limits") {
    for (auto [g, r] : {std::pair{5.0 / 3.0, 1.15}, {1.4, 1.18}, {3.0, 1.3}}) {
        auto prof = reference_profile(g, r);
        auto rep = check_pointwise_repulsivity(prof, prof.params);
        INFO("gamma=", g, " eta_r=", rep.eta_radial, " eta_a=", rep.eta_angular);
        CHECK(rep.eta_radial > 0.0);
        CHECK(rep.eta_angular > 0.0);
        CHECK(rep.dz_pattern_ok);
        // both margins tend to 1 + w1 at the origin and 1 far out
        CHECK(rep.limit_origin ==
              doctest::Approx(1.0 - 2.0 * (r - 1.0) / (3.0 * (g - 1.0))).epsilon(1e-3));
        CHECK(std::fabs(rep.limit_farfield_radial - 1.0) < 1e-3);
        CHECK(std::fabs(rep.limit_farfield_angular - 1.0) < 1e-3);
    }
}

TEST_CASE("zero profile has unit margins") {
    Profile zero;
    zero.params = FluidParams::make(1.4, 1.18);
    const std::size_t n = 256;
    zero.xi.resize(n);
    zero.R.resize(n);
    zero.U_bar.assign(n, 0.0);
    zero.S_bar.assign(n, 0.0);
    zero.dU_dR.assign(n, 0.0);
    zero.dS_dR.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        zero.xi[i] = -2.0 + 4.0 * static_cast<double>(i) / (n - 1);
        zero.R[i] = std::exp(zero.xi[i]);
    }
    auto rep = check_pointwise_repulsivity(zero, zero.params);
    CHECK(rep.eta_radial == 1.0);
    CHECK(rep.eta_angular == 1.0);
}

TEST_CASE("integrated repulsivity: FTC bound, sonic identity, far limit") {
    auto prof = reference_profile(1.4, 1.18);
    auto rep = repulsivity_report(prof, prof.params);
    CHECK(rep.eta_integrated > 0.0);
    // the FTC argument bounds the ratio from below by the pointwise margin
    CHECK(rep.eta_integrated >= rep.eta_radial - 1e-9);
    CHECK(rep.sonic_identity <= 1e-8);
    // ratio at the table's outer edge is ~1
    const double R = std::exp(prof.xi_max);
    const auto p = prof.at_R(R);
    CHECK(std::fabs((R + p.U_bar - prof.params.alpha * p.S_bar) / (R - 1.0) - 1.0) < 1e-3);
}

TEST_CASE("integrated repulsivity needs resolution near R=1") {
    auto p = FluidParams::make(1.4, 1.18);
    auto seed = taylor_seed(sonic_data(p), p, 6);
    auto prof = integrate_profile(seed, p, -8.0, 8.0, 1e-10, 128);
    CHECK_THROWS_AS(check_integrated_repulsivity(prof, p), GridTooCoarse);
}

TEST_CASE("phase barriers hold along the trajectory") {
    for (auto [g, r] : {std::pair{5.0 / 3.0, 1.15}, {1.4, 1.18}, {3.0, 1.3}}) {
        auto prof = reference_profile(g, r);
        auto sd = sonic_data(prof.params);
        auto checks = check_phase_barriers(prof, sd, prof.params);
        REQUIRE(checks.size() == 5);
        for (const auto& b : checks) {
            INFO("gamma=", g, " ", b.name, " margin=", b.min_margin, " at xi=", b.location_xi);
            CHECK(b.holds);
        }
        CHECK(repulsivity_report(prof, prof.params).certified());
    }
}

TEST_CASE("Xi1 and Xi2 vanish at the sonic point") {
    for (auto [g, r] : {std::pair{5.0 / 3.0, 1.15}, {1.4, 1.18}}) {
        auto p = FluidParams::make(g, r);
        auto sd = sonic_data(p);
        CHECK(std::fabs(xi1(sd.P_s, p)) < 1e-9);
        CHECK(std::fabs(xi2(sd.P_s, p)) < 1e-9);
    }
}

TEST_CASE("C0 conditions: constant, monotonicity, eventual smallness") {
    auto prof = reference_profile(1.4, 1.18);
    auto rep = lemma_c0_conditions(prof, 20.0, 6.0);
    // C1 from 1/C2 = (32/(r-1)) (1/C1) (1/C2)^{1/20} with C2 = 100
    const double c1 = 32.0 / 0.18 * std::pow(0.01, 0.05) * 100.0;
    CHECK(rep.C1 == doctest::Approx(c1).epsilon(1e-12));
    CHECK(rep.conditions.size() == 4);

    // doubling C0 shrinks every evaluated norm
    auto rep2 = lemma_c0_conditions(prof, 40.0, 6.0);
    for (std::size_t i = 0; i < rep.conditions.size(); ++i)
        CHECK(rep2.conditions[i].value <= rep.conditions[i].value + 1e-15);

    // decay implies some finite passing C0 exists on the doubling grid
    CHECK(rep.smallest_passing_C0 > 0.0);
    CHECK(rep.decay_threshold_C0 > 0.0);
    auto pass = lemma_c0_conditions(prof, rep.smallest_passing_C0, 6.0);
    CHECK(pass.all_hold);
}

TEST_CASE("cutoff building blocks") {
    const double C0 = 25.0;
    CHECK(chi1(0.9 * C0, C0) == 1.0);
    CHECK(chi1(1.6 * C0, C0) == 0.0);
    CHECK(chi2(2.0 * C0, C0) == 1.0);
    CHECK(chi2(2.5 * C0, C0) == 0.0);
    const double mid = chi2(2.4 * C0, C0);
    CHECK(mid > 0.0);
    CHECK(mid < 1.0);
    // (1 - chi1) + chi2 >= 1 pointwise
    for (double R = 0.0; R <= 3.0 * C0; R += 0.01 * C0)
        CHECK((1.0 - chi1(R, C0)) + chi2(R, C0) >= 1.0 - 1e-15);
    // truncation bump: plateau, support, derivative bound
    CHECK(truncation_bump(0.49) == 1.0);
    CHECK(truncation_bump(1.01) == 0.0);
    double worst = 0.0;
    for (double x = 0.0; x <= 1.0; x += 1e-4)
        worst = std::fmax(worst, std::fabs(truncation_bump_deriv(x)));
    CHECK(worst <= 10.0);
    CHECK(worst > 1.0);
}

TEST_CASE("weight phi: plateau, outer law, monotone C2 blend") {
    const double R0 = 10.0, eta = 0.05;
    CHECK(weight_phi(0.5 * R0, R0, eta) == 1.0);
    CHECK(weight_phi(R0, R0, eta) == 1.0);
    const double p = 2.0 * (1.0 - eta);
    for (double R : {4.0 * R0, 6.0 * R0, 20.0 * R0})
        CHECK(weight_phi(R, R0, eta) ==
              doctest::Approx(0.5 * std::pow(R / R0, p)).epsilon(1e-14));
    double prev = 1.0 - 1e-12;
    for (double R = R0; R <= 4.0 * R0; R += 0.001 * R0) {
        const double v = weight_phi(R, R0, eta);
        CHECK(v >= prev - 1e-12);
        prev = v;
    }
    // continuity at the blend ends
    CHECK(std::fabs(weight_phi(R0 * (1 + 1e-9), R0, eta) - 1.0) < 1e-7);
    CHECK(std::fabs(weight_phi(4.0 * R0 * (1 - 1e-9), R0, eta)
                    - 0.5 * std::pow(4.0, p)) < 1e-6);
}
