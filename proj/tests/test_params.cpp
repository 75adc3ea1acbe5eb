#include "doctest.h"

#include <cmath>
#include <random>

#include "implo/params.hpp"

using namespace implo;

TEST_CASE("phase polynomials at the trivial roots") {
    auto p = FluidParams::make(1.7, 1.2);
    auto v0 = eval_phase_polynomials({0.0, 0.0}, p);
    CHECK(v0.N_W == 0.0);
    CHECK(v0.N_Z == 0.0);
    CHECK(v0.D_W == 1.0);
    CHECK(v0.D_Z == 1.0);

    auto vd = eval_phase_polynomials({-p.r, -p.r}, p);
    CHECK(std::fabs(vd.N_W) < 1e-14);
    CHECK(std::fabs(vd.N_Z) < 1e-14);
}

TEST_CASE("swapping W and Z swaps the polynomial pairs exactly") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> d(-3.0, 3.0);
    auto p = FluidParams::make(1.4, 1.15);
    for (int i = 0; i < 200; ++i) {
        PhasePoint a{d(rng), d(rng)};
        PhasePoint b{a.Z, a.W};
        auto va = eval_phase_polynomials(a, p);
        auto vb = eval_phase_polynomials(b, p);
        CHECK(va.N_W == vb.N_Z);
        CHECK(va.N_Z == vb.N_W);
        CHECK(va.D_W == vb.D_Z);
        CHECK(va.D_Z == vb.D_W);
    }
}

TEST_CASE("(U,S) form of N_W D_Z + N_Z D_W matches the (W,Z) product form") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> d(-2.0, 2.0);
    for (double gamma : {1.2, 5.0 / 3.0, 2.4}) {
        auto p = FluidParams::make(gamma, 1.12);
        for (int i = 0; i < 300; ++i) {
            PhasePoint a{d(rng), d(rng)};
            auto v = eval_phase_polynomials(a, p);
            double lhs = v.N_W * v.D_Z + v.N_Z * v.D_W;
            double rhs = barrier_combination_us(a.U(), a.S(), p);
            CHECK(std::fabs(lhs - rhs) < 1e-12 * (1.0 + std::fabs(lhs)));
        }
    }
}

TEST_CASE("Xi2/S identity in (U,S) variables") {
    std::mt19937 rng(13);
    std::uniform_real_distribution<double> d(-1.5, 1.5);
    auto p = FluidParams::make(1.4, 1.18);
    for (int i = 0; i < 300; ++i) {
        PhasePoint a{d(rng), d(rng)};
        if (std::fabs(a.S()) < 1e-3) continue;
        double lhs = xi2(a, p) / a.S();
        double rhs = xi2_over_s_us(a.U(), a.S(), p);
        CHECK(std::fabs(lhs - rhs) < 1e-12 * (1.0 + std::fabs(lhs)));
    }
}

TEST_CASE("sonic point package solves its defining equations") {
    auto p = FluidParams::make(5.0 / 3.0, 1.15);
    auto sd = sonic_data(p);
    auto res = sonic_residuals(sd, p);
    CHECK(res.max() < 1e-10);

    // P_s is the rightmost root; the gap is 2(gamma+1)R1 / (4(gamma-1)^2).
    double gap = sd.P_s.W - sd.P_s_bar.W;
    double expected = 2.0 * (p.gamma + 1.0) * sd.R1 / (4.0 * (p.gamma - 1.0) * (p.gamma - 1.0));
    CHECK(gap == doctest::Approx(expected).epsilon(1e-13));
    CHECK(gap > 0.0);
}

TEST_CASE("W1 equals N_W/D_W at the sonic point") {
    for (double gamma : {1.3, 1.4, 5.0 / 3.0, 2.2}) {
        auto p = FluidParams::make(gamma, 1.0 + 0.6 * (r_star(gamma) - 1.0));
        auto sd = sonic_data(p);
        auto v = eval_phase_polynomials(sd.P_s, p);
        CHECK(sd.W1 == doctest::Approx(v.N_W / v.D_W).epsilon(1e-11));
    }
}

TEST_CASE("Z1 branches both solve the degenerate first-order relation") {
    auto p = FluidParams::make(1.4, 1.18);
    auto sd = sonic_data(p);
    for (double z1 : {sd.Z1, sd.Z1_other}) {
        // Z1 grad(D_Z).(W1,Z1) = grad(N_Z).(W1,Z1)
        double dz1 = 0.25 * (3.0 - p.gamma) * sd.W1 + 0.25 * (1.0 + p.gamma) * z1;
        double nz1 = dNZ_dW(sd.P_s, p) * sd.W1 + dNZ_dZ(sd.P_s, p) * z1;
        CHECK(std::fabs(z1 * dz1 - nz1) < 1e-9 * (1.0 + std::fabs(nz1)));
    }
    CHECK(sd.Z1 != sd.Z1_other);
    CHECK(sd.W1 + sd.Z1 < 0.0);
}

TEST_CASE("r_star closed forms") {
    const double s3 = std::sqrt(3.0);
    CHECK(std::fabs(r_star(5.0 / 3.0) - (3.0 - s3)) < 1e-12);
    // both branch formulas agree at gamma = 5/3
    double t = 1.0 + std::sqrt(2.0 / (5.0 / 3.0 - 1.0));
    double lower_branch = 1.0 + 2.0 / (t * t);
    double upper_branch = (3.0 * 5.0 / 3.0 - 1.0) / (2.0 + s3 * (5.0 / 3.0 - 1.0));
    CHECK(std::fabs(lower_branch - upper_branch) < 1e-12);

    CHECK(r_star(1.4) == doctest::Approx((7.0 - std::sqrt(5.0)) / 4.0).epsilon(1e-12));
    CHECK(r_star(3.0) == doctest::Approx(2.0 * (s3 - 1.0)).epsilon(1e-12));

    // continuity across the branch junction
    CHECK(std::fabs(r_star(5.0 / 3.0 - 1e-6) - r_star(5.0 / 3.0 + 1e-6)) < 1e-5);
}

TEST_CASE("admissibility report examples") {
    auto rep = admissibility(FluidParams::make(1.4, 1.18, 1));
    CHECK(rep.in_range_r);
    CHECK(rep.admissible);
    CHECK(rep.delta_dis == doctest::Approx(0.08).epsilon(1e-12));
    CHECK(rep.ns_ok);

    // (1.4, 7/6) sits exactly on delta_dis = 0; the sign there is a coin
    // flip in floating point, so probe the boundary and just below it.
    auto boundary = admissibility(FluidParams::make(1.4, 7.0 / 6.0, 1));
    CHECK(std::fabs(boundary.delta_dis) < 1e-13);
    auto below = admissibility(FluidParams::make(1.4, 7.0 / 6.0 - 1e-9, 1));
    CHECK(below.delta_dis < 0.0);
    CHECK_FALSE(below.ns_ok);

    auto outside = admissibility(FluidParams::make(1.4, 1.25));
    CHECK_FALSE(outside.in_range_r);
    CHECK_FALSE(outside.admissible);
}

TEST_CASE("dz threshold for P_star") {
    const double s3 = std::sqrt(3.0);
    CHECK(dz_at_pstar_threshold(5.0 / 3.0) == doctest::Approx(r_star(5.0 / 3.0)).epsilon(1e-13));
    CHECK(dz_at_pstar_threshold(3.0) == doctest::Approx(r_star(3.0)).epsilon(1e-13));
    double thr = dz_at_pstar_threshold(1.2);
    CHECK(thr == doctest::Approx(2.6 / (2.0 + 0.2 * s3)).epsilon(1e-13));
    CHECK(thr < 1.111); // figure parameters sit above the threshold

    auto p = FluidParams::make(1.2, 1.111);
    auto sd = sonic_data(p);
    CHECK(eval_phase_polynomials(sd.P_star, p).D_Z < 0.0);
}

TEST_CASE("auxiliary inequalities at reference parameters") {
    for (auto [gamma, r] : {std::pair{5.0 / 3.0, 1.15}, {1.2, 1.111}, {1.4, 1.18}, {3.0, 1.3}}) {
        auto checks = auxiliary_inequalities(FluidParams::make(gamma, r));
        REQUIRE(checks.size() == 7);
        for (const auto& c : checks) {
            INFO("gamma=", gamma, " r=", r, " ", c.name, " value=", c.value);
            CHECK(c.holds);
        }
    }

    // item 5 bracket at (1.4, 1.18): U(P_s) strictly inside (-1, -0.15)
    auto sd = sonic_data(FluidParams::make(1.4, 1.18));
    CHECK(sd.P_s.U() > -1.0);
    CHECK(sd.P_s.U() < -2.0 * 0.18 / (3.0 * 0.4));
}

TEST_CASE("auxiliary inequalities reject out-of-range r") {
    CHECK_THROWS_AS(auxiliary_inequalities(FluidParams::make(1.4, 1.25)), OutOfRange);
}

TEST_CASE("negative radicand outside the family validity") {
    CHECK_THROWS_AS(sonic_data(FluidParams::make(5.0 / 3.0, 1.34)), NegativeRadicand);
}

TEST_CASE("admissible grid: residuals, auxiliary signs, sonic ordering") {
    for (double gamma = 1.05; gamma < 3.001; gamma += 0.05) {
        const double rs = r_star(gamma);
        for (int k = 1; k <= 20; ++k) {
            const double r = 1.0 + (rs - 1.0) * k / 21.0;
            auto p = FluidParams::make(gamma, r);
            auto sd = sonic_data(p);
            auto res = sonic_residuals(sd, p);
            INFO("gamma=", gamma, " r=", r);
            CHECK(res.max() < 1e-10);
            CHECK(sd.P_s.W > sd.P_s_bar.W);
            for (const auto& c : auxiliary_inequalities(p)) {
                INFO(c.name, " value=", c.value);
                CHECK(c.holds);
            }
        }
    }
}
