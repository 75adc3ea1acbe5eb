#include "doctest.h"

#include <cmath>

#include "implo/evolve.hpp"

using namespace implo;

namespace {

const Profile& reference_profile() {
    static Profile prof = [] {
        auto p = FluidParams::make(1.4, 1.18);
        auto seed = taylor_seed(sonic_data(p), p, 6);
        return integrate_profile(seed, p, -8.0, 8.0, 1e-10);
    }();
    return prof;
}

} // namespace

TEST_CASE("transform round trips are identities") {
    TransformSpec spec{0.37, 1.18};
    for (auto [u, sg, x, t] : {std::array{0.4, 1.3, 0.7, 0.1}, {-1.1, 0.2, -2.0, 0.36}}) {
        auto ss = to_selfsimilar(u, sg, x, t, spec);
        auto back = from_selfsimilar(ss.U, ss.S, ss.y, ss.s, spec);
        CHECK(back.u == doctest::Approx(u).epsilon(1e-12));
        CHECK(back.sigma == doctest::Approx(sg).epsilon(1e-12));
        CHECK(back.x == doctest::Approx(x).epsilon(1e-12));
        CHECK(back.t == doctest::Approx(t).epsilon(1e-12));
    }
    CHECK_THROWS_AS(to_selfsimilar(1.0, 1.0, 0.0, 0.4, spec), TimeBeyondBlowup);

    // amplitude scaling as t -> T
    const double u = 0.5;
    auto near = to_selfsimilar(u, u, 0.1, spec.T - 1e-6, spec);
    CHECK(near.U == doctest::Approx(spec.r * std::pow(1e-6, 1.0 - 1.0 / spec.r) * u)
                        .epsilon(1e-10));

    // sound-speed/density conversion
    const double alpha = 0.2, rho = 1.7;
    CHECK(rho_from_sigma(sigma_from_rho(rho, alpha), alpha) ==
          doctest::Approx(rho).epsilon(1e-12));
}

TEST_CASE("profile is a stationary state: RHS at 2nd order") {
    const auto& prof = reference_profile();
    double sup[3];
    std::size_t grids[3] = {512, 1024, 2048};
    for (int k = 0; k < 3; ++k) {
        auto st = state_from_profile(prof, prof.params, 50.0, grids[k]);
        std::vector<double> du, ds;
        rhs_selfsimilar(st, du, ds);
        double worst = 0.0;
        for (std::size_t i = 0; i + 1 < du.size(); ++i)
            worst = std::fmax(worst, std::fmax(std::fabs(du[i]), std::fabs(ds[i])));
        sup[k] = worst;
    }
    INFO("sup residuals: ", sup[0], " ", sup[1], " ", sup[2]);
    CHECK(sup[0] / sup[1] > 3.5);
    CHECK(sup[0] / sup[1] < 4.5);
    CHECK(sup[1] / sup[2] > 3.5);
    CHECK(sup[1] / sup[2] < 4.5);
}

TEST_CASE("zero state is stationary") {
    SimState st;
    st.params = FluidParams::make(1.4, 1.18);
    const std::size_t n = 128;
    st.R_grid.resize(n);
    for (std::size_t i = 0; i < n; ++i) st.R_grid[i] = 10.0 * i / (n - 1.0);
    st.U.assign(n, 0.0);
    st.S.assign(n, 0.0);
    st.params.nu = 0;
    std::vector<double> du, ds;
    rhs_selfsimilar(st, du, ds);
    for (double v : du) CHECK(v == 0.0);
    for (double v : ds) CHECK(v == 0.0);
}

TEST_CASE("evolving the profile drifts only at discretization level") {
    const auto& prof = reference_profile();
    auto st = state_from_profile(prof, prof.params, 50.0, 1024);
    auto diag = evolve(st, 0.25);
    CHECK(st.valid);
    CHECK(diag.sup_U_dev.back() < 1e-3);
    CHECK(diag.sup_S_dev.back() < 1e-3);
    CHECK(diag.min_S.back() > 0.5 * prof.w0_fit);
    CHECK(diag.E_K.back() > 0.0);
}

TEST_CASE("perturbation growth sign matches the degree-0 census") {
    const auto& prof = reference_profile();
    CutoffConfig cfg;
    cfg.C0 = 25.0;
    cfg.grid_n = 512;
    auto ms = assemble_mode(prof, cfg, prof.params, 0);
    auto sp = mode_spectrum(ms, cfg, EigMethod::Dense);

    auto st = state_from_profile(prof, prof.params, 75.0, 1024);
    const double eps = 1e-4;
    for (std::size_t i = 0; i < st.R_grid.size(); ++i) {
        const double t = (st.R_grid[i] - 1.5) / 0.5;
        if (std::fabs(t) < 1.0) st.U[i] += eps * std::exp(-1.0 / (1.0 - t * t));
    }
    const std::vector<double> U0 = st.U, S0 = st.S;
    auto base = state_from_profile(prof, prof.params, 75.0, 1024);
    auto diag = evolve(st, 1.0);
    // deviation from the unperturbed profile at the end vs at the start
    double dev_end = 0.0;
    for (std::size_t i = 0; i < st.U.size(); ++i)
        dev_end = std::fmax(dev_end, std::fabs(st.U[i] - base.U[i]));
    INFO("census=", sp.dim_unstable, " dev_end=", dev_end, " eps=", eps);
    if (sp.dim_unstable == 0) {
        CHECK(dev_end < 10.0 * eps); // no runaway growth
    } else {
        CHECK(dev_end > eps);
    }
}

TEST_CASE("dissipation term decays at the expected rate") {
    const auto& prof = reference_profile();
    auto params = FluidParams::make(1.4, 1.18, 1);
    auto st = state_from_profile(prof, params, 50.0, 1024, 300.0);
    auto diag = evolve(st, 303.0, 0.9, 0.25);
    REQUIRE(diag.s.size() >= 6);
    // least-squares slope of log dis_sup vs s
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (std::size_t i = 0; i < diag.s.size(); ++i) {
        if (diag.dis_sup[i] <= 0.0) continue;
        const double x = diag.s[i], y = std::log(diag.dis_sup[i]);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
        ++m;
    }
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    INFO("fitted rate=", slope, " expected=", -params.delta_dis);
    CHECK(std::fabs(slope + params.delta_dis) < 0.1 * params.delta_dis);
}

TEST_CASE("truncation terms vanish on the plateau and under chi2") {
    const auto& prof = reference_profile();
    const double s = 5.5;
    std::vector<double> R;
    for (double q = 0.5; q < std::exp(5.4); q *= 1.3) R.push_back(q);
    auto tt = truncation_terms(prof, prof.params, s, R);
    const double es2 = 0.5 * std::exp(s);
    for (std::size_t i = 0; i < R.size(); ++i) {
        if (R[i] <= es2) {
            CHECK(tt.E_u[i] == 0.0);
            CHECK(tt.E_s[i] == 0.0);
        }
    }
    // chi2-supported radii sit inside the plateau when e^{s}/2 > 3 C0
    const double C0 = 25.0;
    REQUIRE(es2 > 3.0 * C0);
    for (std::size_t i = 0; i < R.size(); ++i)
        if (R[i] <= 2.5 * C0) CHECK(chi2(R[i], C0) * tt.E_u[i] == 0.0);
}

TEST_CASE("truncation term sup decays like e^{(1-2r)s}") {
    auto p = FluidParams::make(1.4, 1.18);
    auto seed = taylor_seed(sonic_data(p), p, 6);
    auto prof = integrate_profile(seed, p, -8.0, 9.0, 1e-10);
    std::vector<double> lg_sup, lg_s;
    for (double s = 5.2; s <= 8.6; s += 0.4) {
        std::vector<double> R;
        for (double q = std::exp(s) * 0.45; q <= std::exp(s) * 0.999; q *= 1.01)
            R.push_back(q);
        auto tt = truncation_terms(prof, p, s, R);
        double sup = 0.0;
        for (double v : tt.E_u) sup = std::fmax(sup, std::fabs(v));
        lg_s.push_back(s);
        lg_sup.push_back(std::log(sup));
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const int m = static_cast<int>(lg_s.size());
    for (int i = 0; i < m; ++i) {
        sx += lg_s[i]; sy += lg_sup[i]; sxx += lg_s[i] * lg_s[i]; sxy += lg_s[i] * lg_sup[i];
    }
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    const double expected = 1.0 - 2.0 * p.r;
    INFO("fitted=", slope, " expected=", expected);
    CHECK(std::fabs(slope - expected) < 0.1 * std::fabs(expected));
}

TEST_CASE("truncated and extended evolutions agree inside B(0, C0)") {
    const auto& prof = reference_profile();
    CutoffConfig cfg;
    cfg.C0 = 25.0;
    cfg.grid_n = 1024;
    for (bool outer : {false, true}) {
        auto rep = truncated_vs_extended(prof, cfg, prof.params, 1.0, outer);
        INFO("outer=", outer, " diff=", rep.max_diff_inside_C0, " bound=", rep.bound);
        CHECK(rep.within_bound);
    }
}

TEST_CASE("torus bookkeeping bounds the domain") {
    const auto& prof = reference_profile();
    auto st = state_from_profile(prof, prof.params, 50.0, 512);
    st.torus_L = 30.0;
    CHECK_THROWS_AS(evolve(st, 1.0), OutOfRange); // e^{1} * 30 > 50
    auto st2 = state_from_profile(prof, prof.params, 50.0, 512);
    st2.torus_L = 10.0;
    auto diag = evolve(st2, 0.5);
    CHECK(diag.s.back() == doctest::Approx(0.5).epsilon(1e-10));
}
