#include "doctest.h"

#include <cmath>
#include <random>

#include "implo/modes.hpp"

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

CutoffConfig small_cfg(std::size_t n = 320) {
    CutoffConfig cfg;
    cfg.C0 = 25.0;
    cfg.J = 40.0;
    cfg.delta_g = 0.1;
    cfg.grid_n = n;
    return cfg;
}

} // namespace

TEST_CASE("mode system structure") {
    const auto& prof = reference_profile();
    auto cfg = small_cfg();

    auto m0 = assemble_mode(prof, cfg, prof.params, 0);
    CHECK(m0.block == 2);
    CHECK(m0.dim() == 2 * static_cast<int>(cfg.grid_n));

    auto m3 = assemble_mode(prof, cfg, prof.params, 3);
    CHECK(m3.block == 4);
    const int n = m3.dim();

    // U_Phi rows touch only the U_Phi block
    for (std::size_t i = 0; i < cfg.grid_n; ++i) {
        const int row = static_cast<int>(i) * 4 + 3;
        for (int d = -m3.A.kb; d <= m3.A.kb; ++d) {
            const int col = row + d;
            if (col < 0 || col >= n) continue;
            if (col % 4 != 3) CHECK(m3.A.get(row, col) == 0.0);
        }
    }

    // rows beyond 5C0/2 are exactly -J times the identity
    for (std::size_t i = 0; i < cfg.grid_n; ++i) {
        if (m3.radial_grid[i] <= 2.5 * cfg.C0) continue;
        for (int c = 0; c < 4; ++c) {
            const int row = static_cast<int>(i) * 4 + c;
            for (int d = -m3.A.kb; d <= m3.A.kb; ++d) {
                const int col = row + d;
                if (col < 0 || col >= n) continue;
                CHECK(m3.A.get(row, col) == (col == row ? -cfg.J : 0.0));
            }
        }
    }

    // coupling blocks satisfy the skew relations exactly
    const double L = 12.0; // n1 (n1+1) for n1 = 3
    for (std::size_t i = 0; i < cfg.grid_n; ++i) {
        const int base = static_cast<int>(i) * 4;
        const double wp = m3.A.get(base + 0, base + 2);
        const double zp = m3.A.get(base + 1, base + 2);
        const double pw = m3.A.get(base + 2, base + 0);
        const double pz = m3.A.get(base + 2, base + 1);
        CHECK(wp == -zp);
        CHECK(pw == -pz);
        CHECK(wp == -(2.0 * L) * pw);
    }
}

TEST_CASE("profile must cover the operator domain") {
    const auto& prof = reference_profile();
    auto cfg = small_cfg();
    cfg.C0 = 1500.0; // 3 C0 beyond e^8
    CHECK_THROWS_AS(assemble_mode(prof, cfg, prof.params, 1), ProfileTooShort);
}

TEST_CASE("chi2 == 0 configuration: pure damping spectrum") {
    const auto& prof = reference_profile();
    auto cfg = small_cfg(256);
    auto ms = assemble_mode(prof, cfg, prof.params, 2, AssembleVariant::Chi2Zero);
    auto sp = mode_spectrum(ms, cfg, EigMethod::Dense);
    for (const auto& ev : sp.eigenvalues) {
        CHECK(std::fabs(ev.imag()) < 1e-12);
        CHECK(ev.real() <= 1e-12);
        CHECK(ev.real() >= -cfg.J - 1e-12);
    }
}

TEST_CASE("dense spectra are conjugate symmetric") {
    const auto& prof = reference_profile();
    auto cfg = small_cfg(256);
    auto ms = assemble_mode(prof, cfg, prof.params, 2);
    auto sp = mode_spectrum(ms, cfg, EigMethod::Dense);
    for (const auto& ev : sp.eigenvalues) {
        if (std::fabs(ev.imag()) < 1e-12) continue;
        bool found = false;
        for (const auto& other : sp.eigenvalues)
            if (std::abs(other - std::conj(ev)) < 1e-8) found = true;
        CHECK(found);
    }
}

TEST_CASE("arnoldi census agrees with the dense census across modes") {
    const auto& prof = reference_profile();
    auto cfg = small_cfg(320);
    for (int n1 = 0; n1 <= 8; ++n1) {
        auto ms = assemble_mode(prof, cfg, prof.params, n1);
        auto dense = mode_spectrum(ms, cfg, EigMethod::Dense);
        auto arn = mode_spectrum(ms, cfg, EigMethod::Arnoldi);
        INFO("n1=", n1, " dense=", dense.dim_unstable, " arnoldi=", arn.dim_unstable);
        CHECK(dense.dim_unstable == arn.dim_unstable);
        for (std::size_t j = 0; j < dense.unstable.size(); ++j) {
            INFO("eigenvalue ", j);
            CHECK(std::abs(dense.unstable[j] - arn.unstable[j]) < 1e-6);
        }
    }
}

TEST_CASE("rayleigh probe: eigenvector recovery and outer indicator") {
    const auto& prof = reference_profile();
    auto cfg = small_cfg(256);
    auto ms = assemble_mode(prof, cfg, prof.params, 1);

    std::vector<cplx> values;
    std::vector<std::vector<cplx>> vectors;
    dense_eigen(ms.dense(), ms.dim(), values, vectors);
    // pick the rightmost real eigenvalue
    int best = -1;
    for (std::size_t j = 0; j < values.size(); ++j) {
        if (std::fabs(values[j].imag()) > 1e-12) continue;
        if (best < 0 || values[j].real() > values[best].real()) best = static_cast<int>(j);
    }
    REQUIRE(best >= 0);
    CHECK(std::fabs(rayleigh_probe(ms, vectors[best]) - values[best].real()) < 1e-8);

    // indicator supported beyond 5C0/2, where the operator is exactly -J
    std::vector<cplx> ind(ms.dim(), 0.0);
    for (std::size_t i = 0; i < ms.grid_n; ++i)
        if (ms.radial_grid[i] > 2.5 * cfg.C0 + 2.0 * ms.h)
            for (int c = 0; c < ms.block; ++c) ind[i * ms.block + c] = 1.0;
    CHECK(rayleigh_probe(ms, ind) == doctest::Approx(-cfg.J).epsilon(1e-12));

    CHECK_THROWS_AS(rayleigh_probe(ms, std::vector<cplx>(ms.dim(), 0.0)), ZeroVector);
}

TEST_CASE("spherical energy: zero vector, quadratic scaling, order cap") {
    const auto& prof = reference_profile();
    auto cfg = small_cfg(256);
    auto ms = assemble_mode(prof, cfg, prof.params, 2);

    std::vector<cplx> zero(ms.dim(), 0.0);
    for (double e : spherical_energy(ms, zero, 0)) CHECK(e == 0.0);

    std::mt19937 rng(3);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    std::vector<cplx> v(ms.dim());
    for (auto& x : v) x = {d(rng), d(rng)};
    auto e1 = spherical_energy(ms, v, 0);
    std::vector<cplx> v2 = v;
    for (auto& x : v2) x *= 2.0;
    auto e2 = spherical_energy(ms, v2, 0);
    for (std::size_t i = 0; i < e1.size(); ++i)
        CHECK(e2[i] == doctest::Approx(4.0 * e1[i]).epsilon(1e-12));

    CHECK_THROWS_AS(spherical_energy(ms, v, 3), UnsupportedOrder);
}

TEST_CASE("coupling cancellation identity holds to machine precision") {
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> d(-5.0, 5.0);
    for (int it = 0; it < 10000; ++it) {
        const cplx a{d(rng), d(rng)}, b{d(rng), d(rng)}, c{d(rng), d(rng)};
        // displayed form: rounds once in the subtraction a - b
        const double lhs = (std::conj(a) * c).real() - (std::conj(b) * c).real()
                         - (std::conj(c) * (a - b)).real();
        const double scale = (std::abs(a) + std::abs(b)) * std::abs(c);
        CHECK(std::fabs(lhs) <= 8.0 * 2.220446049250313e-16 * scale);
        // paired as (Re(a* c) - Re(c* a)) - (Re(b* c) - Re(c* b)) each
        // difference is between identical products and vanishes exactly
        const double exact = ((std::conj(a) * c).real() - (std::conj(c) * a).real())
                           - ((std::conj(b) * c).real() - (std::conj(c) * b).real());
        CHECK(exact == 0.0);
    }
}

TEST_CASE("energy identity residual shrinks under refinement") {
    const auto& prof = reference_profile();
    auto cfg = small_cfg(256);
    auto ms = assemble_mode(prof, cfg, prof.params, 1);
    std::vector<cplx> values;
    std::vector<std::vector<cplx>> vectors;
    dense_eigen(ms.dense(), ms.dim(), values, vectors);
    int best = -1;
    for (std::size_t j = 0; j < values.size(); ++j)
        if (values[j].real() > -0.5 * cfg.delta_g
            && (best < 0 || values[j].real() > values[best].real()))
            best = static_cast<int>(j);
    if (best < 0) return; // nothing unstable at this configuration
    const double res = energy_identity_residual(ms, vectors[best], values[best]);
    INFO("residual=", res, " tolerance=", 10.0 * ms.h);
    CHECK(res <= 10.0 * ms.h);
}
