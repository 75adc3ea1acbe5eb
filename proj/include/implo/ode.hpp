#ifndef IMPLO_ODE_HPP
#define IMPLO_ODE_HPP

// Dormand-Prince 5(4) with the standard 4th-order continuous extension.
// Every accepted step stores its interpolation polynomial so solutions can
// be sampled anywhere afterwards; integration runs in either direction.

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "implo/errors.hpp"

namespace implo {

template <std::size_t N>
struct Dopri5 {
    using State = std::array<double, N>;
    using Rhs = std::function<State(double, const State&)>;
    // Called after each accepted step; return false to reject the run.
    using Validator = std::function<bool(double, const State&)>;
    // Scalar event g(t, y); integration stops where g first reaches <= 0.
    using EventFn = std::function<double(double, const State&)>;

    struct Segment {
        double t0, h;
        std::array<State, 5> rcont;
    };

    struct Solution {
        std::vector<Segment> segments;
        double t_begin = 0.0, t_end = 0.0;
        State y_begin{}, y_end{};
        std::size_t n_steps = 0, n_rejected = 0;
        bool stopped_by_event = false;

        State eval(double t) const {
            const Segment& s = locate(t);
            const double theta = (t - s.t0) / s.h;
            State out;
            for (std::size_t i = 0; i < N; ++i) {
                const auto& rc = s.rcont;
                out[i] = rc[0][i]
                       + theta * (rc[1][i]
                       + (1.0 - theta) * (rc[2][i]
                       + theta * (rc[3][i] + (1.0 - theta) * rc[4][i])));
            }
            return out;
        }

        bool contains(double t) const {
            const double lo = std::fmin(t_begin, t_end), hi = std::fmax(t_begin, t_end);
            return t >= lo - 1e-12 && t <= hi + 1e-12;
        }

    private:
        const Segment& locate(double t) const {
            if (segments.empty()) throw NumericalError("empty ODE solution");
            // segments are ordered along the direction of integration
            std::size_t lo = 0, hi = segments.size() - 1;
            const bool fwd = segments.front().h > 0.0;
            while (lo < hi) {
                std::size_t mid = (lo + hi + 1) / 2;
                const double t0 = segments[mid].t0;
                if (fwd ? (t >= t0) : (t <= t0)) lo = mid; else hi = mid - 1;
            }
            return segments[lo];
        }
    };

    static Solution integrate(const Rhs& f, double t0, State y0, double t1,
                              double rtol, double atol,
                              const Validator& validate = nullptr,
                              const EventFn& event = nullptr,
                              double max_step = 0.0) {
        Solution sol;
        sol.t_begin = t0;
        sol.y_begin = y0;
        const double dir = (t1 >= t0) ? 1.0 : -1.0;
        const double span = std::fabs(t1 - t0);
        if (span == 0.0) {
            sol.t_end = t0;
            sol.y_end = y0;
            return sol;
        }

        double t = t0;
        State y = y0;
        State k1 = f(t, y);
        const double hcap = max_step > 0.0 ? max_step : span;
        double h = dir * std::fmin(std::fmin(1e-2 * span, 1e-2), hcap);
        const double hmin = 1e-14 * std::fmax(1.0, span);
        const std::size_t max_steps = 4000000;
        bool last_rejected = false;

        for (std::size_t step = 0; step < max_steps; ++step) {
            if (dir * (t + h - t1) > 0.0) h = t1 - t;

            State k2, k3, k4, k5, k6, k7, ynew, yerr;
            stages(f, t, y, h, k1, k2, k3, k4, k5, k6, k7, ynew, yerr);

            double err = 0.0;
            for (std::size_t i = 0; i < N; ++i) {
                const double sc = atol + rtol * std::fmax(std::fabs(y[i]), std::fabs(ynew[i]));
                const double e = yerr[i] / sc;
                err += e * e;
            }
            err = std::sqrt(err / N);

            if (err <= 1.0) {
                Segment seg;
                seg.t0 = t;
                seg.h = h;
                dense_coeffs(y, ynew, h, k1, k3, k4, k5, k6, k7, seg.rcont);
                sol.segments.push_back(seg);
                const double t_prev = t;
                t += h;
                y = ynew;
                k1 = k7; // FSAL
                ++sol.n_steps;
                if (event && event(t, y) <= 0.0) {
                    // bisect the event location on the dense output
                    double lo = t_prev, hi = t;
                    for (int it = 0; it < 80 && std::fabs(hi - lo) > 1e-15 * (1.0 + std::fabs(hi)); ++it) {
                        const double mid = 0.5 * (lo + hi);
                        if (event(mid, sol.eval(mid)) <= 0.0) hi = mid; else lo = mid;
                    }
                    sol.stopped_by_event = true;
                    sol.t_end = hi;
                    sol.y_end = sol.eval(hi);
                    return sol;
                }
                if (validate && !validate(t, y))
                    throw NumericalError("ODE step validator rejected the trajectory");
                if (dir * (t - t1) >= 0.0 || std::fabs(t - t1) < hmin) break;
                double fac = 0.9 * std::pow(err > 1e-30 ? err : 1e-30, -0.2);
                fac = std::fmin(last_rejected ? 1.0 : 5.0, std::fmax(0.2, fac));
                h *= fac;
                if (std::fabs(h) > hcap) h = dir * hcap;
                last_rejected = false;
            } else {
                double fac = std::fmax(0.2, 0.9 * std::pow(err, -0.2));
                h *= fac;
                last_rejected = true;
            }
            if (std::fabs(h) < hmin)
                throw ToleranceNotMet("step size underflow in Dopri5");
        }
        if (dir * (t - t1) < 0.0 && std::fabs(t - t1) > 1e-10 * span)
            throw ToleranceNotMet("Dopri5 exceeded the step budget");
        sol.t_end = t;
        sol.y_end = y;
        return sol;
    }

private:
    static void stages(const Rhs& f, double t, const State& y, double h,
                       const State& k1, State& k2, State& k3, State& k4,
                       State& k5, State& k6, State& k7, State& ynew, State& yerr) {
        constexpr double a21 = 1.0 / 5.0;
        constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
        constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
        constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                         a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
        constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0,
                         a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                         a65 = -5103.0 / 18656.0;
        constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                         a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
        constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0,
                         c5 = 8.0 / 9.0;
        constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                         e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

        State w;
        for (std::size_t i = 0; i < N; ++i) w[i] = y[i] + h * a21 * k1[i];
        k2 = f(t + c2 * h, w);
        for (std::size_t i = 0; i < N; ++i) w[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        k3 = f(t + c3 * h, w);
        for (std::size_t i = 0; i < N; ++i) w[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        k4 = f(t + c4 * h, w);
        for (std::size_t i = 0; i < N; ++i)
            w[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        k5 = f(t + c5 * h, w);
        for (std::size_t i = 0; i < N; ++i)
            w[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        k6 = f(t + h, w);
        for (std::size_t i = 0; i < N; ++i)
            ynew[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
        k7 = f(t + h, ynew);
        for (std::size_t i = 0; i < N; ++i)
            yerr[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
    }

    static void dense_coeffs(const State& y, const State& ynew, double h,
                             const State& k1, const State& k3, const State& k4,
                             const State& k5, const State& k6, const State& k7,
                             std::array<State, 5>& rc) {
        constexpr double d1 = -12715105075.0 / 11282082432.0;
        constexpr double d3 = 87487479700.0 / 32700410799.0;
        constexpr double d4 = -10690763975.0 / 1880347072.0;
        constexpr double d5 = 701980252875.0 / 199316789632.0;
        constexpr double d6 = -1453857185.0 / 822651844.0;
        constexpr double d7 = 69997945.0 / 29380423.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double dy = ynew[i] - y[i];
            const double bspl = h * k1[i] - dy;
            rc[0][i] = y[i];
            rc[1][i] = dy;
            rc[2][i] = bspl;
            rc[3][i] = dy - h * k7[i] - bspl;
            rc[4][i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i]
                            + d6 * k6[i] + d7 * k7[i]);
        }
    }
};

} // namespace implo

#endif
