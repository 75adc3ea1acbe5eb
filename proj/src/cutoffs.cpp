#include "implo/cutoffs.hpp"

#include <cmath>

namespace implo {

namespace {
inline double g(double t) { return std::exp(-1.0 / t); }
}

double smooth_step(double t) {
    if (t <= 0.0) return 1.0;
    if (t >= 1.0) return 0.0;
    const double u = g(t), v = g(1.0 - t);
    return v / (u + v);
}

double smooth_step_deriv(double t) {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    const double u = g(t), v = g(1.0 - t);
    const double s = u + v;
    return -u * v * (1.0 / (t * t) + 1.0 / ((1.0 - t) * (1.0 - t))) / (s * s);
}

double chi1(double R, double C0) { return smooth_step((std::fabs(R) - C0) / (0.5 * C0)); }
double chi1_deriv(double R, double C0) {
    return smooth_step_deriv((std::fabs(R) - C0) / (0.5 * C0)) / (0.5 * C0);
}
double chi2(double R, double C0) { return smooth_step((std::fabs(R) - 2.0 * C0) / (0.5 * C0)); }
double chi2_deriv(double R, double C0) {
    return smooth_step_deriv((std::fabs(R) - 2.0 * C0) / (0.5 * C0)) / (0.5 * C0);
}

double truncation_bump(double x) { return smooth_step(2.0 * std::fabs(x) - 1.0); }
double truncation_bump_deriv(double x) { return 2.0 * smooth_step_deriv(2.0 * std::fabs(x) - 1.0); }

double weight_phi(double R, double R0, double eta) {
    const double p = 2.0 * (1.0 - eta);
    auto outer = [&](double q) { return 0.5 * std::pow(q / R0, p); };
    if (R <= R0) return 1.0;
    if (R >= 4.0 * R0) return outer(R);
    // quintic Hermite blend matching value and two derivatives at both ends
    const double z = (R - R0) / (3.0 * R0);
    const double f1 = outer(4.0 * R0);
    const double d1 = p * f1 / (4.0 * R0) * (3.0 * R0);
    const double d2 = p * (p - 1.0) * f1 / (16.0 * R0 * R0) * (9.0 * R0 * R0);
    const double z2 = z * z, z3 = z2 * z, z4 = z3 * z, z5 = z4 * z;
    const double H0 = 1.0 - 10.0 * z3 + 15.0 * z4 - 6.0 * z5;
    const double H3 = 10.0 * z3 - 15.0 * z4 + 6.0 * z5;
    const double H4 = -4.0 * z3 + 7.0 * z4 - 3.0 * z5;
    const double H5 = 0.5 * z3 - z4 + 0.5 * z5;
    return H0 * 1.0 + H3 * f1 + H4 * d1 + H5 * d2;
}

} // namespace implo
