#ifndef IMPLO_SERIES_HPP
#define IMPLO_SERIES_HPP

// Truncated power series in one variable, enough for the order-by-order
// Taylor solves at the sonic point and at regular trajectory points.

#include <cstddef>
#include <vector>

namespace implo {

struct Series {
    std::vector<double> c; // c[k] multiplies x^k

    explicit Series(std::size_t len) : c(len, 0.0) {}
    std::size_t len() const { return c.size(); }

    static Series constant(double v, std::size_t len) {
        Series s(len);
        s.c[0] = v;
        return s;
    }

    Series derivative() const {
        Series d(len());
        for (std::size_t k = 1; k < len(); ++k) d.c[k - 1] = k * c[k];
        return d;
    }

    double eval(double x) const {
        double v = 0.0;
        for (std::size_t k = len(); k-- > 0;) v = v * x + c[k];
        return v;
    }

    friend Series operator+(const Series& a, const Series& b) {
        Series r(a.len());
        for (std::size_t k = 0; k < r.len(); ++k) r.c[k] = a.c[k] + b.c[k];
        return r;
    }
    friend Series operator-(const Series& a, const Series& b) {
        Series r(a.len());
        for (std::size_t k = 0; k < r.len(); ++k) r.c[k] = a.c[k] - b.c[k];
        return r;
    }
    friend Series operator*(double s, const Series& a) {
        Series r(a.len());
        for (std::size_t k = 0; k < r.len(); ++k) r.c[k] = s * a.c[k];
        return r;
    }
    friend Series operator*(const Series& a, const Series& b) {
        Series r(a.len());
        for (std::size_t i = 0; i < a.len(); ++i) {
            if (a.c[i] == 0.0) continue;
            for (std::size_t j = 0; i + j < b.len(); ++j)
                r.c[i + j] += a.c[i] * b.c[j];
        }
        return r;
    }

    Series& add_const(double v) {
        c[0] += v;
        return *this;
    }
};

} // namespace implo

#endif
