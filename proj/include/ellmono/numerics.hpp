#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace ellmono {

using cplx = std::complex<double>;

inline constexpr double kPointTol = 1e-9;

inline bool near(cplx a, cplx b, double tol = kPointTol) {
    return std::abs(a - b) <= tol * (1.0 + std::abs(a) + std::abs(b));
}

// 2x2 complex matrix, row-major.
struct Mat2 {
    std::array<cplx, 4> e{};

    Mat2() = default;
    Mat2(cplx a, cplx b, cplx c, cplx d) : e{a, b, c, d} {}

    static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    static Mat2 zero() { return {}; }
    static Mat2 diag(cplx a, cplx d) { return {a, 0.0, 0.0, d}; }

    cplx &operator()(int i, int j) { return e[2 * i + j]; }
    cplx operator()(int i, int j) const { return e[2 * i + j]; }

    Mat2 operator+(const Mat2 &o) const {
        return {e[0] + o.e[0], e[1] + o.e[1], e[2] + o.e[2], e[3] + o.e[3]};
    }
    Mat2 operator-(const Mat2 &o) const {
        return {e[0] - o.e[0], e[1] - o.e[1], e[2] - o.e[2], e[3] - o.e[3]};
    }
    Mat2 operator*(const Mat2 &o) const {
        return {e[0] * o.e[0] + e[1] * o.e[2], e[0] * o.e[1] + e[1] * o.e[3],
                e[2] * o.e[0] + e[3] * o.e[2], e[2] * o.e[1] + e[3] * o.e[3]};
    }
    Mat2 operator*(cplx s) const { return {e[0] * s, e[1] * s, e[2] * s, e[3] * s}; }
    Mat2 operator-() const { return {-e[0], -e[1], -e[2], -e[3]}; }

    cplx det() const { return e[0] * e[3] - e[1] * e[2]; }
    cplx trace() const { return e[0] + e[3]; }

    Mat2 inverse() const {
        cplx d = det();
        if (std::abs(d) == 0.0) throw std::domain_error("Mat2::inverse: singular matrix");
        return {e[3] / d, -e[1] / d, -e[2] / d, e[0] / d};
    }

    // max-abs entry norm
    double norm() const {
        double m = 0.0;
        for (const auto &x : e) m = std::max(m, std::abs(x));
        return m;
    }

    // eigenvalues by the quadratic formula, unordered
    std::array<cplx, 2> eigenvalues() const {
        cplx t = trace(), d = det();
        cplx s = std::sqrt(t * t - 4.0 * d);
        return {(t + s) / 2.0, (t - s) / 2.0};
    }
};

inline Mat2 operator*(cplx s, const Mat2 &m) { return m * s; }

inline double dist(const Mat2 &a, const Mat2 &b) { return (a - b).norm(); }

// eigenvector of a 2x2 matrix for a given eigenvalue (unnormalized)
inline std::array<cplx, 2> eigenvector(const Mat2 &m, cplx lambda) {
    // (m - lambda I) v = 0; pick the larger row
    cplx a = m(0, 0) - lambda, b = m(0, 1);
    cplx c = m(1, 0), d = m(1, 1) - lambda;
    if (std::abs(a) + std::abs(b) >= std::abs(c) + std::abs(d)) {
        if (std::abs(a) >= std::abs(b)) return {-b / a, 1.0};
        return {1.0, -a / b};
    }
    if (std::abs(c) >= std::abs(d)) return {-d / c, 1.0};
    return {1.0, -c / d};
}

// Horner evaluation of a polynomial with coefficients c[0] + c[1] z + ...
inline cplx poly_eval(const std::vector<cplx> &c, cplx z) {
    cplx r = 0.0;
    for (std::size_t i = c.size(); i-- > 0;) r = r * z + c[i];
    return r;
}

inline std::vector<cplx> poly_deriv(const std::vector<cplx> &c) {
    std::vector<cplx> d;
    for (std::size_t i = 1; i < c.size(); ++i) d.push_back(double(i) * c[i]);
    if (d.empty()) d.push_back(0.0);
    return d;
}

}  // namespace ellmono
