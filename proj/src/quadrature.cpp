#include "ellmono/quadrature.hpp"

#include <cmath>
#include <vector>

namespace ellmono {

namespace {

// 15-point Gauss-Legendre nodes/weights on [-1,1]
constexpr int kGLn = 15;
constexpr double kGLx[kGLn] = {
    -0.9879925180204854, -0.9372733924007060, -0.8482065834104272,
    -0.7244177313601701, -0.5709721726085388, -0.3941513470775634,
    -0.2011940939974345, 0.0,                 0.2011940939974345,
    0.3941513470775634,  0.5709721726085388,  0.7244177313601701,
    0.8482065834104272,  0.9372733924007060,  0.9879925180204854};
constexpr double kGLw[kGLn] = {
    0.0307532419961173, 0.0703660474881081, 0.1071592204671719,
    0.1395706779261543, 0.1662692058169939, 0.1861610000155622,
    0.1984314853271116, 0.2025782419255613, 0.1984314853271116,
    0.1861610000155622, 0.1662692058169939, 0.1395706779261543,
    0.1071592204671719, 0.0703660474881081, 0.0307532419961173};

cplx gl15(const std::function<cplx(double)> &f, double a, double b) {
    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    cplx s = 0.0;
    for (int i = 0; i < kGLn; ++i) s += kGLw[i] * f(mid + half * kGLx[i]);
    return s * half;
}

void gl_adapt(const std::function<cplx(double)> &f, double a, double b,
              double tol, int depth, int max_depth, cplx whole, cplx &acc) {
    double mid = 0.5 * (a + b);
    cplx left = gl15(f, a, mid), right = gl15(f, mid, b);
    cplx sum = left + right;
    if (std::abs(sum - whole) <= tol || depth >= max_depth) {
        acc += sum;
        return;
    }
    gl_adapt(f, a, mid, tol * 0.5, depth + 1, max_depth, left, acc);
    gl_adapt(f, mid, b, tol * 0.5, depth + 1, max_depth, right, acc);
}

}  // namespace

cplx gauss_legendre_adaptive(const std::function<cplx(double)> &f, double a,
                             double b, double tol, int max_depth) {
    cplx acc = 0.0;
    gl_adapt(f, a, b, tol, 0, max_depth, gl15(f, a, b), acc);
    return acc;
}

cplx tanh_sinh(const std::function<cplx(double)> &f, double a, double b,
               double tol) {
    // map [a,b] -> [-1,1], x = mid + half*tanh((pi/2) sinh t)
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    const double tmax = 6.5;  // exp(-pi/2 sinh 6.5) far below double precision
    auto g = [&](double t) -> cplx {
        double st = std::sinh(t);
        double w = M_PI_2 * std::cosh(t) / std::pow(std::cosh(M_PI_2 * st), 2);
        double u = std::tanh(M_PI_2 * st);
        double x = mid + half * u;
        if (x <= a || x >= b) return 0.0;  // underflow to endpoint
        return f(x) * (w * half);
    };
    double h = 1.0;
    cplx prev = 0.0;
    // level 0
    cplx s = g(0.0);
    for (double t = h; t <= tmax; t += h) s += g(t) + g(-t);
    s *= h;
    for (int level = 1; level <= 12; ++level) {
        h *= 0.5;
        cplx add = 0.0;
        for (double t = h; t <= tmax; t += 2 * h) add += g(t) + g(-t);
        prev = s;
        s = 0.5 * s + h * add;
        double err = std::abs(s - prev);
        if (level >= 3 && err <= tol * (1.0 + std::abs(s))) return s;
    }
    if (std::abs(s - prev) > 1e3 * tol * (1.0 + std::abs(s)))
        throw QuadratureFailure("tanh_sinh: tolerance not met");
    return s;
}

cplx tanh_sinh_ab(const std::function<cplx(double, double, double)> &f,
                  double a, double b, double tol) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    const double tmax = 6.5;
    auto g = [&](double t) -> cplx {
        double st = std::sinh(t);
        double w = M_PI_2 * std::cosh(t) / std::pow(std::cosh(M_PI_2 * st), 2);
        // 1 ± tanh(z) without cancellation
        double e2z = std::exp(-2.0 * std::abs(M_PI_2 * st));
        double near_side = 2.0 * e2z / (1.0 + e2z);  // 1 - |tanh|
        double far_side = 2.0 / (1.0 + e2z);         // 1 + |tanh|
        double u = std::tanh(M_PI_2 * st);
        double da = half * (t >= 0 ? far_side : near_side);
        double db = half * (t >= 0 ? near_side : far_side);
        if (da <= 0.0 || db <= 0.0) return 0.0;
        double x = mid + half * u;
        return f(x, da, db) * (w * half);
    };
    double h = 1.0;
    cplx prev = 0.0;
    cplx s = g(0.0);
    for (double t = h; t <= tmax; t += h) s += g(t) + g(-t);
    s *= h;
    for (int level = 1; level <= 12; ++level) {
        h *= 0.5;
        cplx add = 0.0;
        for (double t = h; t <= tmax; t += 2 * h) add += g(t) + g(-t);
        prev = s;
        s = 0.5 * s + h * add;
        double err = std::abs(s - prev);
        if (level >= 3 && err <= tol * (1.0 + std::abs(s))) return s;
    }
    if (std::abs(s - prev) > 1e3 * tol * (1.0 + std::abs(s)))
        throw QuadratureFailure("tanh_sinh_ab: tolerance not met");
    return s;
}

cplx gauss_chebyshev(const std::function<cplx(double)> &F, double a, double b,
                     double tol) {
    const double mid = 0.5 * (a + b), rad = 0.5 * (b - a);
    cplx prev = 0.0;
    for (int n = 16; n <= (1 << 16); n *= 2) {
        cplx s = 0.0;
        for (int k = 1; k <= n; ++k) {
            double th = (2.0 * k - 1.0) * M_PI / (2.0 * n);
            s += F(mid + rad * std::cos(th));
        }
        s *= M_PI / n;
        if (n > 16 && std::abs(s - prev) <= tol * (1.0 + std::abs(s))) return s;
        prev = s;
    }
    throw QuadratureFailure("gauss_chebyshev: tolerance not met");
}

cplx periodic_trapezoid(const std::function<cplx(double)> &f, double tol,
                        int n0, int nmax) {
    cplx prev = 0.0;
    for (int n = n0; n <= nmax; n *= 2) {
        cplx s = 0.0;
        for (int k = 0; k < n; ++k) s += f(2.0 * M_PI * k / n);
        s /= double(n);
        if (n > n0 && std::abs(s - prev) <= tol * (1.0 + std::abs(s))) return s;
        prev = s;
    }
    throw QuadratureFailure("periodic_trapezoid: tolerance not met");
}

}  // namespace ellmono
