#pragma once

#include <functional>

#include "ellmono/numerics.hpp"

namespace ellmono {

struct QuadratureSettings {
    double abs_tol = 1e-12;
    double rel_tol = 1e-12;
    int max_subdivisions = 2000;
    // "de" = double exponential (tanh-sinh), "gl" = adaptive Gauss-Legendre,
    // "cheb" = Gauss-Chebyshev for 1/sqrt endpoint weights
    std::string method = "de";

    void validate() const {
        if (abs_tol <= 0 || rel_tol <= 0 || max_subdivisions <= 0)
            throw std::invalid_argument("QuadratureSettings: tolerances must be positive");
    }
};

struct QuadratureFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// tanh-sinh quadrature on [a,b] for real a<b; integrand may have
// inverse-square-root singularities at the endpoints.
cplx tanh_sinh(const std::function<cplx(double)> &f, double a, double b,
               double tol);

// tanh-sinh variant passing cancellation-free distances to both endpoints;
// f(x, da, db) with da = x-a, db = b-x computed stably. Use this whenever the
// integrand is singular at an endpoint.
cplx tanh_sinh_ab(const std::function<cplx(double, double, double)> &f,
                  double a, double b, double tol);

// adaptive 15-point Gauss-Legendre on [a,b] (real parameter interval)
cplx gauss_legendre_adaptive(const std::function<cplx(double)> &f, double a,
                             double b, double tol, int max_depth = 40);

// Gauss-Chebyshev: evaluates  int_a^b F(x) / sqrt((x-a)(b-x)) dx
// with smooth F, doubling the node count until converged.
cplx gauss_chebyshev(const std::function<cplx(double)> &F, double a, double b,
                     double tol);

// trapezoid rule on a circle for periodic analytic integrands:
// returns (1/2pi) * int_0^{2pi} f(theta) dtheta, doubling nodes until converged.
cplx periodic_trapezoid(const std::function<cplx(double)> &f, double tol,
                        int n0 = 32, int nmax = 1 << 16);

}  // namespace ellmono
