#pragma once

#include <functional>
#include <vector>

#include "ellmono/numerics.hpp"

namespace ellmono {

// One smooth piece of a path in the complex plane, parametrized over [0,1].
// Line: z(s) = z0 + (z1-z0) s
// Arc:  z(s) = c + u cos(th(s)) + v sin(th(s)), th = th0 + (th1-th0) s
//       (u, v complex semi-axes; circles have v = i u)
struct Seg {
    enum Kind { Line, Arc } kind = Line;
    cplx z0, z1;           // Line
    cplx c, u, v;          // Arc
    double th0 = 0, th1 = 0;

    static Seg line(cplx a, cplx b) {
        Seg s; s.kind = Line; s.z0 = a; s.z1 = b; return s;
    }
    static Seg circle(cplx center, double r, double a0, double a1) {
        Seg s; s.kind = Arc; s.c = center; s.u = r; s.v = cplx(0, r);
        s.th0 = a0; s.th1 = a1; return s;
    }
    static Seg ellipse(cplx center, cplx semi_u, cplx semi_v, double a0, double a1) {
        Seg s; s.kind = Arc; s.c = center; s.u = semi_u; s.v = semi_v;
        s.th0 = a0; s.th1 = a1; return s;
    }

    cplx at(double s) const {
        if (kind == Line) return z0 + (z1 - z0) * s;
        double th = th0 + (th1 - th0) * s;
        return c + u * std::cos(th) + v * std::sin(th);
    }
    cplx deriv(double s) const {
        if (kind == Line) return z1 - z0;
        double th = th0 + (th1 - th0) * s;
        return (th1 - th0) * (-u * std::sin(th) + v * std::cos(th));
    }
    double length_bound() const {
        if (kind == Line) return std::abs(z1 - z0);
        return std::abs(th1 - th0) * (std::abs(u) + std::abs(v));
    }
    Seg reversed() const {
        Seg s = *this;
        if (kind == Line) { s.z0 = z1; s.z1 = z0; }
        else { s.th0 = th1; s.th1 = th0; }
        return s;
    }
    // image under z -> -z
    Seg negated() const {
        Seg s = *this;
        if (kind == Line) { s.z0 = -z0; s.z1 = -z1; }
        else { s.c = -c; s.u = -u; s.v = -v; }
        return s;
    }
};

struct Path {
    std::vector<Seg> segs;

    cplx start() const { return segs.front().at(0.0); }
    cplx end() const { return segs.back().at(1.0); }
    Path reversed() const {
        Path p;
        for (auto it = segs.rbegin(); it != segs.rend(); ++it)
            p.segs.push_back(it->reversed());
        return p;
    }
    Path negated() const {
        Path p;
        for (const auto &s : segs) p.segs.push_back(s.negated());
        return p;
    }
    void append(const Path &o) {
        segs.insert(segs.end(), o.segs.begin(), o.segs.end());
    }
    double min_dist_to(cplx w, int samples_per_seg = 64) const;
    // winding number around w for closed paths (nearest integer of the
    // accumulated argument increment)
    int winding(cplx w, int samples_per_seg = 512) const;
};

// Square-root cover y^2 = P(z) with explicit branch points for step control.
struct SqrtCover {
    std::vector<cplx> poly;     // coefficients of P
    std::vector<cplx> branch;   // roots of P

    cplx P(cplx z) const { return poly_eval(poly, z); }
    cplx dP(cplx z) const { return poly_eval(poly_deriv(poly), z); }

    double dist_to_branch(cplx z) const {
        double d = 1e300;
        for (const auto &b : branch) d = std::min(d, std::abs(z - b));
        return d;
    }

    // continue y along a short step z0 -> z1 given y0 (= sqrt branch at z0).
    cplx step_y(cplx z0, cplx y0, cplx z1) const {
        cplx pred = y0 + dP(z0) / (2.0 * y0) * (z1 - z0);
        cplx r = std::sqrt(P(z1));
        return (std::abs(r - pred) <= std::abs(-r - pred)) ? r : -r;
    }

    // y at the end of a whole segment, with automatic substepping
    cplx continue_y(const Seg &seg, cplx y_start, int min_steps = 8) const;
    cplx continue_y(const Path &path, cplx y_start) const;
};

// Integrates g(z, y) dz along the lifted path starting on branch y_start.
// Returns the integral; y_end (if nonnull) receives the final branch value.
cplx integrate_on_cover(const SqrtCover &cov, const Path &path, cplx y_start,
                        const std::function<cplx(cplx, cplx)> &g, double tol,
                        cplx *y_end = nullptr);

// Closed loop (ellipse) around exactly the two points a and b, with
// padding controlled by `margin` (fraction of the half-distance) and
// flattening `ecc` for the minor axis. Starts at angle 0 (beyond b).
Path pair_loop(cplx a, cplx b, double margin, double ecc, bool ccw = true);

}  // namespace ellmono
