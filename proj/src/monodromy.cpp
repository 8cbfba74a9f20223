#include "ellmono/monodromy.hpp"

#include <cmath>

#include "ellmono/lattice.hpp"

namespace ellmono::monodromy {

using connections::omega_coeff;
using connections::omega_star_coeff;
using connections::omega_terms;
using connections::OmegaTerms;

namespace {

Mat2 sym_pair(cplx u, cplx v) {
    // (1/2) [[u+v, u-v],[u-v, u+v]]
    cplx s = 0.5 * (u + v), d = 0.5 * (u - v);
    return {s, d, d, s};
}

const Mat2 kSigma3{1.0, 0.0, 0.0, -1.0};

SqrtCover sextic_cover(const BiellipticCover &C) {
    SqrtCover cov;
    cov.poly = C.sextic_coeffs();
    auto bp = C.branch_points();
    cov.branch.assign(bp.begin(), bp.end());
    return cov;
}

}  // namespace

double relation_residual(const MonodromyRep &rep) {
    Mat2 comm = rep.Ma * rep.Mb * rep.Ma.inverse() * rep.Mb.inverse();
    return dist(comm * rep.Mg1 * rep.Mg2, Mat2::identity());
}

double involution_residual(const MonodromyRep &rep) {
    return std::max(dist(rep.Mg1 * rep.Mg1, Mat2::identity()),
                    dist(rep.Mg2 * rep.Mg2, Mat2::identity()));
}

MonodromyRep closed_form_from_periods(const periods::PeriodVector &N) {
    MonodromyRep rep;
    rep.method = "closed-form";
    rep.Ma = sym_pair(std::exp(-N.N1), std::exp(-N.N2));
    rep.Mb = sym_pair(std::exp(-N.N3), std::exp(-N.N4));
    rep.Mg1 = kSigma3;
    rep.Mg2 = kSigma3;
    return rep;
}

MonodromyRep closed_form_monodromy(const Rank1Connection &conn,
                                   const BiellipticCover &C,
                                   const QuadratureSettings &settings) {
    bool real_config = std::abs(C.t.imag()) < 1e-14 && std::abs(C.tp.imag()) < 1e-14 &&
                       C.t.real() > 1.0 && C.tp.real() > C.t.real();
    if (conn.trivial() && real_config) {
        auto H = periods::hyperelliptic_constants(C.t.real(), C.tp.real(), settings);
        cplx l1 = conn.lambda1, l2 = conn.lambda2;
        const cplx I(0, 1);
        cplx ea = std::exp(-2.0 * I * l2 * H.Kp);
        cplx eb = std::exp(2.0 * l2 * H.Lp);
        MonodromyRep rep;
        rep.method = "closed-form";
        rep.Ma = Mat2{ea * std::cos(2.0 * l1 * H.K), -ea * I * std::sin(2.0 * l1 * H.K),
                      -ea * I * std::sin(2.0 * l1 * H.K), ea * std::cos(2.0 * l1 * H.K)};
        rep.Mb = Mat2{eb * std::cosh(2.0 * l1 * H.L), eb * std::sinh(2.0 * l1 * H.L),
                      eb * std::sinh(2.0 * l1 * H.L), eb * std::cosh(2.0 * l1 * H.L)};
        rep.Mg1 = kSigma3;
        rep.Mg2 = kSigma3;
        return rep;
    }
    return closed_form_from_periods(periods::omega_periods(conn, C, settings));
}

LoopSpec standard_loops(const BiellipticCover &C, const std::vector<cplx> &avoid_xi) {
    SqrtCover cov = sextic_cover(C);
    cplx r1 = std::sqrt(C.tp - C.t), r2 = std::sqrt(C.tp - 1.0), r3 = std::sqrt(C.tp);

    double pole_min = 1e300;
    for (auto w : avoid_xi) pole_min = std::min(pole_min, std::abs(w));

    LoopSpec L;
    // base height on the imaginary axis, clear of poles
    double sb = 0.55 * std::min({std::abs(r1), 1.0, pole_min});
    for (int tries = 0; tries < 24; ++tries) {
        bool ok = true;
        for (auto w : avoid_xi)
            if (std::abs(cplx(0, sb) - w) < 0.2 * sb || std::abs(cplx(0, sb) + w) < 0.2 * sb)
                ok = false;
        if (ok) break;
        sb *= 0.83;
    }
    L.xi_base = cplx(0, sb);
    L.x_base = C.tp + sb * sb;

    // base y: continue the +y0 branch from the ramification point up the axis
    Seg up = Seg::line(0.0, L.xi_base);
    L.y_base = cov.continue_y(up, C.y0);

    // gamma circle radius
    double eps = 0.35 * std::min({std::abs(r1), sb, pole_min});
    L.gamma_radius = eps;

    // outer radius for the sheet-switch arcs of gamma_2
    double rmax = std::max({std::abs(r1), std::abs(r2), std::abs(r3), 1e-3});
    for (auto w : avoid_xi) rmax = std::max(rmax, std::abs(w));
    double S = 1.8 * rmax;
    L.outer_radius = S;

    // ----- gamma_1: down the axis, small circle around 0 near p-tilde_+, back
    {
        Path g;
        g.segs.push_back(Seg::line(L.xi_base, cplx(0, eps)));
        g.segs.push_back(Seg::circle(0.0, eps, M_PI / 2.0, 3.0 * M_PI / 2.0));
        g.segs.push_back(Seg::line(cplx(0, -eps), cplx(0, -sb)));
        L.g1 = g;
    }

    // ----- gamma_2: out to the big arc (sheet switch), around p-tilde_-,
    //       then the mirrored way back
    {
        Path g;
        g.segs.push_back(Seg::line(L.xi_base, cplx(0, S)));
        g.segs.push_back(Seg::circle(0.0, S, M_PI / 2.0, -M_PI / 2.0));
        g.segs.push_back(Seg::line(cplx(0, -S), cplx(0, -eps)));
        g.segs.push_back(Seg::circle(0.0, eps, 3.0 * M_PI / 2.0, M_PI / 2.0));
        g.segs.push_back(Seg::line(cplx(0, eps), cplx(0, S)));
        g.segs.push_back(Seg::circle(0.0, S, M_PI / 2.0, 3.0 * M_PI / 2.0));
        g.segs.push_back(Seg::line(cplx(0, -S), cplx(0, -sb)));
        L.g2 = g;
    }

    // ----- a and b: connector + the period cycle + connector back
    auto cb = periods::cycle_basis(C, avoid_xi);
    // connector routing: a detour around a pole only conjugates by the loop of
    // an apparent singularity (trivial monodromy), so bending is class-safe as
    // long as no branch point is wound
    std::vector<cplx> keep_clear = avoid_xi;
    for (auto w : {r1, -r1, r2, -r2, r3, -r3, cplx(0.0)}) keep_clear.push_back(w);
    auto route = [&](cplx from, cplx to) -> Path {
        double span = std::abs(to - from);
        cplx perp = (to - from) / span * cplx(0, 1);
        for (double bend : {0.0, 0.25, -0.25, 0.5, -0.5, 0.8, -0.8}) {
            Path p;
            if (bend == 0.0) {
                p.segs.push_back(Seg::line(from, to));
            } else {
                cplx w = 0.5 * (from + to) + bend * span * perp;
                p.segs.push_back(Seg::line(from, w));
                p.segs.push_back(Seg::line(w, to));
            }
            double dmin = 1e300;
            for (auto q : keep_clear) dmin = std::min(dmin, p.min_dist_to(q));
            if (dmin > 0.06 * std::min(1.0, span)) return p;
        }
        throw std::invalid_argument("standard_loops: connector routing failed");
    };
    auto build = [&](const Path &cycle, cplx cycle_ystart, bool *used_reversed) {
        cplx z0 = cycle.start();
        Path conn_path = route(L.xi_base, z0);
        cplx y_arr = cov.continue_y(conn_path, L.y_base);
        Path cyc = cycle;
        bool rev = false;
        if (std::abs(y_arr - cycle_ystart) > std::abs(y_arr + cycle_ystart)) {
            // arrived on the conjugate lift: traverse the cycle backwards,
            // which represents the same homology class on that lift
            cyc = cycle.reversed();
            rev = true;
        }
        Path p = conn_path;
        p.append(cyc);
        p.append(conn_path.reversed());
        if (used_reversed) *used_reversed = rev;
        return p;
    };
    L.a = build(cb.a1, cb.a1_ystart, &L.a_uses_reversed);
    L.b = build(cb.b1, cb.b1_ystart, &L.b_uses_reversed);

    // clearance check against the poles (in the xi-plane)
    for (auto w : avoid_xi) {
        for (const Path *p : {&L.a, &L.b, &L.g1, &L.g2}) {
            if (p->min_dist_to(w) < 0.05 * std::min(1.0, std::abs(w)))
                throw std::invalid_argument("standard_loops: no clearance from a pole");
        }
    }
    return L;
}

namespace {

// Dormand-Prince 5(4) on the state (Phi 2x2, y), parametrized along a segment
struct TransportODE {
    const connections::ConnectionMatrix &A;
    const BiellipticCover &C;

    using State = std::array<cplx, 5>;

    State deriv(const Seg &seg, double s, const State &st) const {
        cplx xi = seg.at(s);
        cplx dxi = seg.deriv(s);
        cplx y = st[4];
        cplx dx = -2.0 * xi * dxi;
        Mat2 Phi{st[0], st[1], st[2], st[3]};
        Mat2 dPhi = -(A.at_lift(xi, y) * Phi) * dx;
        cplx x = C.tp - xi * xi;
        cplx dP3 = 3.0 * x * x - 2.0 * (1.0 + C.t) * x + C.t;
        cplx dy = dP3 * dx / (2.0 * y);
        return {dPhi(0, 0), dPhi(0, 1), dPhi(1, 0), dPhi(1, 1), dy};
    }
};

using State = TransportODE::State;

State axpy(const State &a, double h, const State &b) {
    State r;
    for (int i = 0; i < 5; ++i) r[i] = a[i] + h * b[i];
    return r;
}

// classic Dormand-Prince tableau
State dp45_step(const TransportODE &ode, const Seg &seg, double s, double h,
                const State &y, State &err) {
    static const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    auto k1 = ode.deriv(seg, s, y);
    auto k2 = ode.deriv(seg, s + c2 * h, axpy(y, h * (1.0 / 5), k1));
    State t3 = y;
    for (int i = 0; i < 5; ++i) t3[i] += h * (3.0 / 40 * k1[i] + 9.0 / 40 * k2[i]);
    auto k3 = ode.deriv(seg, s + c3 * h, t3);
    State t4 = y;
    for (int i = 0; i < 5; ++i)
        t4[i] += h * (44.0 / 45 * k1[i] - 56.0 / 15 * k2[i] + 32.0 / 9 * k3[i]);
    auto k4 = ode.deriv(seg, s + c4 * h, t4);
    State t5 = y;
    for (int i = 0; i < 5; ++i)
        t5[i] += h * (19372.0 / 6561 * k1[i] - 25360.0 / 2187 * k2[i] +
                      64448.0 / 6561 * k3[i] - 212.0 / 729 * k4[i]);
    auto k5 = ode.deriv(seg, s + c5 * h, t5);
    State t6 = y;
    for (int i = 0; i < 5; ++i)
        t6[i] += h * (9017.0 / 3168 * k1[i] - 355.0 / 33 * k2[i] +
                      46732.0 / 5247 * k3[i] + 49.0 / 176 * k4[i] -
                      5103.0 / 18656 * k5[i]);
    auto k6 = ode.deriv(seg, s + h, t6);
    State y5 = y;
    for (int i = 0; i < 5; ++i)
        y5[i] += h * (35.0 / 384 * k1[i] + 500.0 / 1113 * k3[i] + 125.0 / 192 * k4[i] -
                      2187.0 / 6784 * k5[i] + 11.0 / 84 * k6[i]);
    auto k7 = ode.deriv(seg, s + h, y5);
    State y4 = y;
    for (int i = 0; i < 5; ++i)
        y4[i] += h * (5179.0 / 57600 * k1[i] + 7571.0 / 16695 * k3[i] +
                      393.0 / 640 * k4[i] - 92097.0 / 339200 * k5[i] +
                      187.0 / 2100 * k6[i] + 1.0 / 40 * k7[i]);
    for (int i = 0; i < 5; ++i) err[i] = y5[i] - y4[i];
    return y5;
}

State integrate_segment(const TransportODE &ode, const Seg &seg, State st,
                        const TransportSettings &ts) {
    double s = 0.0;
    double h = ts.initial_step;
    int guard = 0;
    while (s < 1.0) {
        h = std::min(h, 1.0 - s);
        State err;
        State next = dp45_step(ode, seg, s, h, st, err);
        double scale = 0.0;
        for (int i = 0; i < 5; ++i) {
            double tolr = ts.atol + ts.rtol * std::max(std::abs(st[i]), std::abs(next[i]));
            scale = std::max(scale, std::abs(err[i]) / tolr);
        }
        if (scale <= 1.0) {
            s += h;
            st = next;
        }
        double factor = scale > 0 ? 0.9 * std::pow(scale, -0.2) : 5.0;
        h *= std::clamp(factor, 0.2, 5.0);
        if (h < 1e-12)
            throw std::runtime_error("transport: step-size collapse near a pole");
        if (++guard > 2000000) throw std::runtime_error("transport: too many steps");
    }
    // project y back onto the curve to kill drift
    cplx xi = seg.at(1.0);
    cplx x = ode.C.tp - xi * xi;
    cplx yex = std::sqrt(x * (x - 1.0) * (x - ode.C.t));
    st[4] = (std::abs(yex - st[4]) <= std::abs(-yex - st[4])) ? yex : -yex;
    return st;
}

Mat2 transport_along(const connections::ConnectionMatrix &A, const BiellipticCover &C,
                     const Path &path, cplx y0, const Mat2 &init,
                     const TransportSettings &ts, cplx *y_end = nullptr) {
    TransportODE ode{A, C};
    State st{init(0, 0), init(0, 1), init(1, 0), init(1, 1), y0};
    for (const auto &seg : path.segs) st = integrate_segment(ode, seg, st, ts);
    if (y_end) *y_end = st[4];
    return Mat2{st[0], st[1], st[2], st[3]};
}

// integral of omega (and of its galois pullback) from the ramification point
// p-tilde_+ to the base lift along the imaginary axis
struct BaseIntegrals {
    cplx I, Istar;
};

BaseIntegrals base_integrals(const OmegaTerms &T, const BiellipticCover &C,
                             const LoopSpec &L, const QuadratureSettings &qs) {
    SqrtCover cov = sextic_cover(C);
    Path up;
    up.segs.push_back(Seg::line(0.0, L.xi_base));
    double tol = std::min(qs.abs_tol, qs.rel_tol);
    BaseIntegrals B;
    B.I = integrate_on_cover(cov, up, C.y0,
                             [&](cplx xi, cplx y) { return omega_coeff(T, C, xi, y); },
                             tol);
    B.Istar = integrate_on_cover(
        cov, up, C.y0, [&](cplx xi, cplx y) { return omega_star_coeff(T, C, xi, y); },
        tol);
    return B;
}

}  // namespace

Mat2 base_frame(const Rank1Connection &conn, const BiellipticCover &C,
                const LoopSpec &loops, const QuadratureSettings &qs) {
    auto T = omega_terms(conn, C);
    auto B = base_integrals(T, C, loops, qs);
    Mat2 D{1.0, 0.0, 0.0, 1.0 / loops.xi_base};
    return D * sym_pair(std::exp(-B.I), std::exp(-B.Istar));
}

Mat2 fundamental_matrix(const Rank1Connection &conn, const BiellipticCover &C,
                        const LoopSpec &loops, const Path &from_base,
                        const QuadratureSettings &qs) {
    auto T = omega_terms(conn, C);
    auto B = base_integrals(T, C, loops, qs);
    SqrtCover cov = sextic_cover(C);
    double tol = std::min(qs.abs_tol, qs.rel_tol);
    cplx I = B.I + integrate_on_cover(
                       cov, from_base, loops.y_base,
                       [&](cplx xi, cplx y) { return omega_coeff(T, C, xi, y); }, tol);
    cplx Istar = B.Istar +
                 integrate_on_cover(
                     cov, from_base, loops.y_base,
                     [&](cplx xi, cplx y) { return omega_star_coeff(T, C, xi, y); }, tol);
    cplx xiP = from_base.end();
    Mat2 D{1.0, 0.0, 0.0, 1.0 / xiP};
    return D * sym_pair(std::exp(-I), std::exp(-Istar));
}

MonodromyRep transport_monodromy(const Rank1Connection &conn,
                                 const BiellipticCover &C, const LoopSpec &loops,
                                 const TransportSettings &ts,
                                 const QuadratureSettings &qs) {
    ts.validate();
    auto A = connections::direct_image_matrix(conn, C);
    Mat2 Phi0 = base_frame(conn, C, loops, qs);
    Mat2 Phi0i = Phi0.inverse();

    auto run = [&](const Path &p) {
        cplx yend;
        Mat2 end = transport_along(A, C, p, loops.y_base, Phi0, ts, &yend);
        // the loop is closed on E: x and y must both return
        cplx xi_end = p.end();
        cplx x_end = C.tp - xi_end * xi_end;
        if (std::abs(x_end - loops.x_base) > 1e-9 * (1.0 + std::abs(loops.x_base)) ||
            std::abs(yend - loops.y_base) > 1e-6 * (1.0 + std::abs(loops.y_base)))
            throw std::runtime_error("transport: loop failed to close on E");
        return Phi0i * end;
    };

    MonodromyRep rep;
    rep.method = "transport";
    rep.Ma = run(loops.a);
    rep.Mb = run(loops.b);
    rep.Mg1 = run(loops.g1);
    rep.Mg2 = run(loops.g2);
    return rep;
}

cplx rank1_transport(const Rank1Connection &conn, const BiellipticCover &C,
                     const Path &cycle, cplx y_start, const TransportSettings &ts) {
    ts.validate();
    // d phi = -omega phi along the lifted cycle; returns phi(end)/phi(start)
    auto T = omega_terms(conn, C);
    SqrtCover cov = sextic_cover(C);
    // simple adaptive RK on the scalar equation reusing the matrix machinery
    // with Phi = diag(phi, 1):
    cplx phi = 1.0, y = y_start;
    for (const auto &seg : cycle.segs) {
        int n = 512;
        // refine until converged
        cplx prev_phi = 0.0;
        for (int level = 0; level < 8; ++level) {
            cplx p = 1.0, yy = y;
            cplx xiprev = seg.at(0.0);
            double h = 1.0 / n;
            for (int i = 0; i < n; ++i) {
                // RK4 on log phi: d(log phi)/ds = -g(xi,y) dxi/ds
                auto f = [&](double s, cplx yloc) {
                    cplx xi = seg.at(s);
                    return -omega_coeff(T, C, xi, yloc) * seg.deriv(s);
                };
                double s0 = i * h;
                cplx ymid = cov.step_y(xiprev, yy, seg.at(s0 + 0.5 * h));
                cplx yendl = cov.step_y(seg.at(s0 + 0.5 * h), ymid, seg.at(s0 + h));
                cplx k1 = f(s0, yy);
                cplx k2 = f(s0 + 0.5 * h, ymid);
                cplx k3 = f(s0 + 0.5 * h, ymid);
                cplx k4 = f(s0 + h, yendl);
                p *= std::exp(h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
                yy = yendl;
                xiprev = seg.at(s0 + h);
            }
            if (level > 0 && std::abs(p - prev_phi) <= 1e-11 * (1.0 + std::abs(p))) {
                phi *= p;
                y = yy;
                break;
            }
            prev_phi = p;
            n *= 2;
            if (level == 7) {
                phi *= p;
                y = yy;
            }
        }
    }
    return phi;
}

bool rh_image_elliptic(cplx w1, cplx w2, double tol) {
    if (std::abs(w1) < tol || std::abs(w2) < tol)
        throw std::invalid_argument("rh_image_elliptic: w must be nonzero");
    bool both_unit = std::abs(std::abs(w1) - 1.0) <= tol && std::abs(std::abs(w2) - 1.0) <= tol;
    if (!both_unit) return true;
    return std::abs(w1 - 1.0) <= tol && std::abs(w2 - 1.0) <= tol;
}

bool rh_image_genus2(const std::array<cplx, 4> &w, double tol) {
    for (auto z : w)
        if (std::abs(z) < tol)
            throw std::invalid_argument("rh_image_genus2: w must be nonzero");
    return rh_image_elliptic(w[0] * w[1], w[2] * w[3], tol) &&
           rh_image_elliptic(w[0] / w[1], w[2] / w[3], tol);
}

IsomonodromyInvariant isomonodromy_invariants(cplx lambda1, cplx lambda2, cplx z1,
                                              cplx z2, const Mat2 &Z) {
    if (!periods::in_period_locus(Z))
        throw std::invalid_argument("isomonodromy_invariants: Z outside the bielliptic locus");
    IsomonodromyInvariant I;
    I.lambda1 = lambda1;
    I.lambda2 = lambda2;
    I.w1 = z1 + Z(0, 0) * lambda1 + Z(0, 1) * lambda2;
    I.w2 = z2 + Z(1, 0) * lambda1 + Z(1, 1) * lambda2;
    return I;
}

bool same_isomonodromy_surface(const IsomonodromyInvariant &u,
                               const IsomonodromyInvariant &v, const Mat2 &Z,
                               double tol) {
    if (std::abs(u.lambda1 - v.lambda1) > tol) return false;
    if (std::abs(u.lambda2 - v.lambda2) > tol) return false;
    // compare w modulo the lattice generated by the columns of (1 | Z)
    std::vector<std::vector<double>> basis = {
        {1, 0, 0, 0},
        {0, 0, 1, 0},
        {Z(0, 0).real(), Z(0, 0).imag(), Z(1, 0).real(), Z(1, 0).imag()},
        {Z(0, 1).real(), Z(0, 1).imag(), Z(1, 1).real(), Z(1, 1).imag()},
    };
    std::vector<double> d = {(u.w1 - v.w1).real(), (u.w1 - v.w1).imag(),
                             (u.w2 - v.w2).real(), (u.w2 - v.w2).imag()};
    auto r = lattice::lattice_reduce_residual(basis, d);
    double n = 0;
    for (double x : r) n = std::max(n, std::abs(x));
    return n <= tol;
}

}  // namespace ellmono::monodromy
