#include "ellmono/periods.hpp"

#include <cmath>

#include "ellmono/lattice.hpp"

namespace ellmono::periods {

using connections::omega_coeff;
using connections::omega_star_coeff;
using connections::omega_terms;

namespace {

SqrtCover cubic_cover(cplx t) {
    return SqrtCover{{0.0, t, -(1.0 + t), 1.0}, {0.0, 1.0, t}};
}

// closed loop around {a,b} with clearance against `avoid`; shrinks the
// padding until every avoided point stays outside a guard distance
Path guarded_pair_loop(cplx a, cplx b, const std::vector<cplx> &avoid_in,
                       const char *what) {
    std::vector<cplx> avoid;
    for (auto w : avoid_in)
        if (std::abs(w - a) > 1e-12 && std::abs(w - b) > 1e-12) avoid.push_back(w);
    double half = 0.5 * std::abs(b - a);
    double clear = 1e300;
    for (auto w : avoid) {
        clear = std::min(clear, std::abs(w - a));
        clear = std::min(clear, std::abs(w - b));
    }
    double margin = std::min(0.6, 0.45 * clear / half);
    for (int attempt = 0; attempt < 10; ++attempt) {
        double ecc = 0.6 * margin;
        Path p = pair_loop(a, b, margin, ecc);
        bool ok = margin * half > 1e-8;
        for (auto w : avoid) {
            if (p.min_dist_to(w) < 0.25 * margin * half) ok = false;
            else if (p.winding(w) != 0) ok = false;
        }
        if (ok) return p;
        margin *= 0.55;
    }
    throw std::invalid_argument(std::string("cycle construction failed: no clearance for ") + what);
}

}  // namespace

EllipticPeriods elliptic_periods(cplx t, const QuadratureSettings &settings) {
    settings.validate();
    if (near(t, 0.0) || near(t, 1.0))
        throw std::invalid_argument("elliptic_periods: t must avoid {0,1}");
    SqrtCover cov = cubic_cover(t);
    auto period_around = [&](cplx u, cplx v, double branch_sign) {
        Path loop = guarded_pair_loop(u, v, {0.0, 1.0, t}, "elliptic cycle");
        cplx ystart = branch_sign * std::sqrt(cov.P(loop.start()));
        cplx yend;
        cplx val = integrate_on_cover(
            cov, loop, ystart, [](cplx, cplx y) { return 1.0 / y; },
            std::min(settings.abs_tol, settings.rel_tol), &yend);
        if (std::abs(yend - ystart) > 1e-6 * (1.0 + std::abs(ystart)))
            throw QuadratureFailure("elliptic_periods: cycle failed to close");
        return val;
    };
    // canonical orientation: a-cycle around the upper branch pair on the
    // principal branch, b-cycle around the lower pair on the opposite branch;
    // for real t > 1 the pairs are {1,t} and {0,1}, k is purely imaginary,
    // l real, and Im(l/k) > 0 with no basis flip.  For other t the three
    // points are taken in sorted order (loops must not swallow the spectator).
    std::array<cplx, 3> e = {0.0, 1.0, t};
    std::sort(e.begin(), e.end(), [](cplx a, cplx b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    EllipticPeriods P;
    bool built = false;
    const std::array<std::array<int, 3>, 3> orders = {{{0, 1, 2}, {1, 2, 0}, {0, 2, 1}}};
    for (const auto &ord : orders) {
        try {
            P.k = period_around(e[ord[1]], e[ord[2]], +1.0);
            P.l = period_around(e[ord[0]], e[ord[1]], -1.0);
            built = true;
            break;
        } catch (const std::invalid_argument &) {
            continue;
        }
    }
    if (!built) throw std::invalid_argument("elliptic_periods: no admissible cycle pair");
    P.tau = P.l / P.k;
    if (P.tau.imag() <= 0.0) {
        P.l = -P.l;
        P.tau = -P.tau;
        P.orientation_flipped = true;
    }
    if (P.tau.imag() <= 0.0) throw QuadratureFailure("elliptic_periods: degenerate tau");
    return P;
}

cplx modular_reduce(cplx tau, int max_iter) {
    if (tau.imag() <= 0) throw std::invalid_argument("modular_reduce: Im tau must be positive");
    for (int i = 0; i < max_iter; ++i) {
        tau -= std::round(tau.real());
        if (std::abs(tau) >= 1.0 - 1e-15) break;
        tau = -1.0 / tau;
    }
    tau -= std::round(tau.real());
    return tau;
}

HyperellipticConstants hyperelliptic_constants(double t, double tp,
                                               const QuadratureSettings &settings) {
    settings.validate();
    if (!(1.0 < t && t < tp))
        throw std::invalid_argument("hyperelliptic_constants: need real 1 < t < t'");

    const double r1 = std::sqrt(tp - t), r2 = std::sqrt(tp - 1.0), r3 = std::sqrt(tp);
    const double tol = std::min(settings.abs_tol, settings.rel_tol);

    // K-band [r1, r2]: integrand 1/sqrt((tp-s)(tp-1-s)(s-(tp-t))), s = xi^2;
    // the singular factors split off the stable endpoint distances:
    // (tp-1-s) = (r2-xi)(r2+xi) = db (r2+xi), (s-(tp-t)) = da (xi+r1)
    auto f_band = [&](double xi, double da, double db, bool weight_xi) -> cplx {
        double g = (tp - xi * xi) * (r2 + xi) * (xi + r1);
        double w = weight_xi ? xi : 1.0;
        return w / std::sqrt(g * da * db);
    };
    auto F_band = [&](double xi, bool weight_xi) -> cplx {
        double g = (tp - xi * xi) * (r2 + xi) * (xi + r1);
        double w = weight_xi ? xi : 1.0;
        return w / std::sqrt(g);
    };
    // L-band [r2, r3]: |y| = sqrt((tp-s)(s-(tp-1))(s-(tp-t)));
    // (tp-s) = db (r3+xi), (s-(tp-1)) = da (xi+r2)
    auto f_outer = [&](double xi, double da, double db, bool weight_xi) -> cplx {
        double g = (r3 + xi) * (xi + r2) * (xi * xi - (tp - t));
        double w = weight_xi ? xi : 1.0;
        return w / std::sqrt(g * da * db);
    };
    auto F_outer = [&](double xi, bool weight_xi) -> cplx {
        double g = (r3 + xi) * (xi + r2) * (xi * xi - (tp - t));
        double w = weight_xi ? xi : 1.0;
        return w / std::sqrt(g);
    };

    auto dual = [&](auto f, auto F, double a, double b, const char *name) {
        cplx de = tanh_sinh_ab(
            [&](double x, double da, double db) { return f(x, da, db); }, a, b, tol);
        cplx ch = gauss_chebyshev([&](double x) { return F(x); }, a, b, tol);
        if (std::abs(de - ch) > 1e3 * tol * (1.0 + std::abs(de)))
            throw QuadratureFailure(std::string("hyperelliptic_constants: schemes disagree for ") + name);
        return 0.5 * (de.real() + ch.real());
    };

    HyperellipticConstants H;
    H.K = dual([&](double x, double da, double db) { return f_band(x, da, db, false); },
               [&](double x) { return F_band(x, false); }, r1, r2, "K");
    H.Kp = dual([&](double x, double da, double db) { return f_band(x, da, db, true); },
                [&](double x) { return F_band(x, true); }, r1, r2, "K'");
    H.L = dual([&](double x, double da, double db) { return f_outer(x, da, db, false); },
               [&](double x) { return F_outer(x, false); }, r2, r3, "L");
    H.Lp = dual([&](double x, double da, double db) { return f_outer(x, da, db, true); },
                [&](double x) { return F_outer(x, true); }, r2, r3, "L'");
    if (!(H.K > 0 && H.Kp > 0 && H.L > 0 && H.Lp > 0))
        throw QuadratureFailure("hyperelliptic_constants: positivity violated");
    return H;
}

G2PeriodMatrix g2_period_matrix(cplx tau1, cplx tau2) {
    if (tau1.imag() <= 0 || tau2.imag() <= 0)
        throw std::invalid_argument("g2_period_matrix: both tau in the upper half-plane required");
    cplx s = 0.5 * (tau1 + tau2), d = 0.5 * (tau1 - tau2);
    G2PeriodMatrix Z{Mat2{s, d, d, s}};
    if (!in_period_locus(Z.Z)) throw std::runtime_error("g2_period_matrix: output left the locus");
    return Z;
}

bool in_period_locus(const Mat2 &Z, double tol) {
    if (std::abs(Z(0, 0) - Z(1, 1)) > tol * (1.0 + Z.norm())) return false;
    if (std::abs(Z(0, 1) - Z(1, 0)) > tol * (1.0 + Z.norm())) return false;
    double a = Z(0, 0).imag(), b = 0.5 * (Z(0, 1).imag() + Z(1, 0).imag());
    double d = Z(1, 1).imag();
    return a > 0 && (a * d - b * b) > 0;
}

CycleBasis cycle_basis(const BiellipticCover &C, const std::vector<cplx> &avoid_xi) {
    CycleBasis cb;
    auto bp = C.branch_points();
    cb.cov.poly = C.sextic_coeffs();
    cb.cov.branch.assign(bp.begin(), bp.end());

    cplx r1 = std::sqrt(C.tp - C.t), r2 = std::sqrt(C.tp - 1.0), r3 = std::sqrt(C.tp);
    std::vector<cplx> avoid_a = {r3, -r3, -r2, -r1, 0.0};
    std::vector<cplx> avoid_b = {r1, -r1, -r2, -r3, 0.0};
    for (auto w : avoid_xi) {
        avoid_a.push_back(w);
        avoid_b.push_back(w);
    }
    cb.a1 = guarded_pair_loop(r1, r2, avoid_a, "a1");
    cb.b1 = guarded_pair_loop(r2, r3, avoid_b, "b1");
    // starting branches fixed so that in the real configuration 1 < t < t'
    // the periods of (dxi/y, xi dxi/y) come out as (2iK, 2iK') over a1 and
    // (-2L, -2L') over b1
    cb.a1_ystart = std::sqrt(cb.cov.P(cb.a1.start()));
    cb.b1_ystart = -std::sqrt(cb.cov.P(cb.b1.start()));
    return cb;
}

cplx cycle_integral(const CycleBasis &cb, const Path &loop, cplx ystart,
                    const std::function<cplx(cplx, cplx)> &g, double tol) {
    cplx yend;
    cplx val = integrate_on_cover(cb.cov, loop, ystart, g, tol, &yend);
    if (std::abs(yend - ystart) > 1e-6 * (1.0 + std::abs(ystart)))
        throw QuadratureFailure("cycle_integral: cycle failed to close");
    return val;
}

PeriodVector omega_periods(const Rank1Connection &conn, const BiellipticCover &C,
                           const QuadratureSettings &settings) {
    settings.validate();
    auto T = omega_terms(conn, C);
    std::vector<cplx> avoid;
    for (const auto &f : T.fin) {
        avoid.push_back(f.xi);
        avoid.push_back(-f.xi);
    }
    auto cb = cycle_basis(C, avoid);
    double tol = std::min(settings.abs_tol, settings.rel_tol);
    auto g = [&](cplx xi, cplx y) { return omega_coeff(T, C, xi, y); };
    auto gs = [&](cplx xi, cplx y) { return omega_star_coeff(T, C, xi, y); };
    PeriodVector N;
    N.N1 = cycle_integral(cb, cb.a1, cb.a1_ystart, g, tol);
    N.N2 = cycle_integral(cb, cb.a1, cb.a1_ystart, gs, tol);
    N.N3 = cycle_integral(cb, cb.b1, cb.b1_ystart, g, tol);
    N.N4 = cycle_integral(cb, cb.b1, cb.b1_ystart, gs, tol);
    return N;
}

G2CycleData cycle_periods(const BiellipticCover &C, const QuadratureSettings &settings) {
    settings.validate();
    auto cb = cycle_basis(C);
    double tol = std::min(settings.abs_tol, settings.rel_tol);
    auto w1 = [](cplx, cplx y) { return 1.0 / y; };
    auto w2 = [](cplx xi, cplx y) { return xi / y; };
    cplx k1 = cycle_integral(cb, cb.a1, cb.a1_ystart, w1, tol);
    cplx k2 = cycle_integral(cb, cb.a1, cb.a1_ystart, w2, tol);
    cplx l1 = cycle_integral(cb, cb.b1, cb.b1_ystart, w1, tol);
    cplx l2 = cycle_integral(cb, cb.b1, cb.b1_ystart, w2, tol);
    // iota-pullback: omega1 is anti-invariant, omega2 invariant
    G2CycleData D;
    D.A = Mat2{k1, -k1, k2, k2};
    D.B = Mat2{l1, -l1, l2, l2};
    D.Z = D.A.inverse() * D.B;
    D.normcoef = D.A.inverse();
    return D;
}

AJResult abel_jacobi_raw(const BiellipticCover &C, const CPoint &target,
                         const QuadratureSettings &settings) {
    settings.validate();
    double tol = std::min(settings.abs_tol, settings.rel_tol);
    SqrtCover cov;
    auto bp = C.branch_points();
    cov.poly = C.sextic_coeffs();
    cov.branch.assign(bp.begin(), bp.end());

    const cplx start_xi = 0.0;
    const cplx start_y = C.y0;

    auto integrate_both = [&](const Path &p, cplx ys, cplx *yend) {
        AJResult r;
        cplx ye1, ye2;
        r.I1 = integrate_on_cover(cov, p, ys, [](cplx, cplx y) { return 1.0 / y; }, tol, &ye1);
        r.I2 = integrate_on_cover(cov, p, ys, [](cplx xi, cplx y) { return xi / y; }, tol, &ye2);
        if (yend) *yend = ye1;
        return r;
    };

    if (target.kind == CPoint::Affine) {
        if (std::abs(cov.P(target.xi)) < 1e-12)
            throw std::invalid_argument("abel_jacobi_raw: target at a Weierstrass point");
        // direct segment, rerouted around the nearest branch point to flip
        // the sheet when the straight lift lands on the conjugate
        Path direct;
        direct.segs.push_back(Seg::line(start_xi, target.xi));
        cplx yend = cov.continue_y(direct, start_y);
        if (near(yend, target.y, 1e-6)) {
            return integrate_both(direct, start_y, nullptr);
        }
        // sheet flip: wind once around some branch point, routed with clearance
        for (auto b : cov.branch) {
            double gap = 1e300;
            for (auto w : cov.branch)
                if (std::abs(w - b) > 1e-12) gap = std::min(gap, std::abs(w - b));
            gap = std::min({gap, std::abs(target.xi - b), std::abs(b)});
            if (gap < 1e-6) continue;
            double rho = 0.35 * gap;
            cplx anchor = b + rho * (start_xi - b) / std::abs(start_xi - b);
            Path flip;
            flip.segs.push_back(Seg::line(start_xi, anchor));
            flip.segs.push_back(
                Seg::circle(b, rho, std::arg(anchor - b), std::arg(anchor - b) + 2.0 * M_PI));
            flip.segs.push_back(Seg::line(anchor, target.xi));
            bool clear = true;
            for (auto w : cov.branch) {
                if (std::abs(w - b) < 1e-12) continue;
                if (flip.min_dist_to(w) < 0.25 * rho) clear = false;
            }
            if (!clear) continue;
            cplx yend2 = cov.continue_y(flip, start_y);
            if (near(yend2, target.y, 1e-6)) return integrate_both(flip, start_y, nullptr);
        }
        throw std::runtime_error("abel_jacobi_raw: failed to reach the target sheet");
    }

    // infinity: ray out to R, then the analytic tail
    double Rbig = 0.0;
    for (auto w : cov.branch) Rbig = std::max(Rbig, std::abs(w));
    Rbig = 3.0 * Rbig + 2.0;
    cplx dir = std::exp(cplx(0, M_PI / 7.0));
    double best = -1.0;
    for (int k = 0; k < 12; ++k) {
        cplx d = std::exp(cplx(0, M_PI * (2.0 * k + 1.0) / 12.0));
        Path probe;
        probe.segs.push_back(Seg::line(start_xi, Rbig * d));
        double dmin = 1e300;
        for (auto w : cov.branch) dmin = std::min(dmin, probe.min_dist_to(w));
        if (dmin > best) {
            best = dmin;
            dir = d;
        }
    }
    cplx xiR = Rbig * dir;
    Path ray;
    ray.segs.push_back(Seg::line(start_xi, xiR));
    cplx yR;
    AJResult seg = integrate_both(ray, start_y, &yR);

    // sheet sign at the far point: y ~ s * i xi^3 * h(xi), h -> 1
    auto hfun = [&](cplx xi) {
        cplx prod = 1.0;
        for (cplx e : {C.tp, C.tp - 1.0, C.tp - C.t}) prod *= (1.0 - e / (xi * xi));
        return std::sqrt(prod);
    };
    cplx approx = cplx(0, 1) * xiR * xiR * xiR * hfun(xiR);
    double s = (std::abs(yR - approx) < std::abs(yR + approx)) ? 1.0 : -1.0;
    bool arrived_plus = s > 0;

    // tails: int_{R}^{inf} dxi/y and xi dxi/y along the ray, xi = xiR / w
    auto tail1 = gauss_legendre_adaptive(
        [&](double w) -> cplx {
            if (w == 0.0) return 0.0;
            cplx xi = xiR / w;
            return cplx(w, 0) / (s * cplx(0, 1) * xiR * xiR * hfun(xi));
        },
        0.0, 1.0, tol);
    auto tail2 = gauss_legendre_adaptive(
        [&](double w) -> cplx {
            cplx xi = (w == 0.0) ? cplx(1e30) : xiR / w;
            return 1.0 / (s * cplx(0, 1) * xiR * hfun(xi));
        },
        0.0, 1.0, tol);
    AJResult res{seg.I1 + tail1, seg.I2 + tail2};

    bool want_plus = (target.kind == CPoint::InfPlus);
    if (arrived_plus == want_plus) return res;
    // other infinity = iota image: omega1 flips sign, omega2 invariant
    return AJResult{-res.I1, res.I2};
}

ReciprocityResult omega_periods_reciprocity(const CPoint &q1, const CPoint &q2,
                                            const BiellipticCover &C,
                                            const QuadratureSettings &settings) {
    settings.validate();
    if (q1.infinite() || q2.infinite())
        throw std::invalid_argument("omega_periods_reciprocity: finite q-tilde points required");
    double tol = std::min(settings.abs_tol, settings.rel_tol);

    auto nu_only = Rank1Connection::with_points(0.0, 0.0, q1, q2);
    auto Tnu = omega_terms(nu_only, C);
    std::vector<cplx> avoid = {q1.xi, -q1.xi, q2.xi, -q2.xi};
    auto cb = cycle_basis(C, avoid);

    auto gnu = [&](cplx xi, cplx y) { return omega_coeff(Tnu, C, xi, y); };
    auto gnus = [&](cplx xi, cplx y) { return omega_star_coeff(Tnu, C, xi, y); };
    cplx nu_a1 = cycle_integral(cb, cb.a1, cb.a1_ystart, gnu, tol);
    cplx nu_a2 = cycle_integral(cb, cb.a1, cb.a1_ystart, gnus, tol);

    auto D = cycle_periods(C, settings);
    // solve a-period normalization: A^T (l10, l02)^T = -(nu_a1, nu_a2)^T
    Mat2 At{D.A(0, 0), D.A(1, 0), D.A(0, 1), D.A(1, 1)};
    if (std::abs(At.det()) < 1e-14)
        throw std::runtime_error("omega_periods_reciprocity: singular period block");
    Mat2 Ati = At.inverse();
    cplx l10 = -(Ati(0, 0) * nu_a1 + Ati(0, 1) * nu_a2);
    cplx l02 = -(Ati(1, 0) * nu_a1 + Ati(1, 1) * nu_a2);

    auto conn0 = Rank1Connection::with_points(l10, l02, q1, q2);
    ReciprocityResult R;
    R.lambda10 = l10;
    R.lambda02 = l02;
    R.contour = omega_periods(conn0, C, settings);

    // Abel-Jacobi coordinates from p-tilde_+ in the normalized basis
    auto aj_q1 = abel_jacobi_raw(C, q1, settings);
    auto aj_q2 = abel_jacobi_raw(C, q2, settings);
    auto aj_ip = abel_jacobi_raw(C, CPoint::inf_plus(), settings);
    auto aj_im = abel_jacobi_raw(C, CPoint::inf_minus(), settings);

    cplx S1 = aj_q1.I1 + aj_q2.I1 - aj_ip.I1 - aj_im.I1;
    cplx S2 = aj_q1.I2 + aj_q2.I2 - aj_ip.I2 - aj_im.I2;
    cplx z1 = D.normcoef(0, 0) * S1 + D.normcoef(0, 1) * S2;
    cplx z2 = D.normcoef(1, 0) * S1 + D.normcoef(1, 1) * S2;
    R.N3 = 2.0 * M_PI * cplx(0, 1) * z1;
    R.N4 = 2.0 * M_PI * cplx(0, 1) * z2;
    R.Z = D.Z;
    return R;
}

double reciprocity_defect(const ReciprocityResult &R) {
    const cplx tpi = 2.0 * M_PI * cplx(0, 1);
    cplx d3 = R.contour.N3 - R.N3, d4 = R.contour.N4 - R.N4;
    std::vector<std::vector<double>> basis;
    auto push = [&](cplx u, cplx v) {
        basis.push_back({u.real(), u.imag(), v.real(), v.imag()});
    };
    push(tpi, 0.0);
    push(0.0, tpi);
    push(tpi * R.Z(0, 0), tpi * R.Z(1, 0));
    push(tpi * R.Z(0, 1), tpi * R.Z(1, 1));
    auto r = lattice::lattice_reduce_residual(basis, {d3.real(), d3.imag(), d4.real(), d4.imag()});
    double n = 0;
    for (double x : r) n = std::max(n, std::abs(x));
    return n;
}

}  // namespace ellmono::periods
