#include "ellmono/curves.hpp"

#include <cmath>

namespace ellmono::curves {

bool on_curve(const EllipticCurve &E, const EPoint &p, double tol) {
    if (p.infinite) return true;
    double scale = 1.0 + std::pow(std::abs(p.x), 3.0);
    return std::abs(p.y * p.y - E.rhs(p.x)) <= tol * scale;
}

bool points_equal(const EPoint &a, const EPoint &b, double tol) {
    if (a.infinite || b.infinite) return a.infinite == b.infinite;
    return near(a.x, b.x, tol) && near(a.y, b.y, tol);
}

EPoint neg(const EPoint &p) {
    if (p.infinite) return p;
    return EPoint::affine(p.x, -p.y);
}

EPoint group_add(const EllipticCurve &E, const EPoint &P, const EPoint &Q) {
    if (P.infinite) return Q;
    if (Q.infinite) return P;
    cplx a2 = -(1.0 + E.t);
    cplx lam;
    if (near(P.x, Q.x)) {
        if (near(P.y, -Q.y)) return EPoint::inf();
        lam = E.rhs_deriv(P.x) / (2.0 * P.y);
    } else {
        lam = (Q.y - P.y) / (Q.x - P.x);
    }
    cplx x3 = lam * lam - a2 - P.x - Q.x;
    cplx y3 = lam * (P.x - x3) - P.y;
    return EPoint::affine(x3, y3);
}

EPoint group_mul(const EllipticCurve &E, long n, const EPoint &P) {
    EPoint base = n < 0 ? neg(P) : P;
    unsigned long k = n < 0 ? -(unsigned long)n : (unsigned long)n;
    EPoint acc = EPoint::inf();
    while (k) {
        if (k & 1) acc = group_add(E, acc, base);
        base = group_add(E, base, base);
        k >>= 1;
    }
    return acc;
}

DivisorClassE divclass(const EllipticCurve &E, long degree, const EPoint &rep) {
    if (!on_curve(E, rep)) throw std::invalid_argument("divclass: rep not on curve");
    return {degree, rep};
}

DivisorClassE divclass_add(const EllipticCurve &E, const DivisorClassE &a,
                           const DivisorClassE &b) {
    return {a.degree + b.degree, group_add(E, a.rep, b.rep)};
}

DivisorClassE divclass_neg(const EllipticCurve &E, const DivisorClassE &a) {
    (void)E;
    return {-a.degree, neg(a.rep)};
}

DivisorClassE divclass_of(const EllipticCurve &E,
                          const std::vector<std::pair<long, EPoint>> &terms) {
    long deg = 0;
    EPoint rep = EPoint::inf();
    for (const auto &[n, P] : terms) {
        if (!on_curve(E, P)) throw std::invalid_argument("divclass_of: mixed-curve input");
        deg += n;
        rep = group_add(E, rep, group_mul(E, n, P));
    }
    return {deg, rep};
}

bool divclass_equal(const EllipticCurve &E, const DivisorClassE &a,
                    const DivisorClassE &b, double tol) {
    (void)E;
    return a.degree == b.degree && points_equal(a.rep, b.rep, tol);
}

BiellipticCover::BiellipticCover(cplx t_, cplx tp_)
    : t(t_), tp(tp_), y0(0.0), base(t_) {
    if (near(tp, 0.0) || near(tp, 1.0))
        throw std::invalid_argument("BiellipticCover: t' must avoid {0,1}");
    if (near(t, tp))
        throw std::invalid_argument("BiellipticCover: t and t' must differ");
    y0 = std::sqrt(tp * (tp - 1.0) * (tp - t));  // principal branch, fixed once
}

std::array<cplx, 6> BiellipticCover::branch_points() const {
    cplx r1 = std::sqrt(tp - t), r2 = std::sqrt(tp - 1.0), r3 = std::sqrt(tp);
    return {r1, -r1, r2, -r2, r3, -r3};
}

std::vector<cplx> BiellipticCover::sextic_coeffs() const {
    // (tp - s)(tp-1 - s)(tp-t - s), s = xi^2  ->  expand in xi
    cplx a = tp, b = tp - 1.0, c = tp - t;
    // product = -s^3 + (a+b+c)s^2 - (ab+ac+bc)s + abc
    cplx e1 = a + b + c, e2 = a * b + a * c + b * c, e3 = a * b * c;
    return {e3, 0.0, -e2, 0.0, e1, 0.0, -1.0};
}

bool on_cover(const BiellipticCover &C, const CPoint &p, double tol) {
    if (p.infinite()) return true;
    double scale = 1.0 + std::pow(std::abs(p.xi), 6.0);
    return std::abs(p.y * p.y - C.sextic(p.xi)) <= tol * scale;
}

bool cpoints_equal(const CPoint &a, const CPoint &b, double tol) {
    if (a.kind != b.kind) return false;
    if (a.kind != CPoint::Affine) return true;
    return near(a.xi, b.xi, tol) && near(a.y, b.y, tol);
}

EPoint cover_map(const BiellipticCover &C, const CPoint &p) {
    if (!on_cover(C, p)) throw std::invalid_argument("cover_map: point not on curve");
    if (p.infinite()) return EPoint::inf();
    return EPoint::affine(C.tp - p.xi * p.xi, p.y);
}

std::pair<CPoint, CPoint> involutions(const BiellipticCover &C, const CPoint &p) {
    if (!on_cover(C, p)) throw std::invalid_argument("involutions: point not on curve");
    switch (p.kind) {
        case CPoint::Affine:
            return {CPoint::affine(-p.xi, p.y), CPoint::affine(p.xi, -p.y)};
        case CPoint::InfPlus:
            return {CPoint::inf_minus(), CPoint::inf_minus()};
        default:
            return {CPoint::inf_plus(), CPoint::inf_plus()};
    }
}

CPoint ramification_plus(const BiellipticCover &C) {
    return CPoint::affine(0.0, C.y0);
}
CPoint ramification_minus(const BiellipticCover &C) {
    return CPoint::affine(0.0, -C.y0);
}

cplx BiellipticNormalization::sextic(cplx xi) const {
    cplx s = xi * xi;
    return (s - t2 / t1) * (s - (1.0 - t2) / (1.0 - t1)) * (s - 1.0);
}

std::pair<cplx, cplx> BiellipticNormalization::pi1(cplx xi, cplx eta) const {
    return {xi * xi, eta};
}

std::pair<cplx, cplx> BiellipticNormalization::pi2(cplx xi, cplx eta) const {
    return {1.0 / (xi * xi), eta / (xi * xi * xi)};
}

double BiellipticNormalization::e1_residual(cplx x, cplx y) const {
    cplx rhs = (x - t2 / t1) * (x - (1.0 - t2) / (1.0 - t1)) * (x - 1.0);
    return std::abs(y * y - rhs) / (1.0 + std::abs(rhs));
}

double BiellipticNormalization::e2_residual(cplx x, cplx y) const {
    cplx rhs = (1.0 - (t2 / t1) * x) * (1.0 - ((1.0 - t2) / (1.0 - t1)) * x) * (1.0 - x);
    return std::abs(y * y - rhs) / (1.0 + std::abs(rhs));
}

BiellipticNormalization normalize_bielliptic(cplx t1, cplx t2) {
    for (cplx t : {t1, t2})
        if (near(t, 0.0) || near(t, 1.0))
            throw std::invalid_argument("normalize_bielliptic: parameters must avoid {0,1}");
    if (near(t1, t2))
        throw std::invalid_argument("normalize_bielliptic: coincident branch points (t1 = t2)");
    BiellipticNormalization N;
    N.t1 = t1;
    N.t2 = t2;
    N.r_mid = std::sqrt((1.0 - t2) / (1.0 - t1));
    N.r_out = std::sqrt(t2 / t1);
    if (near(N.r_out, 1.0) || near(N.r_mid, 1.0) || near(N.r_out, N.r_mid) ||
        near(N.r_out, -N.r_mid))
        throw std::invalid_argument("normalize_bielliptic: coincident branch points");
    N.branch = {1.0, -1.0, N.r_mid, -N.r_mid, N.r_out, -N.r_out};
    return N;
}

cplx j_invariant(cplx t) {
    if (near(t, 0.0) || near(t, 1.0))
        throw std::invalid_argument("j_invariant: t must avoid {0,1}");
    cplx num = t * t - t + 1.0;
    return 256.0 * num * num * num / (t * t * (t - 1.0) * (t - 1.0));
}

}  // namespace ellmono::curves
