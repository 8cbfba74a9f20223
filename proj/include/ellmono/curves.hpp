#pragma once

#include <optional>
#include <utility>
#include <variant>

#include "ellmono/numerics.hpp"

namespace ellmono::curves {

// y^2 = x(x-1)(x-t), Legendre parameter t
struct EllipticCurve {
    cplx t;

    explicit EllipticCurve(cplx t_) : t(t_) {
        if (near(t, 0.0) || near(t, 1.0))
            throw std::invalid_argument("EllipticCurve: t must avoid {0,1}");
    }

    cplx rhs(cplx x) const { return x * (x - 1.0) * (x - t); }
    cplx rhs_deriv(cplx x) const {
        return 3.0 * x * x - 2.0 * (1.0 + t) * x + t;
    }
};

struct EPoint {
    // infinity is the group identity
    bool infinite = true;
    cplx x{}, y{};

    static EPoint inf() { return {}; }
    static EPoint affine(cplx x, cplx y) { return {false, x, y}; }
};

bool on_curve(const EllipticCurve &E, const EPoint &p, double tol = kPointTol);
bool points_equal(const EPoint &a, const EPoint &b, double tol = kPointTol);

EPoint neg(const EPoint &p);
EPoint group_add(const EllipticCurve &E, const EPoint &P, const EPoint &Q);
EPoint group_mul(const EllipticCurve &E, long n, const EPoint &P);

// degree-d divisor class [rep + (d-1) inf]
struct DivisorClassE {
    long degree = 0;
    EPoint rep = EPoint::inf();
};

DivisorClassE divclass(const EllipticCurve &E, long degree, const EPoint &rep);
DivisorClassE divclass_add(const EllipticCurve &E, const DivisorClassE &a,
                           const DivisorClassE &b);
DivisorClassE divclass_neg(const EllipticCurve &E, const DivisorClassE &a);
// class of a formal sum  sum_i n_i P_i  (no infinity padding applied)
DivisorClassE divclass_of(const EllipticCurve &E,
                          const std::vector<std::pair<long, EPoint>> &terms);
bool divclass_equal(const EllipticCurve &E, const DivisorClassE &a,
                    const DivisorClassE &b, double tol = kPointTol);

// Bielliptic double cover  C: y^2 = (t'-xi^2)(t'-1-xi^2)(t'-t-xi^2) -> E,
// (xi, y) |-> (t' - xi^2, y).  Branch points of f on E: p_± = (t', ±y0).
struct BiellipticCover {
    cplx t, tp, y0;
    EllipticCurve base;

    BiellipticCover(cplx t_, cplx tp_);

    cplx sextic(cplx xi) const {
        cplx s = xi * xi;
        return (tp - s) * (tp - 1.0 - s) * (tp - t - s);
    }
    // the six branch points ±sqrt(t'-t), ±sqrt(t'-1), ±sqrt(t')
    std::array<cplx, 6> branch_points() const;
    std::vector<cplx> sextic_coeffs() const;

    EPoint p_plus() const { return EPoint::affine(tp, y0); }
    EPoint p_minus() const { return EPoint::affine(tp, -y0); }
};

struct CPoint {
    enum Kind { Affine, InfPlus, InfMinus } kind = InfPlus;
    cplx xi{}, y{};

    static CPoint affine(cplx xi, cplx y) { return {Affine, xi, y}; }
    static CPoint inf_plus() { return {InfPlus}; }
    static CPoint inf_minus() { return {InfMinus}; }
    bool infinite() const { return kind != Affine; }
};

bool on_cover(const BiellipticCover &C, const CPoint &p, double tol = kPointTol);
bool cpoints_equal(const CPoint &a, const CPoint &b, double tol = kPointTol);

// covering map f: C -> E; throws if p is not on C
EPoint cover_map(const BiellipticCover &C, const CPoint &p);

// (galois involution (xi,y)->(-xi,y), hyperelliptic involution (xi,y)->(xi,-y));
// both swap the two points at infinity (sheet convention: inf_+ has Im y > 0
// as xi -> +inf along the real axis).
std::pair<CPoint, CPoint> involutions(const BiellipticCover &C, const CPoint &p);

CPoint ramification_plus(const BiellipticCover &C);   // (0, +y0)
CPoint ramification_minus(const BiellipticCover &C);  // (0, -y0)

// Coordinate normalization of a bielliptic pair (E1, E2) with parameters
// (t1, t2): branch data of the sextic model and the two subcover maps.
struct BiellipticNormalization {
    std::array<cplx, 6> branch;     // ±1, ±sqrt((1-t2)/(1-t1)), ±sqrt(t2/t1)
    cplx r_mid, r_out;              // the two square roots used
    cplx t1, t2;

    // curve equation eta^2 = (xi^2 - t2/t1)(xi^2 - (1-t2)/(1-t1))(xi^2 - 1)
    cplx sextic(cplx xi) const;
    // pi_1: (xi,eta) -> (xi^2, eta); residual of the E1 equation at the image
    std::pair<cplx, cplx> pi1(cplx xi, cplx eta) const;
    // pi_2: (xi,eta) -> (1/xi^2, eta/xi^3)
    std::pair<cplx, cplx> pi2(cplx xi, cplx eta) const;
    double e1_residual(cplx x, cplx y) const;
    double e2_residual(cplx x, cplx y) const;
};

BiellipticNormalization normalize_bielliptic(cplx t1, cplx t2);

cplx j_invariant(cplx t);

}  // namespace ellmono::curves
