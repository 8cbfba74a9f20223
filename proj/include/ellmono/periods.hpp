#pragma once

#include "ellmono/connections.hpp"
#include "ellmono/paths.hpp"

namespace ellmono::periods {

using connections::Rank1Connection;
using curves::BiellipticCover;
using curves::CPoint;

struct EllipticPeriods {
    cplx k, l, tau;
    bool orientation_flipped = false;  // set when l had to be negated for Im tau > 0
};

// periods of dx/y over cycles around the branch pairs {1,t} (k) and {0,1} (l)
EllipticPeriods elliptic_periods(cplx t, const QuadratureSettings &settings);

// reduce tau into the standard fundamental domain by T/S moves
cplx modular_reduce(cplx tau, int max_iter = 256);

struct HyperellipticConstants {
    double K, Kp, L, Lp;
};

// the four real integrals of §-figure convention for 1 < t < t', computed by
// two independent schemes (tanh-sinh and Gauss-Chebyshev) which must agree
HyperellipticConstants hyperelliptic_constants(double t, double tp,
                                               const QuadratureSettings &settings);

struct G2PeriodMatrix {
    Mat2 Z;
};

G2PeriodMatrix g2_period_matrix(cplx tau1, cplx tau2);
bool in_period_locus(const Mat2 &Z, double tol = 1e-9);

// Homology cycles of C realized as xi-plane loops with a starting branch:
// a1 encircles {sqrt(t'-t), sqrt(t'-1)}, b1 encircles {sqrt(t'-1), sqrt(t')};
// a2 = iota(a1) and b2 = iota(b1) are handled by pulling forms back, so only
// the two concrete loops are stored.
struct CycleBasis {
    Path a1, b1;
    cplx a1_ystart, b1_ystart;
    SqrtCover cov;  // the sextic with its branch points
};

CycleBasis cycle_basis(const BiellipticCover &C,
                       const std::vector<cplx> &avoid_xi = {});

// period of the 1-form g(xi,y) dxi over a cycle (with iota-pullback variants)
cplx cycle_integral(const CycleBasis &cb, const Path &loop, cplx ystart,
                    const std::function<cplx(cplx, cplx)> &g, double tol);

struct PeriodVector {
    cplx N1, N2, N3, N4;
};

PeriodVector omega_periods(const Rank1Connection &conn, const BiellipticCover &C,
                           const QuadratureSettings &settings);

// raw period data of the holomorphic basis (dxi/y, xi dxi/y) over the cycle
// basis, the normalized-basis coefficients and the period matrix Z = A^{-1} B
struct G2CycleData {
    Mat2 A, B, Z;     // A(i,j) = period of omega_{i+1} over a_{j+1}
    Mat2 normcoef;    // rows: coefficients of the normalized basis in (omega1, omega2)
};

G2CycleData cycle_periods(const BiellipticCover &C, const QuadratureSettings &settings);

// Abel-Jacobi integrals of (omega1, omega2) from the ramification point
// p-tilde_+ to a target point (or to inf_±), along a concrete path.
struct AJResult {
    cplx I1, I2;  // integrals of dxi/y and xi dxi/y
};

AJResult abel_jacobi_raw(const BiellipticCover &C, const CPoint &target,
                         const QuadratureSettings &settings);

struct ReciprocityResult {
    cplx N3, N4;          // from the reciprocity law
    cplx lambda10, lambda02;  // zero-a-period normalization constants
    PeriodVector contour;     // direct contour periods of the normalized form
    Mat2 Z;                   // period matrix of the cycle basis
};

// norm of (contour - reciprocity) reduced modulo the period lattice
// 2 pi i (1 | Z); Abel-Jacobi path classes shift both sides by its vectors
double reciprocity_defect(const ReciprocityResult &R);

// N_{2+j} = 2 pi i [z_j(q1) + z_j(q2) - z_j(inf_+) - z_j(inf_-)] for the
// zero-a-period representative of the connection form on O(q1+q2-inf_+-inf_-)
ReciprocityResult omega_periods_reciprocity(const CPoint &q1, const CPoint &q2,
                                            const BiellipticCover &C,
                                            const QuadratureSettings &settings);

}  // namespace ellmono::periods
