#pragma once

#include "ellmono/periods.hpp"

namespace ellmono::monodromy {

using connections::Rank1Connection;
using curves::BiellipticCover;
using curves::CPoint;

struct TransportSettings {
    double rtol = 1e-10;
    double atol = 1e-12;
    double initial_step = 1e-2;
    double clearance_factor = 4.0;

    void validate() const {
        if (rtol <= 0 || atol <= 0 || initial_step <= 0 || clearance_factor <= 0)
            throw std::invalid_argument("TransportSettings: parameters must be positive");
    }
};

// Loops on E \ {p_+, p_-} based at a finite point, stored as their lifts to
// the xi-plane (x = t' - xi^2, y tracked along).  The gammas are of the form
// d_i (small circle around t') d_i^{-1}; a and b push the genus-2 cycles down.
struct LoopSpec {
    cplx xi_base;          // base lift: (xi_b, y_b), xi_b on the imaginary axis
    cplx x_base, y_base;
    Path a, b, g1, g2;     // closed in x; lifts start at (xi_base, y_base)
    double gamma_radius;   // xi-radius of the small circles around 0
    double outer_radius;   // |xi| of the sheet-switch arcs in g2
    bool a_uses_reversed = false, b_uses_reversed = false;
};

LoopSpec standard_loops(const BiellipticCover &C,
                        const std::vector<cplx> &avoid_xi = {});

struct MonodromyRep {
    Mat2 Ma, Mb, Mg1, Mg2;
    std::string method;
};

double relation_residual(const MonodromyRep &rep);  // ||[Ma,Mb] Mg1 Mg2 - I||
double involution_residual(const MonodromyRep &rep);  // max ||Mgi^2 - I||

// Closed forms: trivial bundle via (K, K', L, L') when the parameters are in
// the real configuration 1 < t < t', otherwise via the periods N_1..N_4 of
// omega over the cycle basis.  M_gamma_i = diag(1, -1) in both cases.
MonodromyRep closed_form_monodromy(const Rank1Connection &conn,
                                   const BiellipticCover &C,
                                   const QuadratureSettings &settings);
MonodromyRep closed_form_from_periods(const periods::PeriodVector &N);

// Numerical transport of d Phi = -A Phi along the four loops, with the frame
// at the base point fixed by the fundamental matrix normalized at the
// ramification point p-tilde_+ (this reproduces the closed forms entry-wise).
MonodromyRep transport_monodromy(const Rank1Connection &conn,
                                 const BiellipticCover &C, const LoopSpec &loops,
                                 const TransportSettings &ts,
                                 const QuadratureSettings &qs);

// fundamental matrix at the end of a xi-path starting at the base lift
Mat2 fundamental_matrix(const Rank1Connection &conn, const BiellipticCover &C,
                        const LoopSpec &loops, const Path &from_base,
                        const QuadratureSettings &qs);
Mat2 base_frame(const Rank1Connection &conn, const BiellipticCover &C,
                const LoopSpec &loops, const QuadratureSettings &qs);

// transport of the rank-1 connection itself along a closed cycle of C
cplx rank1_transport(const Rank1Connection &conn, const BiellipticCover &C,
                     const Path &cycle, cplx y_start, const TransportSettings &ts);

bool rh_image_elliptic(cplx w1, cplx w2, double tol = 1e-9);
bool rh_image_genus2(const std::array<cplx, 4> &w, double tol = 1e-9);

struct IsomonodromyInvariant {
    cplx lambda1, lambda2;
    cplx w1, w2;  // z[L] + Z lambda
};

IsomonodromyInvariant isomonodromy_invariants(cplx lambda1, cplx lambda2,
                                              cplx z1, cplx z2, const Mat2 &Z);
bool same_isomonodromy_surface(const IsomonodromyInvariant &u,
                               const IsomonodromyInvariant &v, const Mat2 &Z,
                               double tol = 1e-8);

}  // namespace ellmono::monodromy
