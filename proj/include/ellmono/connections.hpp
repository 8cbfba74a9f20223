#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "ellmono/curves.hpp"
#include "ellmono/quadrature.hpp"

namespace ellmono::connections {

using curves::BiellipticCover;
using curves::CPoint;
using curves::EPoint;

// Rank-1 connection d + omega on a degree-0 line bundle over C.
// Trivial:  omega = lambda1 dxi/y + lambda2 xi dxi/y.
// Points:   L = O(q1 + q2 - inf_+ - inf_-) trivialized by e = 1; omega picks
//           up simple poles with residue +1 at the q_i and -1 at inf_±.
struct Rank1Connection {
    cplx lambda1, lambda2;
    struct Trivial {};
    struct Points {
        CPoint q1, q2;
    };
    std::variant<Trivial, Points> bundle;

    bool trivial() const { return std::holds_alternative<Trivial>(bundle); }

    static Rank1Connection trivial_bundle(cplx l1, cplx l2) {
        return {l1, l2, Trivial{}};
    }
    static Rank1Connection with_points(cplx l1, cplx l2, CPoint q1, CPoint q2) {
        return {l1, l2, Points{q1, q2}};
    }
};

// omega split into its defining terms.  A q-tilde at inf_± contributes the
// third-kind form ∓(i/2) xi^2 dxi / y (the renormalized limit of the finite
// pole term), a q-tilde at a ramification point the term (y ± y0)/(2 xi y) dxi.
struct OmegaTerms {
    cplx lambda1, lambda2;
    struct Fin {
        cplx xi, y, x;
    };
    std::vector<Fin> fin;
    int n_pplus = 0, n_pminus = 0;
    int n_infplus = 0, n_infminus = 0;
    std::vector<std::string> warnings;
};

OmegaTerms omega_terms(const Rank1Connection &conn, const BiellipticCover &C);

// coefficient of omega w.r.t. dxi at a lifted point (xi, y) of C
cplx omega_coeff(const OmegaTerms &T, const BiellipticCover &C, cplx xi, cplx y);
// coefficient of the galois pullback iota^* omega w.r.t. dxi
cplx omega_star_coeff(const OmegaTerms &T, const BiellipticCover &C, cplx xi, cplx y);

cplx omega_eval(const Rank1Connection &conn, const BiellipticCover &C,
                const CPoint &p);

// Direct image matrix A of f_* (d + omega) in the meromorphic frame (1, xi),
// as a coefficient matrix w.r.t. dx.  With omega = [E(x) + xi O(x)] dx the
// matrix is A = [[E, (t'-x) O], [O, E - 1/(2(t'-x))]]; E and O are obtained
// by symmetrizing over the two lifts, which covers every bundle case.
struct ConnectionMatrix {
    BiellipticCover cover;
    OmegaTerms terms;

    Mat2 at(cplx x, cplx y) const;          // lift chosen internally
    Mat2 at_lift(cplx xi, cplx y) const;    // explicit lift (xi, y)
};

ConnectionMatrix direct_image_matrix(const Rank1Connection &conn,
                                     const BiellipticCover &C);

struct ResidueSet {
    Mat2 at_p_plus, at_p_minus;
    std::optional<Mat2> at_q1, at_q2;
    std::optional<Mat2> at_infinity;
    EPoint q1, q2;  // E-images when present
};

// Closed-form residues of A.  The entries at q_i and infinity follow the
// printed matrices; the (2,1) entries at p_± carry a 1/y0 factor on the
// divisor-dependent term and a global sign at p_-, which is what the residue
// theorem requires of the connection matrix.
ResidueSet analytic_residues(const Rank1Connection &conn, const BiellipticCover &C);

// Contour oracle: (1/2 pi i) of the integral of A around `center` in the
// local parameter (x - x0 at finite points, the u = x/y chart at infinity).
Mat2 numeric_residue(const ConnectionMatrix &A, const EPoint &center,
                     double radius, const QuadratureSettings &settings);

// residue theorem check data: all pole centers of A as E-points
std::vector<EPoint> pole_centers(const ConnectionMatrix &A);

// coefficients (p, q) of the scalar reduction Phi1'' + p Phi1' + q Phi1 = 0
// for the trivial-bundle connection; y is the chosen branch at x.
std::pair<cplx, cplx> scalar_ode_coeffs(const Rank1Connection &conn,
                                        const BiellipticCover &C, cplx x,
                                        cplx y);

}  // namespace ellmono::connections
