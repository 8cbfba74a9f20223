#include "ellmono/connections.hpp"

#include <cmath>

#include "ellmono/paths.hpp"

namespace ellmono::connections {

namespace {

constexpr double kDegenerateTol = 1e-9;

SqrtCover cubic_cover(const BiellipticCover &C) {
    // y^2 = x(x-1)(x-t) on E
    return SqrtCover{{0.0, C.t, -(1.0 + C.t), 1.0}, {0.0, 1.0, C.t}};
}

}  // namespace

OmegaTerms omega_terms(const Rank1Connection &conn, const BiellipticCover &C) {
    OmegaTerms T;
    T.lambda1 = conn.lambda1;
    T.lambda2 = conn.lambda2;
    if (conn.trivial()) return T;

    const auto &pts = std::get<Rank1Connection::Points>(conn.bundle);
    for (const CPoint &q : {pts.q1, pts.q2}) {
        if (!curves::on_cover(C, q))
            throw std::invalid_argument("Rank1Connection: q-tilde not on C");
        switch (q.kind) {
            case CPoint::InfPlus:
                ++T.n_infplus;
                T.warnings.push_back("q-tilde at inf_+ (case c input)");
                break;
            case CPoint::InfMinus:
                ++T.n_infminus;
                T.warnings.push_back("q-tilde at inf_- (case c input)");
                break;
            case CPoint::Affine: {
                if (std::abs(q.xi) <= kDegenerateTol) {
                    if (near(q.y, C.y0))
                        ++T.n_pplus;
                    else
                        ++T.n_pminus;
                    T.warnings.push_back("q-tilde at a ramification point (case d input)");
                } else {
                    if (std::abs(q.xi) <= 1e3 * kDegenerateTol)
                        T.warnings.push_back("q-tilde very close to a ramification point");
                    T.fin.push_back({q.xi, q.y, C.tp - q.xi * q.xi});
                }
                break;
            }
        }
    }
    return T;
}

cplx omega_coeff(const OmegaTerms &T, const BiellipticCover &C, cplx xi, cplx y) {
    cplx g = (T.lambda1 + T.lambda2 * xi) / y;
    for (const auto &f : T.fin) g += 0.5 * (y + f.y) / ((xi - f.xi) * y);
    if (T.n_pplus) g += 0.5 * double(T.n_pplus) * (y + C.y0) / (xi * y);
    if (T.n_pminus) g += 0.5 * double(T.n_pminus) * (y - C.y0) / (xi * y);
    if (T.n_infplus != T.n_infminus)
        g += cplx(0, 0.5) * double(T.n_infminus - T.n_infplus) * xi * xi / y;
    return g;
}

cplx omega_star_coeff(const OmegaTerms &T, const BiellipticCover &C, cplx xi, cplx y) {
    // iota^* (g(xi,y) dxi) = -g(-xi, y) dxi
    return -omega_coeff(T, C, -xi, y);
}

cplx omega_eval(const Rank1Connection &conn, const BiellipticCover &C,
                const CPoint &p) {
    if (p.infinite())
        throw std::domain_error("omega_eval: coefficient w.r.t. dxi undefined at infinity");
    if (!curves::on_cover(C, p))
        throw std::invalid_argument("omega_eval: point not on C");
    auto T = omega_terms(conn, C);
    for (const auto &f : T.fin)
        if (near(p.xi, f.xi) && near(p.y, f.y))
            throw std::domain_error("omega_eval: evaluation at a pole");
    if ((T.n_pplus || T.n_pminus) && std::abs(p.xi) < 1e-12)
        throw std::domain_error("omega_eval: evaluation at a pole");
    return omega_coeff(T, C, p.xi, p.y);
}

Mat2 ConnectionMatrix::at_lift(cplx xi, cplx y) const {
    if (std::abs(xi) < 1e-14)
        throw std::domain_error("ConnectionMatrix: evaluation at a branch point of f");
    cplx s = xi * xi;  // = t' - x
    for (const auto &f : terms.fin)
        if (std::abs(s - (cover.tp - f.x)) < 1e-14 * (1.0 + std::abs(s)))
            throw std::domain_error("ConnectionMatrix: evaluation at an apparent pole");
    cplx gp = omega_coeff(terms, cover, xi, y);
    cplx gm = omega_coeff(terms, cover, -xi, y);
    cplx Gp = -gp / (2.0 * xi);
    cplx Gm = gm / (2.0 * xi);
    cplx Ec = 0.5 * (Gp + Gm);
    cplx Oc = (Gp - Gm) / (2.0 * xi);
    return {Ec, s * Oc, Oc, Ec - 0.5 / s};
}

Mat2 ConnectionMatrix::at(cplx x, cplx y) const {
    return at_lift(std::sqrt(cover.tp - x), y);
}

ConnectionMatrix direct_image_matrix(const Rank1Connection &conn,
                                     const BiellipticCover &C) {
    return ConnectionMatrix{C, omega_terms(conn, C)};
}

ResidueSet analytic_residues(const Rank1Connection &conn, const BiellipticCover &C) {
    auto T = omega_terms(conn, C);
    ResidueSet R;
    cplx y0 = C.y0, l1 = T.lambda1;

    cplx rho_p = l1 / (2.0 * y0), rho_m = -l1 / (2.0 * y0);
    for (const auto &f : T.fin) {
        rho_p += (f.y + y0) * f.xi / (4.0 * y0 * (f.x - C.tp));
        rho_m -= (f.y - y0) * f.xi / (4.0 * y0 * (f.x - C.tp));
    }
    cplx ep = 0.5 * double(T.n_pplus), em = 0.5 * double(T.n_pminus);
    R.at_p_plus = {ep, 0.0, rho_p, 0.5 + ep};
    R.at_p_minus = {em, 0.0, rho_m, 0.5 + em};

    // group finite poles by their E-image
    std::vector<std::pair<cplx, Mat2>> qres;
    for (const auto &f : T.fin) {
        Mat2 r{0.5, 0.5 * f.xi, 0.5 / f.xi, 0.5};
        bool merged = false;
        for (auto &[x, m] : qres)
            if (near(x, f.x)) {
                m = m + r;
                merged = true;
                break;
            }
        if (!merged) qres.emplace_back(f.x, r);
    }
    Mat2 total = R.at_p_plus + R.at_p_minus;
    if (!qres.empty()) {
        R.at_q1 = qres[0].second;
        R.q1 = EPoint::affine(qres[0].first, 0.0);
        // record the actual y of the first matching term
        for (const auto &f : T.fin)
            if (near(f.x, qres[0].first)) { R.q1 = EPoint::affine(f.x, f.y); break; }
        total = total + *R.at_q1;
    }
    if (qres.size() > 1) {
        R.at_q2 = qres[1].second;
        for (const auto &f : T.fin)
            if (near(f.x, qres[1].first)) { R.q2 = EPoint::affine(f.x, f.y); break; }
        total = total + *R.at_q2;
    }
    Mat2 at_inf = -total;
    if (at_inf.norm() > 1e-13) R.at_infinity = at_inf;
    return R;
}

std::vector<EPoint> pole_centers(const ConnectionMatrix &A) {
    std::vector<EPoint> c;
    c.push_back(EPoint::affine(A.cover.tp, A.cover.y0));
    c.push_back(EPoint::affine(A.cover.tp, -A.cover.y0));
    for (const auto &f : A.terms.fin) {
        bool seen = false;
        for (const auto &p : c)
            if (!p.infinite && near(p.x, f.x) ) seen = true;
        if (!seen) c.push_back(EPoint::affine(f.x, f.y));
    }
    c.push_back(EPoint::inf());
    return c;
}

namespace {

Mat2 residue_finite(const ConnectionMatrix &A, const EPoint &center, double r,
                    const QuadratureSettings &st) {
    SqrtCover cub = cubic_cover(A.cover);
    if (cub.dist_to_branch(center.x) < 2.0 * r)
        throw std::invalid_argument("numeric_residue: contour touches a branch value of E");
    // y on the contour start, continued from the center
    cplx ystart = cub.continue_y(Seg::line(center.x, center.x + r), center.y);
    Mat2 prev;
    for (int n = 64; n <= (1 << 15); n *= 2) {
        Mat2 sum;
        cplx y = ystart;
        cplx xprev = center.x + r;
        for (int k = 0; k < n; ++k) {
            double th = 2.0 * M_PI * k / n;
            cplx x = center.x + r * std::exp(cplx(0, th));
            y = cub.step_y(xprev, y, x);
            xprev = x;
            sum = sum + A.at(x, y) * (r * std::exp(cplx(0, th)));
        }
        sum = sum * (1.0 / double(n));
        if (n > 64 && dist(sum, prev) <= st.abs_tol + st.rel_tol * sum.norm())
            return sum;
        prev = sum;
    }
    throw QuadratureFailure("numeric_residue: contour quadrature did not converge");
}

Mat2 residue_infinity(const ConnectionMatrix &A, double rho,
                      const QuadratureSettings &st) {
    const cplx t = A.cover.t;
    auto solve_v = [&](cplx u) {
        cplx v = u * u * u;
        for (int i = 0; i < 60; ++i) {
            cplx f = v - u * u * u + (1.0 + t) * u * u * v - t * u * v * v;
            cplx df = 1.0 + (1.0 + t) * u * u - 2.0 * t * u * v;
            cplx step = f / df;
            v -= step;
            if (std::abs(step) < 1e-16 * (1.0 + std::abs(v))) break;
        }
        return v;
    };
    Mat2 prev;
    for (int n = 64; n <= (1 << 15); n *= 2) {
        Mat2 sum;
        for (int k = 0; k < n; ++k) {
            double th = 2.0 * M_PI * k / n;
            cplx u = rho * std::exp(cplx(0, th));
            cplx v = solve_v(u);
            cplx x = u / v, y = 1.0 / v;
            cplx dvdu = (3.0 * u * u - 2.0 * (1.0 + t) * u * v + t * v * v) /
                        (1.0 + (1.0 + t) * u * u - 2.0 * t * u * v);
            cplx dxdu = (v - u * dvdu) / (v * v);
            sum = sum + A.at(x, y) * (dxdu * u);
        }
        sum = sum * (1.0 / double(n));
        if (n > 64 && dist(sum, prev) <= st.abs_tol + st.rel_tol * sum.norm())
            return sum;
        prev = sum;
    }
    throw QuadratureFailure("numeric_residue: infinity contour did not converge");
}

}  // namespace

Mat2 numeric_residue(const ConnectionMatrix &A, const EPoint &center,
                     double radius, const QuadratureSettings &settings) {
    settings.validate();
    if (radius <= 0) throw std::invalid_argument("numeric_residue: radius must be positive");
    if (center.infinite) return residue_infinity(A, radius, settings);
    // pole collision guard: no other pole within 2*radius in the x-plane
    // (a pole over the same x but on the other sheet is invisible to the contour)
    for (const auto &p : pole_centers(A)) {
        if (p.infinite) continue;
        if (near(p.x, center.x)) continue;
        if (std::abs(p.x - center.x) < 2.0 * radius)
            throw std::invalid_argument("numeric_residue: pole collision inside contour");
    }
    return residue_finite(A, center, radius, settings);
}

std::pair<cplx, cplx> scalar_ode_coeffs(const Rank1Connection &conn,
                                        const BiellipticCover &C, cplx x,
                                        cplx y) {
    if (!conn.trivial())
        throw std::invalid_argument("scalar_ode_coeffs: trivial-bundle connection required");
    cplx t = C.t, tp = C.tp;
    cplx P3 = x * (x - 1.0) * (x - t);
    cplx dP3 = 3.0 * x * x - 2.0 * (1.0 + t) * x + t;
    if (std::abs(P3) < 1e-14 || std::abs(x - tp) < 1e-14)
        throw std::domain_error("scalar_ode_coeffs: singular x");
    cplx l1 = conn.lambda1, l2 = conn.lambda2;
    cplx p = dP3 / (2.0 * P3) - l2 / y + 1.0 / (2.0 * (x - tp));
    cplx q = l1 * l1 / (4.0 * P3 * (x - tp)) + l2 * l2 / (4.0 * P3) -
             l2 / (4.0 * (x - tp) * y);
    return {p, q};
}

}  // namespace ellmono::connections
