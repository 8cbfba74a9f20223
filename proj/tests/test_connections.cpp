#include <doctest.h>

#include <random>

#include "ellmono/connections.hpp"
#include "ellmono/paths.hpp"

using namespace ellmono;
using namespace ellmono::curves;
using namespace ellmono::connections;

namespace {

CPoint lift(const BiellipticCover &C, cplx xi, int sign = +1) {
    return CPoint::affine(xi, double(sign) * std::sqrt(C.sextic(xi)));
}

double contour_radius(const ConnectionMatrix &A, const EPoint &center) {
    double d = 1e300;
    std::vector<cplx> special = {0.0, 1.0, A.cover.t, A.cover.tp};
    for (const auto &f : A.terms.fin) special.push_back(f.x);
    for (auto s : special) {
        double dd = std::abs(s - center.x);
        if (dd > 1e-12) d = std::min(d, dd);
    }
    return d / 4.0;
}

}  // namespace

TEST_CASE("omega_eval basics") {
    BiellipticCover C(2.0, 3.0);
    auto conn = Rank1Connection::trivial_bundle(1.0, 0.0);
    auto p = lift(C, cplx(0.5, 0.3));
    CHECK(near(omega_eval(conn, C, p), 1.0 / p.y));

    // parity: for lambda2 = 0 trivial forms, g(-xi, y) = g(xi, y) * ... dxi/y is odd
    auto conn2 = Rank1Connection::trivial_bundle(0.7, 0.0);
    auto q = lift(C, cplx(0.4, -0.2));
    auto T = omega_terms(conn2, C);
    CHECK(near(omega_coeff(T, C, -q.xi, q.y), omega_coeff(T, C, q.xi, q.y)));
    // so the form g dxi pulls back to minus itself under iota
    CHECK(near(omega_star_coeff(T, C, q.xi, q.y), -omega_coeff(T, C, q.xi, q.y)));
}

TEST_CASE("residue of omega at q1 via contour equals +1") {
    BiellipticCover C(2.0, 3.0);
    auto q1 = lift(C, cplx(0.5, 0.25));
    auto q2 = lift(C, cplx(-0.3, 0.55), -1);
    auto conn = Rank1Connection::with_points(cplx(0.2, 0.1), cplx(-0.4, 0.3), q1, q2);
    auto T = omega_terms(conn, C);

    SqrtCover cov{C.sextic_coeffs(), {}};
    {
        auto bp = C.branch_points();
        cov.branch.assign(bp.begin(), bp.end());
    }
    // small circle around q1 in the xi-plane on the sheet through q1
    double r = 0.05;
    int n = 4096;
    cplx sum = 0.0;
    cplx xiprev = q1.xi + r, y = cov.step_y(q1.xi, q1.y, xiprev);
    for (int k = 0; k < n; ++k) {
        double th = 2.0 * M_PI * k / n;
        cplx xi = q1.xi + r * std::exp(cplx(0, th));
        y = cov.step_y(xiprev, y, xi);
        xiprev = xi;
        sum += omega_coeff(T, C, xi, y) * (r * std::exp(cplx(0, th)));
    }
    sum /= double(n);
    CHECK(std::abs(sum - 1.0) < 1e-8);
}

TEST_CASE("trivial connection matrix matches the closed form") {
    BiellipticCover C(2.0, 3.0);
    cplx l1(0.3, -0.2), l2(0.1, 0.45);
    auto conn = Rank1Connection::trivial_bundle(l1, l2);
    auto A = direct_image_matrix(conn, C);

    cplx x(0.37, 0.21);
    cplx y = std::sqrt(x * (x - 1.0) * (x - C.t));
    Mat2 got = A.at(x, y);
    Mat2 want{-l2 / (2.0 * y), -l1 / (2.0 * y),
              -l1 / (2.0 * (C.tp - x) * y),
              -(l2 / (2.0 * y) + 0.5 / (C.tp - x))};
    CHECK(dist(got, want) < 1e-12);

    // A = [[0,0],[0, -1/(2(t'-x))]] at lambda = 0
    auto A0 = direct_image_matrix(Rank1Connection::trivial_bundle(0.0, 0.0), C);
    Mat2 g0 = A0.at(x, y);
    CHECK(dist(g0, Mat2{0, 0, 0, -0.5 / (C.tp - x)}) < 1e-13);

    // trace identity
    CHECK(near(got.trace(), -l2 / y - 0.5 / (C.tp - x)));
}

TEST_CASE("general connection matrix matches the printed formula") {
    BiellipticCover C(2.0, 3.0);
    auto q1 = lift(C, cplx(0.5, 0.25));
    auto q2 = lift(C, cplx(-0.3, 0.55), -1);
    cplx l1(0.2, 0.1), l2(-0.4, 0.3);
    auto conn = Rank1Connection::with_points(l1, l2, q1, q2);
    auto A = direct_image_matrix(conn, C);

    cplx x(0.9, 0.8);
    cplx y = std::sqrt(x * (x - 1.0) * (x - C.t));
    cplx x1 = C.tp - q1.xi * q1.xi, x2 = C.tp - q2.xi * q2.xi;
    cplx y1 = q1.y, y2 = q2.y, xi1 = q1.xi, xi2 = q2.xi;
    cplx nu_e = 0.5 * ((y + y1) / (x1 - x) + (y + y2) / (x2 - x));
    cplx nu_o = 0.5 * ((y + y1) * xi1 / (x1 - x) + (y + y2) * xi2 / (x2 - x));
    Mat2 want{-0.5 * (nu_e + l2) / y, -0.5 * (nu_o + l1) / y,
              -0.5 * (nu_o / (C.tp - x) + l1 / (C.tp - x)) / y,
              -0.5 * (nu_e + l2 + y / (C.tp - x)) / y};
    Mat2 got = A.at(x, y);
    CHECK(dist(got, want) < 1e-12);

    // gauge consistency: both lifts give the same matrix
    cplx xi = std::sqrt(C.tp - x);
    CHECK(dist(A.at_lift(xi, y), A.at_lift(-xi, y)) < 1e-12);
}

TEST_CASE("analytic residues: trivial case as printed") {
    BiellipticCover C(2.0, 3.0);
    cplx l1 = 1.0;
    auto R = analytic_residues(Rank1Connection::trivial_bundle(l1, cplx(0.33, 0.1)), C);
    // y0 = sqrt(6)
    CHECK(near(C.y0, std::sqrt(cplx(6.0))));
    CHECK(dist(R.at_p_plus, Mat2{0, 0, 1.0 / (2.0 * std::sqrt(cplx(6.0))), 0.5}) < 1e-12);
    CHECK(dist(R.at_p_minus, Mat2{0, 0, -1.0 / (2.0 * std::sqrt(cplx(6.0))), 0.5}) < 1e-12);
    CHECK(dist(R.at_p_plus + R.at_p_minus, Mat2{0, 0, 0, 1.0}) < 1e-12);
    REQUIRE(R.at_infinity.has_value());
    CHECK(dist(*R.at_infinity, Mat2{0, 0, 0, -1.0}) < 1e-12);
    CHECK(!R.at_q1.has_value());
}

TEST_CASE("analytic residues: generic eigenvalues and the residue theorem") {
    BiellipticCover C(cplx(2.0, 0.15), cplx(3.0, -0.2));
    auto q1 = lift(C, cplx(0.52, 0.21));
    auto q2 = lift(C, cplx(-0.31, 0.62), -1);
    auto conn = Rank1Connection::with_points(cplx(0.25, -0.1), cplx(0.4, 0.2), q1, q2);
    auto R = analytic_residues(conn, C);

    REQUIRE(R.at_q1.has_value());
    REQUIRE(R.at_q2.has_value());
    // Res_q = [[1/2, xi/2],[1/(2xi), 1/2]] with eigenvalues {0,1}
    auto ev = R.at_q1->eigenvalues();
    CHECK(((near(ev[0], 0.0) && near(ev[1], 1.0)) || (near(ev[0], 1.0) && near(ev[1], 0.0))));
    // p± eigenvalues {0, 1/2}
    auto evp = R.at_p_plus.eigenvalues();
    CHECK(((near(evp[0], 0.0) && near(evp[1], 0.5)) || (near(evp[0], 0.5) && near(evp[1], 0.0))));
    // infinity eigenvalues {-1,-2}
    REQUIRE(R.at_infinity.has_value());
    auto evi = R.at_infinity->eigenvalues();
    CHECK(((near(evi[0], -1.0) && near(evi[1], -2.0)) || (near(evi[0], -2.0) && near(evi[1], -1.0))));
    // printed infinity matrix
    Mat2 want_inf{-1.0, -(q1.xi + q2.xi) / 2.0, 0.0, -2.0};
    CHECK(dist(*R.at_infinity, want_inf) < 1e-12);

    // entry-wise residue theorem
    Mat2 sum = R.at_p_plus + R.at_p_minus + *R.at_q1 + *R.at_q2 + *R.at_infinity;
    CHECK(sum.norm() < 1e-12);
}

TEST_CASE("numeric residues match analytic ones") {
    QuadratureSettings st;
    st.abs_tol = 1e-12;
    st.rel_tol = 1e-12;

    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int iter = 0; iter < 5; ++iter) {
        BiellipticCover C(cplx(2.0 + 0.2 * u(rng), 0.2 * u(rng)),
                          cplx(3.0 + 0.2 * u(rng), 0.2 * u(rng)));
        auto q1 = lift(C, cplx(0.5 + 0.1 * u(rng), 0.2 + 0.1 * u(rng)));
        auto q2 = lift(C, cplx(-0.35 + 0.1 * u(rng), 0.5 + 0.1 * u(rng)), -1);
        auto conn = Rank1Connection::with_points(cplx(u(rng), u(rng)),
                                                 cplx(u(rng), u(rng)), q1, q2);
        auto A = direct_image_matrix(conn, C);
        auto R = analytic_residues(conn, C);

        auto pp = EPoint::affine(C.tp, C.y0);
        auto pm = EPoint::affine(C.tp, -C.y0);
        CHECK(dist(numeric_residue(A, pp, contour_radius(A, pp), st), R.at_p_plus) < 1e-9);
        CHECK(dist(numeric_residue(A, pm, contour_radius(A, pm), st), R.at_p_minus) < 1e-9);
        CHECK(dist(numeric_residue(A, R.q1, contour_radius(A, R.q1), st), *R.at_q1) < 1e-9);
        CHECK(dist(numeric_residue(A, R.q2, contour_radius(A, R.q2), st), *R.at_q2) < 1e-9);
        auto ri = numeric_residue(A, EPoint::inf(), 0.05, st);
        CHECK(dist(ri, *R.at_infinity) < 1e-8);
    }
}

TEST_CASE("numeric residue stability under radius halving") {
    BiellipticCover C(2.0, 3.0);
    auto q1 = lift(C, cplx(0.5, 0.25));
    auto q2 = lift(C, cplx(-0.3, 0.55), -1);
    auto conn = Rank1Connection::with_points(cplx(0.3, 0.0), cplx(0.2, 0.0), q1, q2);
    auto A = direct_image_matrix(conn, C);
    QuadratureSettings st;

    auto pp = EPoint::affine(C.tp, C.y0);
    double r = contour_radius(A, pp);
    auto r1 = numeric_residue(A, pp, r, st);
    auto r2 = numeric_residue(A, pp, r / 2.0, st);
    CHECK(dist(r1, r2) < 1e-8);
}

TEST_CASE("case (d): q-tilde at a ramification point") {
    BiellipticCover C(2.0, 3.0);
    auto q1 = lift(C, cplx(0.5, 0.25));
    auto q2 = CPoint::affine(0.0, C.y0);  // = p-tilde_+
    auto conn = Rank1Connection::with_points(cplx(0.2, 0.05), cplx(-0.15, 0.1), q1, q2);
    auto R = analytic_residues(conn, C);
    auto A = direct_image_matrix(conn, C);

    // printed shape: Res_{p+} = [[1/2, 0],[*, 1]], Res_{p-} = [[0,0],[*, 1/2]]
    CHECK(near(R.at_p_plus(0, 0), 0.5));
    CHECK(near(R.at_p_plus(1, 1), 1.0));
    CHECK(near(R.at_p_plus(0, 1), 0.0));
    CHECK(near(R.at_p_minus(0, 0), 0.0));
    CHECK(near(R.at_p_minus(1, 1), 0.5));

    QuadratureSettings st;
    auto pp = EPoint::affine(C.tp, C.y0);
    auto pm = EPoint::affine(C.tp, -C.y0);
    CHECK(dist(numeric_residue(A, pp, contour_radius(A, pp), st), R.at_p_plus) < 1e-9);
    CHECK(dist(numeric_residue(A, pm, contour_radius(A, pm), st), R.at_p_minus) < 1e-9);
    CHECK(dist(numeric_residue(A, R.q1, contour_radius(A, R.q1), st), *R.at_q1) < 1e-9);
    auto ri = numeric_residue(A, EPoint::inf(), 0.05, st);
    REQUIRE(R.at_infinity.has_value());
    CHECK(dist(ri, *R.at_infinity) < 1e-8);
}

TEST_CASE("case (b): coincident q-tildes") {
    BiellipticCover C(2.0, 3.0);
    auto q1 = lift(C, cplx(0.5, 0.25));
    auto conn = Rank1Connection::with_points(cplx(0.2, 0.0), cplx(0.1, 0.0), q1, q1);
    auto R = analytic_residues(conn, C);
    auto A = direct_image_matrix(conn, C);

    // Res_{q1} doubles; integer eigenvalues {0, 2}
    REQUIRE(R.at_q1.has_value());
    CHECK(!R.at_q2.has_value());
    auto ev = R.at_q1->eigenvalues();
    CHECK(((near(ev[0], 0.0) && near(ev[1], 2.0)) || (near(ev[0], 2.0) && near(ev[1], 0.0))));
    CHECK(near((*R.at_q1)(1, 0), 1.0 / q1.xi));

    QuadratureSettings st;
    CHECK(dist(numeric_residue(A, R.q1, contour_radius(A, R.q1), st), *R.at_q1) < 1e-9);
    auto ri = numeric_residue(A, EPoint::inf(), 0.05, st);
    CHECK(dist(ri, *R.at_infinity) < 1e-8);
}

TEST_CASE("case (c): q-tilde at infinity") {
    BiellipticCover C(2.0, 3.0);
    auto q1 = lift(C, cplx(0.5, 0.25));
    auto conn = Rank1Connection::with_points(cplx(0.2, 0.05), cplx(-0.15, 0.1), q1,
                                             CPoint::inf_minus());
    auto A = direct_image_matrix(conn, C);
    auto R = analytic_residues(conn, C);

    QuadratureSettings st;
    auto pp = EPoint::affine(C.tp, C.y0);
    auto pm = EPoint::affine(C.tp, -C.y0);
    CHECK(dist(numeric_residue(A, pp, contour_radius(A, pp), st), R.at_p_plus) < 1e-9);
    CHECK(dist(numeric_residue(A, pm, contour_radius(A, pm), st), R.at_p_minus) < 1e-9);
    CHECK(dist(numeric_residue(A, R.q1, contour_radius(A, R.q1), st), *R.at_q1) < 1e-9);
    // infinity residue (u^{-1} coefficient; the pole there is double in this case)
    auto ri = numeric_residue(A, EPoint::inf(), 0.04, st);
    REQUIRE(R.at_infinity.has_value());
    CHECK(dist(ri, *R.at_infinity) < 1e-7);
}

TEST_CASE("scalar ODE coefficients") {
    BiellipticCover C(2.0, 3.0);
    cplx x(0.4, 0.3);
    cplx y = std::sqrt(x * (x - 1.0) * (x - C.t));
    auto [p0, q0] = scalar_ode_coeffs(Rank1Connection::trivial_bundle(0.0, 0.0), C, x, y);
    cplx P3 = x * (x - 1.0) * (x - C.t);
    cplx dP3 = 3.0 * x * x - 2.0 * (1.0 + C.t) * x + C.t;
    CHECK(near(q0, 0.0));
    CHECK(near(p0, dP3 / (2.0 * P3) + 0.5 / (x - C.tp)));
}
