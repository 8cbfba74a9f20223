#include <doctest.h>

#include "ellmono/monodromy.hpp"

using namespace ellmono;
using namespace ellmono::curves;
using namespace ellmono::connections;
using namespace ellmono::monodromy;

namespace {

CPoint lift(const BiellipticCover &C, cplx xi, int sign = +1) {
    return CPoint::affine(xi, double(sign) * std::sqrt(C.sextic(xi)));
}

}  // namespace

TEST_CASE("closed forms: lambda = 0 and the gamma matrices") {
    QuadratureSettings qs;
    BiellipticCover C(2.0, 3.0);
    auto rep = closed_form_monodromy(Rank1Connection::trivial_bundle(0.0, 0.0), C, qs);
    CHECK(dist(rep.Ma, Mat2::identity()) < 1e-12);
    CHECK(dist(rep.Mb, Mat2::identity()) < 1e-12);
    CHECK(dist(rep.Mg1, Mat2{1, 0, 0, -1}) == 0.0);
    CHECK(relation_residual(rep) < 1e-14);
    CHECK(involution_residual(rep) == 0.0);

    // degenerate general-L formula: N1 = N2 gives a scalar Ma
    periods::PeriodVector N{cplx(0.3, 0.1), cplx(0.3, 0.1), cplx(0.2, 0.0), cplx(0.2, 0.0)};
    auto repN = closed_form_from_periods(N);
    CHECK(dist(repN.Ma, std::exp(-N.N1) * Mat2::identity()) < 1e-15);
    CHECK(dist(repN.Mb, std::exp(-N.N3) * Mat2::identity()) < 1e-15);
}

TEST_CASE("standard loops: windings and clearance") {
    BiellipticCover C(2.0, 3.0);
    auto L = standard_loops(C);

    // x-plane winding of x - t' along the loops: gammas wind once, a and b not
    auto xwind = [&](const Path &p, cplx x0) {
        // map the xi-path to the x-plane and count winding around x0
        double total = 0.0;
        cplx prev = C.tp - p.start() * p.start() - x0;
        for (const auto &seg : p.segs)
            for (int i = 1; i <= 512; ++i) {
                cplx xi = seg.at(double(i) / 512);
                cplx cur = C.tp - xi * xi - x0;
                total += std::arg(cur / prev);
                prev = cur;
            }
        return int(std::lround(total / (2 * M_PI)));
    };
    CHECK(std::abs(xwind(L.g1, C.tp)) == 1);
    CHECK(std::abs(xwind(L.g2, C.tp)) == 1);
    CHECK(xwind(L.a, C.tp) == 0);
    CHECK(xwind(L.b, C.tp) == 0);
    // a encircles the branch values {1, t}, b the pair {0, 1}
    CHECK(std::abs(xwind(L.a, 1.0)) == 1);
    CHECK(std::abs(xwind(L.a, C.t)) == 1);
    CHECK(xwind(L.a, 0.0) == 0);
    CHECK(std::abs(xwind(L.b, 0.0)) == 1);
    CHECK(std::abs(xwind(L.b, 1.0)) == 1);
    CHECK(xwind(L.b, C.t) == 0);

    // base point is finite and off the special points
    CHECK(std::abs(L.x_base - C.tp) > 1e-2);
}

TEST_CASE("transport matches the closed form: trivial bundle (2,3,0.3,0.2)") {
    QuadratureSettings qs;
    TransportSettings ts;
    BiellipticCover C(2.0, 3.0);
    auto conn = Rank1Connection::trivial_bundle(0.3, 0.2);

    auto cf = closed_form_monodromy(conn, C, qs);
    auto L = standard_loops(C);
    auto tr = transport_monodromy(conn, C, L, ts, qs);

    CHECK(dist(cf.Ma, tr.Ma) < 1e-6);
    CHECK(dist(cf.Mb, tr.Mb) < 1e-6);
    CHECK(dist(cf.Mg1, tr.Mg1) < 1e-6);
    CHECK(dist(cf.Mg2, tr.Mg2) < 1e-6);
    CHECK(relation_residual(tr) < 1e-6);
    CHECK(involution_residual(tr) < 1e-6);
    CHECK(relation_residual(cf) < 1e-14);

    // det identity via the periods
    auto N = periods::omega_periods(conn, C, qs);
    CHECK(std::abs(tr.Ma.det() - std::exp(-(N.N1 + N.N2))) < 1e-6);
    CHECK(std::abs(tr.Mb.det() - std::exp(-(N.N3 + N.N4))) < 1e-6);
}

TEST_CASE("transport matches the closed form: general L") {
    QuadratureSettings qs;
    TransportSettings ts;
    BiellipticCover C(2.0, 3.0);
    auto q1 = lift(C, cplx(0.52, 0.21), +1);
    auto q2 = lift(C, cplx(-0.31, 0.62), -1);
    auto conn = Rank1Connection::with_points(cplx(0.3, 0.1), cplx(0.2, -0.15), q1, q2);

    auto cf = closed_form_monodromy(conn, C, qs);
    auto L = standard_loops(C, {q1.xi, -q1.xi, q2.xi, -q2.xi});
    auto tr = transport_monodromy(conn, C, L, ts, qs);

    CHECK(dist(cf.Ma, tr.Ma) < 1e-6);
    CHECK(dist(cf.Mb, tr.Mb) < 1e-6);
    CHECK(dist(cf.Mg1, tr.Mg1) < 1e-6);
    CHECK(dist(cf.Mg2, tr.Mg2) < 1e-6);
    CHECK(relation_residual(tr) < 1e-6);
    CHECK(involution_residual(tr) < 1e-6);
}

TEST_CASE("transport is stable under tolerance halving and homotopic wiggle") {
    QuadratureSettings qs;
    BiellipticCover C(2.0, 3.0);
    auto conn = Rank1Connection::trivial_bundle(cplx(0.25, 0.1), cplx(-0.2, 0.3));
    auto L = standard_loops(C);

    TransportSettings t1;
    TransportSettings t2 = t1;
    t2.rtol /= 2;
    t2.atol /= 2;
    auto r1 = transport_monodromy(conn, C, L, t1, qs);
    auto r2 = transport_monodromy(conn, C, L, t2, qs);
    CHECK(dist(r1.Ma, r2.Ma) < 1e-6);
    CHECK(dist(r1.Mb, r2.Mb) < 1e-6);

    // base-height perturbation = homotopic deformation of every loop
    BiellipticCover C2(2.0, 3.0);
    auto L2 = standard_loops(C2, {cplx(0.9, 0.9)});  // forces different geometry
    auto r3 = transport_monodromy(conn, C2, L2, t1, qs);
    CHECK(dist(r1.Ma, r3.Ma) < 1e-6);
    CHECK(dist(r1.Mb, r3.Mb) < 1e-6);
    CHECK(dist(r1.Mg2, r3.Mg2) < 1e-6);
}

TEST_CASE("fundamental matrix: determinant and the flatness residual") {
    QuadratureSettings qs;
    BiellipticCover C(2.0, 3.0);
    cplx l1(0.3, 0.0), l2(0.2, 0.0);
    auto conn = Rank1Connection::trivial_bundle(l1, l2);
    auto L = standard_loops(C);
    auto A = direct_image_matrix(conn, C);

    // det Phi = e^{-2 lambda2 z2} / xi with z2 from the ramification point
    SqrtCover cov;
    cov.poly = C.sextic_coeffs();
    auto bp = C.branch_points();
    cov.branch.assign(bp.begin(), bp.end());

    for (int k = 1; k <= 20; ++k) {
        double s = 0.04 * k;
        Path p;
        p.segs.push_back(Seg::line(L.xi_base, L.xi_base + cplx(0.15 * s, 0.3 * s)));
        Mat2 F = fundamental_matrix(conn, C, L, p, qs);
        // z2 integral from p-tilde_+ through the base to the endpoint
        Path full;
        full.segs.push_back(Seg::line(0.0, L.xi_base));
        full.segs.push_back(p.segs[0]);
        cplx z2 = integrate_on_cover(cov, full, C.y0,
                                     [](cplx xi, cplx y) { return xi / y; }, 1e-12);
        cplx xiP = p.end();
        CHECK(std::abs(F.det() - std::exp(-2.0 * l2 * z2) / xiP) < 1e-7);
    }

    // flatness: dPhi + A Phi = 0 along a short path (finite differences)
    double h = 1e-5;
    Path p0, ph;
    cplx dirv(0.11, 0.07);
    p0.segs.push_back(Seg::line(L.xi_base, L.xi_base + dirv));
    ph.segs.push_back(Seg::line(L.xi_base, L.xi_base + dirv * (1.0 + h)));
    Mat2 F0 = fundamental_matrix(conn, C, L, p0, qs);
    Mat2 Fh = fundamental_matrix(conn, C, L, ph, qs);
    cplx xiP = p0.end();
    cplx dxi = dirv * h;
    cplx xP = C.tp - xiP * xiP;
    cplx yP = cov.continue_y(p0, L.y_base);
    Mat2 dPhi = (Fh - F0) * (1.0 / (-2.0 * xiP * dxi));  // d/dx
    Mat2 resid = dPhi + A.at_lift(xiP, yP) * F0;
    CHECK(resid.norm() < 1e-4);  // first-order finite difference
}

TEST_CASE("rank-1 transport along cycles equals exp(-N_i)") {
    QuadratureSettings qs;
    TransportSettings ts;
    BiellipticCover C(2.0, 3.0);
    auto conn = Rank1Connection::trivial_bundle(cplx(0.4, 0.2), cplx(-0.1, 0.3));
    auto N = periods::omega_periods(conn, C, qs);
    auto cb = periods::cycle_basis(C);

    cplx ma = rank1_transport(conn, C, cb.a1, cb.a1_ystart, ts);
    CHECK(std::abs(ma - std::exp(-N.N1)) < 1e-8);
    cplx mb = rank1_transport(conn, C, cb.b1, cb.b1_ystart, ts);
    CHECK(std::abs(mb - std::exp(-N.N3)) < 1e-8);
}

TEST_CASE("riemann-hilbert image membership") {
    CHECK(rh_image_elliptic(1.0, 1.0));
    CHECK(!rh_image_elliptic(cplx(0, 1), -1.0));
    CHECK(rh_image_elliptic(2.0, cplx(0, 5)));
    CHECK_THROWS_AS(rh_image_elliptic(0.0, 1.0), std::invalid_argument);

    CHECK(rh_image_genus2({1.0, 1.0, 1.0, 1.0}));
    CHECK(!rh_image_genus2({cplx(0, 1), cplx(0, 1), 1.0, 1.0}));
    CHECK(rh_image_genus2({2.0, 2.0, 3.0, 3.0}));
}

TEST_CASE("isomonodromy invariants and surface membership") {
    Mat2 Z{cplx(0, 0.9), cplx(0, 0.1), cplx(0, 0.1), cplx(0, 0.9)};
    cplx l1(0.3, 0.1), l2(-0.2, 0.4), z1(0.11, -0.3), z2(0.7, 0.05);
    auto u = isomonodromy_invariants(l1, l2, z1, z2, Z);
    auto v = isomonodromy_invariants(l1, l2, z1, z2, Z);
    CHECK(same_isomonodromy_surface(u, v, Z));

    // shift z by a lattice column of (1 | Z): same surface
    auto w = isomonodromy_invariants(l1, l2, z1 + Z(0, 1) + 1.0, z2 + Z(1, 1), Z);
    CHECK(same_isomonodromy_surface(u, w, Z));

    // perturb lambda1: different surface
    auto x = isomonodromy_invariants(l1 + 0.01, l2, z1, z2, Z);
    CHECK(!same_isomonodromy_surface(u, x, Z));

    // generic shift: different surface
    auto yv = isomonodromy_invariants(l1, l2, z1 + 0.037, z2, Z);
    CHECK(!same_isomonodromy_surface(u, yv, Z));

    Mat2 bad{cplx(0, 1), 0.3, 0.1, cplx(0, 1)};
    CHECK_THROWS_AS(isomonodromy_invariants(l1, l2, z1, z2, bad), std::invalid_argument);
}
