#include <doctest.h>

#include <random>

#include "ellmono/groups.hpp"

using namespace ellmono;
using namespace ellmono::groups;

namespace {

ExactExponents generic_exponents() {
    ExactExponents e;
    int a1 = e.basis.add("a1"), a2 = e.basis.add("a2");
    int b1 = e.basis.add("b1"), b2 = e.basis.add("b2");
    e.alpha1 = ExactScalar::unit(e.basis, a1);
    e.alpha2 = ExactScalar::unit(e.basis, a2);
    e.beta1 = ExactScalar::unit(e.basis, b1);
    e.beta2 = ExactScalar::unit(e.basis, b2);
    e.alpha1.coords.resize(e.basis.size());
    e.alpha2.coords.resize(e.basis.size());
    e.beta1.coords.resize(e.basis.size());
    e.beta2.coords.resize(e.basis.size());
    return e;
}

}  // namespace

TEST_CASE("GG decomposition") {
    auto g = decompose_GG(Mat2{1, 0, 0, -1});
    CHECK(g.eps == -1);
    CHECK(near(g.C, 1.0));
    CHECK(near(g.alpha, 1.0));
    CHECK(near(g.beta, 0.0));

    // M_b of the trivial closed form: e^{2 l2 L'} H^{2 l1 L}
    double l2Lp = 0.37, l1L = 0.82;
    Mat2 Mb = std::exp(2.0 * l2Lp) * H_theta(2.0 * l1L);
    auto d = decompose_GG(Mb);
    CHECK(d.eps == +1);
    CHECK(near(d.C, std::exp(cplx(2.0 * l2Lp))));
    CHECK(near(d.alpha, std::cosh(cplx(2.0 * l1L))));
    CHECK(near(d.beta, std::sinh(cplx(2.0 * l1L))));

    CHECK_THROWS_AS(decompose_GG(Mat2{1, 1, 0, 1}), std::domain_error);

    // psi-structure on random words: products decompose and reconstruct
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        GGElement x{std::exp(cplx(u(rng), u(rng))), 0.0, 0.0, u(rng) > 0 ? 1 : -1};
        cplx th(u(rng), u(rng));
        x.alpha = std::cosh(th);
        x.beta = std::sinh(th);
        GGElement y{std::exp(cplx(u(rng), u(rng))), std::cosh(cplx(u(rng), u(rng))),
                    0.0, u(rng) > 0 ? 1 : -1};
        y.beta = std::sqrt(y.alpha * y.alpha - 1.0);
        Mat2 prod = x.matrix() * y.matrix();
        auto dec = decompose_GG(prod, 1e-8);
        CHECK(dist(dec.matrix(), prod) < 1e-7 * prod.norm());
        // C is multiplicative up to the kernel sign
        double cr = std::abs(dec.C) / (std::abs(x.C) * std::abs(y.C));
        CHECK(std::abs(cr - 1.0) < 1e-7);
        CHECK(dec.eps == x.eps * y.eps);
    }
}

TEST_CASE("kernel data: generic exact input has trivial kernels") {
    auto K = kernel_data(generic_exponents());
    CHECK(K.r1 == 0);
    CHECK(K.r2 == 0);
    CHECK(K.ker_phi1.empty());
    CHECK(K.ker_phi2.empty());
    auto G = classify_group(K);
    CHECK(G.table_row == 1);
    CHECK(G.split == Split::Yes);
    CHECK(!G.finite);
    auto D = classify_dgal(K);
    CHECK(D.kind == DGalClass::FullGG);
    CHECK(D.closure_consistent);
}

TEST_CASE("kernel data: beta1 = pi i / 5, beta2 = 0") {
    ExactExponents e = generic_exponents();
    e.beta1 = ExactScalar::unit(e.basis, 1, Rational(1, 5));  // pi i / 5
    e.beta2 = ExactScalar::zero(e.basis);
    auto K = kernel_data(e);
    CHECK(K.r1 == 2);
    // kernel contains (5,0) and (0,1)
    CHECK(lattice::sublattice2_contains(K.ker_phi1, {{5, 0}, {0, 1}}));
    CHECK(lattice::sublattice2_contains({{5, 0}, {0, 1}}, K.ker_phi1));
}

TEST_CASE("numeric mode recovers a planted relation") {
    // 3 beta1 - 2 beta2 = pi i
    NumericExponents e;
    e.alpha1 = cplx(0.7313821157, 0.2281154);   // generic
    e.alpha2 = cplx(-0.312988412, 0.88113);     // generic
    e.beta1 = cplx(0.2718281828459045, 0.577215664901532);
    e.beta2 = (3.0 * e.beta1 - cplx(0, M_PI)) / 2.0;
    auto K = kernel_data(e);
    CHECK(K.r1 == 1);
    REQUIRE(!K.ker_phi1.empty());
    auto S = lattice::analyze_sublattice2(K.ker_phi1);
    CHECK(((S.primitive == std::array<long long, 2>{3, -2}) ||
           (S.primitive == std::array<long long, 2>{-3, 2})));
    CHECK(K.confident);
}

TEST_CASE("row 5 construction") {
    // beta1 = pi i/3, beta2 = 1, alpha1 = pi i/5, alpha2 = 1
    ExactExponents e;
    e.alpha1 = ExactScalar::unit(e.basis, 1, Rational(1, 5));
    e.alpha2 = ExactScalar::unit(e.basis, 0);
    e.beta1 = ExactScalar::unit(e.basis, 1, Rational(1, 3));
    e.beta2 = ExactScalar::unit(e.basis, 0);
    auto K = kernel_data(e);
    CHECK(K.r1 == 1);
    CHECK(K.r2 == 1);
    auto G = classify_group(K);
    CHECK(G.table_row == 5);
    CHECK(G.Q1.kind == AbelianQuotient::MuZ);
    CHECK(G.Q1.d == 3);
    CHECK(G.Q2.kind == AbelianQuotient::MuZ);
    CHECK(G.Q2.d == 5);
    CHECK(!G.finite);
}

TEST_CASE("row 10 construction: finite group of order 60") {
    // beta1 = pi i/3, beta2 = 0, alpha1 = pi i/5, alpha2 = pi i
    ExactExponents e;
    e.alpha1 = ExactScalar::unit(e.basis, 1, Rational(1, 5));
    e.alpha2 = ExactScalar::unit(e.basis, 1);
    e.beta1 = ExactScalar::unit(e.basis, 1, Rational(1, 3));
    e.beta2 = ExactScalar::zero(e.basis);
    auto K = kernel_data(e);
    CHECK(K.r1 == 2);
    CHECK(K.r2 == 2);
    auto G = classify_group(K);
    CHECK(G.table_row == 10);
    CHECK(G.Q1.kind == AbelianQuotient::Mu);
    CHECK(G.Q1.d == 3);
    CHECK(G.Q2.kind == AbelianQuotient::Mu);
    CHECK(G.Q2.d == 10);
    CHECK(G.finite);
    CHECK(G.order == 60);

    auto D = classify_dgal(K);
    CHECK(D.kind == DGalClass::FiniteEqualsG);
    CHECK(D.closure_consistent);

    // brute-force closure agrees
    Mat2 Ma = std::exp(K.alpha1) * H_theta(K.beta1);
    Mat2 Mb = std::exp(K.alpha2) * H_theta(K.beta2);
    auto F = finite_closure(Ma, Mb, Mat2{1, 0, 0, -1}, 1000);
    REQUIRE(F.has_value());
    CHECK(F->order == 60);
}

TEST_CASE("restriction-violating synthetic pair is rejected") {
    KernelData K;
    K.ker_phi1 = {{2, 0}};
    K.ker_phi2 = {{3, 0}};
    K.r1 = 1;
    K.r2 = 1;
    // Q1 = mu_2 x Z with 2|d, Q2 = mu_3 x Z with odd d': row 5 restriction fails
    CHECK_THROWS_AS(classify_group(K), std::domain_error);
}

TEST_CASE("one-dimensional differential Galois group with d = 4") {
    // alpha1 = pi i/4, alpha2 = pi i/2, beta1 = pi i/6, beta2 free
    ExactExponents e;
    int b2 = e.basis.add("b2");
    e.alpha1 = ExactScalar::unit(e.basis, 1, Rational(1, 4));
    e.alpha2 = ExactScalar::unit(e.basis, 1, Rational(1, 2));
    e.beta1 = ExactScalar::unit(e.basis, 1, Rational(1, 6));
    e.beta2 = ExactScalar::unit(e.basis, b2);
    for (ExactScalar *s : {&e.alpha1, &e.alpha2, &e.beta1, &e.beta2})
        s->coords.resize(e.basis.size());
    auto K = kernel_data(e);
    CHECK(K.r1 == 1);
    CHECK(K.r2 == 2);
    auto D = classify_dgal(K);
    CHECK(D.kind == DGalClass::OneDim);
    CHECK(D.d == 4);
    CHECK(D.closure_consistent);
}

TEST_CASE("r1 = r2 = 1 with equal kernel lines classifies as one-dimensional") {
    // the spec's case (ii) shape: both kernels on the line (1, 0)
    ExactExponents e;
    int a2 = e.basis.add("a2"), b2 = e.basis.add("b2");
    e.alpha1 = ExactScalar::unit(e.basis, 1, Rational(1, 4));
    e.alpha2 = ExactScalar::unit(e.basis, a2);
    e.beta1 = ExactScalar::unit(e.basis, 1, Rational(1, 6));
    e.beta2 = ExactScalar::unit(e.basis, b2);
    for (ExactScalar *s : {&e.alpha1, &e.alpha2, &e.beta1, &e.beta2})
        s->coords.resize(e.basis.size());
    auto K = kernel_data(e);
    CHECK(K.r1 == 1);
    CHECK(K.r2 == 1);
    auto S1 = lattice::analyze_sublattice2(K.ker_phi1);
    auto S2 = lattice::analyze_sublattice2(K.ker_phi2);
    CHECK(S1.primitive == S2.primitive);
    auto D = classify_dgal(K);
    CHECK(D.kind == DGalClass::OneDim);
}

TEST_CASE("finite closure: dihedral examples") {
    // D_5: order 10
    auto F5 = finite_closure(R_theta(2.0 * M_PI / 5.0), Mat2::identity(),
                             Mat2{1, 0, 0, -1}, 100);
    REQUIRE(F5.has_value());
    CHECK(F5->order == 10);

    // trivial rotation part: <diag(1,-1)> has order 2
    auto F1 = finite_closure(Mat2::identity(), Mat2::identity(), Mat2{1, 0, 0, -1}, 10);
    REQUIRE(F1.has_value());
    CHECK(F1->order == 2);

    // R^{2pi/3} and R^{pi/2} generate R^{pi/6}: order 24 with the reflection
    auto F24 = finite_closure(R_theta(2.0 * M_PI / 3.0), R_theta(M_PI / 2.0),
                              Mat2{1, 0, 0, -1}, 100);
    REQUIRE(F24.has_value());
    CHECK(F24->order == 24);

    // infinite group overflows the cap
    auto Finf = finite_closure(R_theta(1.0), Mat2::identity(), Mat2{1, 0, 0, -1}, 500);
    CHECK(!Finf.has_value());
}

TEST_CASE("det criterion: zero-exponent words have unit +- determinant") {
    // generic numeric exponents: det sigma(n) = exp(2 n . alpha)
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(-0.8, 0.8);
    cplx a1(u(rng), u(rng)), a2(u(rng), u(rng)), b1(u(rng), u(rng)), b2(u(rng), u(rng));
    Mat2 Ma = std::exp(a1) * H_theta(b1);
    Mat2 Mb = std::exp(a2) * H_theta(b2);
    Mat2 Mg{1, 0, 0, -1};

    // zero total exponents: Ma Mb Ma^{-1} Mg Mb^{-1} Mg
    Mat2 W = Ma * Mb * Ma.inverse() * Mg * Mb.inverse() * Mg;
    CHECK(std::abs(std::abs(W.det()) - 1.0) < 1e-12);

    // nonzero exponent sum generically is not +-1
    Mat2 V = Ma * Mb * Mb;
    CHECK(std::abs(V.det() - std::exp(2.0 * (a1 + 2.0 * a2))) < 1e-12);
}
