#pragma once

#include <map>
#include <optional>

#include "ellmono/lattice.hpp"

namespace ellmono::groups {

// the group GG = { C [[alpha, eps beta],[beta, eps alpha]] : alpha^2 - beta^2 = 1 }
struct GGElement {
    cplx C, alpha, beta;
    int eps;

    Mat2 matrix() const {
        return {C * alpha, C * double(eps) * beta, C * beta, C * double(eps) * alpha};
    }
};

GGElement decompose_GG(const Mat2 &M, double tol = 1e-9);

Mat2 R_theta(double theta);   // rotation-type element, R^theta = H^{i theta}
Mat2 H_theta(cplx theta);     // hyperbolic element cosh/sinh

// ---- exact scalars over a declared symbol basis

struct Rational {
    long long num = 0, den = 1;

    Rational() = default;
    Rational(long long n, long long d = 1);
    Rational operator+(const Rational &o) const;
    Rational operator*(const Rational &o) const;
    bool operator==(const Rational &o) const { return num == o.num && den == o.den; }
    double value() const { return double(num) / double(den); }
};

// coordinates over the basis {1, pi*i, s_2, s_3, ...}; the symbols are
// declared Q-independent (and independent from 1 and pi*i)
struct SymbolBasis {
    std::vector<std::string> names;  // names[0] = "1", names[1] = "pi_i"

    SymbolBasis() : names{"1", "pi_i"} {}
    int index(const std::string &name) const;
    int add(const std::string &name);
    std::size_t size() const { return names.size(); }
};

struct ExactScalar {
    std::vector<Rational> coords;

    static ExactScalar zero(const SymbolBasis &b) { return {std::vector<Rational>(b.size())}; }
    static ExactScalar unit(const SymbolBasis &b, int idx, Rational r = Rational(1));
};

struct ExactExponents {
    SymbolBasis basis;
    ExactScalar alpha1, alpha2, beta1, beta2;
    // numeric values of the symbols beyond {1, pi*i}, for cross-checks
    std::map<std::string, cplx> symbol_values;

    cplx value(const ExactScalar &s) const;
};

struct NumericExponents {
    cplx alpha1, alpha2, beta1, beta2;
    long long height_bound = 64;
    double eps = 1e-8;
};

// ---- kernel data of the quotient maps phi_1, phi_2

struct KernelData {
    int r1 = 0, r2 = 0;
    std::vector<std::array<long long, 2>> ker_phi1, ker_phi2, ker_sigma;
    // relation lattice of the closure of <Ma, Mb> in C* x C* (drives DGal's d)
    std::vector<std::array<long long, 2>> closure_relations;
    bool exact = true;
    bool confident = true;
    double worst_residual = 0.0;
    cplx alpha1{}, alpha2{}, beta1{}, beta2{};  // numeric values when known
};

KernelData kernel_data(const ExactExponents &e);
KernelData kernel_data(const NumericExponents &e);

// ---- classification against the 11-row table

struct AbelianQuotient {
    enum Kind { ZZ, MuZ, Mu, Mu2Mu } kind = ZZ;
    long long d = 1;

    bool finite() const { return kind == Mu || kind == Mu2Mu; }
    long long order() const;
    std::string str() const;
};

AbelianQuotient quotient_of(const std::vector<std::array<long long, 2>> &kernel_gens);

enum class Split { Yes, No, Unknown };
const char *to_string(Split s);

struct GroupClassification {
    AbelianQuotient Q1, Q2;
    int table_row = 0;
    Split split = Split::Unknown;
    bool finite = false;
    long long order = 0;
    std::string structure;
};

GroupClassification classify_group(const KernelData &k);

// ---- brute-force closure oracle

struct FiniteClosureResult {
    long long order;
    std::vector<Mat2> elements;
};

std::optional<FiniteClosureResult> finite_closure(const Mat2 &Ma, const Mat2 &Mb,
                                                  const Mat2 &Mg, long long cap);

// ---- differential Galois trichotomy

struct DGalClass {
    enum Kind { FullGG, OneDim, FiniteEqualsG } kind = FullGG;
    long long d = 0;  // cyclic part for OneDim
    // the independently computed closure-relation rank agrees with the
    // trichotomy (0 <-> full, 1 <-> one-dimensional, 2 <-> finite)
    bool closure_consistent = true;

    std::string str() const;
};

DGalClass classify_dgal(const KernelData &k);

}  // namespace ellmono::groups
