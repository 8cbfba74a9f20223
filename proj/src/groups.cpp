#include "ellmono/groups.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <unordered_map>

namespace ellmono::groups {

using lattice::IntMat;

Mat2 R_theta(double theta) {
    cplx c = std::cos(theta), s = cplx(0, 1) * std::sin(theta);
    return {c, s, s, c};
}

Mat2 H_theta(cplx theta) {
    cplx c = std::cosh(theta), s = std::sinh(theta);
    return {c, s, s, c};
}

GGElement decompose_GG(const Mat2 &M, double tol) {
    double scale = M.norm();
    if (scale == 0) throw std::invalid_argument("decompose_GG: zero matrix");
    double plus_defect = std::abs(M(0, 0) - M(1, 1)) + std::abs(M(0, 1) - M(1, 0));
    double minus_defect = std::abs(M(0, 0) + M(1, 1)) + std::abs(M(0, 1) + M(1, 0));
    int eps = plus_defect <= minus_defect ? +1 : -1;
    if (std::min(plus_defect, minus_defect) > tol * scale)
        throw std::domain_error("decompose_GG: matrix is not in the group");

    cplx det = M.det();
    cplx C = std::sqrt(double(eps) * det);
    if (std::abs(C) < tol * scale)
        throw std::domain_error("decompose_GG: singular matrix");
    cplx alpha = M(0, 0) / C, beta = M(1, 0) / C;
    // canonical sign: Re C > 0, ties broken by Im C
    if (C.real() < 0 || (C.real() == 0 && C.imag() < 0)) {
        C = -C;
        alpha = -alpha;
        beta = -beta;
    }
    if (std::abs(alpha * alpha - beta * beta - 1.0) > 1e2 * tol * (1.0 + std::norm(alpha)))
        throw std::domain_error("decompose_GG: alpha^2 - beta^2 != 1");
    GGElement g{C, alpha, beta, eps};
    if (dist(g.matrix(), M) > 1e2 * tol * scale)
        throw std::domain_error("decompose_GG: reconstruction failed");
    return g;
}

// ---- rationals

namespace {

long long igcd(long long a, long long b) { return std::gcd(std::llabs(a), std::llabs(b)); }

}  // namespace

Rational::Rational(long long n, long long d) : num(n), den(d) {
    if (den == 0) throw std::invalid_argument("Rational: zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    long long g = igcd(num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
    if (num == 0) den = 1;
}

Rational Rational::operator+(const Rational &o) const {
    return Rational(num * o.den + o.num * den, den * o.den);
}

Rational Rational::operator*(const Rational &o) const {
    return Rational(num * o.num, den * o.den);
}

int SymbolBasis::index(const std::string &name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return int(i);
    return -1;
}

int SymbolBasis::add(const std::string &name) {
    int i = index(name);
    if (i >= 0) return i;
    names.push_back(name);
    return int(names.size()) - 1;
}

ExactScalar ExactScalar::unit(const SymbolBasis &b, int idx, Rational r) {
    ExactScalar s = zero(b);
    s.coords[idx] = r;
    return s;
}

cplx ExactExponents::value(const ExactScalar &s) const {
    cplx v = 0.0;
    for (std::size_t i = 0; i < s.coords.size(); ++i) {
        if (s.coords[i].num == 0) continue;
        cplx sym;
        if (i == 0)
            sym = 1.0;
        else if (i == 1)
            sym = cplx(0, M_PI);
        else {
            auto it = symbol_values.find(basis.names[i]);
            if (it == symbol_values.end())
                throw std::invalid_argument("ExactExponents: no numeric value for symbol " +
                                            basis.names[i]);
            sym = it->second;
        }
        v += s.coords[i].value() * sym;
    }
    return v;
}

// ---- kernel computations

namespace {

// columns are ExactScalars; build the integer matrix of the linear map
// z -> sum_j z_j * col_j over the symbol coordinates, scaled to integers
IntMat exact_system(const std::vector<ExactScalar> &cols, std::size_t basis_size) {
    IntMat M(basis_size, std::vector<long long>(cols.size(), 0));
    for (std::size_t r = 0; r < basis_size; ++r) {
        long long lcm = 1;
        for (const auto &c : cols) {
            long long d = r < c.coords.size() ? c.coords[r].den : 1;
            lcm = std::lcm(lcm, d);
        }
        for (std::size_t j = 0; j < cols.size(); ++j) {
            const auto &q = r < cols[j].coords.size() ? cols[j].coords[r] : Rational(0);
            M[r][j] = q.num * (lcm / q.den);
        }
    }
    return M;
}

std::vector<std::array<long long, 2>> project2(const IntMat &kernel, int i0 = 0,
                                               int i1 = 1) {
    std::vector<std::array<long long, 2>> out;
    for (const auto &v : kernel) {
        std::array<long long, 2> p{v[i0], v[i1]};
        if (p[0] || p[1]) out.push_back(p);
    }
    return out;
}

int rank2(const std::vector<std::array<long long, 2>> &gens) {
    IntMat m;
    for (auto &g : gens) m.push_back({g[0], g[1]});
    return m.empty() ? 0 : lattice::integer_rank(m);
}

// shared assembly given the relation lattices R_alpha, R_beta of the triples
// (alpha1, alpha2, pi i) and (beta1, beta2, pi i)
void assemble_from_relations(KernelData &K, const IntMat &Ra, const IntMat &Rb) {
    // ker phi_1: projections of R_beta
    K.ker_phi1 = project2(Rb);

    const int nu = Ra.size(), nw = Rb.size();

    // ker sigma: n realized by both lattices with matching n and parity
    {
        // unknowns (u, w, m4): equations n(u) = n(w) (2) and parity (1)
        IntMat M(3, std::vector<long long>(nu + nw + 1, 0));
        for (int j = 0; j < nu; ++j) {
            M[0][j] = Ra[j][0];
            M[1][j] = Ra[j][1];
            M[2][j] = Ra[j][2];  // contributes +m0-part: m0 = -(Ra u)_3
        }
        for (int j = 0; j < nw; ++j) {
            M[0][nu + j] = -Rb[j][0];
            M[1][nu + j] = -Rb[j][1];
            M[2][nu + j] = -Rb[j][2];  // m3 = -(Rb w)_3; m3 - m0 -> (Ra u)_3 - (Rb w)_3
        }
        M[2][nu + nw] = -2;  // -2 m4
        auto ker = lattice::integer_kernel(M);
        K.ker_sigma.clear();
        for (const auto &z : ker) {
            long long n1 = 0, n2 = 0;
            for (int j = 0; j < nu; ++j) {
                n1 += z[j] * Ra[j][0];
                n2 += z[j] * Ra[j][1];
            }
            if (n1 || n2) K.ker_sigma.push_back({n1, n2});
        }
    }

    // ker phi_2: n from R_alpha; beta-side shifted by 2(m1, m2); parity
    {
        // unknowns (u, w, m1, m2, m4)
        IntMat M(3, std::vector<long long>(nu + nw + 3, 0));
        for (int j = 0; j < nu; ++j) {
            M[0][j] = Ra[j][0];
            M[1][j] = Ra[j][1];
            M[2][j] = Ra[j][2];
        }
        for (int j = 0; j < nw; ++j) {
            M[0][nu + j] = -Rb[j][0];
            M[1][nu + j] = -Rb[j][1];
            M[2][nu + j] = -Rb[j][2];
        }
        M[0][nu + nw] = -2;      // -2 m1
        M[1][nu + nw + 1] = -2;  // -2 m2
        M[2][nu + nw + 2] = -2;  // -2 m4
        auto ker = lattice::integer_kernel(M);
        K.ker_phi2.clear();
        for (const auto &z : ker) {
            long long n1 = 0, n2 = 0;
            for (int j = 0; j < nu; ++j) {
                n1 += z[j] * Ra[j][0];
                n2 += z[j] * Ra[j][1];
            }
            if (n1 || n2) K.ker_phi2.push_back({n1, n2});
        }
    }

    K.r1 = rank2(K.ker_phi1);
    K.r2 = rank2(K.ker_phi2);
}

}  // namespace

KernelData kernel_data(const ExactExponents &e) {
    KernelData K;
    K.exact = true;
    const auto &B = e.basis;
    ExactScalar pii = ExactScalar::unit(B, 1);

    auto Ra = lattice::integer_kernel(exact_system({e.alpha1, e.alpha2, pii}, B.size()));
    auto Rb = lattice::integer_kernel(exact_system({e.beta1, e.beta2, pii}, B.size()));
    assemble_from_relations(K, Ra, Rb);

    // closure relations of <Ma, Mb> in C* x C*:
    // c1 (alpha_j + beta_j) + c2 (alpha_j - beta_j) - 2 m_j (pi i) = 0, j = 1,2
    {
        auto add = [](const ExactScalar &x, const ExactScalar &y, int sy) {
            ExactScalar r = x;
            r.coords.resize(std::max(x.coords.size(), y.coords.size()));
            for (std::size_t i = 0; i < y.coords.size(); ++i)
                r.coords[i] = r.coords[i] + Rational(sy) * y.coords[i];
            return r;
        };
        // columns for unknowns (c1, c2, m1, m2); the two j-equations stack
        std::vector<ExactScalar> colc1 = {add(e.alpha1, e.beta1, +1),
                                          add(e.alpha2, e.beta2, +1)};
        std::vector<ExactScalar> colc2 = {add(e.alpha1, e.beta1, -1),
                                          add(e.alpha2, e.beta2, -1)};
        std::size_t k = B.size();
        IntMat M(2 * k, std::vector<long long>(4, 0));
        for (int j = 0; j < 2; ++j) {
            auto block = exact_system(
                {colc1[j], colc2[j], j == 0 ? ExactScalar::unit(B, 1, Rational(-2)) : ExactScalar::zero(B),
                 j == 1 ? ExactScalar::unit(B, 1, Rational(-2)) : ExactScalar::zero(B)},
                k);
            for (std::size_t r = 0; r < k; ++r) M[j * k + r] = block[r];
        }
        auto ker = lattice::integer_kernel(M);
        K.closure_relations = project2(ker);
    }

    try {
        K.alpha1 = e.value(e.alpha1);
        K.alpha2 = e.value(e.alpha2);
        K.beta1 = e.value(e.beta1);
        K.beta2 = e.value(e.beta2);
    } catch (const std::invalid_argument &) {
        // symbols without numeric values: matrices unavailable, kernels still exact
    }
    return K;
}

KernelData kernel_data(const NumericExponents &e) {
    KernelData K;
    K.exact = false;
    K.alpha1 = e.alpha1;
    K.alpha2 = e.alpha2;
    K.beta1 = e.beta1;
    K.beta2 = e.beta2;
    const cplx pii(0, M_PI);

    auto Ra_res = lattice::integer_relations({e.alpha1, e.alpha2, pii}, e.height_bound, e.eps);
    auto Rb_res = lattice::integer_relations({e.beta1, e.beta2, pii}, e.height_bound, e.eps);
    K.confident = Ra_res.confident && Rb_res.confident;
    K.worst_residual = std::max(Ra_res.worst_residual, Rb_res.worst_residual);
    assemble_from_relations(K, Ra_res.relations, Rb_res.relations);

    // closure relations, detected over the doubled system
    {
        std::vector<cplx> l1 = {e.alpha1 + e.beta1, e.alpha1 - e.beta1, 2.0 * pii, 0.0};
        std::vector<cplx> l2 = {e.alpha2 + e.beta2, e.alpha2 - e.beta2, 0.0, 2.0 * pii};
        // relations of the stacked pair: embed as a single complex vector by
        // pairing with two generic unit weights to avoid accidental cancelation
        // between the rows; verified against both rows afterwards.
        const cplx w1 = 1.0, w2 = cplx(0.6180339887498949, 0.7861513777574233);
        std::vector<cplx> mixed(4);
        for (int i = 0; i < 4; ++i) mixed[i] = w1 * l1[i] + w2 * l2[i];
        auto Rm = lattice::integer_relations(mixed, e.height_bound, e.eps);
        K.closure_relations.clear();
        for (const auto &c : Rm.relations) {
            cplx res1 = 0.0, res2 = 0.0;
            for (int i = 0; i < 4; ++i) {
                res1 += double(c[i]) * l1[i];
                res2 += double(c[i]) * l2[i];
            }
            double scale = std::max({std::abs(e.alpha1), std::abs(e.beta1), 1.0});
            if (std::abs(res1) < e.eps * scale && std::abs(res2) < e.eps * scale)
                K.closure_relations.push_back({c[0], c[1]});
        }
        K.confident = K.confident && Rm.confident;
    }
    return K;
}

// ---- abelian quotients and the table

long long AbelianQuotient::order() const {
    switch (kind) {
        case Mu: return d;
        case Mu2Mu: return 2 * d;
        default: throw std::domain_error("AbelianQuotient::order: infinite quotient");
    }
}

std::string AbelianQuotient::str() const {
    switch (kind) {
        case ZZ: return "Z x Z";
        case MuZ: return "mu_" + std::to_string(d) + " x Z";
        case Mu: return "mu_" + std::to_string(d);
        default: return "mu_2 x mu_" + std::to_string(d);
    }
}

AbelianQuotient quotient_of(const std::vector<std::array<long long, 2>> &kernel_gens) {
    auto S = lattice::analyze_sublattice2(kernel_gens);
    AbelianQuotient Q;
    auto [d1, d2] = S.quotient_invariants;
    if (d1 == 0 && d2 == 0) {
        Q.kind = AbelianQuotient::ZZ;
        Q.d = 0;
    } else if (d2 == 0) {
        Q.kind = AbelianQuotient::MuZ;
        Q.d = d1;
    } else if (d1 == 1) {
        Q.kind = AbelianQuotient::Mu;
        Q.d = d2;
    } else if (d1 == 2) {
        Q.kind = AbelianQuotient::Mu2Mu;
        Q.d = d2;  // d2 is even since d1 | d2
    } else {
        throw std::domain_error(
            "quotient_of: invariant factors (" + std::to_string(d1) + "," +
            std::to_string(d2) + ") cannot arise from a monodromy group");
    }
    return Q;
}

const char *to_string(Split s) {
    switch (s) {
        case Split::Yes: return "yes";
        case Split::No: return "no";
        default: return "unknown";
    }
}

GroupClassification classify_group(const KernelData &k) {
    GroupClassification G;
    G.Q1 = quotient_of(k.ker_phi1);
    G.Q2 = quotient_of(k.ker_phi2);

    using AQ = AbelianQuotient;
    auto reject = [&](const std::string &why) {
        throw std::domain_error("classify_group: (" + G.Q1.str() + ", " + G.Q2.str() +
                                ") violates the table: " + why);
    };

    // Q1 = N_1 embeds into C* x C*; a non-cyclic finite part cannot occur
    if (G.Q1.kind == AQ::Mu2Mu) reject("N_1 must be a subgroup of a torus (cyclic torsion)");

    bool starred = false;
    switch (G.Q1.kind) {
        case AQ::ZZ:
            if (G.Q2.kind == AQ::ZZ) {
                G.table_row = 1;
                starred = true;
            } else if (G.Q2.kind == AQ::MuZ) {
                G.table_row = 2;
                if (G.Q2.d % 2 != 0) reject("row 2 needs 2 | d'");
            } else if (G.Q2.kind == AQ::Mu2Mu) {
                G.table_row = 3;
                if (G.Q2.d % 2 != 0) reject("row 3 needs 2 | d'");
            } else {
                G.table_row = 3;  // mu_{d'} with rk Q1 = 2 is row 3's degenerate shape
                reject("rank pattern (2,0) requires Q2 = mu_2 x mu_{d'}");
            }
            break;
        case AQ::MuZ:
            if (G.Q2.kind == AQ::ZZ) {
                G.table_row = 4;
                starred = true;
            } else if (G.Q2.kind == AQ::MuZ) {
                G.table_row = 5;
                if (G.Q1.d % 2 == 0 && G.Q2.d % 2 != 0) reject("row 5: if 2|d then 2|d'");
            } else if (G.Q2.kind == AQ::Mu) {
                G.table_row = 6;
                if (G.Q1.d % 2 == 0) reject("row 6 needs odd d");
                if (G.Q2.d % 2 != 0) reject("row 6 needs 2 | d'");
            } else {
                G.table_row = 7;
                if (G.Q2.d % 2 != 0) reject("row 7 needs 2 | d'");
            }
            break;
        default:  // Mu
            if (G.Q2.kind == AQ::ZZ) {
                G.table_row = 8;
                starred = true;
            } else if (G.Q2.kind == AQ::MuZ) {
                G.table_row = 9;
                if ((G.Q1.d - G.Q2.d) % 2 != 0) reject("row 9 needs d = d' mod 2");
            } else if (G.Q2.kind == AQ::Mu) {
                G.table_row = 10;
            } else {
                G.table_row = 11;
                if (G.Q1.d % 2 != 0 || G.Q2.d % 2 != 0) reject("row 11 needs 2|d and 2|d'");
            }
            break;
    }

    G.finite = G.Q1.finite() && G.Q2.finite();
    if (G.finite) {
        G.order = G.Q1.order() * 2 * G.Q2.order();
        G.structure = "D_" + std::to_string(G.Q1.d) + " -> G ->> " + G.Q2.str();
    } else {
        G.structure = "(" + G.Q1.str() + " x| mu_2) extension by " + G.Q2.str();
    }

    if (starred) {
        G.split = Split::Yes;
    } else if (lattice::same_sublattice2(k.ker_phi2, k.ker_sigma)) {
        G.split = Split::Yes;  // phi_2-bar is an isomorphism
    } else if (!lattice::sublattice2_contains(k.ker_phi1, k.ker_phi2)) {
        G.split = Split::No;  // the remark's necessary condition fails
    } else {
        G.split = Split::Unknown;
    }
    return G;
}

std::optional<FiniteClosureResult> finite_closure(const Mat2 &Ma, const Mat2 &Mb,
                                                  const Mat2 &Mg, long long cap) {
    struct Hasher {
        std::size_t operator()(const std::array<long long, 8> &k) const {
            std::size_t h = 1469598103934665603ull;
            for (auto v : k) {
                h ^= std::size_t(v);
                h *= 1099511628211ull;
            }
            return h;
        }
    };
    auto key_of = [](const Mat2 &m) {
        std::array<long long, 8> k;
        for (int i = 0; i < 4; ++i) {
            k[2 * i] = (long long)std::llround(m.e[i].real() * 1e8);
            k[2 * i + 1] = (long long)std::llround(m.e[i].imag() * 1e8);
        }
        return k;
    };

    std::vector<Mat2> gens;
    for (const Mat2 &g : {Ma, Mb, Mg}) {
        gens.push_back(g);
        gens.push_back(g.inverse());
    }

    std::unordered_map<std::array<long long, 8>, std::vector<int>, Hasher> seen;
    std::vector<Mat2> elements;
    std::deque<int> todo;

    auto insert = [&](const Mat2 &m) -> bool {
        auto k = key_of(m);
        auto it = seen.find(k);
        if (it != seen.end()) {
            for (int idx : it->second)
                if (dist(elements[idx], m) < 1e-6) return false;
        }
        elements.push_back(m);
        seen[k].push_back(int(elements.size()) - 1);
        todo.push_back(int(elements.size()) - 1);
        return true;
    };

    insert(Mat2::identity());
    while (!todo.empty()) {
        int idx = todo.front();
        todo.pop_front();
        for (const auto &g : gens) {
            Mat2 n = elements[idx] * g;
            insert(n);
            if ((long long)elements.size() > cap) return std::nullopt;
        }
    }
    return FiniteClosureResult{(long long)elements.size(), elements};
}

std::string DGalClass::str() const {
    switch (kind) {
        case FullGG: return "GG";
        case OneDim: return "one-dimensional (C* x mu_" + std::to_string(d) + ") x| mu_2";
        default: return "finite, equal to the monodromy group";
    }
}

DGalClass classify_dgal(const KernelData &k) {
    DGalClass D;
    auto M = lattice::analyze_sublattice2(k.closure_relations);
    if (k.r1 == 2 && k.r2 == 2) {
        D.kind = DGalClass::FiniteEqualsG;
        D.closure_consistent = (M.rank == 2);
        return D;
    }
    bool full = std::min(k.r1, k.r2) == 0;
    if (!full && k.r1 == 1 && k.r2 == 1) {
        auto S1 = lattice::analyze_sublattice2(k.ker_phi1);
        auto S2 = lattice::analyze_sublattice2(k.ker_phi2);
        // trivial intersection of two rank-1 sublattices means distinct lines
        full = !(S1.primitive == S2.primitive);
    }
    if (full) {
        D.kind = DGalClass::FullGG;
        D.closure_consistent = (M.rank == 0);
        return D;
    }
    D.kind = DGalClass::OneDim;
    D.closure_consistent = (M.rank == 1);
    if (M.rank == 1) {
        D.d = M.content;
    } else {
        // fall back to the content of the rank-1 kernel generator
        auto S = lattice::analyze_sublattice2(k.r1 == 1 ? k.ker_phi1 : k.ker_phi2);
        D.d = S.content > 0 ? S.content : 1;
    }
    return D;
}

}  // namespace ellmono::groups
