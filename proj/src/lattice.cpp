#include "ellmono/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace ellmono::lattice {

namespace {

using i128 = __int128;

long long checked(i128 v) {
    if (v > i128(INT64_MAX) / 4 || v < i128(INT64_MIN) / 4)
        throw std::overflow_error("integer lattice: entry overflow");
    return (long long)v;
}

void swap_rows(IntMat &m, int i, int j) { std::swap(m[i], m[j]); }
void swap_cols(IntMat &m, int i, int j) {
    for (auto &r : m) std::swap(r[i], r[j]);
}

}  // namespace

std::vector<long long> smith_invariants(IntMat m) {
    if (m.empty() || m[0].empty()) return {};
    int rows = m.size(), cols = m[0].size();
    int n = std::min(rows, cols);
    std::vector<long long> inv;
    int r0 = 0, c0 = 0;
    while (r0 < rows && c0 < cols) {
        // find pivot of least absolute value
        int pi = -1, pj = -1;
        long long best = 0;
        for (int i = r0; i < rows; ++i)
            for (int j = c0; j < cols; ++j)
                if (m[i][j] != 0 && (pi < 0 || std::llabs(m[i][j]) < best)) {
                    best = std::llabs(m[i][j]);
                    pi = i;
                    pj = j;
                }
        if (pi < 0) break;
        swap_rows(m, r0, pi);
        swap_cols(m, c0, pj);
        bool clean = true;
        for (int i = r0 + 1; i < rows; ++i) {
            long long q = m[i][c0] / m[r0][c0];
            if (q)
                for (int j = c0; j < cols; ++j)
                    m[i][j] = checked(i128(m[i][j]) - i128(q) * m[r0][j]);
            if (m[i][c0]) clean = false;
        }
        for (int j = c0 + 1; j < cols; ++j) {
            long long q = m[r0][j] / m[r0][c0];
            if (q)
                for (int i = r0; i < rows; ++i)
                    m[i][j] = checked(i128(m[i][j]) - i128(q) * m[i][c0]);
            if (m[r0][j]) clean = false;
        }
        if (!clean) continue;  // repeat with the reduced block
        inv.push_back(std::llabs(m[r0][c0]));
        ++r0;
        ++c0;
    }
    // enforce divisibility d1 | d2 | ...
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = 0; i + 1 < inv.size(); ++i)
            for (std::size_t j = i + 1; j < inv.size(); ++j) {
                if (inv[j] % inv[i] == 0) continue;
                long long g = std::gcd(inv[i], inv[j]);
                long long l = checked(i128(inv[i]) / g * inv[j]);
                inv[i] = g;
                inv[j] = l;
                changed = true;
            }
    }
    (void)n;
    return inv;
}

int integer_rank(IntMat m) {
    auto inv = smith_invariants(std::move(m));
    int r = 0;
    for (auto d : inv)
        if (d != 0) ++r;
    return r;
}

IntMat integer_kernel(const IntMat &M) {
    if (M.empty()) return {};
    int rows = M.size(), cols = M[0].size();
    // column-reduce [M; I] so that zero columns of the reduced M part give
    // kernel vectors in the I part
    IntMat A = M;
    IntMat T(cols, std::vector<long long>(cols, 0));
    for (int i = 0; i < cols; ++i) T[i][i] = 1;

    int row = 0, lead = 0;
    while (row < rows && lead < cols) {
        // find a nonzero entry in this row at column >= lead, minimal |.|
        int pj = -1;
        for (int j = lead; j < cols; ++j)
            if (A[row][j] != 0 && (pj < 0 || std::llabs(A[row][j]) < std::llabs(A[row][pj])))
                pj = j;
        if (pj < 0) {
            ++row;
            continue;
        }
        // euclidean column elimination on this row
        while (true) {
            pj = -1;
            for (int j = lead; j < cols; ++j)
                if (A[row][j] != 0 && (pj < 0 || std::llabs(A[row][j]) < std::llabs(A[row][pj])))
                    pj = j;
            bool done = true;
            for (int j = lead; j < cols; ++j) {
                if (j == pj || A[row][j] == 0) continue;
                long long q = A[row][j] / A[row][pj];
                for (int i = 0; i < rows; ++i)
                    A[i][j] = checked(i128(A[i][j]) - i128(q) * A[i][pj]);
                for (int i = 0; i < cols; ++i)
                    T[i][j] = checked(i128(T[i][j]) - i128(q) * T[i][pj]);
                if (A[row][j] != 0) done = false;
            }
            if (done) break;
        }
        // move pivot column to `lead`
        for (int i = 0; i < rows; ++i) std::swap(A[i][lead], A[i][pj]);
        for (int i = 0; i < cols; ++i) std::swap(T[i][lead], T[i][pj]);
        ++lead;
        ++row;
    }
    IntMat kernel;
    for (int j = lead; j < cols; ++j) {
        bool zero = true;
        for (int i = 0; i < rows; ++i)
            if (A[i][j] != 0) zero = false;
        if (!zero) continue;
        std::vector<long long> v(cols);
        for (int i = 0; i < cols; ++i) v[i] = T[i][j];
        kernel.push_back(std::move(v));
    }
    return kernel;
}

Sublattice2 analyze_sublattice2(const std::vector<std::array<long long, 2>> &gens) {
    Sublattice2 S;
    IntMat m;
    for (auto &g : gens)
        if (g[0] || g[1]) m.push_back({g[0], g[1]});
    if (m.empty()) {
        S.quotient_invariants = {0, 0};
        return S;
    }
    S.rank = integer_rank(m);
    auto inv = smith_invariants(m);
    // quotient Z^2 / L has invariants (d1, d2) padded with 0 for free parts
    std::vector<long long> d(inv.begin(), inv.end());
    while (d.size() < 2) d.push_back(0);
    S.quotient_invariants = {d[0], d[1]};
    if (S.rank == 1) {
        // primitive generator and content of the single line
        std::array<long long, 2> g = {0, 0};
        for (auto &r : m) {
            if (g[0] == 0 && g[1] == 0) {
                g = {r[0], r[1]};
                continue;
            }
            // all generators are collinear (rank 1); combine by gcd of contents
            long long ca = std::gcd(std::llabs(g[0]), std::llabs(g[1]));
            long long cb = std::gcd(std::llabs(r[0]), std::llabs(r[1]));
            long long cg = std::gcd(ca, cb);
            std::array<long long, 2> prim = {g[0] / ca, g[1] / ca};
            g = {prim[0] * cg, prim[1] * cg};
        }
        long long c = std::gcd(std::llabs(g[0]), std::llabs(g[1]));
        S.content = c;
        S.primitive = {g[0] / c, g[1] / c};
        if (S.primitive[0] < 0 || (S.primitive[0] == 0 && S.primitive[1] < 0)) {
            S.primitive[0] = -S.primitive[0];
            S.primitive[1] = -S.primitive[1];
        }
    }
    return S;
}

bool sublattice2_contains(const std::vector<std::array<long long, 2>> &outer,
                          const std::vector<std::array<long long, 2>> &inner) {
    // v in L(outer) iff appending v does not change the Smith invariants
    IntMat base;
    for (auto &g : outer) base.push_back({g[0], g[1]});
    auto inv0 = smith_invariants(base);
    for (auto &v : inner) {
        IntMat ext = base;
        ext.push_back({v[0], v[1]});
        if (smith_invariants(ext) != inv0) return false;
    }
    return true;
}

bool same_sublattice2(const std::vector<std::array<long long, 2>> &a,
                      const std::vector<std::array<long long, 2>> &b) {
    return sublattice2_contains(a, b) && sublattice2_contains(b, a);
}

void lll_reduce(std::vector<std::vector<double>> &basis) {
    const double delta = 0.99;
    int n = basis.size();
    if (n == 0) return;
    int dim = basis[0].size();

    auto dot = [&](const std::vector<double> &a, const std::vector<double> &b) {
        double s = 0;
        for (int i = 0; i < dim; ++i) s += a[i] * b[i];
        return s;
    };

    std::vector<std::vector<double>> gs(n, std::vector<double>(dim));
    std::vector<std::vector<double>> mu(n, std::vector<double>(n, 0.0));
    std::vector<double> B(n);

    auto gram_schmidt = [&]() {
        for (int i = 0; i < n; ++i) {
            gs[i] = basis[i];
            for (int j = 0; j < i; ++j) {
                mu[i][j] = B[j] > 0 ? dot(basis[i], gs[j]) / B[j] : 0.0;
                for (int k = 0; k < dim; ++k) gs[i][k] -= mu[i][j] * gs[j][k];
            }
            B[i] = dot(gs[i], gs[i]);
        }
    };

    gram_schmidt();
    int k = 1;
    int guard = 0;
    while (k < n && ++guard < 100000) {
        for (int j = k - 1; j >= 0; --j) {
            double m = std::round(mu[k][j]);
            if (m != 0.0)
                for (int i = 0; i < dim; ++i) basis[k][i] -= m * basis[j][i];
        }
        gram_schmidt();
        if (B[k] >= (delta - mu[k][k - 1] * mu[k][k - 1]) * B[k - 1]) {
            ++k;
        } else {
            std::swap(basis[k], basis[k - 1]);
            gram_schmidt();
            k = std::max(k - 1, 1);
        }
    }
}

RelationResult integer_relations(const std::vector<cplx> &v, long long height_bound,
                                 double eps) {
    int k = v.size();
    RelationResult R;
    if (k == 0) return R;
    double vmax = 0;
    for (auto z : v) vmax = std::max(vmax, std::abs(z));
    if (vmax == 0) vmax = 1;
    const double C = 1.0 / (eps * 1e-3);  // scale pushing residuals into view

    std::vector<std::vector<double>> basis(k, std::vector<double>(k + 2, 0.0));
    for (int i = 0; i < k; ++i) {
        basis[i][i] = 1.0;
        basis[i][k] = C * v[i].real() / vmax;
        basis[i][k + 1] = C * v[i].imag() / vmax;
    }
    lll_reduce(basis);

    IntMat cands;
    double worst = 0.0;
    for (auto &row : basis) {
        std::vector<long long> c(k);
        long long hinf = 0;
        for (int i = 0; i < k; ++i) {
            c[i] = (long long)std::llround(row[i]);
            hinf = std::max(hinf, std::llabs(c[i]));
        }
        if (hinf == 0 || hinf > height_bound) continue;
        cplx resid = 0.0;
        for (int i = 0; i < k; ++i) resid += double(c[i]) * v[i];
        double rel = std::abs(resid) / (vmax * std::max<double>(1.0, hinf));
        if (rel < eps) {
            cands.push_back(c);
            worst = std::max(worst, rel);
        }
    }
    // keep an independent subset
    IntMat kept;
    for (auto &c : cands) {
        IntMat test = kept;
        test.push_back(c);
        if (integer_rank(test) > integer_rank(kept)) kept.push_back(c);
    }
    R.relations = kept;
    R.worst_residual = worst;
    // confidence: residuals accepted must be far below the rejection scale
    R.confident = worst < eps * 1e-3 || kept.empty();
    return R;
}

std::vector<double> lattice_reduce_residual(const std::vector<std::vector<double>> &basis_in,
                                            std::vector<double> target) {
    auto basis = basis_in;
    lll_reduce(basis);
    int n = basis.size();
    if (n == 0) return target;
    int dim = basis[0].size();
    // Babai rounding against the reduced basis (solve least squares by
    // Gram-Schmidt back substitution), then a small local search
    auto dot = [&](const std::vector<double> &a, const std::vector<double> &b) {
        double s = 0;
        for (int i = 0; i < dim; ++i) s += a[i] * b[i];
        return s;
    };
    std::vector<std::vector<double>> gs(n, std::vector<double>(dim));
    std::vector<std::vector<double>> mu(n, std::vector<double>(n, 0.0));
    std::vector<double> B(n);
    for (int i = 0; i < n; ++i) {
        gs[i] = basis[i];
        for (int j = 0; j < i; ++j) {
            mu[i][j] = B[j] > 0 ? dot(basis[i], gs[j]) / B[j] : 0.0;
            for (int d = 0; d < dim; ++d) gs[i][d] -= mu[i][j] * gs[j][d];
        }
        B[i] = dot(gs[i], gs[i]);
    }
    std::vector<double> r = target;
    for (int i = n - 1; i >= 0; --i) {
        double c = B[i] > 0 ? std::round(dot(r, gs[i]) / B[i]) : 0.0;
        if (c != 0.0)
            for (int d = 0; d < dim; ++d) r[d] -= c * basis[i][d];
    }
    // local +-1 refinement
    bool improved = true;
    auto norm2 = [&](const std::vector<double> &x) { return dot(x, x); };
    while (improved) {
        improved = false;
        for (int i = 0; i < n; ++i)
            for (int s : {-1, 1}) {
                auto cand = r;
                for (int d = 0; d < dim; ++d) cand[d] -= s * basis[i][d];
                if (norm2(cand) < norm2(r) - 1e-18) {
                    r = cand;
                    improved = true;
                }
            }
    }
    return r;
}

}  // namespace ellmono::lattice
