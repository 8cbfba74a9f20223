#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "ellmono/numerics.hpp"

namespace ellmono::lattice {

using IntMat = std::vector<std::vector<long long>>;

// Smith normal form invariants d1 | d2 | ... of an integer matrix
std::vector<long long> smith_invariants(IntMat m);

// basis of the integer kernel {x : M x = 0} as rows
IntMat integer_kernel(const IntMat &M);

// rank over Q
int integer_rank(IntMat m);

// canonical description of a subgroup L of Z^2 given by generator rows:
// rank, invariant factors of Z^2 / L (0 meaning a free factor), and a
// primitive generator with its content when rank == 1
struct Sublattice2 {
    int rank = 0;
    std::array<long long, 2> quotient_invariants{0, 0};  // Z^2/L = Z/d1 x Z/d2
    std::array<long long, 2> primitive{0, 0};
    long long content = 0;
};

Sublattice2 analyze_sublattice2(const std::vector<std::array<long long, 2>> &gens);

// do two generator lists span the same sublattice of Z^2?
bool same_sublattice2(const std::vector<std::array<long long, 2>> &a,
                      const std::vector<std::array<long long, 2>> &b);
bool sublattice2_contains(const std::vector<std::array<long long, 2>> &outer,
                          const std::vector<std::array<long long, 2>> &inner);

// LLL reduction (delta = 0.99) of real row vectors, in place
void lll_reduce(std::vector<std::vector<double>> &basis);

// Integer relations sum_j c_j v_j ~ 0 among complex numbers, found by
// lattice reduction; only relations with |c|_inf <= height_bound and
// residual below eps are reported.
struct RelationResult {
    IntMat relations;        // basis rows of the detected relation lattice
    double worst_residual = 0.0;
    bool confident = true;   // residual gap was decisive at the height bound
};

RelationResult integer_relations(const std::vector<cplx> &v, long long height_bound,
                                 double eps);

// nearest lattice vector (Babai rounding with local search) for a small
// full-rank real lattice given by basis rows; returns the reduced residual
std::vector<double> lattice_reduce_residual(const std::vector<std::vector<double>> &basis,
                                            std::vector<double> target);

}  // namespace ellmono::lattice
