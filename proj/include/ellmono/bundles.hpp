#pragma once

#include "ellmono/connections.hpp"

namespace ellmono::bundles {

using curves::BiellipticCover;
using curves::CPoint;
using curves::DivisorClassE;
using curves::EllipticCurve;
using curves::EPoint;

// Identified rank-2 bundle: a split sum of line-bundle classes, or the unique
// stable bundle with the given odd-degree determinant.
struct BundleDescriptor {
    struct DirectSum {
        DivisorClassE L1, L2;
    };
    struct AtiyahStable {
        DivisorClassE det;
    };
    std::variant<DirectSum, AtiyahStable> v;

    static BundleDescriptor direct_sum(DivisorClassE a, DivisorClassE b) {
        return {DirectSum{a, b}};
    }
    static BundleDescriptor atiyah(DivisorClassE det) {
        if (det.degree % 2 == 0)
            throw std::invalid_argument("BundleDescriptor: Atiyah bundle needs odd degree");
        return {AtiyahStable{det}};
    }
    long degree() const {
        if (auto *d = std::get_if<DirectSum>(&v)) return d->L1.degree + d->L2.degree;
        return std::get<AtiyahStable>(v).det.degree;
    }
    DivisorClassE det_class(const EllipticCurve &E) const;
};

enum class Stability { Stable, StrictlySemistable, Unstable };
const char *to_string(Stability s);

Stability stability(const BundleDescriptor &b);

enum class CaseLabel { Generic, A, B, C, D };
const char *to_string(CaseLabel c);

struct IdentifyResult {
    BundleDescriptor bundle;
    CaseLabel label;
    Stability stab;
    std::vector<std::string> warnings;
};

IdentifyResult identify_direct_image(const BiellipticCover &C, const CPoint &q1,
                                     const CPoint &q2);

// moduli map to E for stable images: [q1 + q2 - 2 inf] represented by q1 + q2
EPoint moduli_image(const BiellipticCover &C, const CPoint &q1, const CPoint &q2);

// ---- elementary-transform bookkeeping

struct DegDet {
    long degree;
    DivisorClassE det;
};

DegDet elm_degree_det(const EllipticCurve &E, const DegDet &state, const EPoint &p,
                      int sign);

struct ElmCenter {
    EPoint p;
    std::array<cplx, 2> v;  // projective direction in the (1, xi) frame
    // names the tracked section the center lies on when the point was
    // already modified and direction data is stale
    std::optional<std::string> on_section;
};

struct TrackedSection {
    std::string label;
    DivisorClassE line_class;
    long self_int;
    std::array<cplx, 2> direction;  // constant direction in the (1, xi) frame
};

TrackedSection elm_update_section(const EllipticCurve &E, TrackedSection s,
                                  const EPoint &center, int sign, bool incident);

bool directions_parallel(const std::array<cplx, 2> &a, const std::array<cplx, 2> &b,
                         double tol = 1e-9);

// Catalog run on P(E0(-inf)): s-bar_1 (square -1, direction (1,0)) and the
// pencil members through the upcoming centers (square 1, direction (c,1)),
// with pairwise intersection numbers tracked through every transform.
struct RuledRun {
    std::vector<TrackedSection> sections;
    std::vector<std::vector<long>> inter;  // pairwise intersection numbers
    long min_self_int = 0;
    DegDet ambient;
    // labels of a disjoint pair of square-0 sections, when one exists
    std::optional<std::pair<std::string, std::string>> zero_pair;
};

RuledRun ruled_model_run(const BiellipticCover &C, const std::vector<ElmCenter> &elms);

// ---- Gabber transform at p_+ along the residue eigenvector of eigenvalue 1/2

struct GabberResult {
    BundleDescriptor bundle;
    std::array<cplx, 2> direction;  // the eigenvector used
    cplx eigen_before, eigen_after;
    DivisorClassE det;
};

GabberResult gabber_transform(const BiellipticCover &C, const CPoint &q1,
                              const CPoint &q2,
                              const connections::ResidueSet &residues);

// rational gauge implementing the transform on the connection matrix:
// frame (1, xi/(x-t')); same meromorphic connection away from the fiber of t'
struct GaugedConnectionMatrix {
    connections::ConnectionMatrix base;

    Mat2 at(cplx x, cplx y) const;
    Mat2 at_lift(cplx xi, cplx y) const;
    Mat2 gauge(cplx x) const;  // S with frame e' = e S
};

GaugedConnectionMatrix gabber_gauged_matrix(const connections::ConnectionMatrix &A);

// ---- stalk relation from an apparent-singularity residue

struct StalkChange {
    enum Kind { ElmPlus, ElmMinus, Twist, TwistElmPlus } kind;
    long twist = 0;                 // twist exponent when applicable
    std::array<cplx, 2> vector{};   // elm direction when applicable
};

StalkChange stalk_change_from_residues(const Mat2 &residue, double tol = 1e-9);

}  // namespace ellmono::bundles
