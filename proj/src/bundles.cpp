#include "ellmono/bundles.hpp"

#include <cmath>

namespace ellmono::bundles {

using curves::cpoints_equal;
using curves::divclass_equal;
using curves::group_add;
using curves::group_mul;
using curves::on_cover;

namespace {

constexpr double kCaseTol = 1e-9;
constexpr double kWarnTol = 1e-6;

DivisorClassE cls(long degree, EPoint rep) { return {degree, rep}; }
DivisorClassE cls_O() { return {0, EPoint::inf()}; }

}  // namespace

DivisorClassE BundleDescriptor::det_class(const EllipticCurve &E) const {
    if (auto *d = std::get_if<DirectSum>(&v))
        return curves::divclass_add(E, d->L1, d->L2);
    return std::get<AtiyahStable>(v).det;
}

const char *to_string(Stability s) {
    switch (s) {
        case Stability::Stable: return "stable";
        case Stability::StrictlySemistable: return "strictly_semistable";
        default: return "unstable";
    }
}

const char *to_string(CaseLabel c) {
    switch (c) {
        case CaseLabel::Generic: return "generic";
        case CaseLabel::A: return "a";
        case CaseLabel::B: return "b";
        case CaseLabel::C: return "c";
        default: return "d";
    }
}

Stability stability(const BundleDescriptor &b) {
    if (std::holds_alternative<BundleDescriptor::AtiyahStable>(b.v))
        return Stability::Stable;
    const auto &d = std::get<BundleDescriptor::DirectSum>(b.v);
    return d.L1.degree == d.L2.degree ? Stability::StrictlySemistable
                                      : Stability::Unstable;
}

IdentifyResult identify_direct_image(const BiellipticCover &C, const CPoint &q1,
                                     const CPoint &q2) {
    for (const auto &q : {q1, q2})
        if (!on_cover(C, q))
            throw std::invalid_argument("identify_direct_image: q-tilde not on C");
    const EllipticCurve &E = C.base;
    IdentifyResult R{BundleDescriptor::direct_sum(cls_O(), cls_O()), CaseLabel::Generic,
                     Stability::Stable, {}};

    auto is_ram = [&](const CPoint &q) {
        return !q.infinite() && std::abs(q.xi) <= kCaseTol;
    };
    auto warn_near = [&](const CPoint &q) {
        if (!q.infinite() && std::abs(q.xi) > kCaseTol && std::abs(q.xi) <= kWarnTol)
            R.warnings.push_back("q-tilde within 1e-6 of a ramification point");
    };
    warn_near(q1);
    warn_near(q2);

    bool both_inf_pair = (q1.kind == CPoint::InfPlus && q2.kind == CPoint::InfMinus) ||
                         (q1.kind == CPoint::InfMinus && q2.kind == CPoint::InfPlus);
    bool hyperelliptic_pair =
        !q1.infinite() && !q2.infinite() && near(q1.xi, q2.xi, kCaseTol) &&
        near(q1.y, -q2.y, kCaseTol);

    // (a) q1 + q2 in the hyperelliptic series: E = E0 = O + O(-inf)
    if (both_inf_pair || hyperelliptic_pair) {
        R.label = CaseLabel::A;
        R.bundle = BundleDescriptor::direct_sum(cls_O(), cls(-1, EPoint::inf()));
        R.stab = stability(R.bundle);
        return R;
    }

    // both q-tildes at the same ramification point: no printed formula
    if (is_ram(q1) && is_ram(q2))
        throw std::domain_error(
            "identify_direct_image: q1 = q2 at a ramification point is not implemented");

    // (b) coincident finite q-tildes off the ramification locus
    if (!q1.infinite() && !q2.infinite() && cpoints_equal(q1, q2, kCaseTol) &&
        !is_ram(q1)) {
        EPoint x1 = curves::cover_map(C, q1);
        R.label = CaseLabel::B;
        R.bundle = BundleDescriptor::direct_sum(
            cls(-1, EPoint::inf()), cls(0, group_mul(E, 2, x1)));
        R.stab = stability(R.bundle);
        return R;
    }

    // (c) some q-tilde at infinity
    if (q1.infinite() || q2.infinite()) {
        const CPoint &other = q1.infinite() ? q2 : q1;
        EPoint qo = curves::cover_map(C, other);
        R.label = CaseLabel::C;
        R.bundle = BundleDescriptor::direct_sum(cls(-1, qo), cls_O());
        R.stab = stability(R.bundle);
        return R;
    }

    // (d) exactly one q-tilde at a ramification point: stable, det twisted by p_±
    if (is_ram(q1) || is_ram(q2)) {
        const CPoint &ram = is_ram(q1) ? q1 : q2;
        const CPoint &other = is_ram(q1) ? q2 : q1;
        EPoint ps = near(ram.y, C.y0, kCaseTol) ? C.p_plus() : C.p_minus();
        EPoint qo = curves::cover_map(C, other);
        R.label = CaseLabel::D;
        R.bundle = BundleDescriptor::atiyah(cls(-1, group_add(E, qo, ps)));
        R.stab = Stability::Stable;
        return R;
    }

    // generic: stable of degree -1 with det = [q1 + q2 - 3 inf]
    EPoint x1 = curves::cover_map(C, q1), x2 = curves::cover_map(C, q2);
    R.label = CaseLabel::Generic;
    R.bundle = BundleDescriptor::atiyah(cls(-1, group_add(E, x1, x2)));
    R.stab = Stability::Stable;
    return R;
}

EPoint moduli_image(const BiellipticCover &C, const CPoint &q1, const CPoint &q2) {
    auto R = identify_direct_image(C, q1, q2);
    if (R.label != CaseLabel::Generic && R.label != CaseLabel::D)
        throw std::domain_error("moduli_image: bundle is unstable, image undefined");
    return group_add(C.base, curves::cover_map(C, q1), curves::cover_map(C, q2));
}

DegDet elm_degree_det(const EllipticCurve &E, const DegDet &state, const EPoint &p,
                      int sign) {
    if (sign != 1 && sign != -1)
        throw std::invalid_argument("elm_degree_det: sign must be +-1");
    DegDet next;
    next.degree = state.degree + sign;
    next.det = curves::divclass_add(E, state.det,
                                    DivisorClassE{sign, sign > 0 ? p : curves::neg(p)});
    return next;
}

bool directions_parallel(const std::array<cplx, 2> &a, const std::array<cplx, 2> &b,
                         double tol) {
    double na = std::abs(a[0]) + std::abs(a[1]);
    double nb = std::abs(b[0]) + std::abs(b[1]);
    if (na == 0 || nb == 0) throw std::invalid_argument("zero projective direction");
    return std::abs(a[0] * b[1] - a[1] * b[0]) <= tol * na * nb;
}

TrackedSection elm_update_section(const EllipticCurve &E, TrackedSection s,
                                  const EPoint &center, int sign, bool incident) {
    if (sign != 1 && sign != -1)
        throw std::invalid_argument("elm_update_section: sign must be +-1");
    if (incident) {
        s.self_int -= 1;
        if (sign > 0)
            s.line_class = curves::divclass_add(E, s.line_class, DivisorClassE{1, center});
        // elm^-: class unchanged
    } else {
        s.self_int += 1;
        if (sign < 0)
            s.line_class = curves::divclass_add(
                E, s.line_class, DivisorClassE{-1, curves::neg(center)});
        // elm^+: class unchanged
    }
    return s;
}

RuledRun ruled_model_run(const BiellipticCover &C, const std::vector<ElmCenter> &elms) {
    const EllipticCurve &E = C.base;
    RuledRun run;
    run.ambient = {-3, cls(-3, EPoint::inf())};

    // catalog: the rigid section and the pencil members through the centers
    run.sections.push_back({"s1", cls(-1, EPoint::inf()), -1, {1.0, 0.0}});
    int member_id = 0;
    for (const auto &e : elms) {
        if (directions_parallel(e.v, {1.0, 0.0})) continue;  // on the rigid section
        cplx c = e.v[0] / e.v[1];
        bool fresh = true;
        for (const auto &s : run.sections)
            if (s.label != "s1" && directions_parallel(s.direction, {c, 1.0})) fresh = false;
        if (fresh)
            run.sections.push_back({"member_" + std::to_string(member_id++),
                                    cls(-2, EPoint::inf()), 1,
                                    {c, 1.0}});
    }
    // always track the distinguished square-1 section s2 = member c = 0
    bool have_s2 = false;
    for (const auto &s : run.sections)
        if (s.label != "s1" && directions_parallel(s.direction, {0.0, 1.0})) have_s2 = true;
    if (!have_s2)
        run.sections.push_back({"s2", cls(-2, EPoint::inf()), 1, {0.0, 1.0}});

    int n = run.sections.size();
    run.inter.assign(n, std::vector<long>(n, 0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) {
                run.inter[i][j] = run.sections[i].self_int;
            } else if (run.sections[i].label == "s1" || run.sections[j].label == "s1") {
                run.inter[i][j] = 0;  // s1 is disjoint from every pencil member
            } else {
                run.inter[i][j] = 1;  // two pencil members meet once over infinity
            }
        }

    std::vector<EPoint> modified;
    for (const auto &e : elms) {
        bool point_was_modified = false;
        for (const auto &m : modified)
            if (curves::points_equal(m, e.p)) point_was_modified = true;

        std::vector<bool> incident(n, false);
        if (point_was_modified) {
            if (!e.on_section)
                throw std::invalid_argument(
                    "ruled_model_run: center at a modified point needs refreshed "
                    "direction data (on_section)");
            bool found = false;
            for (int i = 0; i < n; ++i)
                if (run.sections[i].label == *e.on_section) {
                    incident[i] = true;
                    found = true;
                }
            if (!found)
                throw std::invalid_argument("ruled_model_run: unknown section label");
        } else {
            for (int i = 0; i < n; ++i)
                incident[i] = directions_parallel(run.sections[i].direction, e.v);
        }

        for (int i = 0; i < n; ++i)
            run.sections[i] = elm_update_section(E, run.sections[i], e.p, +1, incident[i]);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                if (i == j) {
                    run.inter[i][j] = run.sections[i].self_int;
                } else {
                    long delta = (incident[i] && incident[j]) ? -1
                                 : (!incident[i] && !incident[j]) ? +1
                                                                  : 0;
                    run.inter[i][j] += delta;
                }
            }
        run.ambient = elm_degree_det(E, run.ambient, e.p, +1);
        modified.push_back(e.p);
    }

    run.min_self_int = run.sections[0].self_int;
    for (const auto &s : run.sections) run.min_self_int = std::min(run.min_self_int, s.self_int);

    for (int i = 0; i < n && !run.zero_pair; ++i)
        for (int j = i + 1; j < n && !run.zero_pair; ++j)
            if (run.sections[i].self_int == 0 && run.sections[j].self_int == 0 &&
                run.inter[i][j] == 0)
                run.zero_pair = {{run.sections[i].label, run.sections[j].label}};
    return run;
}

GabberResult gabber_transform(const BiellipticCover &C, const CPoint &q1,
                              const CPoint &q2,
                              const connections::ResidueSet &residues) {
    auto id = identify_direct_image(C, q1, q2);
    if (id.label != CaseLabel::Generic)
        throw std::domain_error("gabber_transform: generic configuration required");
    // eigenvector of Res_{p+} for eigenvalue 1/2: the residue is
    // [[0,0],[rho,1/2]], so the eigenvector is (0,1)
    const Mat2 &Rp = residues.at_p_plus;
    if (std::abs(Rp(0, 0)) > 1e-9 || std::abs(Rp(0, 1)) > 1e-9 ||
        std::abs(Rp(1, 1) - 0.5) > 1e-9)
        throw std::domain_error("gabber_transform: unexpected residue shape at p_+");

    const EllipticCurve &E = C.base;
    EPoint x1 = curves::cover_map(C, q1), x2 = curves::cover_map(C, q2);
    GabberResult G;
    G.direction = {0.0, 1.0};
    G.eigen_before = 0.5;
    G.eigen_after = -0.5;
    G.bundle = BundleDescriptor::direct_sum(
        cls(0, C.p_plus()), cls(0, group_add(E, x1, x2)));
    // det E' = det E (q1 + q2 + p_+) = O(q1 + q2 + p_+ - 3 inf)
    G.det = cls(0, group_add(E, group_add(E, x1, x2), C.p_plus()));
    return G;
}

Mat2 GaugedConnectionMatrix::gauge(cplx x) const {
    return Mat2{1.0, 0.0, 0.0, 1.0 / (x - base.cover.tp)};
}

Mat2 GaugedConnectionMatrix::at_lift(cplx xi, cplx y) const {
    Mat2 A = base.at_lift(xi, y);
    cplx x = base.cover.tp - xi * xi;
    cplx u = x - base.cover.tp;
    // frame (1, xi/(x - t')): A' = S^{-1} A S + S^{-1} dS with S = diag(1, 1/u)
    return Mat2{A(0, 0), A(0, 1) / u, A(1, 0) * u, A(1, 1) - 1.0 / u};
}

Mat2 GaugedConnectionMatrix::at(cplx x, cplx y) const {
    return at_lift(std::sqrt(base.cover.tp - x), y);
}

GaugedConnectionMatrix gabber_gauged_matrix(const connections::ConnectionMatrix &A) {
    return GaugedConnectionMatrix{A};
}

StalkChange stalk_change_from_residues(const Mat2 &residue, double tol) {
    auto ev = residue.eigenvalues();
    cplx a = ev[0], b = ev[1];
    if (a.real() < b.real()) std::swap(a, b);
    auto check_int = [&](cplx z) {
        double r = std::round(z.real());
        if (std::abs(z - r) > tol)
            throw std::domain_error(
                "stalk_change_from_residues: non-integer eigenvalue (true logarithmic pole)");
        return (long)r;
    };
    long na = check_int(a), nb = check_int(b);
    StalkChange S;
    if (na == nb) {
        if (dist(residue, double(na) * Mat2::identity()) > tol)
            throw std::domain_error("stalk_change_from_residues: non-diagonalizable residue");
        S.kind = StalkChange::Twist;
        S.twist = na;
        return S;
    }
    if (na - nb != 1)
        throw std::domain_error(
            "stalk_change_from_residues: eigenvalue gap exceeds one elementary transform");
    auto v_top = eigenvector(residue, double(na));
    if (nb == 0) {
        S.kind = StalkChange::ElmPlus;
        S.vector = v_top;
        return S;
    }
    if (na == 0) {
        S.kind = StalkChange::ElmMinus;
        S.vector = v_top;  // the lemma's v2, the eigenvector of eigenvalue 0
        return S;
    }
    S.kind = StalkChange::TwistElmPlus;
    S.twist = nb;
    S.vector = v_top;
    return S;
}

}  // namespace ellmono::bundles
