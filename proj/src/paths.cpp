#include "ellmono/paths.hpp"

#include <algorithm>
#include <cmath>

#include "ellmono/quadrature.hpp"

namespace ellmono {

double Path::min_dist_to(cplx w, int samples_per_seg) const {
    double d = 1e300;
    for (const auto &seg : segs)
        for (int i = 0; i <= samples_per_seg; ++i)
            d = std::min(d, std::abs(seg.at(double(i) / samples_per_seg) - w));
    return d;
}

int Path::winding(cplx w, int samples_per_seg) const {
    double total = 0.0;
    cplx prev = start() - w;
    for (const auto &seg : segs)
        for (int i = 1; i <= samples_per_seg; ++i) {
            cplx cur = seg.at(double(i) / samples_per_seg) - w;
            total += std::arg(cur / prev);
            prev = cur;
        }
    return int(std::lround(total / (2.0 * M_PI)));
}

cplx SqrtCover::continue_y(const Seg &seg, cplx y_start, int min_steps) const {
    // substep so that each step stays well below the branch-point distance
    cplx y = y_start;
    double s = 0.0;
    int guard = 0;
    while (s < 1.0) {
        cplx z = seg.at(s);
        double d = dist_to_branch(z);
        double L = std::max(seg.length_bound(), 1e-30);
        double ds = std::max(0.20 * d / L, 1e-6);
        ds = std::min(ds, 1.0 / min_steps);
        double s1 = std::min(1.0, s + ds);
        // two half-steps for a safer predictor
        cplx zm = seg.at(0.5 * (s + s1));
        y = step_y(z, y, zm);
        y = step_y(zm, y, seg.at(s1));
        s = s1;
        if (++guard > 2000000)
            throw std::runtime_error("SqrtCover::continue_y: step collapse near branch point");
    }
    return y;
}

cplx SqrtCover::continue_y(const Path &path, cplx y_start) const {
    cplx y = y_start;
    for (const auto &seg : path.segs) y = continue_y(seg, y);
    return y;
}

namespace {

// integrate along one segment chunk [s0,s1] with GL and tracked y
struct SegIntegrator {
    const SqrtCover &cov;
    const Seg &seg;
    const std::function<cplx(cplx, cplx)> &g;

    // nodes must be visited in order so that y can be continued through them
    cplx chunk(double s0, double s1, cplx &y) {
        static const double X[15] = {
            -0.9879925180204854, -0.9372733924007060, -0.8482065834104272,
            -0.7244177313601701, -0.5709721726085388, -0.3941513470775634,
            -0.2011940939974345, 0.0,                 0.2011940939974345,
            0.3941513470775634,  0.5709721726085388,  0.7244177313601701,
            0.8482065834104272,  0.9372733924007060,  0.9879925180204854};
        static const double W[15] = {
            0.0307532419961173, 0.0703660474881081, 0.1071592204671719,
            0.1395706779261543, 0.1662692058169939, 0.1861610000155622,
            0.1984314853271116, 0.2025782419255613, 0.1984314853271116,
            0.1861610000155622, 0.1662692058169939, 0.1395706779261543,
            0.1071592204671719, 0.0703660474881081, 0.0307532419961173};
        double mid = 0.5 * (s0 + s1), half = 0.5 * (s1 - s0);
        cplx sum = 0.0;
        cplx zc = seg.at(s0);
        cplx yc = y;
        for (int i = 0; i < 15; ++i) {
            double s = mid + half * X[i];
            cplx z = seg.at(s);
            yc = cov.step_y(zc, yc, z);
            zc = z;
            sum += W[i] * g(z, yc) * seg.deriv(s);
        }
        // land y on the chunk end
        y = cov.step_y(zc, yc, seg.at(s1));
        return sum * half;
    }
};

}  // namespace

cplx integrate_on_cover(const SqrtCover &cov, const Path &path, cplx y_start,
                        const std::function<cplx(cplx, cplx)> &g, double tol,
                        cplx *y_end) {
    // refine the whole-path subdivision until two successive levels agree
    cplx prev = 0.0;
    cplx yfin = y_start;
    for (int level = 0; level < 9; ++level) {
        cplx total = 0.0;
        cplx y = y_start;
        for (const auto &seg : path.segs) {
            // base subdivision from branch clearance
            int n = 4 << level;
            double dmin = 1e300;
            for (int i = 0; i <= 32; ++i)
                dmin = std::min(dmin, cov.dist_to_branch(seg.at(i / 32.0)));
            double L = seg.length_bound();
            if (dmin < 1e-14)
                throw std::runtime_error("integrate_on_cover: path touches a branch point");
            n = std::max<int>(n, int(L / (0.5 * dmin)) + 1);
            n = std::min(n, 1 << 15);
            SegIntegrator si{cov, seg, g};
            for (int i = 0; i < n; ++i)
                total += si.chunk(double(i) / n, double(i + 1) / n, y);
        }
        yfin = y;
        if (level > 0 && std::abs(total - prev) <= tol * (1.0 + std::abs(total))) {
            if (y_end) *y_end = yfin;
            return total;
        }
        prev = total;
    }
    throw QuadratureFailure("integrate_on_cover: tolerance not met");
}

Path pair_loop(cplx a, cplx b, double margin, double ecc, bool ccw) {
    cplx mid = 0.5 * (a + b);
    cplx half = 0.5 * (b - a);
    cplx u = half * (1.0 + margin);
    cplx v = cplx(0, 1) * half * ecc;
    Path p;
    double a1 = ccw ? 2 * M_PI : -2 * M_PI;
    p.segs.push_back(Seg::ellipse(mid, u, v, 0.0, a1));
    return p;
}

}  // namespace ellmono
