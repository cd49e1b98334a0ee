#include "sliplab/rigidity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sliplab {

Rotation procrustes_rotation(const Mat2& M, double* residual) {
    const double c = M.a11 + M.a22;
    const double s = M.a21 - M.a12;
    if (c == 0.0 && s == 0.0) {
        throw Error(errc::strip_not_rigid, "rotation fit is degenerate (zero mean)");
    }
    const Rotation R{std::atan2(s, c)};
    if (residual != nullptr) *residual = (M - R.matrix()).frobenius();
    return R;
}

namespace {

struct StripRange {
    int layer;
    double y_lo, y_hi;
};

// Whole rigid strips [k*eps + lambda*eps, (k+1)*eps] inside the domain.
std::vector<StripRange> whole_rigid_strips(const LayerGeometry& geom, const RectDomain& domain) {
    std::vector<StripRange> out;
    const double eps = geom.epsilon;
    const long k_lo = static_cast<long>(std::floor(domain.y_min / eps)) - 1;
    const long k_hi = static_cast<long>(std::ceil(domain.y_max / eps)) + 1;
    const double slack = 1e-12 * eps;
    for (long k = k_lo; k <= k_hi; ++k) {
        const double lo = k * eps + geom.lambda * eps;
        const double hi = (k + 1.0) * eps;
        if (lo >= domain.y_min - slack && hi <= domain.y_max + slack) {
            out.push_back({static_cast<int>(k), lo, hi});
        }
    }
    return out;
}

void finish_trace(LayerRotationTrace& trace) {
    trace.total_variation = 0.0;
    trace.max_neighbor_gap = 0.0;
    for (size_t i = 1; i < trace.rotations.size(); ++i) {
        const double gap = rotation_distance(trace.rotations[i], trace.rotations[i - 1]);
        trace.total_variation += gap;
        trace.max_neighbor_gap = std::max(trace.max_neighbor_gap, gap);
    }
}

}  // namespace

LayerRotationTrace fit_layer_rotations(const PiecewiseAffineField& field,
                                       const LayerGeometry& geom, const RectDomain& domain,
                                       double residual_tol) {
    const auto strips = whole_rigid_strips(geom, domain);
    if (strips.size() < 2) {
        throw Error(errc::invalid_argument, "need at least 2 whole rigid strips in the domain");
    }

    LayerRotationTrace trace;
    for (const StripRange& strip : strips) {
        Mat2 mean;
        double area = 0.0;
        double spread = 0.0;
        Mat2 first;
        bool have_first = false;
        for (const AffinePiece& piece : field.pieces) {
            const Vec2 c = polygon_centroid(piece.polygon);
            if (c.y <= strip.y_lo || c.y >= strip.y_hi) continue;
            const double a = piece.area();
            mean = mean + piece.A * a;
            area += a;
            if (!have_first) {
                first = piece.A;
                have_first = true;
            } else {
                spread = std::max(spread, (piece.A - first).frobenius());
            }
        }
        if (area <= 0.0) {
            throw Error(errc::strip_not_rigid, "rigid strip carries no pieces");
        }
        mean = mean * (1.0 / area);
        double residual = 0.0;
        const Rotation R = procrustes_rotation(mean, &residual);
        residual = std::max(residual, spread);
        if (residual > residual_tol) {
            throw Error(errc::strip_not_rigid, "strip gradients deviate from a single rotation");
        }
        trace.layer_indices.push_back(strip.layer);
        trace.rotations.push_back(R);
        trace.residuals.push_back(residual);
    }
    finish_trace(trace);
    return trace;
}

LayerRotationTrace fit_layer_rotations(const GradientRaster& raster, const LayerGeometry& geom,
                                       const RectDomain& domain, double residual_tol) {
    const auto strips = whole_rigid_strips(geom, domain);
    if (strips.size() < 2) {
        throw Error(errc::invalid_argument, "need at least 2 whole rigid strips in the domain");
    }

    LayerRotationTrace trace;
    for (const StripRange& strip : strips) {
        Mat2 mean;
        long count = 0;
        for (int j = 0; j < raster.ny; ++j) {
            for (int i = 0; i < raster.nx; ++i) {
                const Vec2 c = raster.cell_center(i, j);
                if (c.y <= strip.y_lo || c.y >= strip.y_hi) continue;
                mean = mean + raster.at(i, j);
                ++count;
            }
        }
        if (count == 0) throw Error(errc::strip_not_rigid, "rigid strip has no raster cells");
        mean = mean * (1.0 / static_cast<double>(count));
        double residual = 0.0;
        const Rotation R = procrustes_rotation(mean, &residual);
        if (residual > residual_tol) {
            throw Error(errc::strip_not_rigid, "strip gradients deviate from a single rotation");
        }
        trace.layer_indices.push_back(strip.layer);
        trace.rotations.push_back(R);
        trace.residuals.push_back(residual);
    }
    finish_trace(trace);
    return trace;
}

OneDBound one_d_bound_check(double L, double H, const Rotation& R1, const Rotation& R2,
                            int n_grid) {
    if (!(L > 0.0 && H > 0.0)) throw Error(errc::invalid_argument, "L and H must be positive");
    if (n_grid < 2) throw Error(errc::invalid_argument, "n_grid must be >= 2");

    const Mat2 D = R2.matrix() - R1.matrix();
    OneDBound out;
    out.rhs = L * L * L / (24.0 * H) * (D.frobenius() * D.frobenius());

    // Linear interpolation in x2 leaves (1/H) int_0^L |x1 d + c + b|^2 dx1
    // with d = (R2-R1)e1 and c = H R2 e2; the optimal translation b removes
    // the quadrature mean of the integrand argument.
    const Vec2 d = D * Vec2{1, 0};
    const Vec2 c = H * (R2.matrix() * Vec2{0, 1});

    const double panel = L / n_grid;
    const double g = 0.5 / std::sqrt(3.0);  // Gauss(2) offsets +-g*panel
    std::vector<double> nodes;
    nodes.reserve(2 * static_cast<size_t>(n_grid));
    for (int k = 0; k < n_grid; ++k) {
        const double mid = (k + 0.5) * panel;
        nodes.push_back(mid - g * panel);
        nodes.push_back(mid + g * panel);
    }
    const double w = 0.5 * panel;  // equal Gauss(2) weights

    Vec2 mean_arg;
    for (double x : nodes) mean_arg += w * (x * d + c);
    mean_arg = mean_arg / L;
    const Vec2 b = -mean_arg;

    double integral = 0.0;
    for (double x : nodes) integral += w * (x * d + c + b).norm_sq();
    out.lhs_min = integral / H;
    return out;
}

double sigma_vs_interpolant(const LayerRotationTrace& trace, double epsilon) {
    const size_t n = trace.rotations.size();
    if (n < 2) throw Error(errc::invalid_argument, "trace needs at least 2 strips");

    // Sigma is R_i on [i*eps, (i+1)*eps); Pi interpolates linearly between the
    // midpoints (i+1/2)*eps and is constant near the ends. The difference is
    // piecewise linear, so per-half-interval Simpson integration is exact.
    double gap = 0.0;
    double bound = 0.0;
    for (size_t i = 1; i < n; ++i) {
        const Mat2 dR = trace.rotations[i].matrix() - trace.rotations[i - 1].matrix();
        const double d2 = dR.frobenius() * dR.frobenius();
        bound += epsilon * d2;
        // On [(i-1/2)eps, i*eps): |Pi-Sigma|^2 = d2 * v^2, v in [0, 1/2];
        // on [i*eps, (i+1/2)eps): same with v in [-1/2, 0].
        gap += 2.0 * d2 * epsilon / 24.0;
    }
    if (gap > bound + 1e-12) {
        throw Error(errc::geometry, "interpolant gap exceeds the step-variation bound");
    }
    return gap;
}

}  // namespace sliplab
