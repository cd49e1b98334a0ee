#pragma once

#include <optional>
#include <vector>

#include "sliplab/algebra.hpp"
#include "sliplab/rank_one.hpp"

namespace sliplab {

// Bilayer geometry: soft volume fraction lambda in (0,1) and period epsilon.
// A point is in the soft component iff frac(x2/epsilon) < lambda.
struct LayerGeometry {
    double lambda = 0.5;
    double epsilon = 0.125;
};

enum class LayerKind { Soft, Rigid };

LayerKind layer_classify(const Vec2& x, const LayerGeometry& geom);

struct RectDomain {
    double x_min = 0.0, x_max = 1.0;
    double y_min = 0.0, y_max = 1.0;

    double width() const { return x_max - x_min; }
    double height() const { return y_max - y_min; }
    double area() const { return width() * height(); }
};

// Convex polygon, counterclockwise vertex list.
using Polygon = std::vector<Vec2>;

double polygon_area(const Polygon& poly);
Vec2 polygon_centroid(const Polygon& poly);
// Keeps the part of `poly` with x.n <= c (Sutherland-Hodgman against one
// half-plane). The input must be convex and counterclockwise.
Polygon clip_halfplane(const Polygon& poly, const Vec2& n, double c);
bool polygon_contains(const Polygon& poly, const Vec2& p, double tol = 0.0);

// One affine piece x -> A x + b supported on a convex polygon.
struct AffinePiece {
    Polygon polygon;
    Mat2 A;
    Vec2 b;

    double area() const { return polygon_area(polygon); }
    Vec2 value(const Vec2& x) const { return A * x + b; }
};

// Horizontal interface carrying a deformation-value jump; the jump has zero
// mean along the edge by construction, so jump_sq_integral records the pure
// oscillatory mismatch int_edge |[u]|^2 ds.
struct IncompatibilityEdge {
    Vec2 p0;
    Vec2 p1;
    double jump_sq_integral = 0.0;

    double length() const { return (p1 - p0).norm(); }
};

// Finitely piecewise affine deformation on a rectangle. Pieces tile the
// domain; across every shared edge the field is continuous and satisfies the
// Hadamard jump condition, except for edges listed in the incompatibility
// ledger. mean_value records the mean subtracted for the L^2_0 normalization.
struct PiecewiseAffineField {
    std::vector<AffinePiece> pieces;
    RectDomain domain;
    Vec2 mean_value;
    std::vector<IncompatibilityEdge> ledger;

    // RMS of the value jumps over all ledger edges (0 when the ledger is
    // empty): sqrt(sum int |[u]|^2 ds / sum length).
    double ledger_total() const;

    // Index of the piece containing x; boundary ties go to the lowest index.
    // Returns -1 if x lies outside every piece even after tolerance growth.
    int piece_index_at(const Vec2& x) const;
    Vec2 value_at(const Vec2& x) const;
    Mat2 gradient_at(const Vec2& x) const;
};

// Piecewise constant shear profile gamma(x2): values[i] on
// (breakpoints[i], breakpoints[i+1]). Constant in x1 by construction.
struct GammaProfile {
    std::vector<double> breakpoints;
    std::vector<double> values;

    static GammaProfile constant(double gamma, double t_lo, double t_hi);
    double value_at(double t) const;
    void validate(const RectDomain& domain) const;
};

// Recovery construction for horizontal slip: u(x) = R x + (int_0^{x2}
// gamma_eps) R e1 - mean, with gamma_eps = gamma(x2)/lambda on the soft strips
// and 0 on the rigid ones. Globally continuous; the ledger is empty.
PiecewiseAffineField build_recovery_e1(const GammaProfile& profile, const Rotation& R,
                                       const LayerGeometry& geom, const RectDomain& domain);

// Auxiliary single-scale field: gradient R on rigid strips and
// N = n_from_gamma(R, gamma, lambda, s) on soft strips. Continuous because
// N e1 = R e1, but the soft gradient lies in N_s, not necessarily M_s.
PiecewiseAffineField build_single_scale(double gamma, const Rotation& R, const SlipSystem& sys,
                                        const LayerGeometry& geom, const RectDomain& domain);

// Admissible construction for inclined slip: each soft strip carries the
// simple laminate of laminate_decompose_ns(N) with period ~h along the
// rank-one normal, refined and phase-aligned so the pattern is periodic over
// the scaled unit cell. All gradients lie in M_s or SO(2); the horizontal
// interfaces carry O(h) value mismatches recorded in the ledger.
PiecewiseAffineField build_nested_laminate(double gamma, const Rotation& R,
                                           const SlipSystem& sys, const LayerGeometry& geom,
                                           double inner_period_h, const RectDomain& domain);

// Localized version for piecewise constant gamma: band i acts on the bilayers
// fully inside (t_{i-1}, t_i) after snapping the band boundaries to the
// epsilon-grid; slack bilayers get the pure rotation R. Soft strips use the
// nested laminate when inner_period_h is given, the single-scale N otherwise.
PiecewiseAffineField build_piecewise(const GammaProfile& profile, const Rotation& R,
                                     const SlipSystem& sys, const LayerGeometry& geom,
                                     std::optional<double> inner_period_h,
                                     const RectDomain& domain);

// Cell-centered gradient samples on an nx-by-ny grid.
struct GradientRaster {
    int nx = 0;
    int ny = 0;
    RectDomain domain;
    std::vector<Mat2> cells;  // row-major, index j*nx + i

    const Mat2& at(int i, int j) const { return cells[static_cast<size_t>(j) * nx + i]; }
    Mat2& at(int i, int j) { return cells[static_cast<size_t>(j) * nx + i]; }
    Vec2 cell_center(int i, int j) const;
    Mat2 mean() const;
};

GradientRaster rasterize_gradient(const PiecewiseAffineField& field, int nx, int ny);

}  // namespace sliplab
