#pragma once

#include <vector>

#include "sliplab/microstructure.hpp"

namespace sliplab {

// Per-rigid-strip rotation fit plus the bounded-variation statistics of the
// step function built from those rotations.
struct LayerRotationTrace {
    std::vector<int> layer_indices;
    std::vector<Rotation> rotations;
    std::vector<double> residuals;  // Procrustes residual per strip
    double total_variation = 0.0;   // sum of Frobenius gaps between neighbors
    double max_neighbor_gap = 0.0;
};

// Closest SO(2) matrix to M in Frobenius norm, theta = atan2(m21 - m12,
// m11 + m22). Throws errc::strip_not_rigid in the tie case where both
// arguments vanish. If residual != nullptr, |M - Q| is written there.
Rotation procrustes_rotation(const Mat2& M, double* residual = nullptr);

// Reads the unique rigid-piece gradient per whole rigid strip of a builder
// field. Requires >= 2 whole rigid strips inside the domain.
LayerRotationTrace fit_layer_rotations(const PiecewiseAffineField& field,
                                       const LayerGeometry& geom, const RectDomain& domain,
                                       double residual_tol = 1e-6);

// Procrustes fit of the strip-mean gradient of a (possibly noisy) raster.
LayerRotationTrace fit_layer_rotations(const GradientRaster& raster, const LayerGeometry& geom,
                                       const RectDomain& domain, double residual_tol = 1e-6);

// Quantitative transition estimate on P = (0,L)x(0,H) with affine boundary
// rows R1 (bottom) and R2 (top): rhs = L^3/(24H) |R1 - R2|^2 and lhs_min the
// minimum of int |grad u e2|^2 over linear-in-x2 interpolants, minimized over
// the relative translation analytically; the x1 integral uses two-point Gauss
// quadrature on n_grid panels (exact for the quadratic integrand).
struct OneDBound {
    double lhs_min = 0.0;
    double rhs = 0.0;
};

OneDBound one_d_bound_check(double L, double H, const Rotation& R1, const Rotation& R2,
                            int n_grid);

// L^2 gap between the rotation step function Sigma_eps and its midpoint linear
// interpolant Pi_eps over (0, n*eps). Verifies the bound
// gap <= sum_i eps |R_i - R_{i-1}|^2 and throws errc::geometry if it fails.
double sigma_vs_interpolant(const LayerRotationTrace& trace, double epsilon);

}  // namespace sliplab
