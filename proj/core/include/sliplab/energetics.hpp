#pragma once

#include <optional>
#include <vector>

#include "sliplab/microstructure.hpp"

namespace sliplab {

// Outcome of evaluating E_eps (or E_eps^tau) on a piecewise affine field.
// value is finite iff the field is admissible: M_s on soft pieces, SO(2) on
// rigid pieces, each within tol.
struct EnergyReport {
    ExtReal value = ExtReal::finite(0.0);
    double soft_contribution = 0.0;
    double constraint_violation_max = 0.0;
    bool admissible = true;
    double ledger_total = 0.0;
};

EnergyReport energy_eps(const PiecewiseAffineField& field, const SlipSystem& sys,
                        const LayerGeometry& geom, double tau = 0.0,
                        double tol = kMembershipTol);

// Limit energy: sum over profile bands of band_area * w_hom(R(I + gamma_i
// e1 (x) e2)); +inf if any gamma_i lies outside K_{s,lambda}.
ExtReal energy_hom(const Rotation& R, const GammaProfile& profile, const SlipSystem& sys,
                   double lambda, double tau, const RectDomain& domain);

// Jensen lower bound for a region with mean soft gradient M_soft:
// area * ((1/lambda)|M m - (1-lambda) R m|^2 - lambda) with the implied full
// mean M = lambda*M_soft + (1-lambda)*R.
double lower_bound_estimate(const Mat2& mean_soft_gradient, const Rotation& R, double lambda,
                            const SlipSystem& sys, double region_area);

struct SweepRow {
    double epsilon = 0.0;
    std::optional<double> inner_h;
    double energy = 0.0;      // +inf encoded as infinity()
    double hom_energy = 0.0;
    double gap = 0.0;
    double ledger = 0.0;
};

enum class BuilderKind { RecoveryE1, SingleScale, NestedLaminate, Piecewise };

// Maps epsilon to the inner laminate period.
struct HRule {
    enum class Kind { Fixed, EpsOver, EpsSquared };

    Kind kind = Kind::EpsOver;
    double value = 16.0;  // fixed h, or the divisor k in h = eps/k

    double h_for(double eps) const;
};

// One row per epsilon in eps_list (which must be strictly decreasing).
std::vector<SweepRow> convergence_sweep(BuilderKind builder, const std::vector<double>& eps_list,
                                        std::optional<HRule> h_rule, const SlipSystem& sys,
                                        double lambda, double tau, const Rotation& R,
                                        const GammaProfile& profile, const RectDomain& domain);

}  // namespace sliplab
