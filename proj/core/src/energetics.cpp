#include "sliplab/energetics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sliplab {

namespace {

// A piece must sit inside a single layer component; the builders cut all
// pieces at the soft/rigid boundaries.
LayerKind classify_piece(const AffinePiece& piece, const LayerGeometry& geom) {
    double y_lo = std::numeric_limits<double>::infinity(), y_hi = -y_lo;
    for (const Vec2& v : piece.polygon) {
        y_lo = std::min(y_lo, v.y);
        y_hi = std::max(y_hi, v.y);
    }
    const double eps = geom.epsilon;
    const double slack = 1e-9 * eps;
    const double k = std::floor(y_lo / eps + 1e-12);
    const double soft_top = k * eps + geom.lambda * eps;
    const double rigid_top = (k + 1.0) * eps;
    const double mid = 0.5 * (y_lo + y_hi);
    const LayerKind kind = layer_classify({0.0, mid}, geom);
    const double region_top = kind == LayerKind::Soft ? soft_top : rigid_top;
    const double region_bot = kind == LayerKind::Soft ? k * eps : soft_top;
    if (y_lo < region_bot - slack || y_hi > region_top + slack) {
        throw Error(errc::geometry, "piece crosses a soft/rigid interface");
    }
    return kind;
}

}  // namespace

EnergyReport energy_eps(const PiecewiseAffineField& field, const SlipSystem& sys,
                        const LayerGeometry& geom, double tau, double tol) {
    if (tau < 0.0) throw Error(errc::invalid_argument, "tau must be non-negative");
    if (tau > 0.0 && !sys.is_e1()) {
        throw Error(errc::unsupported_tau, "tau > 0 is only defined for s = e1");
    }

    EnergyReport report;
    report.ledger_total = field.ledger_total();

    double quadratic = 0.0;
    double dissipative = 0.0;
    for (const AffinePiece& piece : field.pieces) {
        const LayerKind kind = classify_piece(piece, geom);
        const ConstraintSet set =
            kind == LayerKind::Soft ? ConstraintSet::Ms : ConstraintSet::SO2;
        const double violation = membership_residual(piece.A, set, sys);
        report.constraint_violation_max = std::max(report.constraint_violation_max, violation);
        if (kind == LayerKind::Soft) {
            const double area = piece.area();
            quadratic += area * ((piece.A * sys.m).norm_sq() - 1.0);
            if (tau > 0.0) {
                dissipative += area * std::abs((piece.A * sys.s).dot(piece.A * sys.m));
            }
        }
    }
    report.admissible = report.constraint_violation_max <= tol;
    report.soft_contribution = quadratic;
    report.value = report.admissible ? ExtReal::finite(quadratic + tau * dissipative)
                                     : ExtReal::infinite();
    return report;
}

ExtReal energy_hom(const Rotation& R, const GammaProfile& profile, const SlipSystem& sys,
                   double lambda, double tau, const RectDomain& domain) {
    profile.validate(domain);
    double total = 0.0;
    for (size_t i = 0; i < profile.values.size(); ++i) {
        const double lo = std::max(profile.breakpoints[i], domain.y_min);
        const double hi = std::min(profile.breakpoints[i + 1], domain.y_max);
        if (!(hi > lo)) continue;
        const Mat2 F = slip_deformation(R, profile.values[i], make_slip_system({1, 0}));
        const ExtReal w = w_hom(F, sys, lambda, tau);
        if (!w.is_finite) return ExtReal::infinite();
        total += (hi - lo) * domain.width() * w.value;
    }
    return ExtReal::finite(total);
}

double lower_bound_estimate(const Mat2& mean_soft_gradient, const Rotation& R, double lambda,
                            const SlipSystem& sys, double region_area) {
    if (!(lambda > 0.0 && lambda < 1.0)) {
        throw Error(errc::invalid_argument, "lambda must lie in (0,1)");
    }
    const Mat2 M = lambda * mean_soft_gradient + (1.0 - lambda) * R.matrix();
    const Vec2 d = M * sys.m - (1.0 - lambda) * (R.matrix() * sys.m);
    return region_area * (d.norm_sq() / lambda - lambda);
}

double HRule::h_for(double eps) const {
    switch (kind) {
        case Kind::Fixed: return value;
        case Kind::EpsOver: return eps / value;
        case Kind::EpsSquared: return eps * eps;
    }
    return value;
}

std::vector<SweepRow> convergence_sweep(BuilderKind builder, const std::vector<double>& eps_list,
                                        std::optional<HRule> h_rule, const SlipSystem& sys,
                                        double lambda, double tau, const Rotation& R,
                                        const GammaProfile& profile, const RectDomain& domain) {
    if (eps_list.empty()) throw Error(errc::invalid_argument, "epsilon list must be non-empty");
    for (size_t i = 0; i + 1 < eps_list.size(); ++i) {
        if (!(eps_list[i + 1] < eps_list[i])) {
            throw Error(errc::invalid_argument, "epsilon list must decrease strictly");
        }
    }
    if ((builder == BuilderKind::NestedLaminate) && !h_rule) {
        throw Error(errc::invalid_argument, "nested laminates need an h rule");
    }

    const ExtReal hom = energy_hom(R, profile, sys, lambda, tau, domain);
    std::vector<SweepRow> rows;
    rows.reserve(eps_list.size());
    for (double eps : eps_list) {
        const LayerGeometry geom{lambda, eps};
        SweepRow row;
        row.epsilon = eps;

        PiecewiseAffineField field;
        switch (builder) {
            case BuilderKind::RecoveryE1:
                field = build_recovery_e1(profile, R, geom, domain);
                break;
            case BuilderKind::SingleScale: {
                if (profile.values.size() != 1) {
                    throw Error(errc::invalid_argument,
                                "single-scale sweep needs a constant profile");
                }
                field = build_single_scale(profile.values[0], R, sys, geom, domain);
                break;
            }
            case BuilderKind::NestedLaminate: {
                if (profile.values.size() != 1) {
                    throw Error(errc::invalid_argument,
                                "nested-laminate sweep needs a constant profile");
                }
                row.inner_h = h_rule->h_for(eps);
                field = build_nested_laminate(profile.values[0], R, sys, geom, *row.inner_h,
                                              domain);
                break;
            }
            case BuilderKind::Piecewise: {
                if (h_rule) row.inner_h = h_rule->h_for(eps);
                field = build_piecewise(profile, R, sys, geom, row.inner_h, domain);
                break;
            }
        }

        const EnergyReport report = energy_eps(field, sys, geom, tau);
        row.energy = report.value.is_finite ? report.value.value
                                            : std::numeric_limits<double>::infinity();
        row.hom_energy = hom.is_finite ? hom.value : std::numeric_limits<double>::infinity();
        row.gap = row.energy - row.hom_energy;
        row.ledger = report.ledger_total;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace sliplab
