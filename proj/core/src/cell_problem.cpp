#include "sliplab/cell_problem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sliplab/rank_one.hpp"

namespace sliplab {

namespace {

// Soft-threshold minimizer of zeta^2 + tau|zeta| - nu*zeta.
double shrink(double nu, double tau) {
    const double mag = std::max(std::abs(nu) - tau, 0.0) * 0.5;
    return nu >= 0.0 ? mag : -mag;
}

// Equality-constrained separable program by dual bisection; all coordinates
// share the optimum, so the multiplier solves lambda*shrink(nu) = gamma.
std::vector<double> solve_layer_qp(double gamma, double lambda, double tau, int n) {
    const double target = gamma / lambda;
    double lo = -2.0 * (std::abs(target) + tau + 1.0);
    double hi = -lo;
    for (int it = 0; it < 300 && hi - lo > 1e-17 * (1.0 + std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        (shrink(mid, tau) < target ? lo : hi) = mid;
    }
    const double zeta = shrink(0.5 * (lo + hi), tau);
    return std::vector<double>(static_cast<size_t>(n), zeta);
}

Mat2 cofactor(const Mat2& N) { return {N.a22, -N.a21, -N.a12, N.a11}; }

// Rank-one decomposition family of N: F = N + (1-mu) a (x) n and
// G = N - mu a (x) n with a = alpha (cof(N) n)^perp (keeps both determinants
// at 1) and alpha, n solving |Fs| = |Gs| = 1.
struct FamilyMember {
    Mat2 F, G;
    double alpha = 0.0;
};

std::optional<FamilyMember> family_member(const Mat2& N, const SlipSystem& sys, double mu,
                                          double phi, double alpha) {
    const Vec2 n{std::cos(phi), std::sin(phi)};
    const Vec2 v = (cofactor(N) * n).perp();
    const Mat2 J = outer(alpha * v, n);
    FamilyMember out;
    out.F = N + (1.0 - mu) * J;
    out.G = N - mu * J;
    out.alpha = alpha;
    const double res =
        std::max({std::abs(out.F.det() - 1.0), std::abs(out.G.det() - 1.0),
                  std::abs((out.F * sys.s).norm() - 1.0), std::abs((out.G * sys.s).norm() - 1.0)});
    if (res > 1e-8) return std::nullopt;
    return out;
}

// Residual of |Gs|^2 = 1 with alpha eliminated through |Fs|^2 - |Gs|^2 = 0.
// For mu = 1/2 the eliminated equation degenerates to p.w = 0, which is then
// the function whose roots we chase.
struct ScanEval {
    bool valid = false;
    double r = 0.0;
    double alpha = 0.0;
};

ScanEval eval_phi(const Mat2& N, const SlipSystem& sys, double mu, double phi) {
    ScanEval out;
    const Vec2 n{std::cos(phi), std::sin(phi)};
    const double ns = n.dot(sys.s);
    if (std::abs(ns) < 1e-10) return out;
    const Vec2 v = (cofactor(N) * n).perp();
    const Vec2 w = ns * v;
    const double w2 = w.norm_sq();
    if (w2 < 1e-20) return out;
    const Vec2 p = N * sys.s;

    if (std::abs(1.0 - 2.0 * mu) < 1e-12) {
        out.valid = true;
        out.r = p.dot(w);
        const double amp_sq = 4.0 * (1.0 - p.norm_sq()) / w2;
        out.alpha = amp_sq > 0.0 ? std::sqrt(amp_sq) : 0.0;
        return out;
    }

    const double alpha = -2.0 * p.dot(w) / ((1.0 - 2.0 * mu) * w2);
    const Vec2 gs = p - (mu * alpha) * w;
    out.valid = true;
    out.alpha = alpha;
    out.r = gs.norm_sq() - 1.0;
    return out;
}

std::optional<CellScanPoint> scan_mu(const Mat2& N, const SlipSystem& sys, double lambda,
                                     double mu) {
    constexpr int kSamples = 1440;
    CellScanPoint best;
    best.mu = mu;
    double best_energy = std::numeric_limits<double>::infinity();

    ScanEval prev;
    double prev_phi = 0.0;
    for (int k = 0; k <= kSamples; ++k) {
        const double phi = M_PI * static_cast<double>(k) / kSamples;
        ScanEval cur = eval_phi(N, sys, mu, phi);
        if (cur.valid && prev.valid && ((cur.r < 0.0) != (prev.r < 0.0))) {
            double a = prev_phi, b = phi;
            ScanEval fa = prev;
            for (int it = 0; it < 100 && b - a > 1e-15; ++it) {
                const double m = 0.5 * (a + b);
                ScanEval fm = eval_phi(N, sys, mu, m);
                if (!fm.valid) break;
                if ((fm.r < 0.0) == (fa.r < 0.0)) {
                    a = m;
                    fa = fm;
                } else {
                    b = m;
                }
            }
            const double phi_root = 0.5 * (a + b);
            const ScanEval root = eval_phi(N, sys, mu, phi_root);
            if (root.valid) {
                const auto member = family_member(N, sys, mu, phi_root, root.alpha);
                if (member) {
                    const double density =
                        mu * ((member->F * sys.m).norm_sq() - 1.0) +
                        (1.0 - mu) * ((member->G * sys.m).norm_sq() - 1.0);
                    const double energy = lambda * density;
                    if (energy < best_energy) {
                        best_energy = energy;
                        best.solved = true;
                        best.energy = energy;
                        best.alpha = member->alpha;
                        best.phi = phi_root;
                    }
                }
            }
        }
        prev = cur;
        prev_phi = phi;
    }
    if (!best.solved) return std::nullopt;
    return best;
}

}  // namespace

CellProblemResult w_cell_ansatz(const Mat2& F, const SlipSystem& sys, double lambda, double tau,
                                int n_soft_bands, double tol) {
    if (n_soft_bands < 1) throw Error(errc::invalid_argument, "n_soft_bands must be >= 1");
    CellProblemResult result;
    result.F = F;
    result.hom_value = w_hom(F, sys, lambda, tau, tol);
    if (!result.hom_value.is_finite) {
        // Off M_{e1} cap N_s (or gamma outside K): no admissible perturbation.
        result.ansatz_min = ExtReal::infinite();
        result.gap = 0.0;
        return result;
    }

    const double gamma = (F * Vec2{1, 0}).dot(F * Vec2{0, 1});
    const Rotation R{std::atan2(F.a21, F.a11)};

    if (sys.is_e1()) {
        result.zeta = solve_layer_qp(gamma, lambda, tau, n_soft_bands);
        double value = 0.0;
        for (double z : result.zeta) {
            value += (lambda / n_soft_bands) * (z * z + tau * std::abs(z));
        }
        result.ansatz_min = ExtReal::finite(value);
        result.gap = value - result.hom_value.value;
        return result;
    }

    const Mat2 N = n_from_gamma(R, gamma, lambda, sys, tol);
    const LaminateSpec spec = laminate_decompose_ns(N, sys, tol);
    result.laminate = spec;

    // The mu* branch evaluates the laminate construction directly.
    const double density_star =
        spec.mu * ((spec.F * sys.m).norm_sq() - 1.0) +
        (1.0 - spec.mu) * ((spec.G * sys.m).norm_sq() - 1.0);
    double best = lambda * density_star;

    CellScanPoint star;
    star.mu = spec.mu;
    star.solved = true;
    star.energy = best;
    star.alpha = ((spec.F - spec.G) * spec.normal).norm();
    star.phi = std::atan2(spec.normal.y, spec.normal.x);
    result.scan.push_back(star);

    if (!spec.degenerate(1e-12)) {
        for (int k = 1; k <= 19; ++k) {
            const double mu = 0.05 * k;
            const auto point = scan_mu(N, sys, lambda, mu);
            if (point) {
                result.scan.push_back(*point);
                best = std::min(best, point->energy);
            }
        }
    }

    result.ansatz_min = ExtReal::finite(best);
    result.gap = best - result.hom_value.value;
    return result;
}

PeriodicInclusionVerdict periodic_inclusion_check(const Mat2& F, const GradientRaster& psi_grad,
                                                  const SlipSystem& sys,
                                                  const LayerGeometry& geom_unit, double tol) {
    if (psi_grad.cells.empty()) throw Error(errc::invalid_argument, "empty gradient field");
    if (psi_grad.mean().max_abs() > tol) {
        throw Error(errc::not_periodic, "mean of grad(psi) over Y must vanish");
    }

    PeriodicInclusionVerdict verdict;
    const SlipSystem e1 = make_slip_system({1, 0});

    bool hyp_i = true;
    bool hyp_ii = membership(F, ConstraintSet::Ms, e1, std::nullopt, tol);
    double zeta_sum = 0.0;
    bool common_rotation = true;
    const Rotation RF{std::atan2(F.a21, F.a11)};

    for (int j = 0; j < psi_grad.ny; ++j) {
        for (int i = 0; i < psi_grad.nx; ++i) {
            const Mat2 C = F + psi_grad.at(i, j);
            const LayerKind kind = layer_classify(psi_grad.cell_center(i, j), geom_unit);
            if (hyp_i) {
                const ConstraintSet set =
                    kind == LayerKind::Soft ? ConstraintSet::Ms : ConstraintSet::SO2;
                if (!membership(C, set, sys, std::nullopt, tol)) {
                    hyp_i = false;
                    verdict.violations.push_back("hypothesis i) fails at cell (" +
                                                 std::to_string(i) + "," + std::to_string(j) +
                                                 ")");
                }
            }
            if (hyp_ii) {
                if (!membership(C, ConstraintSet::Ms, e1, std::nullopt, tol)) {
                    hyp_ii = false;
                    verdict.violations.push_back("hypothesis ii) fails at cell (" +
                                                 std::to_string(i) + "," + std::to_string(j) +
                                                 ")");
                } else {
                    zeta_sum += (C * Vec2{1, 0}).dot(C * Vec2{0, 1});
                    const Rotation RC{std::atan2(C.a21, C.a11)};
                    if (rotation_distance(RC, RF) > 10.0 * tol) common_rotation = false;
                }
            }
        }
    }

    verdict.hypothesis_i = hyp_i;
    if (hyp_i) {
        verdict.conclusion_i = true;
        const double det_res = std::abs(F.det() - 1.0);
        const double fe1_res = std::abs((F * Vec2{1, 0}).norm() - 1.0);
        const double fs_excess = std::max(0.0, (F * sys.s).norm() - 1.0);
        if (fe1_res > 10.0 * tol) {
            verdict.conclusion_i = false;
            verdict.violations.push_back("|F e1| != 1 (residual " + std::to_string(fe1_res) + ")");
        }
        if (fs_excess > 10.0 * tol) {
            verdict.conclusion_i = false;
            verdict.violations.push_back("|F s| > 1 (excess " + std::to_string(fs_excess) + ")");
        }
        if (det_res > 10.0 * tol) {
            verdict.conclusion_i = false;
            verdict.violations.push_back("det F != 1 (residual " + std::to_string(det_res) + ")");
        }
    }

    verdict.hypothesis_ii = hyp_ii;
    if (hyp_ii) {
        const double gamma = (F * Vec2{1, 0}).dot(F * Vec2{0, 1});
        verdict.mean_zeta = zeta_sum / static_cast<double>(psi_grad.cells.size());
        verdict.conclusion_ii = common_rotation && std::abs(verdict.mean_zeta - gamma) <= 10.0 * tol;
        if (!common_rotation) verdict.violations.push_back("cell rotations differ from R");
        if (std::abs(verdict.mean_zeta - gamma) > 10.0 * tol) {
            verdict.violations.push_back("mean zeta != gamma");
        }
    }
    return verdict;
}

}  // namespace sliplab
