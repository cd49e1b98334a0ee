#include "sliplab/rank_one.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace sliplab {

RankOneClass classify_rank_one(const MsElement& Fe, const MsElement& Ge, const SlipSystem& sys,
                               double tol) {
    RankOneClass out;
    const Mat2 F = Fe.matrix(sys);
    const Mat2 G = Ge.matrix(sys);
    const Mat2 D = F - G;
    if (D.frobenius() <= tol) return out;  // equal matrices, rank 0

    const double theta = wrap_angle(Fe.R.theta - Ge.R.theta);
    const double gamma = Fe.gamma, zeta = Ge.gamma;

    // Chordal distance |R - Q| = 2*sqrt(2)*|sin(theta/2)| decides case i).
    if (2.0 * std::sqrt(2.0) * std::abs(std::sin(0.5 * theta)) <= tol) {
        if (std::abs(gamma - zeta) <= tol) return out;
        out.kind = RankOneClass::Kind::CaseI;
        out.a = (gamma - zeta) * (Fe.R.matrix() * sys.s);
        out.n = sys.m;
        return out;
    }

    if (std::abs(std::cos(0.5 * theta)) <= 1e-12) {
        out.degenerate = true;  // antipodal rotations, tan(theta/2) diverges
        return out;
    }

    const double delta = gamma - zeta;
    if (std::abs(delta - 2.0 * std::tan(0.5 * theta)) > tol) return out;

    // F - G = delta/(4+delta^2) * Q((zeta-gamma)s + 2m) (x) (2s + (gamma+zeta)m)
    const Vec2 n_raw = 2.0 * sys.s + (gamma + zeta) * sys.m;
    const double n_len = n_raw.norm();
    const Vec2 a_raw = (delta / (4.0 + delta * delta)) *
                       (Ge.R.matrix() * (-delta * sys.s + 2.0 * sys.m));
    out.kind = RankOneClass::Kind::CaseII;
    out.n = n_raw / n_len;
    out.a = a_raw * n_len;
    return out;
}

HorizontalConnection horizontal_connection(double gamma, const SlipSystem& sys) {
    if (sys.is_e1()) {
        throw Error(errc::unconstrained,
                    "for s = e1 every zeta != gamma gives a normal-e2 connection");
    }
    const double zeta = 2.0 * sys.s.x / sys.s.y - gamma;
    const double theta = 2.0 * std::atan(0.5 * (gamma - zeta));
    return HorizontalConnection{zeta, Rotation{theta}};
}

LaminateSpec laminate_decompose_ns(const Mat2& N, const SlipSystem& sys, double tol) {
    if (!membership(N, ConstraintSet::Ns, sys, std::nullopt, tol)) {
        throw Error(errc::not_in_ns, "matrix is not in N_s within tolerance");
    }

    LaminateSpec spec;
    const double ns = (N * sys.s).norm();
    if (ns >= 1.0 - tol) {
        // N in M_s: single-phase laminate.
        spec.F = N;
        spec.G = N;
        spec.mu = 0.5;
        spec.normal = sys.m;
        return spec;
    }

    const double nm_sq = (N * sys.m).norm_sq();
    const double gamma = std::sqrt(nm_sq - 1.0);  // positive root; negative swaps F and G
    const double theta = 2.0 * std::atan(gamma);

    // |Ns|^2 = 1 - 2 gamma t + (1+gamma^2) t^2 with t = 2 gamma mu / (1+gamma^2)
    // gives the quadratic in mu; its roots sum to 1.
    const double disc = nm_sq * ns * ns - 1.0;
    const double root = std::sqrt(std::max(disc, 0.0));
    const std::array<double, 2> mus = {0.5 * (1.0 - root / gamma), 0.5 * (1.0 + root / gamma)};

    const Vec2 Ns_vec = N * sys.s;
    const Vec2 Nm_vec = N * sys.m;

    double best_residual = std::numeric_limits<double>::infinity();
    LaminateSpec best;
    bool found = false;
    for (double mu : mus) {
        if (!(mu > 0.0 && mu < 1.0)) continue;
        const double t = 2.0 * gamma * mu / (1.0 + gamma * gamma);
        // Q maps w = s + t(m - gamma s) onto Ns; both have length |Ns|.
        const Vec2 w = sys.s + t * (sys.m - gamma * sys.s);
        const double q_angle = std::atan2(Ns_vec.y, Ns_vec.x) - std::atan2(w.y, w.x);
        const Rotation Q{wrap_angle(q_angle)};
        const Rotation R{wrap_angle(q_angle + theta)};
        const Mat2 G = slip_deformation(Q, -gamma, sys);
        const Mat2 F = slip_deformation(R, gamma, sys);
        const double residual = (G * sys.m - Nm_vec).norm();

        LaminateSpec cand;
        cand.F = F;
        cand.G = G;
        cand.mu = mu;
        const RankOneClass cls = classify_rank_one(MsElement{R, gamma}, MsElement{Q, -gamma},
                                                   sys, std::max(tol, 1e-7));
        cand.normal = cls.kind == RankOneClass::Kind::NotRankOne ? sys.s : cls.n;

        // Selection rule Gm = Nm; with both branches matching, keep smaller mu
        // (mus is ascending, so the first match wins).
        if (residual <= 10.0 * tol) {
            return cand;
        }
        if (residual < best_residual) {
            best_residual = residual;
            best = cand;
            found = true;
        }
    }
    if (!found) throw Error(errc::not_in_ns, "laminate construction failed to find mu root");
    return best;
}

Mat2 n_from_gamma(const Rotation& R, double gamma, double lambda, const SlipSystem& sys,
                  double tol) {
    if (!k_interval(sys, lambda).contains(gamma, tol)) {
        throw Error(errc::gamma_out_of_range, "gamma is outside K_{s,lambda}");
    }
    return R.matrix() * (Mat2::identity() + (gamma / lambda) * outer({1, 0}, {0, 1}));
}

double gamma_from_n(const Mat2& N, const Rotation& R, double lambda, const SlipSystem& sys,
                    double tol) {
    if (!membership(N, ConstraintSet::Ns, sys, std::nullopt, tol)) {
        throw Error(errc::not_in_ns, "matrix is not in N_s within tolerance");
    }
    const Vec2 ne1 = N * Vec2{1, 0};
    if ((ne1 - R.matrix() * Vec2{1, 0}).norm() > tol) {
        throw Error(errc::incompatible_rotation, "N e1 != R e1 within tolerance");
    }
    return lambda * ne1.dot(N * Vec2{0, 1});
}

}  // namespace sliplab
