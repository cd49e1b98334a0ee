#include "sliplab/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sliplab {

const char* to_string(errc code) {
    switch (code) {
        case errc::zero_vector: return "ZeroVector";
        case errc::not_in_set: return "NotInSet";
        case errc::not_in_ns: return "NotInNs";
        case errc::gamma_out_of_range: return "GammaOutOfRange";
        case errc::unsupported_tau: return "UnsupportedTau";
        case errc::unconstrained: return "Unconstrained";
        case errc::incompatible_rotation: return "IncompatibleRotation";
        case errc::period_too_coarse: return "PeriodTooCoarse";
        case errc::strip_not_rigid: return "StripNotRigid";
        case errc::not_periodic: return "NotPeriodic";
        case errc::geometry: return "GeometryError";
        case errc::invalid_argument: return "InvalidArgument";
    }
    return "UnknownError";
}

double wrap_angle(double theta) {
    const double two_pi = 2.0 * M_PI;
    double w = theta - two_pi * std::floor((theta + M_PI) / two_pi);
    if (w >= M_PI) w -= two_pi;  // guards the rounding case floor(...) == exact
    return w;
}

double rotation_distance(const Rotation& a, const Rotation& b) {
    return 2.0 * std::sqrt(2.0) * std::abs(std::sin(0.5 * (a.theta - b.theta)));
}

SlipSystem make_slip_system(const Vec2& s_raw) {
    const double n = s_raw.norm();
    if (!(n > 0.0) || !std::isfinite(n)) {
        throw Error(errc::zero_vector, "slip direction must be a nonzero finite vector");
    }
    Vec2 s = s_raw / n;
    if (s.y < 0.0 || (s.y == 0.0 && s.x < 0.0)) s = -s;
    if (s.y == 0.0) s = {1.0, 0.0};
    if (s.x == 0.0 && s.y > 0.0) s = {0.0, 1.0};
    return SlipSystem{s, s.perp()};
}

bool KInterval::contains(double gamma, double tol) const {
    switch (kind) {
        case Kind::SingletonZero: return std::abs(gamma) <= tol;
        case Kind::Closed: return gamma >= lo - tol && gamma <= hi + tol;
        case Kind::FullLine: return true;
    }
    return false;
}

double KInterval::length() const {
    switch (kind) {
        case Kind::SingletonZero: return 0.0;
        case Kind::Closed: return hi - lo;
        case Kind::FullLine: return std::numeric_limits<double>::infinity();
    }
    return 0.0;
}

KInterval k_interval(const SlipSystem& sys, double lambda) {
    if (!(lambda > 0.0 && lambda < 1.0)) {
        throw Error(errc::invalid_argument, "lambda must lie in (0,1)");
    }
    KInterval k;
    if (sys.is_e2()) {
        k.kind = KInterval::Kind::SingletonZero;
    } else if (sys.is_e1()) {
        k.kind = KInterval::Kind::FullLine;
    } else {
        const double end = -2.0 * (sys.s.x / sys.s.y) * lambda;
        k.kind = KInterval::Kind::Closed;
        k.lo = std::min(end, 0.0);
        k.hi = std::max(end, 0.0);
    }
    return k;
}

Mat2 MsElement::matrix(const SlipSystem& sys) const { return slip_deformation(R, gamma, sys); }

Mat2 slip_deformation(const Rotation& R, double gamma, const SlipSystem& sys) {
    const Mat2 shear = Mat2::identity() + gamma * outer(sys.s, sys.m);
    return R.matrix() * shear;
}

MsElement decompose_ms(const Mat2& F, const SlipSystem& sys, double tol) {
    if (!membership(F, ConstraintSet::Ms, sys, std::nullopt, tol)) {
        throw Error(errc::not_in_set, "matrix is not in M_s within tolerance");
    }
    const double gamma = (F * sys.s).dot(F * sys.m);
    // (I + gamma s(x)m)^{-1} = I - gamma s(x)m since (s(x)m)^2 = 0.
    const Mat2 Q = F * (Mat2::identity() - gamma * outer(sys.s, sys.m));
    return MsElement{Rotation{std::atan2(Q.a21, Q.a11)}, gamma};
}

namespace {

double so2_residual(const Mat2& F) {
    const Vec2 c1 = F.col(0), c2 = F.col(1);
    double r = std::abs(F.det() - 1.0);
    r = std::max(r, std::abs(c1.norm_sq() - 1.0));
    r = std::max(r, std::abs(c2.norm_sq() - 1.0));
    r = std::max(r, std::abs(c1.dot(c2)));
    return r;
}

}  // namespace

double membership_residual(const Mat2& F, ConstraintSet set_id, const SlipSystem& sys,
                           std::optional<double> lambda, double tol) {
    const double det_res = std::abs(F.det() - 1.0);
    switch (set_id) {
        case ConstraintSet::SO2:
            return so2_residual(F);
        case ConstraintSet::Ms:
            return std::max(det_res, std::abs((F * sys.s).norm() - 1.0));
        case ConstraintSet::Ns:
            return std::max(det_res, std::max(0.0, (F * sys.s).norm() - 1.0));
        case ConstraintSet::Me1capNs: {
            double r = std::max(det_res, std::abs((F * Vec2{1, 0}).norm() - 1.0));
            r = std::max(r, std::max(0.0, (F * sys.s).norm() - 1.0));
            if (lambda) {
                // Shear amount of F in M_{e1}; meaningful once the relations
                // above hold, and then it must lie in K_{s,lambda}.
                const double gamma = (F * Vec2{1, 0}).dot(F * Vec2{0, 1});
                const KInterval k = k_interval(sys, *lambda);
                if (!k.contains(gamma, tol)) {
                    double excess = 0.0;
                    if (k.kind == KInterval::Kind::SingletonZero) {
                        excess = std::abs(gamma);
                    } else if (k.kind == KInterval::Kind::Closed) {
                        excess = std::max(k.lo - gamma, gamma - k.hi);
                    }
                    r = std::max(r, excess);
                }
            }
            return r;
        }
    }
    return det_res;
}

bool membership(const Mat2& F, ConstraintSet set_id, const SlipSystem& sys,
                std::optional<double> lambda, double tol) {
    if (!(tol > 0.0)) throw Error(errc::invalid_argument, "tolerance must be positive");
    return membership_residual(F, set_id, sys, lambda, tol) <= tol;
}

ExtReal w_soft(const Mat2& F, const SlipSystem& sys, double tau, double tol) {
    if (tau < 0.0) throw Error(errc::invalid_argument, "tau must be non-negative");
    if (!membership(F, ConstraintSet::Ms, sys, std::nullopt, tol)) return ExtReal::infinite();
    const double gamma = (F * sys.s).dot(F * sys.m);
    return ExtReal::finite(gamma * gamma + tau * std::abs(gamma));
}

ExtReal w_heterogeneous(const Vec2& y, const Mat2& F, const SlipSystem& sys, double lambda,
                        double tau, double tol) {
    if (!(lambda > 0.0 && lambda < 1.0)) {
        throw Error(errc::invalid_argument, "lambda must lie in (0,1)");
    }
    const double frac = y.y - std::floor(y.y);
    if (frac >= lambda) {
        // Rigid component: 0 on SO(2), +inf otherwise.
        return membership(F, ConstraintSet::SO2, sys, std::nullopt, tol) ? ExtReal::finite(0.0)
                                                                         : ExtReal::infinite();
    }
    return w_soft(F, sys, tau, tol);
}

double w_hom_alt(const Rotation& R, double gamma, const SlipSystem& sys, double lambda) {
    const Mat2 F = slip_deformation(R, gamma, make_slip_system({1, 0}));
    const Vec2 d = F * sys.m - (1.0 - lambda) * (R.matrix() * sys.m);
    return d.norm_sq() / lambda - lambda;
}

ExtReal w_hom(const Mat2& F, const SlipSystem& sys, double lambda, double tau, double tol) {
    if (tau < 0.0) throw Error(errc::invalid_argument, "tau must be non-negative");
    if (tau > 0.0 && !sys.is_e1()) {
        throw Error(errc::unsupported_tau, "tau > 0 is only defined for s = e1");
    }
    const SlipSystem e1 = make_slip_system({1, 0});
    if (!membership(F, ConstraintSet::Ms, e1, std::nullopt, tol)) return ExtReal::infinite();
    const double gamma = (F * Vec2{1, 0}).dot(F * Vec2{0, 1});
    if (!k_interval(sys, lambda).contains(gamma, tol)) return ExtReal::infinite();
    if (sys.is_e1()) {
        return ExtReal::finite(gamma * gamma / lambda + tau * std::abs(gamma));
    }
    const double s1 = sys.s.x, s2 = sys.s.y;
    return ExtReal::finite((s1 * s1 / lambda) * gamma * gamma - 2.0 * s1 * s2 * gamma);
}

}  // namespace sliplab
