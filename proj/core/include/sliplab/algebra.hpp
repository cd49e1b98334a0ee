#pragma once

#include <cmath>
#include <optional>

#include "sliplab/error.hpp"

namespace sliplab {

// Default tolerance for set-membership tests (det/|Fs| residuals).
inline constexpr double kMembershipTol = 1e-9;
// Tolerance for closed-form identities that should hold to rounding error.
inline constexpr double kExactTol = 1e-12;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator-() const { return {-x, -y}; }
    Vec2 operator*(double t) const { return {x * t, y * t}; }
    Vec2 operator/(double t) const { return {x / t, y / t}; }
    Vec2& operator+=(const Vec2& o) {
        x += o.x;
        y += o.y;
        return *this;
    }
    Vec2& operator-=(const Vec2& o) {
        x -= o.x;
        y -= o.y;
        return *this;
    }

    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double norm() const { return std::hypot(x, y); }
    double norm_sq() const { return x * x + y * y; }
    // Counterclockwise quarter turn, (x, y) -> (-y, x).
    Vec2 perp() const { return {-y, x}; }
};

inline Vec2 operator*(double t, const Vec2& v) { return v * t; }

// Plain 2x2 real matrix, row-major fields as in the deformation-gradient
// conventions: columns are F e1 = (a11, a21) and F e2 = (a12, a22).
struct Mat2 {
    double a11 = 0.0, a12 = 0.0;
    double a21 = 0.0, a22 = 0.0;

    Mat2() = default;
    Mat2(double m11, double m12, double m21, double m22)
        : a11(m11), a12(m12), a21(m21), a22(m22) {}

    static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }

    Vec2 operator*(const Vec2& v) const { return {a11 * v.x + a12 * v.y, a21 * v.x + a22 * v.y}; }
    Mat2 operator*(const Mat2& o) const {
        return {a11 * o.a11 + a12 * o.a21, a11 * o.a12 + a12 * o.a22,
                a21 * o.a11 + a22 * o.a21, a21 * o.a12 + a22 * o.a22};
    }
    Mat2 operator+(const Mat2& o) const {
        return {a11 + o.a11, a12 + o.a12, a21 + o.a21, a22 + o.a22};
    }
    Mat2 operator-(const Mat2& o) const {
        return {a11 - o.a11, a12 - o.a12, a21 - o.a21, a22 - o.a22};
    }
    Mat2 operator*(double t) const { return {a11 * t, a12 * t, a21 * t, a22 * t}; }

    double det() const { return a11 * a22 - a12 * a21; }
    double frobenius() const { return std::sqrt(a11 * a11 + a12 * a12 + a21 * a21 + a22 * a22); }
    double max_abs() const {
        return std::max(std::max(std::abs(a11), std::abs(a12)),
                        std::max(std::abs(a21), std::abs(a22)));
    }
    Mat2 transpose() const { return {a11, a21, a12, a22}; }
    Vec2 col(int j) const { return j == 0 ? Vec2{a11, a21} : Vec2{a12, a22}; }
};

inline Mat2 operator*(double t, const Mat2& m) { return m * t; }

// a b^T
inline Mat2 outer(const Vec2& a, const Vec2& b) {
    return {a.x * b.x, a.x * b.y, a.y * b.x, a.y * b.y};
}

// Element of SO(2) stored by angle; the matrix is derived on demand.
struct Rotation {
    double theta = 0.0;

    Rotation() = default;
    explicit Rotation(double t) : theta(t) {}

    Mat2 matrix() const {
        const double c = std::cos(theta), s = std::sin(theta);
        return {c, -s, s, c};
    }
};

// Reduce an angle to [-pi, pi).
double wrap_angle(double theta);

// Frobenius distance |Q(a) - Q(b)| = 2*sqrt(2)*|sin((a-b)/2)|.
double rotation_distance(const Rotation& a, const Rotation& b);

// Slip system (s, m): unit slip direction s and slip-plane normal m = s^perp.
// Normalized so that s2 >= 0, with s = e1 exactly when s2 = 0; the model is
// invariant under s -> -s, so this removes the sign ambiguity.
struct SlipSystem {
    Vec2 s;
    Vec2 m;

    bool is_e1() const { return s.y == 0.0; }
    bool is_e2() const { return s.x == 0.0; }
};

SlipSystem make_slip_system(const Vec2& s_raw);

// Admissible macroscopic shear set K_{s,lambda}: {0} for s = e2, all of R for
// s = e1, and a closed interval with one endpoint 0 for inclined s.
struct KInterval {
    enum class Kind { SingletonZero, Closed, FullLine };

    Kind kind = Kind::SingletonZero;
    double lo = 0.0;
    double hi = 0.0;

    bool contains(double gamma, double tol = kMembershipTol) const;
    double length() const;
};

KInterval k_interval(const SlipSystem& sys, double lambda);

// Factorized element of M_s: F = Q(theta) (I + gamma s (x) m).
struct MsElement {
    Rotation R;
    double gamma = 0.0;

    MsElement() = default;
    MsElement(Rotation r, double g) : R(r), gamma(g) {}

    Mat2 matrix(const SlipSystem& sys) const;
};

// Extended real value; +infinity never enters arithmetic.
struct ExtReal {
    bool is_finite = true;
    double value = 0.0;

    static ExtReal finite(double v) { return {true, v}; }
    static ExtReal infinite() { return {false, 0.0}; }
};

enum class ConstraintSet { SO2, Ms, Ns, Me1capNs };

// F = R (I + gamma s (x) m); satisfies det F = 1 and |Fs| = 1 identically.
Mat2 slip_deformation(const Rotation& R, double gamma, const SlipSystem& sys);

// Inverts slip_deformation using gamma = Fs . Fm. Throws errc::not_in_set if
// |det F - 1| > tol or ||Fs| - 1| > tol.
MsElement decompose_ms(const Mat2& F, const SlipSystem& sys, double tol = kMembershipTol);

// Pointwise membership in SO(2), M_s = {det F = 1, |Fs| = 1},
// N_s = {det F = 1, |Fs| <= 1}, or M_{e1} cap N_s. When `lambda` is supplied,
// the last set additionally requires the shear amount gamma = Fe1 . Fe2 to lie
// in K_{s,lambda} (endpoint tolerance tol).
bool membership(const Mat2& F, ConstraintSet set_id, const SlipSystem& sys,
                std::optional<double> lambda = std::nullopt, double tol = kMembershipTol);

// Largest defining-relation residual for the given set (0 when inside).
double membership_residual(const Mat2& F, ConstraintSet set_id, const SlipSystem& sys,
                           std::optional<double> lambda = std::nullopt,
                           double tol = kMembershipTol);

// Single-slip condensed density gamma^2 + tau*|gamma| on M_s, +inf outside.
ExtReal w_soft(const Mat2& F, const SlipSystem& sys, double tau = 0.0,
               double tol = kMembershipTol);

// Heterogeneous density of the bilayer: W_rig on the rigid component
// (frac(y2) >= lambda), w_soft on the soft one, Y = [0,1)^2 periodic.
ExtReal w_heterogeneous(const Vec2& y, const Mat2& F, const SlipSystem& sys, double lambda,
                        double tau = 0.0, double tol = kMembershipTol);

// Effective density: finite iff F = R(I + gamma e1 (x) e2) with gamma in
// K_{s,lambda}. Value gamma^2/lambda + tau*|gamma| for s = e1, and
// (s1^2/lambda) gamma^2 - 2 s1 s2 gamma otherwise. tau > 0 is only defined for
// s = e1 (errc::unsupported_tau otherwise).
ExtReal w_hom(const Mat2& F, const SlipSystem& sys, double lambda, double tau = 0.0,
              double tol = kMembershipTol);

// Alternative closed form (1/lambda)|Fm - (1-lambda) R m|^2 - lambda of the
// effective density, used to cross-check w_hom where finite.
double w_hom_alt(const Rotation& R, double gamma, const SlipSystem& sys, double lambda);

}  // namespace sliplab
