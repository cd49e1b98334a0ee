#pragma once

#include "sliplab/algebra.hpp"

namespace sliplab {

// Classification of F - G for F, G in M_s. Case I: equal rotations, jump
// normal m. Case II: distinct rotations with gamma - zeta = 2 tan(theta/2),
// jump normal proportional to 2s + (gamma + zeta)m. In both cases
// F - G = a (x) n with |n| = 1.
struct RankOneClass {
    enum class Kind { NotRankOne, CaseI, CaseII };

    Kind kind = Kind::NotRankOne;
    Vec2 a;
    Vec2 n;
    // Set when the relative rotation angle is pi, where tan(theta/2) diverges
    // and no rank-one connection exists.
    bool degenerate = false;
};

RankOneClass classify_rank_one(const MsElement& F, const MsElement& G, const SlipSystem& sys,
                               double tol = kMembershipTol);

// Partner slip amount and relative rotation for a rank-one connection with
// normal e2: zeta = 2 s1/s2 - gamma. Throws errc::unconstrained for s = e1,
// where any zeta != gamma works with equal rotations.
struct HorizontalConnection {
    double zeta = 0.0;
    Rotation relative_rotation;
};

HorizontalConnection horizontal_connection(double gamma, const SlipSystem& sys);

// Simple laminate between rank-one connected F and G with weights mu, 1-mu,
// oscillating along `normal` with period `period_h`; `offset` in [0,1) shifts
// the phase pattern.
struct LaminateSpec {
    Mat2 F;
    Mat2 G;
    double mu = 0.5;
    Vec2 normal{0.0, 1.0};
    double period_h = 1.0;
    double offset = 0.0;

    Mat2 average() const { return mu * F + (1.0 - mu) * G; }
    bool degenerate(double tol = kExactTol) const { return (F - G).frobenius() <= tol; }
};

// Decomposes N in N_s as a simple laminate of two M_s matrices with
// |Fm| = |Gm| = |Nm|, selecting the branch with Gm = Nm. For N already in M_s
// (within tol) returns the degenerate spec F = G = N. Throws errc::not_in_ns
// when N is outside N_s.
LaminateSpec laminate_decompose_ns(const Mat2& N, const SlipSystem& sys,
                                   double tol = kMembershipTol);

// N = R(I + (gamma/lambda) e1 (x) e2): the unique element of M_{e1} cap N_s
// with N e1 = R e1 and lambda N + (1-lambda) R = R(I + gamma e1 (x) e2).
// Throws errc::gamma_out_of_range when gamma is outside K_{s,lambda}.
Mat2 n_from_gamma(const Rotation& R, double gamma, double lambda, const SlipSystem& sys,
                  double tol = kMembershipTol);

// Inverse correspondence gamma = lambda * (N e1 . N e2). Requires N in N_s
// (errc::not_in_ns) and N e1 = R e1 (errc::incompatible_rotation).
double gamma_from_n(const Mat2& N, const Rotation& R, double lambda, const SlipSystem& sys,
                    double tol = kMembershipTol);

}  // namespace sliplab
