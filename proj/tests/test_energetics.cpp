#include "doctest.h"
#include "test_util.hpp"

#include <cmath>

#include "sliplab/energetics.hpp"

using namespace sliplab;
using test_util::mat_dist;

namespace {

const SlipSystem kE1 = make_slip_system({1, 0});
const SlipSystem kDiag = make_slip_system({1, 1});
const RectDomain kUnit{0, 1, 0, 1};

}  // namespace

TEST_SUITE("energetics") {

TEST_CASE("energy of simple fields") {
    const LayerGeometry geom{0.5, 0.125};

    SUBCASE("pure rotation costs nothing") {
        const auto field =
            build_recovery_e1(GammaProfile::constant(0.0, 0, 1), Rotation{0.7}, geom, kUnit);
        const EnergyReport rep = energy_eps(field, kE1, geom);
        CHECK(rep.admissible);
        CHECK(rep.value.value == 0.0);
        CHECK(rep.constraint_violation_max < 1e-14);
    }

    SUBCASE("recovery field integrates (gamma/lambda)^2 over the soft strips") {
        const auto field =
            build_recovery_e1(GammaProfile::constant(0.3, 0, 1), Rotation{0}, geom, kUnit);
        const EnergyReport rep = energy_eps(field, kE1, geom);
        REQUIRE(rep.admissible);
        CHECK(rep.value.value == doctest::Approx(0.18).epsilon(1e-13));
    }

    SUBCASE("single-scale interior gradients are not admissible") {
        const auto field = build_single_scale(-0.5, Rotation{0}, kDiag, geom, kUnit);
        const EnergyReport rep = energy_eps(field, kDiag, geom);
        CHECK_FALSE(rep.admissible);
        CHECK_FALSE(rep.value.is_finite);
        CHECK(rep.constraint_violation_max > 1e-3);
    }

    SUBCASE("tau outside s = e1 is rejected") {
        const auto field = build_single_scale(0.0, Rotation{0}, kDiag, geom, kUnit);
        CHECK_THROWS_WITH_AS(energy_eps(field, kDiag, geom, 0.4),
                             doctest::Contains("UnsupportedTau"), Error);
    }
}

TEST_CASE("homogenized energy per band") {
    CHECK(energy_hom(Rotation{0.2}, GammaProfile::constant(0.0, 0, 1), kDiag, 0.5, 0.0, kUnit)
              .value == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(energy_hom(Rotation{0}, GammaProfile::constant(0.3, 0, 1), kE1, 0.5, 0.0, kUnit)
              .value == doctest::Approx(0.18).epsilon(1e-14));
    CHECK(energy_hom(Rotation{0}, GammaProfile::constant(-0.5, 0, 1), kDiag, 0.5, 0.0, kUnit)
              .value == doctest::Approx(0.75).epsilon(1e-14));
    CHECK_FALSE(energy_hom(Rotation{0}, GammaProfile::constant(0.5, 0, 1), kDiag, 0.5, 0.0,
                           kUnit)
                    .is_finite);
}

TEST_CASE("recovery construction matches the limit exactly on whole bilayers") {
    for (double tau : {0.0, 0.4}) {
        for (double gamma : {0.3, -0.7, 1.2}) {
            for (double eps : {0.125, 0.0625, 0.03125}) {
                const LayerGeometry geom{0.5, eps};
                const Rotation R{0.25};
                const auto field =
                    build_recovery_e1(GammaProfile::constant(gamma, 0, 1), R, geom, kUnit);
                const double e = energy_eps(field, kE1, geom, tau).value.value;
                const double h =
                    energy_hom(R, GammaProfile::constant(gamma, 0, 1), kE1, 0.5, tau, kUnit)
                        .value;
                CHECK(std::abs(e - h) <= 1e-12);
            }
        }
    }
}

TEST_CASE("laminate pointwise integrand equals the homogenized one") {
    const LayerGeometry geom{0.5, 0.125};
    const auto field =
        build_nested_laminate(-0.5, Rotation{0}, kDiag, geom, geom.epsilon / 16, kUnit);
    const Mat2 N = Mat2::identity() - outer({1, 0}, {0, 1});
    const double target = (N * kDiag.m).norm_sq() - 1.0;
    for (const auto& p : field.pieces) {
        if (layer_classify(polygon_centroid(p.polygon), geom) != LayerKind::Soft) continue;
        CHECK(std::abs(((p.A * kDiag.m).norm_sq() - 1.0) - target) < 1e-10);
    }

    // soft-phase energy = lambda (|Nm|^2 - 1) |domain| on whole bilayers
    const EnergyReport rep = energy_eps(field, kDiag, geom);
    REQUIRE(rep.admissible);
    CHECK(std::abs(rep.value.value - 0.5 * target) < 1e-10);
}

TEST_CASE("Jensen lower bound") {
    CHECK(lower_bound_estimate(Rotation{0.4}.matrix(), Rotation{0.4}, 0.5, kDiag, 1.0) ==
          doctest::Approx(0.0).epsilon(1e-14));
    const Mat2 soft = Mat2::identity() + 0.6 * outer({1, 0}, {0, 1});
    CHECK(lower_bound_estimate(soft, Rotation{0}, 0.5, kE1, 1.0) ==
          doctest::Approx(0.18).epsilon(1e-13));

    // dominance for builder outputs, per band
    const LayerGeometry geom{0.5, 0.125};
    const auto rec = build_recovery_e1(GammaProfile::constant(0.3, 0, 1), Rotation{0.1}, geom,
                                       kUnit);
    const Mat2 mean_soft = test_util::mean_gradient(rec, geom, LayerKind::Soft);
    const double lb = lower_bound_estimate(mean_soft, Rotation{0.1}, 0.5, kE1, kUnit.area());
    CHECK(energy_eps(rec, kE1, geom).value.value >= lb - 1e-9);

    const auto lam =
        build_nested_laminate(-0.5, Rotation{0}, kDiag, geom, geom.epsilon / 16, kUnit);
    const Mat2 lam_soft = test_util::mean_gradient(lam, geom, LayerKind::Soft);
    const double lam_lb = lower_bound_estimate(lam_soft, Rotation{0}, 0.5, kDiag, kUnit.area());
    CHECK(energy_eps(lam, kDiag, geom).value.value >= lam_lb - 1e-9);
}

TEST_CASE("sweep on whole bilayers has zero gap") {
    const std::vector<double> eps{0.125, 0.0625, 0.03125};
    const auto rows = convergence_sweep(BuilderKind::RecoveryE1, eps, std::nullopt, kE1, 0.5,
                                        0.0, Rotation{0}, GammaProfile::constant(0.3, 0, 1),
                                        kUnit);
    REQUIRE(rows.size() == 3);
    for (const auto& r : rows) CHECK(std::abs(r.gap) <= 1e-12);
}

TEST_CASE("sweep on a truncated domain decays at first order") {
    // height with leftover fraction 1/3 on the epsilon grid: the partial
    // bilayer excess then halves exactly with epsilon
    const RectDomain trunc{0, 1, 0, 43.0 / 48.0};
    const std::vector<double> eps{0.125, 0.0625, 0.03125, 0.015625};
    GammaProfile profile = GammaProfile::constant(0.3, 0, trunc.y_max);

    const auto rows = convergence_sweep(BuilderKind::RecoveryE1, eps, HRule{}, kE1, 0.5, 0.0,
                                        Rotation{0}, profile, trunc);
    for (const auto& r : rows) {
        CHECK(std::abs(r.gap) <= 2.0 * r.epsilon * 0.36);  // 2 eps (gamma/lambda)^2
    }
    // |gap(eps/2)| <= 0.75 |gap(eps)| once eps <= 1/16
    for (size_t i = 1; i + 1 < rows.size(); ++i) {
        CHECK(std::abs(rows[i + 1].gap) <= 0.75 * std::abs(rows[i].gap) + 1e-12);
    }
    CHECK(std::abs(rows.back().gap) < std::abs(rows.front().gap));

    // nested laminates with h = eps^2 on the same domain
    GammaProfile lam_profile = GammaProfile::constant(-0.5, 0, trunc.y_max);
    const std::vector<double> lam_eps{0.125, 0.0625, 0.03125};
    const auto lam_rows =
        convergence_sweep(BuilderKind::NestedLaminate, lam_eps,
                          HRule{HRule::Kind::EpsSquared, 0.0}, kDiag, 0.5, 0.0, Rotation{0},
                          lam_profile, trunc);
    for (const auto& r : lam_rows) {
        CHECK(r.inner_h.has_value());
        CHECK(std::abs(r.gap) <= 2.0 * r.epsilon * 1.5);
    }
    CHECK(std::abs(lam_rows[2].gap) <= 0.75 * std::abs(lam_rows[1].gap) + 1e-12);
}

TEST_CASE("pieces crossing the soft/rigid interface are a geometry error") {
    const LayerGeometry geom{0.5, 0.125};
    PiecewiseAffineField field;
    field.domain = kUnit;
    // one piece spanning a whole bilayer, crossing the internal boundary
    field.pieces.push_back(
        AffinePiece{{{0, 0}, {1, 0}, {1, 0.125}, {0, 0.125}}, Mat2::identity(), Vec2{}});
    CHECK_THROWS_WITH_AS(energy_eps(field, kE1, geom), doctest::Contains("Geometry"), Error);
}

TEST_CASE("rasterized laminate gradients stay in the three-value set") {
    const LayerGeometry geom{0.5, 0.25};
    const auto field =
        build_nested_laminate(-0.5, Rotation{0}, kDiag, geom, geom.epsilon / 8, kUnit);
    const GradientRaster raster = rasterize_gradient(field, 64, 64);
    const Mat2 N = Mat2::identity() - outer({1, 0}, {0, 1});
    const LaminateSpec spec = laminate_decompose_ns(N, kDiag);
    for (const Mat2& A : raster.cells) {
        const double d = std::min({test_util::mat_dist(A, spec.F), test_util::mat_dist(A, spec.G),
                                   test_util::mat_dist(A, Mat2::identity())});
        CHECK(d < 1e-12);
    }
}

TEST_CASE("sweep input validation") {
    CHECK_THROWS_AS(convergence_sweep(BuilderKind::RecoveryE1, {}, std::nullopt, kE1, 0.5, 0.0,
                                      Rotation{0}, GammaProfile::constant(0.3, 0, 1), kUnit),
                    Error);
    CHECK_THROWS_AS(convergence_sweep(BuilderKind::RecoveryE1, {0.1, 0.2}, std::nullopt, kE1,
                                      0.5, 0.0, Rotation{0},
                                      GammaProfile::constant(0.3, 0, 1), kUnit),
                    Error);
    CHECK_THROWS_AS(convergence_sweep(BuilderKind::NestedLaminate, {0.125}, std::nullopt, kDiag,
                                      0.5, 0.0, Rotation{0},
                                      GammaProfile::constant(-0.5, 0, 1), kUnit),
                    Error);
}

}  // TEST_SUITE
