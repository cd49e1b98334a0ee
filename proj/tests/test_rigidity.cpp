#include "doctest.h"
#include "test_util.hpp"

#include <cmath>

#include "sliplab/rigidity.hpp"

using namespace sliplab;
using test_util::uniform;

namespace {

const SlipSystem kDiag = make_slip_system({1, 1});
const RectDomain kUnit{0, 1, 0, 1};

// Raster whose rigid strips carry Q(theta_of(k)) and whose soft strips carry
// an arbitrary admissible gradient.
template <typename F>
GradientRaster synthetic_raster(const LayerGeometry& geom, int nx, int ny, F theta_of) {
    GradientRaster r;
    r.nx = nx;
    r.ny = ny;
    r.domain = kUnit;
    r.cells.assign(static_cast<size_t>(nx) * ny, Mat2::identity());
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const Vec2 c = r.cell_center(i, j);
            const int k = static_cast<int>(std::floor(c.y / geom.epsilon));
            if (layer_classify(c, geom) == LayerKind::Rigid) {
                r.at(i, j) = Rotation{theta_of(k)}.matrix();
            } else {
                r.at(i, j) = slip_deformation(Rotation{theta_of(k)}, 0.3, kDiag);
            }
        }
    }
    return r;
}

// int_0^L |x d + c|^2 dx in closed form.
double line_integral(const Vec2& d, const Vec2& c, double L) {
    return d.norm_sq() * L * L * L / 3.0 + d.dot(c) * L * L + c.norm_sq() * L;
}

}  // namespace

TEST_SUITE("rigidity") {

TEST_CASE("procrustes fit") {
    const Rotation R{1.234};
    double res = 1.0;
    const Rotation fit = procrustes_rotation(R.matrix(), &res);
    CHECK(rotation_distance(fit, R) < 1e-12);
    CHECK(res < 1e-12);

    // the fit is scale invariant
    CHECK(rotation_distance(procrustes_rotation(R.matrix() * 1.5), R) < 1e-12);

    CHECK_THROWS_WITH_AS(procrustes_rotation(Mat2{1, 1, 1, -1}),
                         doctest::Contains("StripNotRigid"), Error);
}

TEST_CASE("layer rotations from builder fields") {
    const LayerGeometry geom{0.5, 0.125};
    const auto field = build_single_scale(-0.5, Rotation{0.8}, kDiag, geom, kUnit);
    const LayerRotationTrace trace = fit_layer_rotations(field, geom, kUnit);
    REQUIRE(trace.rotations.size() == 8);
    for (const Rotation& R : trace.rotations) {
        CHECK(rotation_distance(R, Rotation{0.8}) < 1e-12);
    }
    CHECK(trace.total_variation == 0.0);
    CHECK(trace.max_neighbor_gap == 0.0);
}

TEST_CASE("layer rotations from synthetic rasters") {
    const LayerGeometry geom{0.5, 0.2};

    SUBCASE("linear rotation ramp") {
        const auto raster = synthetic_raster(geom, 8, 40, [](int k) { return 0.1 * k; });
        const LayerRotationTrace trace = fit_layer_rotations(raster, geom, kUnit);
        REQUIRE(trace.rotations.size() == 5);
        for (size_t i = 0; i < trace.rotations.size(); ++i) {
            CHECK(rotation_distance(trace.rotations[i], Rotation{0.1 * double(i)}) < 1e-12);
        }
        // |Q(a) - Q(b)| = 2 sqrt(2) |sin((a-b)/2)|
        const double expected = 4.0 * 2.0 * std::sqrt(2.0) * std::abs(std::sin(0.05));
        CHECK(trace.total_variation == doctest::Approx(expected).epsilon(1e-12));
    }

    SUBCASE("small additive noise perturbs the fit weakly") {
        auto raster = synthetic_raster(geom, 8, 40, [](int k) { return 0.15 * k; });
        std::mt19937_64 rng(99);
        for (Mat2& c : raster.cells) {
            c.a11 += uniform(rng, -1e-6, 1e-6);
            c.a12 += uniform(rng, -1e-6, 1e-6);
            c.a21 += uniform(rng, -1e-6, 1e-6);
            c.a22 += uniform(rng, -1e-6, 1e-6);
        }
        const LayerRotationTrace trace = fit_layer_rotations(raster, geom, kUnit);
        for (size_t i = 0; i < trace.rotations.size(); ++i) {
            CHECK(rotation_distance(trace.rotations[i], Rotation{0.15 * double(i)}) < 1e-5);
        }
    }

    SUBCASE("non-rotation strips are flagged") {
        auto raster = synthetic_raster(geom, 8, 40, [](int) { return 0.0; });
        for (int j = 0; j < raster.ny; ++j) {
            for (int i = 0; i < raster.nx; ++i) {
                if (layer_classify(raster.cell_center(i, j), geom) == LayerKind::Rigid) {
                    raster.at(i, j) = Mat2{2, 0, 0, 0.5};
                }
            }
        }
        CHECK_THROWS_WITH_AS(fit_layer_rotations(raster, geom, kUnit),
                             doctest::Contains("StripNotRigid"), Error);
    }
}

TEST_CASE("one-dimensional transition estimate") {
    SUBCASE("equal rotations cost nothing") {
        const OneDBound b = one_d_bound_check(1.0, 1.0, Rotation{0.5}, Rotation{0.5}, 16);
        CHECK(b.rhs == 0.0);
        CHECK(std::abs(b.lhs_min) < 1e-15);
    }

    SUBCASE("antipodal pair on the unit square") {
        const OneDBound b = one_d_bound_check(1.0, 1.0, Rotation{0}, Rotation{M_PI}, 16);
        CHECK(b.rhs == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
        CHECK(b.lhs_min >= b.rhs - 1e-12);
        CHECK(std::abs(b.lhs_min - b.rhs) < 1e-12);
    }

    SUBCASE("quarter turn on a 2x1 box") {
        const OneDBound b = one_d_bound_check(2.0, 1.0, Rotation{0}, Rotation{M_PI / 2}, 16);
        CHECK(b.rhs == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
        CHECK(std::abs(b.lhs_min - b.rhs) < 1e-12);
    }

    SUBCASE("random cases: the reduction attains the bound") {
        std::mt19937_64 rng(31);
        for (int i = 0; i < 20; ++i) {
            const double L = uniform(rng, 0.2, 3.0);
            const double H = uniform(rng, 0.2, 3.0);
            const Rotation R1{uniform(rng, -M_PI, M_PI)};
            const Rotation R2{uniform(rng, -M_PI, M_PI)};
            const OneDBound b = one_d_bound_check(L, H, R1, R2, 8 + i);
            CHECK(b.lhs_min >= b.rhs - 1e-12 * std::max(1.0, b.rhs));
            CHECK(std::abs(b.lhs_min - b.rhs) < 1e-12 * std::max(1.0, b.rhs));
        }
    }

    CHECK_THROWS_AS(one_d_bound_check(0.0, 1.0, Rotation{0}, Rotation{1}, 8), Error);
    CHECK_THROWS_AS(one_d_bound_check(1.0, 1.0, Rotation{0}, Rotation{1}, 1), Error);
}

TEST_CASE("step function vs midpoint interpolant") {
    SUBCASE("constant trace") {
        LayerRotationTrace trace;
        trace.layer_indices = {0, 1, 2};
        trace.rotations = {Rotation{0.4}, Rotation{0.4}, Rotation{0.4}};
        CHECK(sigma_vs_interpolant(trace, 0.125) == 0.0);
    }

    SUBCASE("two strips against a quadrature oracle") {
        const double eps = 0.125;
        LayerRotationTrace trace;
        trace.layer_indices = {0, 1};
        trace.rotations = {Rotation{0.0}, Rotation{0.3}};
        const double gap = sigma_vs_interpolant(trace, eps);

        // oracle: kink-aligned Simpson over [0, 2*eps)
        const Mat2 dR = trace.rotations[1].matrix() - trace.rotations[0].matrix();
        auto sigma = [&](double t) { return t < eps ? 0.0 : 1.0; };
        auto pi = [&](double t) {
            const double s = (t - 0.5 * eps) / eps;
            return std::clamp(s, 0.0, 1.0);
        };
        double oracle = 0.0;
        const double d2 = dR.frobenius() * dR.frobenius();
        for (double a : {0.0, 0.5 * eps, eps, 1.5 * eps}) {
            const double b = a + 0.5 * eps;
            auto f = [&](double t) {
                const double v = pi(t) - sigma(t);
                return d2 * v * v;
            };
            oracle += (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b));
        }
        CHECK(gap == doctest::Approx(oracle).epsilon(1e-13));
        CHECK(gap == doctest::Approx(eps * d2 / 12.0).epsilon(1e-13));
        CHECK(gap <= eps * d2);  // est17
    }

    SUBCASE("ramp trace satisfies the bound with ratio <= 1") {
        const double eps = 0.125;
        LayerRotationTrace trace;
        double bound = 0.0;
        for (int i = 0; i < 6; ++i) {
            trace.layer_indices.push_back(i);
            trace.rotations.push_back(Rotation{0.1 * i});
        }
        for (size_t i = 1; i < trace.rotations.size(); ++i) {
            const Mat2 dR = trace.rotations[i].matrix() - trace.rotations[i - 1].matrix();
            bound += eps * dR.frobenius() * dR.frobenius();
        }
        const double gap = sigma_vs_interpolant(trace, eps);
        CHECK(gap / bound <= 1.0);
        CHECK(gap / bound == doctest::Approx(1.0 / 12.0).epsilon(1e-12));
    }
}

TEST_CASE("variation is controlled by the transverse energy") {
    // Stitched transition fields: rigid strips rotate by theta_i, soft strips
    // interpolate linearly in x2. The transition estimate gives per-strip
    // int |grad u e2|^2 >= L^3/(24 H) |dR|^2, summing to the layer-variation bound
    // with H = lambda * eps and L = 1.
    const double eps = 0.2, lambda = 0.5, L = 1.0;
    const double H = lambda * eps;
    std::mt19937_64 rng(47);
    for (int trial = 0; trial < 5; ++trial) {
        double sum_var = 0.0;
        double sum_energy = 0.0;
        Rotation prev{uniform(rng, -1.0, 1.0)};
        for (int i = 0; i < 4; ++i) {
            const Rotation next{uniform(rng, -1.0, 1.0)};
            const Mat2 D = next.matrix() - prev.matrix();
            const Vec2 d = D * Vec2{1, 0};
            const Vec2 c = H * (next.matrix() * Vec2{0, 1}) +
                           Vec2{uniform(rng, -0.1, 0.1), uniform(rng, -0.1, 0.1)};
            sum_energy += line_integral(d, c, L) / H;
            sum_var += D.frobenius() * D.frobenius();
            prev = next;
        }
        CHECK(sum_var <= 24.0 * eps * lambda / (L * L * L) * sum_energy + 1e-9);
    }
}

}  // TEST_SUITE
