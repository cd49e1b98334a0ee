#include "sliplab/microstructure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sliplab {

LayerKind layer_classify(const Vec2& x, const LayerGeometry& geom) {
    const double t = x.y / geom.epsilon;
    const double frac = t - std::floor(t);
    return frac < geom.lambda ? LayerKind::Soft : LayerKind::Rigid;
}

double polygon_area(const Polygon& poly) {
    if (poly.size() < 3) return 0.0;
    double twice = 0.0;
    for (size_t i = 0; i < poly.size(); ++i) {
        const Vec2& p = poly[i];
        const Vec2& q = poly[(i + 1) % poly.size()];
        twice += p.x * q.y - q.x * p.y;
    }
    return 0.5 * twice;
}

Vec2 polygon_centroid(const Polygon& poly) {
    if (poly.size() < 3) return {0.0, 0.0};
    double twice = 0.0;
    Vec2 c{0.0, 0.0};
    for (size_t i = 0; i < poly.size(); ++i) {
        const Vec2& p = poly[i];
        const Vec2& q = poly[(i + 1) % poly.size()];
        const double cross = p.x * q.y - q.x * p.y;
        twice += cross;
        c += (p + q) * cross;
    }
    if (twice == 0.0) return poly[0];
    return c / (3.0 * twice);
}

Polygon clip_halfplane(const Polygon& poly, const Vec2& n, double c) {
    Polygon out;
    if (poly.empty()) return out;
    out.reserve(poly.size() + 1);
    for (size_t i = 0; i < poly.size(); ++i) {
        const Vec2& p = poly[i];
        const Vec2& q = poly[(i + 1) % poly.size()];
        const double dp = p.dot(n) - c;
        const double dq = q.dot(n) - c;
        if (dp <= 0.0) out.push_back(p);
        if ((dp < 0.0 && dq > 0.0) || (dp > 0.0 && dq < 0.0)) {
            out.push_back(p + (q - p) * (dp / (dp - dq)));
        }
    }
    return out;
}

bool polygon_contains(const Polygon& poly, const Vec2& p, double tol) {
    if (poly.size() < 3) return false;
    for (size_t i = 0; i < poly.size(); ++i) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[(i + 1) % poly.size()];
        const double cross = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
        if (cross < -tol) return false;
    }
    return true;
}

double PiecewiseAffineField::ledger_total() const {
    if (ledger.empty()) return 0.0;
    double sq = 0.0, len = 0.0;
    for (const auto& e : ledger) {
        sq += e.jump_sq_integral;
        len += e.length();
    }
    return len > 0.0 ? std::sqrt(sq / len) : 0.0;
}

int PiecewiseAffineField::piece_index_at(const Vec2& x) const {
    for (double tol : {0.0, 1e-12, 1e-9, 1e-6}) {
        for (size_t i = 0; i < pieces.size(); ++i) {
            if (polygon_contains(pieces[i].polygon, x, tol)) return static_cast<int>(i);
        }
    }
    return -1;
}

Vec2 PiecewiseAffineField::value_at(const Vec2& x) const {
    const int i = piece_index_at(x);
    if (i < 0) throw Error(errc::geometry, "point outside every piece");
    return pieces[static_cast<size_t>(i)].value(x);
}

Mat2 PiecewiseAffineField::gradient_at(const Vec2& x) const {
    const int i = piece_index_at(x);
    if (i < 0) throw Error(errc::geometry, "point outside every piece");
    return pieces[static_cast<size_t>(i)].A;
}

GammaProfile GammaProfile::constant(double gamma, double t_lo, double t_hi) {
    GammaProfile p;
    p.breakpoints = {t_lo, t_hi};
    p.values = {gamma};
    return p;
}

double GammaProfile::value_at(double t) const {
    if (values.empty()) throw Error(errc::invalid_argument, "empty gamma profile");
    auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), t);
    long i = (it - breakpoints.begin()) - 1;
    i = std::clamp(i, 0L, static_cast<long>(values.size()) - 1);
    return values[static_cast<size_t>(i)];
}

void GammaProfile::validate(const RectDomain& domain) const {
    if (breakpoints.size() != values.size() + 1 || values.empty()) {
        throw Error(errc::invalid_argument, "profile needs n+1 breakpoints for n values");
    }
    for (size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        if (!(breakpoints[i] < breakpoints[i + 1])) {
            throw Error(errc::invalid_argument, "profile breakpoints must increase strictly");
        }
    }
    const double slack = 1e-12 * std::max(1.0, std::abs(domain.y_max));
    if (breakpoints.front() > domain.y_min + slack || breakpoints.back() < domain.y_max - slack) {
        throw Error(errc::invalid_argument, "profile must span the domain height");
    }
}

namespace {

Polygon make_rect(double x0, double x1, double y0, double y1) {
    return {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
}

// Periodic laminate profile: rises with slope 1-mu on [0, mu), falls with
// slope -mu on [mu, 1); chi(integer) = 0.
double chi(double t, double mu) {
    const double f = t - std::floor(t);
    return f <= mu ? (1.0 - mu) * f : mu * (1.0 - f);
}

struct LaminateLocal {
    Mat2 N;
    Vec2 n;
    Vec2 a;
    double h = 0.0;
    double mu = 0.5;
    Vec2 p0;
    std::vector<double> taus;                  // slab boundaries in t
    std::vector<std::pair<Mat2, Vec2>> maps;   // per-slab (A, b)
};

struct StripPlan {
    double y_lo = 0.0, y_hi = 0.0;
    bool is_laminate = false;
    Mat2 A0 = Mat2::identity();
    Vec2 b0;
    LaminateLocal lam;
    std::vector<AffinePiece> pieces;

    void add_constant(const Vec2& c) {
        b0 += c;
        for (auto& m : lam.maps) m.second += c;
        for (auto& p : pieces) p.b += c;
    }

    std::pair<Mat2, Vec2> map_at(const Vec2& x) const {
        if (!is_laminate) return {A0, b0};
        const double t = (x - lam.p0).dot(lam.n) / lam.h;
        auto it = std::upper_bound(lam.taus.begin(), lam.taus.end(), t);
        long k = (it - lam.taus.begin()) - 1;
        k = std::clamp(k, 0L, static_cast<long>(lam.maps.size()) - 1);
        return lam.maps[static_cast<size_t>(k)];
    }

    // x-positions where a laminate phase boundary crosses the horizontal line
    // at height y.
    std::vector<double> edge_breaks(double y, const RectDomain& domain) const {
        std::vector<double> out;
        if (!is_laminate || std::abs(lam.n.x) < 1e-14) return out;
        for (double tau : lam.taus) {
            const double x = lam.p0.x + (tau * lam.h - (y - lam.p0.y) * lam.n.y) / lam.n.x;
            if (x > domain.x_min && x < domain.x_max) out.push_back(x);
        }
        std::sort(out.begin(), out.end());
        return out;
    }
};

StripPlan make_single_strip(double y_lo, double y_hi, const Mat2& A, const RectDomain& domain) {
    StripPlan s;
    s.y_lo = y_lo;
    s.y_hi = y_hi;
    s.A0 = A;
    s.pieces.push_back(AffinePiece{make_rect(domain.x_min, domain.x_max, y_lo, y_hi), A, Vec2{}});
    return s;
}

StripPlan make_laminate_strip(double y_lo, double y_hi, const Mat2& N, const LaminateSpec& spec,
                              double h_used, const RectDomain& domain) {
    StripPlan s;
    s.y_lo = y_lo;
    s.y_hi = y_hi;
    s.is_laminate = true;

    LaminateLocal& lam = s.lam;
    lam.N = N;
    lam.mu = spec.mu;
    lam.h = h_used;
    Vec2 n = spec.normal;
    if (n.x < 0.0 || (n.x == 0.0 && n.y < 0.0)) n = -n;
    lam.n = n;
    lam.a = (spec.F - spec.G) * n;
    lam.p0 = {domain.x_min, y_lo};

    // t-range over the strip rectangle, padded by one full period.
    double t_lo = std::numeric_limits<double>::infinity();
    double t_hi = -t_lo;
    for (const Vec2& corner : make_rect(domain.x_min, domain.x_max, y_lo, y_hi)) {
        const double t = (corner - lam.p0).dot(n) / lam.h;
        t_lo = std::min(t_lo, t);
        t_hi = std::max(t_hi, t);
    }
    const long j0 = static_cast<long>(std::floor(t_lo)) - 1;
    const long j1 = static_cast<long>(std::ceil(t_hi)) + 1;

    for (long j = j0; j <= j1; ++j) {
        lam.taus.push_back(static_cast<double>(j));
        lam.taus.push_back(static_cast<double>(j) + lam.mu);
    }

    const Polygon strip_rect = make_rect(domain.x_min, domain.x_max, y_lo, y_hi);
    for (size_t k = 0; k + 1 < lam.taus.size(); ++k) {
        const double ta = lam.taus[k], tb = lam.taus[k + 1];
        const double t_mid = 0.5 * (ta + tb);
        const double f = t_mid - std::floor(t_mid);
        const Mat2 A = f < lam.mu ? spec.F : spec.G;
        const Vec2 x_ref = lam.p0 + (ta * lam.h) * n;
        const Vec2 w_ref = N * x_ref + (lam.h * chi(ta, lam.mu)) * lam.a;
        const Vec2 b = w_ref - A * x_ref;
        lam.maps.emplace_back(A, b);

        Polygon poly = clip_halfplane(strip_rect, n, lam.p0.dot(n) + tb * lam.h);
        poly = clip_halfplane(poly, -n, -(lam.p0.dot(n) + ta * lam.h));
        if (polygon_area(poly) > 1e-18) {
            s.pieces.push_back(AffinePiece{std::move(poly), A, b});
        }
    }
    return s;
}

struct EdgeIntegrals {
    Vec2 jump_integral;    // int [u] ds (component-wise)
    double jump_sq = 0.0;  // int |[u]|^2 ds
};

EdgeIntegrals integrate_edge(const StripPlan& below, const StripPlan& above, double y,
                             const RectDomain& domain) {
    std::vector<double> cuts{domain.x_min, domain.x_max};
    for (double x : below.edge_breaks(y, domain)) cuts.push_back(x);
    for (double x : above.edge_breaks(y, domain)) cuts.push_back(x);
    std::sort(cuts.begin(), cuts.end());

    EdgeIntegrals out;
    for (size_t k = 0; k + 1 < cuts.size(); ++k) {
        const double xa = cuts[k], xb = cuts[k + 1];
        if (!(xb > xa)) continue;
        const double xm = 0.5 * (xa + xb);
        const auto [Au, bu] = above.map_at({xm, y});
        const auto [Ad, bd] = below.map_at({xm, y});
        auto jump = [&](double x) { return (Au * Vec2{x, y} + bu) - (Ad * Vec2{x, y} + bd); };
        const Vec2 ja = jump(xa), jm = jump(xm), jb = jump(xb);
        const double w = (xb - xa) / 6.0;
        out.jump_integral += w * (ja + 4.0 * jm + jb);
        out.jump_sq += w * (ja.norm_sq() + 4.0 * jm.norm_sq() + jb.norm_sq());
    }
    return out;
}

// Stitches strips bottom-up (each strip's additive constant zeroes the mean
// jump on its lower interface), records residual oscillatory jumps in the
// ledger, concatenates the pieces, and subtracts the exact field mean.
PiecewiseAffineField assemble_field(std::vector<StripPlan>&& strips, const RectDomain& domain) {
    PiecewiseAffineField field;
    field.domain = domain;

    for (size_t i = 1; i < strips.size(); ++i) {
        const double y = strips[i].y_lo;
        EdgeIntegrals pre = integrate_edge(strips[i - 1], strips[i], y, domain);
        strips[i].add_constant(pre.jump_integral * (-1.0 / domain.width()));
        EdgeIntegrals post = integrate_edge(strips[i - 1], strips[i], y, domain);
        if (std::sqrt(post.jump_sq / domain.width()) > 1e-12) {
            field.ledger.push_back(IncompatibilityEdge{
                {domain.x_min, y}, {domain.x_max, y}, post.jump_sq});
        }
    }

    double total_area = 0.0;
    Vec2 moment{0.0, 0.0};
    for (auto& s : strips) {
        for (auto& p : s.pieces) {
            const double a = p.area();
            total_area += a;
            moment += a * p.value(polygon_centroid(p.polygon));
        }
    }
    const Vec2 mean = moment / total_area;
    for (auto& s : strips) {
        for (auto& p : s.pieces) {
            p.b -= mean;
            field.pieces.push_back(std::move(p));
        }
    }
    field.mean_value = mean;
    return field;
}

// y-interval [lo, hi) split at every bilayer boundary, soft/rigid boundary,
// and extra cut inside; returned intervals carry their layer classification.
struct YInterval {
    double y_lo, y_hi;
    LayerKind kind;
};

std::vector<YInterval> slice_domain(const LayerGeometry& geom, const RectDomain& domain,
                                    const std::vector<double>& extra_cuts) {
    std::vector<double> cuts{domain.y_min, domain.y_max};
    const double eps = geom.epsilon;
    const long k_lo = static_cast<long>(std::floor(domain.y_min / eps)) - 1;
    const long k_hi = static_cast<long>(std::ceil(domain.y_max / eps)) + 1;
    for (long k = k_lo; k <= k_hi; ++k) {
        for (double y : {k * eps, k * eps + geom.lambda * eps}) {
            if (y > domain.y_min && y < domain.y_max) cuts.push_back(y);
        }
    }
    for (double y : extra_cuts) {
        if (y > domain.y_min && y < domain.y_max) cuts.push_back(y);
    }
    std::sort(cuts.begin(), cuts.end());
    const double merge_tol = 1e-13 * std::max(1.0, std::abs(domain.y_max) + std::abs(domain.y_min));
    cuts.erase(std::unique(cuts.begin(), cuts.end(),
                           [&](double a, double b) { return std::abs(a - b) <= merge_tol; }),
               cuts.end());

    std::vector<YInterval> out;
    for (size_t i = 0; i + 1 < cuts.size(); ++i) {
        if (!(cuts[i + 1] > cuts[i])) continue;
        const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
        out.push_back({cuts[i], cuts[i + 1], layer_classify({0.0, mid}, geom)});
    }
    return out;
}

void check_geometry(const LayerGeometry& geom, const RectDomain& domain) {
    if (!(geom.lambda > 0.0 && geom.lambda < 1.0)) {
        throw Error(errc::invalid_argument, "lambda must lie in (0,1)");
    }
    if (!(geom.epsilon > 0.0)) throw Error(errc::invalid_argument, "epsilon must be positive");
    if (!(domain.width() > 0.0 && domain.height() > 0.0)) {
        throw Error(errc::geometry, "domain must have positive area");
    }
}

double refine_period(double h, double epsilon, const Vec2& n) {
    if (std::abs(n.x) < 1e-14) return h;
    const double span = epsilon * std::abs(n.x);
    const double k = std::ceil(span / h - 1e-9);
    return span / std::max(k, 1.0);
}

}  // namespace

PiecewiseAffineField build_recovery_e1(const GammaProfile& profile, const Rotation& R,
                                       const LayerGeometry& geom, const RectDomain& domain) {
    check_geometry(geom, domain);
    profile.validate(domain);

    std::vector<StripPlan> strips;
    for (const YInterval& iv : slice_domain(geom, domain, profile.breakpoints)) {
        const double g = iv.kind == LayerKind::Soft
                             ? profile.value_at(0.5 * (iv.y_lo + iv.y_hi)) / geom.lambda
                             : 0.0;
        const Mat2 A = R.matrix() * (Mat2::identity() + g * outer({1, 0}, {0, 1}));
        strips.push_back(make_single_strip(iv.y_lo, iv.y_hi, A, domain));
    }
    return assemble_field(std::move(strips), domain);
}

PiecewiseAffineField build_single_scale(double gamma, const Rotation& R, const SlipSystem& sys,
                                        const LayerGeometry& geom, const RectDomain& domain) {
    check_geometry(geom, domain);
    const Mat2 N = n_from_gamma(R, gamma, geom.lambda, sys);  // validates gamma in K
    std::vector<StripPlan> strips;
    for (const YInterval& iv : slice_domain(geom, domain, {})) {
        strips.push_back(make_single_strip(iv.y_lo, iv.y_hi,
                                           iv.kind == LayerKind::Soft ? N : R.matrix(), domain));
    }
    return assemble_field(std::move(strips), domain);
}

PiecewiseAffineField build_nested_laminate(double gamma, const Rotation& R,
                                           const SlipSystem& sys, const LayerGeometry& geom,
                                           double inner_period_h, const RectDomain& domain) {
    check_geometry(geom, domain);
    if (sys.is_e1()) {
        throw Error(errc::invalid_argument,
                    "nested laminates are for s != e1; use build_recovery_e1");
    }
    if (!(inner_period_h > 0.0)) {
        throw Error(errc::invalid_argument, "inner period must be positive");
    }
    if (inner_period_h > geom.lambda * geom.epsilon / 4.0) {
        throw Error(errc::period_too_coarse, "need h <= lambda*epsilon/4");
    }

    const Mat2 N = n_from_gamma(R, gamma, geom.lambda, sys);
    const LaminateSpec spec = laminate_decompose_ns(N, sys);
    const bool degenerate = spec.degenerate(1e-12);
    const double h_used = degenerate ? inner_period_h : refine_period(inner_period_h,
                                                                      geom.epsilon, spec.normal);

    std::vector<StripPlan> strips;
    for (const YInterval& iv : slice_domain(geom, domain, {})) {
        if (iv.kind == LayerKind::Rigid) {
            strips.push_back(make_single_strip(iv.y_lo, iv.y_hi, R.matrix(), domain));
        } else if (degenerate) {
            strips.push_back(make_single_strip(iv.y_lo, iv.y_hi, N, domain));
        } else {
            strips.push_back(make_laminate_strip(iv.y_lo, iv.y_hi, N, spec, h_used, domain));
        }
    }
    return assemble_field(std::move(strips), domain);
}

PiecewiseAffineField build_piecewise(const GammaProfile& profile, const Rotation& R,
                                     const SlipSystem& sys, const LayerGeometry& geom,
                                     std::optional<double> inner_period_h,
                                     const RectDomain& domain) {
    check_geometry(geom, domain);
    profile.validate(domain);
    if (inner_period_h) {
        if (!(*inner_period_h > 0.0)) {
            throw Error(errc::invalid_argument, "inner period must be positive");
        }
        if (*inner_period_h > geom.lambda * geom.epsilon / 4.0) {
            throw Error(errc::period_too_coarse, "need h <= lambda*epsilon/4");
        }
    }

    const double eps = geom.epsilon;
    const KInterval K = k_interval(sys, geom.lambda);
    struct Band {
        double lo, hi;  // snapped to the epsilon grid
        Mat2 N;
        LaminateSpec spec;
        bool degenerate;
        double h_used;
    };
    std::vector<Band> bands;
    for (size_t i = 0; i < profile.values.size(); ++i) {
        const double g = profile.values[i];
        if (!K.contains(g)) {
            throw Error(errc::gamma_out_of_range, "profile value outside K_{s,lambda}");
        }
        Band band;
        band.lo = std::ceil(profile.breakpoints[i] / eps - 1e-12) * eps;
        band.hi = std::floor(profile.breakpoints[i + 1] / eps + 1e-12) * eps;
        band.N = n_from_gamma(R, g, geom.lambda, sys);
        if (inner_period_h && !sys.is_e1()) {
            band.spec = laminate_decompose_ns(band.N, sys);
            band.degenerate = band.spec.degenerate(1e-12);
            band.h_used = band.degenerate
                              ? *inner_period_h
                              : refine_period(*inner_period_h, eps, band.spec.normal);
        } else {
            band.degenerate = true;
            band.h_used = 0.0;
        }
        bands.push_back(band);
    }

    std::vector<StripPlan> strips;
    for (const YInterval& iv : slice_domain(geom, domain, profile.breakpoints)) {
        if (iv.kind == LayerKind::Rigid) {
            strips.push_back(make_single_strip(iv.y_lo, iv.y_hi, R.matrix(), domain));
            continue;
        }
        // The bilayer containing this soft interval must lie fully inside a
        // snapped band for the band to act; otherwise the strip is slack.
        const double k_f = std::floor(iv.y_lo / eps + 1e-12);
        const double bl_lo = k_f * eps, bl_hi = (k_f + 1.0) * eps;
        const Band* active = nullptr;
        for (const Band& b : bands) {
            if (bl_lo >= b.lo - 1e-12 * eps && bl_hi <= b.hi + 1e-12 * eps) {
                active = &b;
                break;
            }
        }
        if (active == nullptr) {
            strips.push_back(make_single_strip(iv.y_lo, iv.y_hi, R.matrix(), domain));
        } else if (active->degenerate) {
            strips.push_back(make_single_strip(iv.y_lo, iv.y_hi, active->N, domain));
        } else {
            strips.push_back(make_laminate_strip(iv.y_lo, iv.y_hi, active->N, active->spec,
                                                 active->h_used, domain));
        }
    }
    return assemble_field(std::move(strips), domain);
}

Vec2 GradientRaster::cell_center(int i, int j) const {
    const double dx = (domain.x_max - domain.x_min) / nx;
    const double dy = (domain.y_max - domain.y_min) / ny;
    return {domain.x_min + (i + 0.5) * dx, domain.y_min + (j + 0.5) * dy};
}

Mat2 GradientRaster::mean() const {
    Mat2 m;
    for (const Mat2& c : cells) m = m + c;
    return m * (1.0 / static_cast<double>(cells.size()));
}

GradientRaster rasterize_gradient(const PiecewiseAffineField& field, int nx, int ny) {
    if (nx < 1 || ny < 1) throw Error(errc::invalid_argument, "resolution must be >= (1,1)");
    GradientRaster raster;
    raster.nx = nx;
    raster.ny = ny;
    raster.domain = field.domain;
    raster.cells.assign(static_cast<size_t>(nx) * ny, Mat2{});

    std::vector<char> assigned(raster.cells.size(), 0);
    const double dx = field.domain.width() / nx;
    const double dy = field.domain.height() / ny;

    // First pass in piece-index order so boundary ties go to the lowest index.
    for (const AffinePiece& piece : field.pieces) {
        double bx0 = std::numeric_limits<double>::infinity(), bx1 = -bx0;
        double by0 = bx0, by1 = -bx0;
        for (const Vec2& v : piece.polygon) {
            bx0 = std::min(bx0, v.x);
            bx1 = std::max(bx1, v.x);
            by0 = std::min(by0, v.y);
            by1 = std::max(by1, v.y);
        }
        const int i0 = std::max(0, static_cast<int>((bx0 - field.domain.x_min) / dx - 1.0));
        const int i1 = std::min(nx - 1, static_cast<int>((bx1 - field.domain.x_min) / dx + 1.0));
        const int j0 = std::max(0, static_cast<int>((by0 - field.domain.y_min) / dy - 1.0));
        const int j1 = std::min(ny - 1, static_cast<int>((by1 - field.domain.y_min) / dy + 1.0));
        for (int j = j0; j <= j1; ++j) {
            for (int i = i0; i <= i1; ++i) {
                const size_t idx = static_cast<size_t>(j) * nx + i;
                if (assigned[idx]) continue;
                if (polygon_contains(piece.polygon, raster.cell_center(i, j))) {
                    raster.cells[idx] = piece.A;
                    assigned[idx] = 1;
                }
            }
        }
    }
    // Fallback for centers that sit exactly on numeric piece gaps.
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const size_t idx = static_cast<size_t>(j) * nx + i;
            if (assigned[idx]) continue;
            const int p = field.piece_index_at(raster.cell_center(i, j));
            if (p < 0) throw Error(errc::geometry, "raster cell center outside field");
            raster.cells[idx] = field.pieces[static_cast<size_t>(p)].A;
        }
    }
    return raster;
}

}  // namespace sliplab
