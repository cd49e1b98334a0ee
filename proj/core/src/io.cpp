#include "sliplab/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace sliplab {

std::string format_g17(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(errc::invalid_argument, "cannot open " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
    }
    std::filesystem::rename(tmp, path);
}

std::string sweep_csv(const std::vector<SweepRow>& rows, unsigned long seed) {
    std::string out = "# seed=" + std::to_string(seed) + "\n";
    out += "epsilon,h,energy,hom_energy,gap,ledger\n";
    for (const SweepRow& r : rows) {
        out += format_g17(r.epsilon) + ",";
        out += (r.inner_h ? format_g17(*r.inner_h) : std::string()) + ",";
        out += format_g17(r.energy) + "," + format_g17(r.hom_energy) + ",";
        out += format_g17(r.gap) + "," + format_g17(r.ledger) + "\n";
    }
    return out;
}

std::string trace_csv(const LayerRotationTrace& trace) {
    std::string out = "layer,theta,gap_to_prev\n";
    for (size_t i = 0; i < trace.rotations.size(); ++i) {
        const double gap =
            i == 0 ? 0.0 : rotation_distance(trace.rotations[i], trace.rotations[i - 1]);
        out += std::to_string(trace.layer_indices[i]) + ",";
        out += format_g17(trace.rotations[i].theta) + "," + format_g17(gap) + "\n";
    }
    return out;
}

std::string cell_csv(const std::vector<CellProblemResult>& rows) {
    std::string out = "F11,F12,F21,F22,hom,ansatz,gap\n";
    for (const CellProblemResult& r : rows) {
        out += format_g17(r.F.a11) + "," + format_g17(r.F.a12) + ",";
        out += format_g17(r.F.a21) + "," + format_g17(r.F.a22) + ",";
        out += (r.hom_value.is_finite ? format_g17(r.hom_value.value) : "inf");
        out += ",";
        out += (r.ansatz_min.is_finite ? format_g17(r.ansatz_min.value) : "inf");
        out += "," + format_g17(r.gap) + "\n";
    }
    return out;
}

std::string raster_csv(const GradientRaster& raster) {
    std::string out = "x,y,A11,A12,A21,A22\n";
    for (int j = 0; j < raster.ny; ++j) {
        for (int i = 0; i < raster.nx; ++i) {
            const Vec2 c = raster.cell_center(i, j);
            const Mat2& A = raster.at(i, j);
            out += format_g17(c.x) + "," + format_g17(c.y) + ",";
            out += format_g17(A.a11) + "," + format_g17(A.a12) + ",";
            out += format_g17(A.a21) + "," + format_g17(A.a22) + "\n";
        }
    }
    return out;
}

namespace {

double component_of(const Mat2& A, int component) {
    switch (component) {
        case 0: return A.a11;
        case 1: return A.a12;
        case 2: return A.a21;
        default: return A.a22;
    }
}

}  // namespace

void write_raster_pgm(const std::filesystem::path& path, const GradientRaster& raster,
                      int component) {
    if (component < 0 || component > 3) {
        throw Error(errc::invalid_argument, "PGM component must be 0..3");
    }
    double lo = component_of(raster.cells.front(), component);
    double hi = lo;
    for (const Mat2& A : raster.cells) {
        const double v = component_of(A, component);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const double span = hi - lo;

    std::string body = "P5\n" + std::to_string(raster.nx) + " " + std::to_string(raster.ny) +
                       "\n255\n";
    body.reserve(body.size() + static_cast<size_t>(raster.nx) * raster.ny);
    for (int j = raster.ny - 1; j >= 0; --j) {  // top image row first
        for (int i = 0; i < raster.nx; ++i) {
            const double v = component_of(raster.at(i, j), component);
            const double t = span > 0.0 ? (v - lo) / span : 0.0;
            body.push_back(static_cast<char>(
                static_cast<unsigned char>(std::lround(255.0 * std::clamp(t, 0.0, 1.0)))));
        }
    }
    write_atomic(path, body);

    const char* names[] = {"A11", "A12", "A21", "A22"};
    std::string meta = "component " + std::string(names[component]) + "\n";
    meta += "min " + format_g17(lo) + "\n";
    meta += "max " + format_g17(hi) + "\n";
    meta += "nx " + std::to_string(raster.nx) + "\nny " + std::to_string(raster.ny) + "\n";
    write_atomic(path.string() + ".meta.txt", meta);
}

}  // namespace sliplab
