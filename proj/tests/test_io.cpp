#include "doctest.h"
#include "test_util.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "sliplab/io.hpp"

using namespace sliplab;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("g17 formatting round-trips doubles losslessly") {
    std::mt19937_64 rng(2718);
    for (int i = 0; i < 1000; ++i) {
        const double mag = std::ldexp(1.0, static_cast<int>(rng() % 120) - 60);
        const double v = (test_util::u01(rng) * 2.0 - 1.0) * mag;
        const std::string s = format_g17(v);
        CHECK(std::strtod(s.c_str(), nullptr) == v);
    }
    CHECK(format_g17(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(format_g17(-std::numeric_limits<double>::infinity()) == "-inf");
}

TEST_CASE("pgm export carries the documented header and sidecar") {
    const LayerGeometry geom{0.5, 0.25};
    const RectDomain unit{0, 1, 0, 1};
    const auto field =
        build_recovery_e1(GammaProfile::constant(0.3, 0, 1), Rotation{0}, geom, unit);
    const GradientRaster raster = rasterize_gradient(field, 16, 16);

    const fs::path dir = fs::temp_directory_path() / "sliplab_io_test";
    fs::remove_all(dir);
    const fs::path pgm = dir / "grad.pgm";
    write_raster_pgm(pgm, raster, 1);  // A12

    const std::string bytes = slurp(pgm);
    const std::string header = "P5\n16 16\n255\n";
    REQUIRE(bytes.rfind(header, 0) == 0);
    CHECK(bytes.size() == header.size() + 16 * 16);

    // A12 is 0 on rigid rows and 0.6 on soft rows: exactly two gray levels
    const std::string meta = slurp(dir / "grad.pgm.meta.txt");
    CHECK(meta.find("component A12") != std::string::npos);
    CHECK(meta.find("min 0") != std::string::npos);
    CHECK(meta.find("max 0.59999999999999998") != std::string::npos);
    for (size_t i = header.size(); i < bytes.size(); ++i) {
        const unsigned char g = static_cast<unsigned char>(bytes[i]);
        CHECK((g == 0 || g == 255));
    }
}

TEST_CASE("raster csv lists cell centers with gradient entries") {
    const LayerGeometry geom{0.5, 0.5};
    const RectDomain unit{0, 1, 0, 1};
    const auto field =
        build_recovery_e1(GammaProfile::constant(0.1, 0, 1), Rotation{0}, geom, unit);
    const GradientRaster raster = rasterize_gradient(field, 2, 2);
    const std::string csv = raster_csv(raster);
    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);
    CHECK(line == "x,y,A11,A12,A21,A22");
    std::getline(lines, line);
    CHECK(line == "0.25,0.25,1,0.20000000000000001,0,1");  // soft row, gamma/lambda = 0.2
    int count = 1;
    while (std::getline(lines, line)) ++count;
    CHECK(count == 4);
}

TEST_CASE("atomic writes leave no temp file behind") {
    const fs::path dir = fs::temp_directory_path() / "sliplab_io_test";
    const fs::path p = dir / "x.csv";
    write_atomic(p, "a,b\n1,2\n");
    CHECK(slurp(p) == "a,b\n1,2\n");
    CHECK_FALSE(fs::exists(p.string() + ".tmp"));
    write_atomic(p, "a,b\n3,4\n");  // overwrite is atomic too
    CHECK(slurp(p) == "a,b\n3,4\n");
}

}  // TEST_SUITE
