#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sliplab/algebra.hpp"
#include "sliplab/energetics.hpp"
#include "sliplab/microstructure.hpp"

namespace sliplab::cli {

struct OutputOptions {
    std::string dir = "out";
    int raster_nx = 64;
    int raster_ny = 64;
    std::string pgm_component = "A12";
    bool write_pgm = true;
    bool write_csv = true;
};

struct RigidityOptions {
    double L = 1.0;
    double H = 1.0;
    int n_grid = 64;
    int cases = 20;
};

// Full experiment description. A JSON config file populates the fields;
// individual command-line flags override them afterwards.
struct RunConfig {
    Vec2 slip{1.0, 0.0};
    double lambda = 0.5;
    double tau = 0.0;
    std::vector<double> epsilon_list{0.125, 0.0625, 0.03125};
    std::optional<HRule> h_rule;
    double rotation_theta = 0.0;
    GammaProfile profile = GammaProfile::constant(0.3, 0.0, 1.0);
    RectDomain domain{0.0, 1.0, 0.0, 1.0};
    BuilderKind builder = BuilderKind::RecoveryE1;
    std::vector<Mat2> matrices;
    OutputOptions outputs;
    RigidityOptions rigidity;
    int n_soft_bands = 64;
    double tol = kMembershipTol;
    unsigned long seed = 42;
    bool quiet = false;

    SlipSystem system() const { return make_slip_system(slip); }

    // Throws Error naming the first violated precondition.
    void validate() const;
};

RunConfig load_config(const std::string& path);

int pgm_component_index(const std::string& name);

}  // namespace sliplab::cli
