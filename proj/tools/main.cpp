#include <cstdio>
#include <filesystem>
#include <iostream>
#include <random>
#include <string>

#include "CLI11.hpp"
#include "config.hpp"
#include "sliplab/cell_problem.hpp"
#include "sliplab/energetics.hpp"
#include "sliplab/io.hpp"
#include "sliplab/microstructure.hpp"
#include "sliplab/rank_one.hpp"
#include "sliplab/rigidity.hpp"

namespace fs = std::filesystem;
using namespace sliplab;
using cli::RunConfig;

namespace {

// Raised when a verification step fails; mapped to exit code 2.
struct NumericFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

double u01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

void say(const RunConfig& cfg, const std::string& line) {
    if (!cfg.quiet) std::cout << line << "\n";
}

PiecewiseAffineField build_field(const RunConfig& cfg, double eps) {
    const LayerGeometry geom{cfg.lambda, eps};
    const Rotation R{cfg.rotation_theta};
    const SlipSystem sys = cfg.system();
    switch (cfg.builder) {
        case BuilderKind::RecoveryE1:
            return build_recovery_e1(cfg.profile, R, geom, cfg.domain);
        case BuilderKind::SingleScale:
            return build_single_scale(cfg.profile.values.at(0), R, sys, geom, cfg.domain);
        case BuilderKind::NestedLaminate: {
            if (!cfg.h_rule) throw Error(errc::invalid_argument, "nested laminate needs h_rule");
            return build_nested_laminate(cfg.profile.values.at(0), R, sys, geom,
                                         cfg.h_rule->h_for(eps), cfg.domain);
        }
        case BuilderKind::Piecewise: {
            std::optional<double> h;
            if (cfg.h_rule) h = cfg.h_rule->h_for(eps);
            return build_piecewise(cfg.profile, R, sys, geom, h, cfg.domain);
        }
    }
    throw Error(errc::invalid_argument, "unknown builder");
}

int cmd_membership(const RunConfig& cfg) {
    if (cfg.matrices.empty()) {
        throw Error(errc::invalid_argument, "membership needs a 'matrices' list in the config");
    }
    const SlipSystem sys = cfg.system();
    std::string csv = "F11,F12,F21,F22,SO2,Ms,Ns,Me1capNs\n";
    say(cfg, "F11 F12 F21 F22 | SO2 Ms Ns Me1capNs(lambda=" + format_g17(cfg.lambda) + ")");
    for (const Mat2& F : cfg.matrices) {
        const bool so2 = membership(F, ConstraintSet::SO2, sys, std::nullopt, cfg.tol);
        const bool ms = membership(F, ConstraintSet::Ms, sys, std::nullopt, cfg.tol);
        const bool ns = membership(F, ConstraintSet::Ns, sys, std::nullopt, cfg.tol);
        const bool both = membership(F, ConstraintSet::Me1capNs, sys, cfg.lambda, cfg.tol);
        char line[256];
        std::snprintf(line, sizeof(line), "%.6g %.6g %.6g %.6g | %d %d %d %d", F.a11, F.a12,
                      F.a21, F.a22, so2, ms, ns, both);
        say(cfg, line);
        csv += format_g17(F.a11) + "," + format_g17(F.a12) + "," + format_g17(F.a21) + "," +
               format_g17(F.a22) + "," + std::to_string(so2) + "," + std::to_string(ms) + "," +
               std::to_string(ns) + "," + std::to_string(both) + "\n";
    }
    if (cfg.outputs.write_csv) {
        write_atomic(fs::path(cfg.outputs.dir) / "membership.csv", csv);
    }
    return 0;
}

int cmd_laminate(const RunConfig& cfg) {
    if (cfg.matrices.empty()) {
        throw Error(errc::invalid_argument, "laminate needs a 'matrices' list in the config");
    }
    const SlipSystem sys = cfg.system();
    std::string csv =
        "N11,N12,N21,N22,mu,F11,F12,F21,F22,G11,G12,G21,G22,res_avg,res_rank,res_fm,res_gm\n";
    bool ok = true;
    for (const Mat2& N : cfg.matrices) {
        const LaminateSpec spec = laminate_decompose_ns(N, sys, cfg.tol);
        const double res_avg = (spec.average() - N).frobenius();
        const double res_rank = std::abs((spec.F - spec.G).det());
        const double res_fm = std::abs((spec.F * sys.m).norm() - (N * sys.m).norm());
        const double res_gm = std::abs((spec.G * sys.m).norm() - (N * sys.m).norm());
        ok = ok && res_avg <= 1e-8 && res_rank <= 1e-8 && res_fm <= 1e-8 && res_gm <= 1e-8;
        say(cfg, "mu=" + format_g17(spec.mu) + " residuals avg=" + format_g17(res_avg) +
                     " rank=" + format_g17(res_rank) + " fm=" + format_g17(res_fm) +
                     " gm=" + format_g17(res_gm));
        for (const Mat2* M : {&N, &spec.F, &spec.G}) {
            csv += format_g17(M->a11) + "," + format_g17(M->a12) + "," + format_g17(M->a21) +
                   "," + format_g17(M->a22) + (M == &spec.G ? "" : ",");
            if (M == &N) csv += format_g17(spec.mu) + ",";
        }
        csv += "," + format_g17(res_avg) + "," + format_g17(res_rank) + "," +
               format_g17(res_fm) + "," + format_g17(res_gm) + "\n";
    }
    if (cfg.outputs.write_csv) {
        write_atomic(fs::path(cfg.outputs.dir) / "laminate.csv", csv);
    }
    if (!ok) throw NumericFailure("laminate verification residual exceeds 1e-8");
    return 0;
}

int cmd_recover(const RunConfig& cfg) {
    const double eps = cfg.epsilon_list.front();
    const PiecewiseAffineField field = build_field(cfg, eps);
    const LayerGeometry geom{cfg.lambda, eps};
    const EnergyReport rep = energy_eps(field, cfg.system(), geom, cfg.tau, cfg.tol);

    say(cfg, "epsilon=" + format_g17(eps) + " pieces=" + std::to_string(field.pieces.size()));
    say(cfg, "energy=" + (rep.value.is_finite ? format_g17(rep.value.value) : "inf") +
                 " admissible=" + (rep.admissible ? "yes" : "no") +
                 " violation=" + format_g17(rep.constraint_violation_max) +
                 " ledger=" + format_g17(rep.ledger_total));
    if (cfg.h_rule && rep.ledger_total > 0.0) {
        // first-order mismatch constant: ledger ~ C * h
        say(cfg, "ledger_constant=" + format_g17(rep.ledger_total / cfg.h_rule->h_for(eps)));
    }

    const GradientRaster raster =
        rasterize_gradient(field, cfg.outputs.raster_nx, cfg.outputs.raster_ny);
    if (cfg.outputs.write_csv) {
        write_atomic(fs::path(cfg.outputs.dir) / "recover_raster.csv", raster_csv(raster));
    }
    if (cfg.outputs.write_pgm) {
        write_raster_pgm(fs::path(cfg.outputs.dir) / "recover.pgm", raster,
                         cli::pgm_component_index(cfg.outputs.pgm_component));
    }
    return 0;
}

int cmd_sweep(const RunConfig& cfg) {
    const auto rows =
        convergence_sweep(cfg.builder, cfg.epsilon_list, cfg.h_rule, cfg.system(), cfg.lambda,
                          cfg.tau, Rotation{cfg.rotation_theta}, cfg.profile, cfg.domain);
    write_atomic(fs::path(cfg.outputs.dir) / "sweep.csv", sweep_csv(rows, cfg.seed));
    for (const SweepRow& r : rows) {
        say(cfg, "eps=" + format_g17(r.epsilon) + " energy=" + format_g17(r.energy) +
                     " hom=" + format_g17(r.hom_energy) + " gap=" + format_g17(r.gap));
    }
    if (cfg.outputs.write_pgm) {
        for (size_t i = 0; i < cfg.epsilon_list.size(); ++i) {
            const PiecewiseAffineField field = build_field(cfg, cfg.epsilon_list[i]);
            const GradientRaster raster =
                rasterize_gradient(field, cfg.outputs.raster_nx, cfg.outputs.raster_ny);
            write_raster_pgm(fs::path(cfg.outputs.dir) / ("raster_e" + std::to_string(i) +
                                                          ".pgm"),
                             raster, cli::pgm_component_index(cfg.outputs.pgm_component));
        }
    }
    return 0;
}

int cmd_cell(const RunConfig& cfg) {
    if (cfg.matrices.empty()) {
        throw Error(errc::invalid_argument, "cell needs a 'matrices' list in the config");
    }
    std::vector<CellProblemResult> rows;
    for (const Mat2& F : cfg.matrices) {
        rows.push_back(w_cell_ansatz(F, cfg.system(), cfg.lambda, cfg.tau, cfg.n_soft_bands,
                                     cfg.tol));
        const CellProblemResult& r = rows.back();
        say(cfg, "hom=" + (r.hom_value.is_finite ? format_g17(r.hom_value.value) : "inf") +
                     " ansatz=" +
                     (r.ansatz_min.is_finite ? format_g17(r.ansatz_min.value) : "inf") +
                     " gap=" + format_g17(r.gap));
    }
    if (cfg.outputs.write_csv) {
        write_atomic(fs::path(cfg.outputs.dir) / "cell.csv", cell_csv(rows));
    }
    return 0;
}

int cmd_rigidity(const RunConfig& cfg) {
    const double eps = cfg.epsilon_list.front();
    const PiecewiseAffineField field = build_field(cfg, eps);
    const LayerGeometry geom{cfg.lambda, eps};
    const LayerRotationTrace trace = fit_layer_rotations(field, geom, cfg.domain);
    say(cfg, "strips=" + std::to_string(trace.rotations.size()) +
                 " total_variation=" + format_g17(trace.total_variation));
    if (cfg.outputs.write_csv) {
        write_atomic(fs::path(cfg.outputs.dir) / "trace.csv", trace_csv(trace));
    }
    if (trace.rotations.size() >= 2) {
        const double gap = sigma_vs_interpolant(trace, eps);
        say(cfg, "sigma_vs_interpolant=" + format_g17(gap));
    }

    std::string bound = "L,H,theta1,theta2,lhs_min,rhs,ratio\n";
    std::mt19937_64 rng(cfg.seed);
    bool ok = true;
    auto add_case = [&](double L, double H, double t1, double t2) {
        const OneDBound b = one_d_bound_check(L, H, Rotation{t1}, Rotation{t2}, cfg.rigidity.n_grid);
        const double ratio = b.lhs_min > 0.0 ? b.rhs / b.lhs_min : (b.rhs > 0.0 ? 2.0 : 0.0);
        ok = ok && b.lhs_min >= b.rhs - 1e-12 * std::max(1.0, b.rhs);
        bound += format_g17(L) + "," + format_g17(H) + "," + format_g17(t1) + "," +
                 format_g17(t2) + "," + format_g17(b.lhs_min) + "," + format_g17(b.rhs) + "," +
                 format_g17(ratio) + "\n";
    };
    add_case(1.0, 1.0, 0.0, M_PI);  // antipodal reference, rhs = 1/3
    for (int i = 0; i < cfg.rigidity.cases; ++i) {
        add_case(0.2 + 2.8 * u01(rng), 0.2 + 2.8 * u01(rng), (2.0 * u01(rng) - 1.0) * M_PI,
                 (2.0 * u01(rng) - 1.0) * M_PI);
    }
    if (cfg.outputs.write_csv) {
        write_atomic(fs::path(cfg.outputs.dir) / "bound.csv", bound);
    }
    if (!ok) throw NumericFailure("one-dimensional bound violated");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bilayer single-slip composites: laminates, energies, cell formulas"};
    app.require_subcommand(1);
    app.fallthrough();  // allow the global flags after the subcommand name

    std::string config_path;
    std::string out_dir;
    long long seed = -1;
    double tol = -1.0;
    bool quiet = false;
    app.add_option("--config", config_path, "JSON experiment description");
    app.add_option("--out", out_dir, "output directory (overrides config)");
    app.add_option("--seed", seed, "random seed (overrides config)");
    app.add_option("--tol", tol, "membership tolerance (overrides config)");
    app.add_flag("--quiet", quiet, "suppress stdout tables");

    int (*handler)(const RunConfig&) = nullptr;
    app.add_subcommand("membership", "constraint-set verdicts for config matrices")
        ->callback([&] { handler = cmd_membership; });
    app.add_subcommand("laminate", "laminate decompositions with verification residuals")
        ->callback([&] { handler = cmd_laminate; });
    app.add_subcommand("recover", "build one deformation field and export rasters")
        ->callback([&] { handler = cmd_recover; });
    app.add_subcommand("sweep", "energy convergence sweep over epsilon")
        ->callback([&] { handler = cmd_sweep; });
    app.add_subcommand("cell", "cell-formula comparison table")
        ->callback([&] { handler = cmd_cell; });
    app.add_subcommand("rigidity", "layer rotation trace and transition bounds")
        ->callback([&] { handler = cmd_rigidity; });

    CLI11_PARSE(app, argc, argv);

    RunConfig cfg;
    try {
        if (!config_path.empty()) cfg = cli::load_config(config_path);
        if (!out_dir.empty()) cfg.outputs.dir = out_dir;
        if (seed >= 0) cfg.seed = static_cast<unsigned long>(seed);
        if (tol > 0.0) cfg.tol = tol;
        cfg.quiet = cfg.quiet || quiet;
        cfg.validate();
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    }

    try {
        return handler(cfg);
    } catch (const NumericFailure& e) {
        std::cerr << "numeric assertion failure: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
