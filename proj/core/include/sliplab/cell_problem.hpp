#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sliplab/energetics.hpp"
#include "sliplab/microstructure.hpp"

namespace sliplab {

// One evaluated member of the restricted ansatz family for inclined slip:
// a rank-one pair F, G in M_s with mu F + (1-mu) G = N.
struct CellScanPoint {
    double mu = 0.0;
    bool solved = false;
    double energy = 0.0;  // lambda * (mu(|Fm|^2-1) + (1-mu)(|Gm|^2-1))
    double alpha = 0.0;   // jump amplitude of the decomposition
    double phi = 0.0;     // angle of the rank-one normal
};

struct CellProblemResult {
    Mat2 F;
    ExtReal hom_value = ExtReal::infinite();
    ExtReal ansatz_min = ExtReal::infinite();
    double gap = 0.0;  // ansatz_min - hom_value when both finite, else 0

    // Optimizer record: layerwise slip values for s = e1 (QP solution), or the
    // mu* laminate plus the volume-fraction scan for s != e1.
    std::vector<double> zeta;
    std::optional<LaminateSpec> laminate;
    std::vector<CellScanPoint> scan;
};

// Restricted cell-problem minimization over the recovery-construction family.
// For F outside M_{e1} cap N_s (with gamma in K_{s,lambda}) both values are
// +inf. For s = e1 solves the discretized quadratic program
//   min (lambda/n) sum (zeta_k^2 + tau |zeta_k|)  s.t. (lambda/n) sum zeta_k = gamma
// by convex duality; for s != e1 scans simple-laminate decompositions of the
// soft-layer matrix N over inner volume fractions.
CellProblemResult w_cell_ansatz(const Mat2& F, const SlipSystem& sys, double lambda, double tau,
                                int n_soft_bands, double tol = kMembershipTol);

// Checker for the periodic necessary conditions. psi_grad holds cell samples
// of grad(psi) for a Y-periodic psi on the unit cell (geometry with eps = 1).
struct PeriodicInclusionVerdict {
    bool hypothesis_i = false;   // F + grad(psi) in M_s on soft, SO(2) on rigid
    bool conclusion_i = false;   // then |Fe1| = 1, |Fs| <= 1, det F = 1
    bool hypothesis_ii = false;  // F in M_{e1} and F + grad(psi) in M_{e1} cellwise
    bool conclusion_ii = false;  // common rotation and mean zeta = gamma
    double mean_zeta = 0.0;
    std::vector<std::string> violations;
};

PeriodicInclusionVerdict periodic_inclusion_check(const Mat2& F, const GradientRaster& psi_grad,
                                                  const SlipSystem& sys,
                                                  const LayerGeometry& geom_unit,
                                                  double tol = kMembershipTol);

}  // namespace sliplab
