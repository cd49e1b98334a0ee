#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "sliplab/cell_problem.hpp"
#include "sliplab/energetics.hpp"
#include "sliplab/microstructure.hpp"
#include "sliplab/rigidity.hpp"

namespace sliplab {

// "%.17g" so that doubles round-trip losslessly; infinities print as "inf".
std::string format_g17(double v);

// Writes via a temporary file in the same directory plus rename.
void write_atomic(const std::filesystem::path& path, const std::string& content);

std::string sweep_csv(const std::vector<SweepRow>& rows, unsigned long seed);
std::string trace_csv(const LayerRotationTrace& trace);
std::string cell_csv(const std::vector<CellProblemResult>& rows);
std::string raster_csv(const GradientRaster& raster);

// Binary P5 with maxval 255; one gradient component (0..3 for A11, A12, A21,
// A22) linearly scaled between its min and max over the raster. The sidecar
// "<path>.meta.txt" records the component and the scaling bounds.
void write_raster_pgm(const std::filesystem::path& path, const GradientRaster& raster,
                      int component);

}  // namespace sliplab
