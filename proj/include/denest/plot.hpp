#pragma once

#include <string>
#include <vector>

#include "denest/experiment.hpp"
#include "denest/grid.hpp"

namespace denest {

// Self-contained SVG renderings of run artifacts; no external tooling.

// Error-vs-time curves for one or more records on shared axes. Each record
// contributes its estimate curve (solid) and its KDE curve (dashed).
std::string render_error_curves_svg(const std::vector<RunRecord>& records,
                                    const std::string& title);

// Cell-colored heatmap of a density field with a small colorbar.
std::string render_heatmap_svg(const DensityField& field, const std::string& title);

// Reads a record.csv written by the experiment runner.
RunRecord read_record_csv_file(const std::string& path);

}  // namespace denest
