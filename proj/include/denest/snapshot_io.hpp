#pragma once

#include <iosfwd>
#include <string>

#include "denest/dynamics.hpp"
#include "denest/grid.hpp"

namespace denest {

// Grid snapshot text format. First line: "nx ny xmin xmax ymin ymax t".
// Then ny lines of nx values each, rows in flat-index order (j outer, i
// inner), full precision. Readable back bit-for-bit.
void write_grid_text(const DensityField& f, std::ostream& os);
void write_grid_text_file(const DensityField& f, const std::string& path);
DensityField read_grid_text(std::istream& is);
DensityField read_grid_text_file(const std::string& path);

// Agent snapshot text format. First line: "n t"; then n lines of "x y".
void write_agents_text(const AgentEnsemble& ens, std::ostream& os);
void write_agents_text_file(const AgentEnsemble& ens, const std::string& path);

}  // namespace denest
