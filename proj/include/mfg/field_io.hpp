#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "mfg/grid.hpp"

namespace mfg {

/**
 * CSV dump of a scalar field.
 *
 * First line "# <dim>,<n>", then one row per node "index,x[,y],value".
 * Values use the shortest round-trip representation, so reading back a
 * written file reproduces every value bit for bit.
 */
void write_field_csv(std::ostream& out, const ScalarField& f);
void write_field_csv(const std::filesystem::path& path, const ScalarField& f);

ScalarField read_field_csv(std::istream& in);
ScalarField read_field_csv(const std::filesystem::path& path);

/// Shortest decimal string that parses back to exactly `v`.
std::string format_exact(double v);

}  // namespace mfg
