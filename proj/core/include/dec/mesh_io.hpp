#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>

#include "dec/mesh.hpp"

namespace dec {

// ASCII OFF: "OFF", counts line "V F E", V vertex lines, F face lines "3 i j k".
// Coordinates are written with 17 significant digits so a round trip is exact.
// Periodic complexes are written through their node list only.
SimplicialComplex2 read_off(std::istream& in);
SimplicialComplex2 read_mesh(const std::filesystem::path& path);

void write_off(const SimplicialComplex2& mesh, std::ostream& out);
void write_mesh(const SimplicialComplex2& mesh, const std::filesystem::path& path);

// Writes `contents` to a temporary sibling and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace dec
