#pragma once

#include <filesystem>
#include <nlohmann/json.hpp>

#include "semiclassical/field.hpp"

namespace semiclassical::io {

/// On-disk field layout: `<stem>.bin` holds little-endian float64 samples in
/// row-major (x, y, z) order, interleaved (re, im) for complex fields;
/// `<stem>.json` is the sidecar header
///   {"dim", "extents", "origin", "spacing", "boundary", "dtype", "count"}
/// with dtype "float64" or "complex128".

nlohmann::json grid_to_json(const Grid& g);
Grid grid_from_json(const nlohmann::json& j);

void write_field(const std::filesystem::path& stem, const ScalarField& f);
void write_field(const std::filesystem::path& stem, const ComplexField& f);
ScalarField read_scalar_field(const std::filesystem::path& stem);
ComplexField read_complex_field(const std::filesystem::path& stem);

/// Node coordinates plus value columns; header row names the columns.
void write_csv(const std::filesystem::path& path, const ScalarField& f);
void write_csv(const std::filesystem::path& path, const ComplexField& f);

std::filesystem::path bin_path(const std::filesystem::path& stem);
std::filesystem::path header_path(const std::filesystem::path& stem);

}  // namespace semiclassical::io
