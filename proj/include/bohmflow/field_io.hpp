#pragma once

// Field export. CSV files carry one row per node with columns (x, y, value);
// the binary dump is a fixed little-endian header followed by the row-major
// payload:
//
//   char[8]  magic "BFLDv1\0\0"
//   uint32   kind (0 = real, 1 = complex)
//   uint32   reserved (0)
//   uint64   nx, ny
//   float64  x_min, x_max, y_min, y_max, time
//   payload  nx*ny float64, or nx*ny (re, im) float64 pairs

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "bohmflow/grid.hpp"
#include "bohmflow/wavefield.hpp"

namespace bohmflow::io {

enum class FieldKind : std::uint32_t { real = 0, complex = 1 };

struct FieldDump {
  Grid2D grid;
  double time = 0.0;
  FieldKind kind = FieldKind::real;
  std::vector<double> real;
  std::vector<cplx> complex;
};

/// (x, y, value); masked nodes (mask[idx] != 0) are written as an empty value.
void write_field_csv(const std::filesystem::path& path, const Grid2D& grid,
                     std::span<const double> values, const std::string& value_name = "value",
                     std::span<const std::uint8_t> mask = {});

void write_field_binary(const std::filesystem::path& path, const Grid2D& grid, double time,
                        std::span<const double> values);
void write_field_binary(const std::filesystem::path& path, const Grid2D& grid, double time,
                        std::span<const cplx> values);
void write_wavefield_binary(const std::filesystem::path& path, const WaveField& psi);

/// Throws std::runtime_error on a malformed or truncated file.
FieldDump read_field_binary(const std::filesystem::path& path);

/// Opens for writing, creating parent directories; throws on failure.
std::ofstream open_output(const std::filesystem::path& path, bool binary = false);

}  // namespace bohmflow::io
