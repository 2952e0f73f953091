#include "bohmflow/field_io.hpp"

#include <array>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <stdexcept>

namespace bohmflow::io {

namespace {

constexpr std::array<char, 8> kMagic{'B', 'F', 'L', 'D', 'v', '1', '\0', '\0'};

template <class T>
void put(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::ifstream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw std::runtime_error("truncated field dump");
  return v;
}

void write_header(std::ofstream& out, const Grid2D& g, double time, FieldKind kind) {
  out.write(kMagic.data(), kMagic.size());
  put(out, static_cast<std::uint32_t>(kind));
  put(out, std::uint32_t{0});
  put(out, static_cast<std::uint64_t>(g.nx()));
  put(out, static_cast<std::uint64_t>(g.ny()));
  for (double v : {g.x_min(), g.x_max(), g.y_min(), g.y_max(), time}) put(out, v);
}

}  // namespace

std::ofstream open_output(const std::filesystem::path& path, bool binary) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return out;
}

void write_field_csv(const std::filesystem::path& path, const Grid2D& grid,
                     std::span<const double> values, const std::string& value_name,
                     std::span<const std::uint8_t> mask) {
  if (values.size() != grid.size()) throw ValidationError("values", "size does not match grid");
  if (!mask.empty() && mask.size() != grid.size())
    throw ValidationError("mask", "size does not match grid");
  auto out = open_output(path);
  out << std::setprecision(17) << "x,y," << value_name << '\n';
  for (std::size_t i = 0; i < grid.nx(); ++i)
    for (std::size_t j = 0; j < grid.ny(); ++j) {
      const std::size_t idx = grid.index(i, j);
      out << grid.x(i) << ',' << grid.y(j) << ',';
      if (mask.empty() || !mask[idx]) out << values[idx];
      out << '\n';
    }
}

void write_field_binary(const std::filesystem::path& path, const Grid2D& grid, double time,
                        std::span<const double> values) {
  if (values.size() != grid.size()) throw ValidationError("values", "size does not match grid");
  auto out = open_output(path, true);
  write_header(out, grid, time, FieldKind::real);
  out.write(reinterpret_cast<const char*>(values.data()),
            static_cast<std::streamsize>(values.size_bytes()));
}

void write_field_binary(const std::filesystem::path& path, const Grid2D& grid, double time,
                        std::span<const cplx> values) {
  if (values.size() != grid.size()) throw ValidationError("values", "size does not match grid");
  auto out = open_output(path, true);
  write_header(out, grid, time, FieldKind::complex);
  // std::complex<double> is layout-compatible with double[2]
  out.write(reinterpret_cast<const char*>(values.data()),
            static_cast<std::streamsize>(values.size_bytes()));
}

void write_wavefield_binary(const std::filesystem::path& path, const WaveField& psi) {
  write_field_binary(path, psi.grid(), psi.time(), psi.values());
}

FieldDump read_field_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw std::runtime_error(path.string() + ": not a field dump");
  FieldDump d;
  const auto kind = get<std::uint32_t>(in);
  if (kind > 1) throw std::runtime_error(path.string() + ": unknown field kind");
  d.kind = static_cast<FieldKind>(kind);
  (void)get<std::uint32_t>(in);
  const auto nx = get<std::uint64_t>(in), ny = get<std::uint64_t>(in);
  const double x0 = get<double>(in), x1 = get<double>(in);
  const double y0 = get<double>(in), y1 = get<double>(in);
  d.time = get<double>(in);
  d.grid = Grid2D(nx, ny, x0, x1, y0, y1);
  const auto n = static_cast<std::streamsize>(d.grid.size());
  if (d.kind == FieldKind::real) {
    d.real.resize(d.grid.size());
    in.read(reinterpret_cast<char*>(d.real.data()), n * 8);
  } else {
    d.complex.resize(d.grid.size());
    in.read(reinterpret_cast<char*>(d.complex.data()), n * 16);
  }
  if (!in) throw std::runtime_error(path.string() + ": truncated payload");
  return d;
}

}  // namespace bohmflow::io
