#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "bohmflow/field_io.hpp"
#include "helpers.hpp"

using namespace bohmflow;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "bohmflow_field_io";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("complex binary dump round-trips exactly") {
  const Grid2D g(16, 8, -1.0, 3.0, 0.5, 2.5);
  WaveField psi(g, testing::random_complex(g.size(), 3), 1.0, 12.25);
  const auto p = scratch("psi.bin");
  io::write_wavefield_binary(p, psi);
  CHECK(fs::file_size(p) == 72 + 16 * g.size());
  const auto d = io::read_field_binary(p);
  CHECK(d.kind == io::FieldKind::complex);
  CHECK(d.grid == g);
  CHECK(d.time == 12.25);
  REQUIRE(d.complex.size() == g.size());
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(d.complex[i] == psi.values()[i]);
}

TEST_CASE("real binary dump round-trips and truncation is detected") {
  const Grid2D g(8, 8, 0.0, 1.0, 0.0, 1.0);
  const auto v = testing::random_real(g.size(), 4);
  const auto p = scratch("real.bin");
  io::write_field_binary(p, g, 0.5, std::span<const double>(v));
  const auto d = io::read_field_binary(p);
  CHECK(d.kind == io::FieldKind::real);
  CHECK(d.real == v);

  fs::resize_file(p, fs::file_size(p) - 8);
  CHECK_THROWS_AS(io::read_field_binary(p), std::runtime_error);
  {
    std::ofstream bad(p, std::ios::binary);
    bad << "not a field";
  }
  CHECK_THROWS_AS(io::read_field_binary(p), std::runtime_error);
}

TEST_CASE("field CSV has one row per node and blanks masked values") {
  const Grid2D g(8, 8, 0.0, 8.0, 0.0, 8.0);
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = double(i);
  std::vector<std::uint8_t> mask(g.size(), 0);
  mask[g.index(2, 3)] = 1;
  const auto p = scratch("nested/dir/field.csv");
  io::write_field_csv(p, g, v, "rho", mask);
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  CHECK(line == "x,y,rho");
  std::size_t rows = 0, blank = 0;
  while (std::getline(in, line)) {
    ++rows;
    std::stringstream ss(line);
    std::string x, y, val;
    std::getline(ss, x, ',');
    std::getline(ss, y, ',');
    std::getline(ss, val, ',');
    if (val.empty()) {
      ++blank;
      CHECK(std::stod(x) == 2.0);
      CHECK(std::stod(y) == 3.0);
    }
  }
  CHECK(rows == g.size());
  CHECK(blank == 1);
}
