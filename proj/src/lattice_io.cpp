#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <optional>
#include <system_error>

#include "ghg/error.hpp"
#include "ghg/grid.hpp"

namespace ghg {

static_assert(std::endian::native == std::endian::little, "lattice files assume a little-endian host");

namespace {

constexpr char kMagic[4] = {'G', 'H', 'G', '1'};

template <class T>
void put(std::ofstream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T take(const std::vector<char>& buf, std::size_t& pos) {
  if (pos + sizeof(T) > buf.size()) throw SchemaError("lattice file truncated");
  T v;
  std::memcpy(&v, buf.data() + pos, sizeof v);
  pos += sizeof v;
  return v;
}

}  // namespace

void write_lattice(const std::filesystem::path& path, const BoxGrid& grid, std::span<const GridScalar> components) {
  for (const auto& c : components)
    if (!(c.grid == grid)) throw StructureMismatch("lattice component on a different grid");
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::system_error(errno, std::generic_category(), "cannot open " + tmp.string());
    out.write(kMagic, 4);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(grid.dimension()));
    for (auto n : grid.resolutions()) put<std::uint32_t>(out, static_cast<std::uint32_t>(n));
    for (std::size_t a = 0; a < grid.dimension(); ++a) {
      put<double>(out, grid.lower(a));
      put<double>(out, grid.upper(a));
    }
    for (const auto& c : components)
      out.write(reinterpret_cast<const char*>(c.values.data()),
                static_cast<std::streamsize>(c.values.size() * sizeof(double)));
    if (!out) throw std::system_error(errno, std::generic_category(), "write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::vector<GridScalar> read_lattice(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::system_error(errno, std::generic_category(), "cannot open " + path.string());
  std::vector<char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (buf.size() < 8 || std::memcmp(buf.data(), kMagic, 4) != 0) throw SchemaError("not a GHG1 lattice file");
  std::size_t pos = 4;
  const auto n = take<std::uint32_t>(buf, pos);
  if (n == 0 || n > 64) throw SchemaError("lattice dimension out of range");
  std::vector<std::size_t> res(n);
  for (auto& r : res) r = take<std::uint32_t>(buf, pos);
  std::vector<double> lo(n), hi(n);
  for (std::uint32_t a = 0; a < n; ++a) {
    lo[a] = take<double>(buf, pos);
    hi[a] = take<double>(buf, pos);
  }
  std::optional<BoxGrid> grid;
  try {
    grid.emplace(lo, hi, res);
  } catch (const std::invalid_argument& e) {
    throw SchemaError(std::string("lattice header: ") + e.what());
  }
  const std::size_t block = grid->size() * sizeof(double);
  const std::size_t payload = buf.size() - pos;
  if (payload % block != 0) throw SchemaError("lattice payload is not a whole number of components");
  std::vector<GridScalar> out;
  for (std::size_t c = 0; c < payload / block; ++c) {
    std::vector<double> v(grid->size());
    std::memcpy(v.data(), buf.data() + pos, block);
    pos += block;
    out.emplace_back(*grid, std::move(v));
  }
  return out;
}

}  // namespace ghg
