#pragma once

#include <complex>
#include <vector>

#include "ghg/grid.hpp"

namespace ghg::detail {

using Spectrum = std::vector<std::complex<double>>;

/// Unnormalized forward DFT of a real lattice.
Spectrum forward(const GridScalar& f);
/// Inverse DFT (with the 1/N factor), keeping the real part.
GridScalar inverse(const Spectrum& s, const BoxGrid& grid);

/// Angular wavenumber per index along one axis. The Nyquist index gets 0 so
/// odd derivatives of real data stay real.
std::vector<double> wavenumbers(const BoxGrid& grid, std::size_t axis);

/// Per axis wavenumber tables, wavenumbers(grid, a) for each a.
std::vector<std::vector<double>> wavenumber_tables(const BoxGrid& grid);

/// Visits every flat index together with its per-axis multi-index.
template <class F>
void for_each_mode(const BoxGrid& grid, F&& f) {
  const std::size_t n = grid.dimension();
  std::vector<std::size_t> k(n, 0);
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    f(idx, static_cast<const std::vector<std::size_t>&>(k));
    for (std::size_t a = n; a-- > 0;) {
      if (++k[a] < grid.resolution(a)) break;
      k[a] = 0;
    }
  }
}

}  // namespace ghg::detail
