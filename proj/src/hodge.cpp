#include "ghg/hodge.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "ghg/error.hpp"
#include "spectral.hpp"

namespace ghg {

namespace {

using cplx = std::complex<double>;

double normalizer(const GridField& X, double floor) { return std::max(norm1(X), floor); }

}  // namespace

const char* to_string(ZeroModePolicy p) {
  return p == ZeroModePolicy::to_potential ? "to_potential" : "to_vector";
}

DecompositionResult decompose(const GridField& X, const DecompositionConfig& cfg) {
  if (!X.all_finite()) throw NumericFailure("decompose: non-finite input field");
  const BoxGrid& grid = X.grid;
  const std::size_t n = X.dimension();
  const auto kt = detail::wavenumber_tables(grid);

  std::vector<detail::Spectrum> xh;
  for (const auto& c : X.components) xh.push_back(detail::forward(c));
  std::vector<detail::Spectrum> ph(n, detail::Spectrum(grid.size()));
  std::vector<detail::Spectrum> vh(n, detail::Spectrum(grid.size()));
  detail::Spectrum phih(grid.size());

  std::vector<double> kappa(n);
  detail::for_each_mode(grid, [&](std::size_t idx, const std::vector<std::size_t>& k) {
    if (idx == 0) return;  // constant mode is placed in real space below
    double q = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
      kappa[a] = kt[a][k[a]];
      q += kappa[a] * kappa[a];
    }
    if (q == 0.0) {
      for (std::size_t a = 0; a < n; ++a) vh[a][idx] = xh[a][idx];
      return;
    }
    cplx dot = 0.0;
    for (std::size_t a = 0; a < n; ++a) dot += kappa[a] * xh[a][idx];
    phih[idx] = cplx(0.0, -1.0) * dot / q;
    for (std::size_t a = 0; a < n; ++a) {
      ph[a][idx] = kappa[a] * dot / q;
      vh[a][idx] = xh[a][idx] - ph[a][idx];
    }
  });

  std::vector<double> mean(n);
  std::vector<GridScalar> pc, vc;
  for (std::size_t a = 0; a < n; ++a) {
    mean[a] = xh[a][0].real() / static_cast<double>(grid.size());
    pc.push_back(detail::inverse(ph[a], grid));
    vc.push_back(detail::inverse(vh[a], grid));
    auto& target = cfg.zero_mode_policy == ZeroModePolicy::to_potential ? pc.back() : vc.back();
    for (double& v : target.values) v += mean[a];
  }
  GridScalar phi = detail::inverse(phih, grid);
  const double pm = phi.mean();
  for (double& v : phi.values) v -= pm;

  DecompositionResult r{std::move(phi), GridField(grid, std::move(pc)), GridField(grid, std::move(vc)),
                        std::move(mean), cfg.zero_mode_policy, {}};

  const double nx = normalizer(X, cfg.norm_floor);
  auto& d = r.diagnostics;
  d.reconstruction_error = norm_l2(X - r.X_P - r.X_V) / nx;
  d.curl_residual_P = norm2(d2_grid(r.X_P, cfg.scheme)) / nx;
  d.div_residual_V = norm_l2(div_grid(r.X_V, cfg.scheme)) / nx;
  d.orthogonality_L2 = std::abs(inner_l2(r.X_P, r.X_V)) / (nx * nx);
  d.orthogonality_H1 = std::abs(inner1(r.X_P, r.X_V)) / (nx * nx);
  d.near_vp_residual = residuals(X, cfg.scheme, cfg.norm_floor).near_vp_residual;
  return r;
}

FieldResiduals residuals(const GridField& X, DerivativeScheme scheme, double norm_floor) {
  const double nx = normalizer(X, norm_floor);
  const GridScalar div = div_grid(X, scheme);
  FieldResiduals r;
  r.curl_residual = norm2(d2_grid(X, scheme)) / nx;
  r.div_residual = norm_l2(div) / nx;
  r.near_vp_residual = norm_l2(div + laplacian_grid(div, scheme)) / nx;
  return r;
}

EpsilonPotentialFit epsilon_potential_fit(const GridField& X) {
  DecompositionConfig cfg;
  cfg.zero_mode_policy = ZeroModePolicy::to_vector;
  auto d = decompose(X, cfg);
  const double nx = normalizer(X, cfg.norm_floor);
  EpsilonPotentialFit fit{d.phi, 0.0, 0.0};
  fit.residual = norm1(d1_grid(d.phi) - X) / nx;
  fit.vector_fraction = norm1(d.X_V) / nx;
  return fit;
}

}  // namespace ghg
