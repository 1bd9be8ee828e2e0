#include "ghg/grid.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "ghg/error.hpp"
#include "ghg/expr.hpp"
#include "ghg/game.hpp"
#include "spectral.hpp"

namespace ghg {

namespace {

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

void require_same(const BoxGrid& a, const BoxGrid& b) {
  if (!(a == b)) throw StructureMismatch("grids differ");
}

// Multiplies each mode by `weight(k multi-index)` and transforms back.
template <class W>
GridScalar spectral_apply(const GridScalar& f, W&& weight) {
  auto s = detail::forward(f);
  detail::for_each_mode(f.grid, [&](std::size_t idx, const std::vector<std::size_t>& k) {
    s[idx] *= weight(k);
  });
  return detail::inverse(s, f.grid);
}

// Sum over modes of w(k) * Re(F conj G), scaled so that the weight 1 gives
// the periodic quadrature sum f g * cell volume.
template <class W>
double spectral_inner(const GridScalar& f, const GridScalar& g, W&& weight) {
  require_same(f.grid, g.grid);
  const auto F = detail::forward(f);
  const auto G = detail::forward(g);
  double acc = 0.0;
  detail::for_each_mode(f.grid, [&](std::size_t idx, const std::vector<std::size_t>& k) {
    acc += weight(k) * (F[idx] * std::conj(G[idx])).real();
  });
  return acc * f.grid.cell_volume() / static_cast<double>(f.grid.size());
}

double kappa_sq(const std::vector<std::vector<double>>& kt, const std::vector<std::size_t>& k) {
  double s = 0.0;
  for (std::size_t a = 0; a < k.size(); ++a) s += kt[a][k[a]] * kt[a][k[a]];
  return s;
}

}  // namespace

BoxGrid::BoxGrid(std::vector<double> lower, std::vector<double> upper, std::vector<std::size_t> resolution,
                 std::size_t max_points)
    : lower_(std::move(lower)), upper_(std::move(upper)), resolution_(std::move(resolution)) {
  const std::size_t n = lower_.size();
  if (n == 0) throw std::invalid_argument("grid needs at least one axis");
  if (upper_.size() != n || resolution_.size() != n)
    throw std::invalid_argument("grid bounds and resolution lengths differ");
  size_ = 1;
  for (std::size_t a = 0; a < n; ++a) {
    if (!(std::isfinite(lower_[a]) && std::isfinite(upper_[a]) && upper_[a] > lower_[a]))
      throw std::invalid_argument("grid axis needs finite upper > lower");
    if (resolution_[a] < 8 || !is_pow2(resolution_[a]))
      throw std::invalid_argument("grid resolution must be a power of two >= 8");
    if (size_ > max_points / resolution_[a]) throw std::invalid_argument("grid exceeds the point cap");
    size_ *= resolution_[a];
  }
  strides_.assign(n, 1);
  for (std::size_t a = n - 1; a-- > 0;) strides_[a] = strides_[a + 1] * resolution_[a + 1];
}

BoxGrid BoxGrid::cube(std::size_t n, double lower, double upper, std::size_t resolution) {
  return BoxGrid(std::vector<double>(n, lower), std::vector<double>(n, upper),
                 std::vector<std::size_t>(n, resolution));
}

double BoxGrid::cell_volume() const {
  double v = 1.0;
  for (std::size_t a = 0; a < dimension(); ++a) v *= spacing(a);
  return v;
}

void BoxGrid::node(std::size_t idx, std::span<double> x) const {
  for (std::size_t a = 0; a < dimension(); ++a) {
    const std::size_t j = (idx / strides_[a]) % resolution_[a];
    x[a] = lower_[a] + static_cast<double>(j) * spacing(a);
  }
}

GridScalar::GridScalar(BoxGrid g) : grid(std::move(g)), values(grid.size(), 0.0) {}

GridScalar::GridScalar(BoxGrid g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
  if (values.size() != grid.size()) throw std::invalid_argument("value count does not match grid");
}

double GridScalar::mean() const {
  double s = 0.0;
  for (double v : values) s += v;
  return s / static_cast<double>(values.size());
}

bool GridScalar::all_finite() const {
  for (double v : values)
    if (!std::isfinite(v)) return false;
  return true;
}

GridScalar& GridScalar::operator+=(const GridScalar& o) {
  require_same(grid, o.grid);
  for (std::size_t i = 0; i < values.size(); ++i) values[i] += o.values[i];
  return *this;
}

GridScalar& GridScalar::operator-=(const GridScalar& o) {
  require_same(grid, o.grid);
  for (std::size_t i = 0; i < values.size(); ++i) values[i] -= o.values[i];
  return *this;
}

GridScalar& GridScalar::operator*=(double s) {
  for (double& v : values) v *= s;
  return *this;
}

GridScalar operator+(GridScalar a, const GridScalar& b) { return a += b; }
GridScalar operator-(GridScalar a, const GridScalar& b) { return a -= b; }

GridField::GridField(BoxGrid g) : grid(g), components(g.dimension(), GridScalar(g)) {}

GridField::GridField(BoxGrid g, std::vector<GridScalar> comps) : grid(std::move(g)), components(std::move(comps)) {
  if (components.size() != grid.dimension()) throw std::invalid_argument("field needs one component per axis");
  for (const auto& c : components) require_same(grid, c.grid);
}

bool GridField::all_finite() const {
  for (const auto& c : components)
    if (!c.all_finite()) return false;
  return true;
}

GridField& GridField::operator+=(const GridField& o) {
  require_same(grid, o.grid);
  for (std::size_t i = 0; i < components.size(); ++i) components[i] += o.components[i];
  return *this;
}

GridField& GridField::operator-=(const GridField& o) {
  require_same(grid, o.grid);
  for (std::size_t i = 0; i < components.size(); ++i) components[i] -= o.components[i];
  return *this;
}

GridField& GridField::operator*=(double s) {
  for (auto& c : components) c *= s;
  return *this;
}

GridField operator+(GridField a, const GridField& b) { return a += b; }
GridField operator-(GridField a, const GridField& b) { return a -= b; }

GridTwoForm::GridTwoForm(BoxGrid g)
    : grid(g), entries(g.dimension() * (g.dimension() - 1) / 2, GridScalar(g)) {}

std::size_t GridTwoForm::index(std::size_t n, std::size_t i, std::size_t j) {
  if (!(i < j && j < n)) throw std::invalid_argument("two-form index needs i < j < n");
  // rows 0..i-1 hold (n-1) + (n-2) + ... + (n-i) entries
  return i * (2 * n - i - 1) / 2 + (j - i - 1);
}

GridScalar& GridTwoForm::at(std::size_t i, std::size_t j) { return entries[index(dimension(), i, j)]; }
const GridScalar& GridTwoForm::at(std::size_t i, std::size_t j) const {
  return entries[index(dimension(), i, j)];
}

double window_weight(const BoxGrid& grid, std::span<const double> x) {
  double w = 1.0;
  for (std::size_t a = 0; a < grid.dimension(); ++a) {
    const double c = 0.5 * (grid.lower(a) + grid.upper(a));
    w *= bump(2.0 * (x[a] - c) / grid.length(a));
  }
  return w;
}

GridScalar sample(const ScalarMap& f, const BoxGrid& grid, Window window) {
  GridScalar out(grid);
  std::vector<double> x(grid.dimension());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid.node(i, x);
    const double w = window == Window::bump ? window_weight(grid, x) : 1.0;
    // Outside the window's support the sample is zero without evaluating f.
    out.values[i] = w == 0.0 ? 0.0 : w * f(x);
  }
  return out;
}

GridField sample(const VectorMap& f, std::size_t components, const BoxGrid& grid, Window window) {
  if (components != grid.dimension()) throw std::invalid_argument("field sampling needs k = n components");
  GridField out(grid);
  std::vector<double> x(grid.dimension()), y(components);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid.node(i, x);
    const double w = window == Window::bump ? window_weight(grid, x) : 1.0;
    if (w == 0.0) continue;
    f(x, y);
    for (std::size_t c = 0; c < components; ++c) out.components[c].values[i] = w * y[c];
  }
  return out;
}

GridField sample_gradient(const DifferentialGame& g, const BoxGrid& grid, Window window) {
  if (g.dimension() != grid.dimension()) throw StructureMismatch("grid dimension differs from game");
  return sample(
      [&g](std::span<const double> x, std::span<double> out) {
        const Eigen::VectorXd v = g.gradient_at(Eigen::Map<const Eigen::VectorXd>(x.data(), x.size()));
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = v[static_cast<Eigen::Index>(i)];
      },
      grid.dimension(), grid, window);
}

GridScalar partial(const GridScalar& f, std::size_t axis, DerivativeScheme scheme) {
  const BoxGrid& grid = f.grid;
  if (axis >= grid.dimension()) throw std::invalid_argument("axis out of range");
  if (scheme == DerivativeScheme::spectral) {
    const auto kappa = detail::wavenumbers(grid, axis);
    return spectral_apply(f, [&](const std::vector<std::size_t>& k) {
      return std::complex<double>(0.0, kappa[k[axis]]);
    });
  }
  GridScalar out(grid);
  const std::size_t N = grid.resolution(axis), s = grid.stride(axis);
  const double inv2h = 1.0 / (2.0 * grid.spacing(axis));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const std::size_t j = (i / s) % N;
    const std::size_t base = i - j * s;
    const std::size_t up = base + ((j + 1) % N) * s;
    const std::size_t dn = base + ((j + N - 1) % N) * s;
    out.values[i] = (f.values[up] - f.values[dn]) * inv2h;
  }
  return out;
}

GridField d1_grid(const GridScalar& f, DerivativeScheme scheme) {
  std::vector<GridScalar> comps;
  for (std::size_t a = 0; a < f.grid.dimension(); ++a) comps.push_back(partial(f, a, scheme));
  return GridField(f.grid, std::move(comps));
}

GridTwoForm d2_grid(const GridField& X, DerivativeScheme scheme) {
  const std::size_t n = X.dimension();
  GridTwoForm F(X.grid);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      F.at(i, j) = partial(X.components[j], i, scheme) - partial(X.components[i], j, scheme);
  return F;
}

GridScalar div_grid(const GridField& X, DerivativeScheme scheme) {
  GridScalar out(X.grid);
  for (std::size_t a = 0; a < X.dimension(); ++a) out += partial(X.components[a], a, scheme);
  return out;
}

GridScalar laplacian_grid(const GridScalar& f, DerivativeScheme scheme) {
  return div_grid(d1_grid(f, scheme), scheme);
}

double inner_l2(const GridScalar& f, const GridScalar& g) {
  require_same(f.grid, g.grid);
  double s = 0.0;
  for (std::size_t i = 0; i < f.values.size(); ++i) s += f.values[i] * g.values[i];
  return s * f.grid.cell_volume();
}

double inner_l2(const GridField& X, const GridField& Y) {
  require_same(X.grid, Y.grid);
  double s = 0.0;
  for (std::size_t c = 0; c < X.dimension(); ++c) s += inner_l2(X.components[c], Y.components[c]);
  return s;
}

double norm_l2(const GridScalar& f) { return std::sqrt(inner_l2(f, f)); }
double norm_l2(const GridField& X) { return std::sqrt(inner_l2(X, X)); }

// By Parseval the derivative terms become mode weights: sum_i kappa_i^2 for
// first derivatives and sum_ij kappa_i^2 kappa_j^2 = |kappa|^4 for second.
double inner0(const GridScalar& f, const GridScalar& g) {
  const auto kt = detail::wavenumber_tables(f.grid);
  return spectral_inner(f, g, [&](const std::vector<std::size_t>& k) {
    const double q = kappa_sq(kt, k);
    return 1.0 + q + q * q;
  });
}

double inner1(const GridField& X, const GridField& Y) {
  require_same(X.grid, Y.grid);
  const auto kt = detail::wavenumber_tables(X.grid);
  double s = 0.0;
  for (std::size_t c = 0; c < X.dimension(); ++c)
    s += spectral_inner(X.components[c], Y.components[c],
                        [&](const std::vector<std::size_t>& k) { return 1.0 + kappa_sq(kt, k); });
  return s;
}

double inner2(const GridTwoForm& F, const GridTwoForm& G) {
  require_same(F.grid, G.grid);
  double s = 0.0;
  for (std::size_t e = 0; e < F.entries.size(); ++e) s += inner_l2(F.entries[e], G.entries[e]);
  return s;
}

double norm0(const GridScalar& f) { return std::sqrt(std::max(0.0, inner0(f, f))); }
double norm1(const GridField& X) { return std::sqrt(std::max(0.0, inner1(X, X))); }
double norm2(const GridTwoForm& F) { return std::sqrt(inner2(F, F)); }

}  // namespace ghg
