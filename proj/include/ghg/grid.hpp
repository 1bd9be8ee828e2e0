#pragma once

// Periodic box lattices and the discrete exterior-calculus operators on
// them: gradient (d1), antisymmetrized Jacobian (d2), divergence, Laplacian
// and the C0 / C1 / C2 inner products.
//
// Node j on axis a sits at lower_a + j * h_a, j = 0 .. N_a - 1, and the
// lattice wraps around: node N_a is node 0. Values are stored row-major
// (last axis fastest).

#include <cstddef>
#include <filesystem>
#include <functional>
#include <span>
#include <vector>

namespace ghg {

class DifferentialGame;

class BoxGrid {
 public:
  static constexpr std::size_t kDefaultMaxPoints = std::size_t{1} << 24;

  /// Throws std::invalid_argument unless every axis has upper > lower and a
  /// power-of-two resolution >= 8, and the point count stays under the cap.
  BoxGrid(std::vector<double> lower, std::vector<double> upper, std::vector<std::size_t> resolution,
          std::size_t max_points = kDefaultMaxPoints);

  static BoxGrid cube(std::size_t n, double lower, double upper, std::size_t resolution);

  std::size_t dimension() const { return lower_.size(); }
  double lower(std::size_t a) const { return lower_[a]; }
  double upper(std::size_t a) const { return upper_[a]; }
  double length(std::size_t a) const { return upper_[a] - lower_[a]; }
  std::size_t resolution(std::size_t a) const { return resolution_[a]; }
  std::span<const std::size_t> resolutions() const { return resolution_; }
  double spacing(std::size_t a) const { return length(a) / static_cast<double>(resolution_[a]); }
  std::size_t size() const { return size_; }
  /// Quadrature weight of one node, the product of spacings.
  double cell_volume() const;
  /// Flat-index stride of axis a.
  std::size_t stride(std::size_t a) const { return strides_[a]; }

  /// Coordinates of the node with flat index `idx`.
  void node(std::size_t idx, std::span<double> x) const;

  friend bool operator==(const BoxGrid&, const BoxGrid&) = default;

 private:
  std::vector<double> lower_;
  std::vector<double> upper_;
  std::vector<std::size_t> resolution_;
  std::vector<std::size_t> strides_;
  std::size_t size_ = 0;
};

/// Samples of a scalar f on a BoxGrid.
struct GridScalar {
  BoxGrid grid;
  std::vector<double> values;

  explicit GridScalar(BoxGrid g);  // zeros
  GridScalar(BoxGrid g, std::vector<double> v);

  double mean() const;
  bool all_finite() const;
  GridScalar& operator+=(const GridScalar& o);
  GridScalar& operator-=(const GridScalar& o);
  GridScalar& operator*=(double s);
};

/// Vector field X = (f_1, ..., f_n), one scalar lattice per component.
struct GridField {
  BoxGrid grid;
  std::vector<GridScalar> components;

  explicit GridField(BoxGrid g);  // zero field with dimension() components
  GridField(BoxGrid g, std::vector<GridScalar> comps);

  std::size_t dimension() const { return components.size(); }
  bool all_finite() const;
  GridField& operator+=(const GridField& o);
  GridField& operator-=(const GridField& o);
  GridField& operator*=(double s);
};

GridScalar operator+(GridScalar a, const GridScalar& b);
GridScalar operator-(GridScalar a, const GridScalar& b);
GridField operator+(GridField a, const GridField& b);
GridField operator-(GridField a, const GridField& b);

/// Two-form with entries f_ij for i < j only, stored in lexicographic order
/// of (i, j).
struct GridTwoForm {
  BoxGrid grid;
  std::vector<GridScalar> entries;

  explicit GridTwoForm(BoxGrid g);
  std::size_t dimension() const { return grid.dimension(); }
  static std::size_t index(std::size_t n, std::size_t i, std::size_t j);
  GridScalar& at(std::size_t i, std::size_t j);
  const GridScalar& at(std::size_t i, std::size_t j) const;
};

enum class DerivativeScheme { spectral, central2 };

enum class Window { none, bump };

using ScalarMap = std::function<double(std::span<const double>)>;
/// Writes k outputs for the point x.
using VectorMap = std::function<void(std::span<const double> x, std::span<double> out)>;

/// Windowing multiplies by prod_a bump(2 (x_a - c_a) / L_a), c the box
/// center and L its width, so samples vanish on the box boundary.
double window_weight(const BoxGrid& grid, std::span<const double> x);

GridScalar sample(const ScalarMap& f, const BoxGrid& grid, Window window = Window::none);
GridField sample(const VectorMap& f, std::size_t components, const BoxGrid& grid,
                 Window window = Window::none);
/// Simultaneous gradient of a game on its own coordinates.
GridField sample_gradient(const DifferentialGame& g, const BoxGrid& grid, Window window);

/// Partial derivative along one axis.
GridScalar partial(const GridScalar& f, std::size_t axis, DerivativeScheme scheme);

GridField d1_grid(const GridScalar& f, DerivativeScheme scheme = DerivativeScheme::spectral);
GridTwoForm d2_grid(const GridField& X, DerivativeScheme scheme = DerivativeScheme::spectral);
GridScalar div_grid(const GridField& X, DerivativeScheme scheme = DerivativeScheme::spectral);
/// div(d1 f).
GridScalar laplacian_grid(const GridScalar& f, DerivativeScheme scheme = DerivativeScheme::spectral);

/// Plain L2 quadrature, sum f g * cell volume.
double inner_l2(const GridScalar& f, const GridScalar& g);
double inner_l2(const GridField& X, const GridField& Y);
double norm_l2(const GridScalar& f);
double norm_l2(const GridField& X);

/// H2-type product: values, first and all second derivatives.
double inner0(const GridScalar& f, const GridScalar& g);
/// H1-type product: values and all first derivatives of each component.
double inner1(const GridField& X, const GridField& Y);
double inner2(const GridTwoForm& F, const GridTwoForm& G);
double norm0(const GridScalar& f);
double norm1(const GridField& X);
double norm2(const GridTwoForm& F);

// Lattice files: "GHG1", u32 n, u32 N_a per axis, f64 (lower_a, upper_a) per
// axis, then f64 values row-major for each component in turn. Little-endian.
// The component count follows from the file length.
void write_lattice(const std::filesystem::path& path, const BoxGrid& grid,
                   std::span<const GridScalar> components);
std::vector<GridScalar> read_lattice(const std::filesystem::path& path);

}  // namespace ghg
