#include "spectral.hpp"

#include <numbers>
#include <stdexcept>

#include <fftw3.h>

namespace ghg::detail {

namespace {

class FftBuffer {
 public:
  explicit FftBuffer(std::size_t n)
      : data_(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n))) {
    if (!data_) throw std::bad_alloc();
  }
  ~FftBuffer() { fftw_free(data_); }
  FftBuffer(const FftBuffer&) = delete;
  FftBuffer& operator=(const FftBuffer&) = delete;
  fftw_complex* get() const { return data_; }

 private:
  fftw_complex* data_;
};

class FftPlan {
 public:
  FftPlan(const BoxGrid& grid, fftw_complex* buf, int sign) {
    std::vector<int> dims;
    for (auto n : grid.resolutions()) dims.push_back(static_cast<int>(n));
    plan_ = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(), buf, buf, sign, FFTW_ESTIMATE);
    if (!plan_) throw std::runtime_error("fftw planning failed");
  }
  ~FftPlan() { fftw_destroy_plan(plan_); }
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;
  void execute() const { fftw_execute(plan_); }

 private:
  fftw_plan plan_;
};

}  // namespace

Spectrum forward(const GridScalar& f) {
  const std::size_t n = f.grid.size();
  FftBuffer buf(n);
  FftPlan plan(f.grid, buf.get(), FFTW_FORWARD);
  for (std::size_t i = 0; i < n; ++i) {
    buf.get()[i][0] = f.values[i];
    buf.get()[i][1] = 0.0;
  }
  plan.execute();
  Spectrum s(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = {buf.get()[i][0], buf.get()[i][1]};
  return s;
}

GridScalar inverse(const Spectrum& s, const BoxGrid& grid) {
  const std::size_t n = grid.size();
  if (s.size() != n) throw std::invalid_argument("spectrum size does not match grid");
  FftBuffer buf(n);
  FftPlan plan(grid, buf.get(), FFTW_BACKWARD);
  for (std::size_t i = 0; i < n; ++i) {
    buf.get()[i][0] = s[i].real();
    buf.get()[i][1] = s[i].imag();
  }
  plan.execute();
  std::vector<double> v(n);
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = buf.get()[i][0] * scale;
  return GridScalar(grid, std::move(v));
}

std::vector<double> wavenumbers(const BoxGrid& grid, std::size_t axis) {
  const std::size_t N = grid.resolution(axis);
  const double base = 2.0 * std::numbers::pi / grid.length(axis);
  std::vector<double> kappa(N);
  for (std::size_t j = 0; j < N; ++j) {
    if (j < N / 2)
      kappa[j] = base * static_cast<double>(j);
    else if (j == N / 2)
      kappa[j] = 0.0;
    else
      kappa[j] = -base * static_cast<double>(N - j);
  }
  return kappa;
}

std::vector<std::vector<double>> wavenumber_tables(const BoxGrid& grid) {
  std::vector<std::vector<double>> t;
  for (std::size_t a = 0; a < grid.dimension(); ++a) t.push_back(wavenumbers(grid, a));
  return t;
}

}  // namespace ghg::detail
