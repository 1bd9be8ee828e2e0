#include "ghg/sampling.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace ghg {

Box Box::cube(std::size_t n, double lo, double hi) {
  return {std::vector<double>(n, lo), std::vector<double>(n, hi)};
}

void Box::validate() const {
  if (lower.size() != upper.size() || lower.empty())
    throw std::invalid_argument("box bounds must be nonempty and of equal length");
  for (std::size_t a = 0; a < lower.size(); ++a)
    if (!(upper[a] > lower[a]) || !std::isfinite(lower[a]) || !std::isfinite(upper[a]))
      throw std::invalid_argument("box requires finite upper > lower on every axis");
}

namespace {

std::vector<unsigned> first_primes(std::size_t count) {
  std::vector<unsigned> primes;
  for (unsigned p = 2; primes.size() < count; ++p) {
    bool prime = true;
    for (unsigned q : primes) {
      if (q * q > p) break;
      if (p % q == 0) {
        prime = false;
        break;
      }
    }
    if (prime) primes.push_back(p);
  }
  return primes;
}

double radical_inverse(std::uint64_t i, unsigned base) {
  double inv = 1.0 / base, f = inv, r = 0.0;
  while (i > 0) {
    r += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return r;
}

}  // namespace

std::vector<Eigen::VectorXd> sample_points(const SamplerConfig& cfg) {
  cfg.box.validate();
  const std::size_t n = cfg.box.dimension();
  const auto primes = first_primes(n);
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> shift(n);
  for (auto& s : shift) s = unit(rng);

  std::vector<Eigen::VectorXd> points;
  points.reserve(cfg.count);
  for (std::size_t i = 1; i <= cfg.count; ++i) {
    Eigen::VectorXd p(static_cast<Eigen::Index>(n));
    for (std::size_t a = 0; a < n; ++a) {
      double u = radical_inverse(i, primes[a]) + shift[a];
      u -= std::floor(u);
      p[static_cast<Eigen::Index>(a)] = cfg.box.lower[a] + u * (cfg.box.upper[a] - cfg.box.lower[a]);
    }
    points.push_back(std::move(p));
  }
  return points;
}

}  // namespace ghg
