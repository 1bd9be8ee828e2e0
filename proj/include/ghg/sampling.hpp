#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace ghg {

/// Axis-aligned box in R^n.
struct Box {
  std::vector<double> lower;
  std::vector<double> upper;

  static Box cube(std::size_t n, double lo, double hi);
  std::size_t dimension() const { return lower.size(); }
  void validate() const;
};

/// Deterministic low-discrepancy sampling: a Halton sequence with a
/// Cranley-Patterson rotation drawn from `seed`.
struct SamplerConfig {
  Box box;
  std::size_t count = 256;
  std::uint64_t seed = 0;

  static SamplerConfig standard(std::size_t n) { return {Box::cube(n, -2.0, 2.0), 256, 0}; }
};

std::vector<Eigen::VectorXd> sample_points(const SamplerConfig& cfg);

}  // namespace ghg
