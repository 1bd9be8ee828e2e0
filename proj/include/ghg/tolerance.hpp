#pragma once

namespace ghg::tolerance {
inline constexpr double symbolic = 1e-12;      // identities checked on exact derivatives
inline constexpr double numeric = 1e-6;        // anything through differences or quadrature
inline constexpr double nonstrategic = 1e-10;  // max |Du| for the zero-gradient verdict
inline constexpr double potential = 1e-8;      // Monderer-Shapley residual
inline constexpr double closed = 1e-8;         // Jacobian asymmetry allowed for reconstruction
inline constexpr double norm_floor = 1e-30;    // guards 0/0 in normalized residuals
}  // namespace ghg::tolerance
