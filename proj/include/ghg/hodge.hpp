#pragma once

// Helmholtz-Hodge split of a periodic lattice field X = X_P + X_V, with X_P
// curl-free (a gradient plus possibly the constant mode) and X_V
// divergence-free.
//
// Both splits use the same per-mode projection; they differ only in which
// side receives the constant (zero-frequency) mode:
//   to_potential  the constant goes to X_P   (ker d2 contains constants)
//   to_vector     the constant goes to X_V   (im d1 is orthogonal to them)
// Modes whose effective wavenumber is zero (Nyquist-only) cannot be written
// as gradients and are kept in X_V under both policies.

#include <vector>

#include "ghg/grid.hpp"
#include "ghg/tolerance.hpp"

namespace ghg {

enum class ZeroModePolicy { to_potential, to_vector };

struct DecompositionConfig {
  ZeroModePolicy zero_mode_policy = ZeroModePolicy::to_potential;
  /// Used for the diagnostics; the projection itself is always spectral.
  DerivativeScheme scheme = DerivativeScheme::spectral;
  double norm_floor = tolerance::norm_floor;
};

/// All residuals are divided by max(||X||_1, norm_floor) of the input.
struct DecompositionDiagnostics {
  double reconstruction_error = 0;  // ||X - X_P - X_V||_L2
  double curl_residual_P = 0;       // ||d2 X_P||_2
  double div_residual_V = 0;        // ||div X_V||_L2
  double orthogonality_L2 = 0;      // |<X_P, X_V>_L2|, divided by ||X||_1^2
  double orthogonality_H1 = 0;      // |<X_P, X_V>_1|, divided by ||X||_1^2
  double near_vp_residual = 0;      // ||div X + lap div X||_L2 of the input
};

struct DecompositionResult {
  GridScalar phi;  // lattice mean exactly zero; d1 phi = X_P minus its mean
  GridField X_P;
  GridField X_V;
  std::vector<double> harmonic_mean;  // per-component lattice mean of X
  ZeroModePolicy zero_mode_policy;
  DecompositionDiagnostics diagnostics;
};

/// Throws NumericFailure for non-finite input.
DecompositionResult decompose(const GridField& X, const DecompositionConfig& cfg = {});

struct FieldResiduals {
  double curl_residual = 0;
  double div_residual = 0;
  double near_vp_residual = 0;
};

/// Residuals of X normalized by max(||X||_1, norm_floor).
FieldResiduals residuals(const GridField& X, DerivativeScheme scheme = DerivativeScheme::spectral,
                         double norm_floor = tolerance::norm_floor);

struct EpsilonPotentialFit {
  GridScalar phi;
  double residual = 0;         // ||d1 phi - X||_1 / ||X||_1
  double vector_fraction = 0;  // ||X_V||_1 / ||X||_1, equal to residual up to rounding
};

EpsilonPotentialFit epsilon_potential_fit(const GridField& X);

const char* to_string(ZeroModePolicy p);

}  // namespace ghg
