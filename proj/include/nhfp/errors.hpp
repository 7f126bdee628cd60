#pragma once
#include <stdexcept>
#include <string>

namespace nhfp {

/// Base class for all library errors.
struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Bad user-supplied argument or configuration value.
struct invalid_argument : error {
  using error::error;
};

/// Two eigenvalues coincide within the pairing tolerance, so the
/// left/right pairing is ambiguous.
struct degenerate_spectrum_error : error {
  using error::error;
};

/// Left/right eigenvectors are (numerically) self-orthogonal; the
/// biorthogonal normalization diverges.
struct exceptional_point_error : error {
  using error::error;
};

/// The harmonic truncation window is too small for the requested quantity.
struct truncation_error : error {
  using error::error;
};

/// Band continuity tracking lost the band identity at some k.
struct tracking_error : error {
  using error::error;
};

/// A band does not wind cleanly; the winding number is undefined.
struct winding_undefined_error : error {
  double residual;
  winding_undefined_error(const std::string& msg, double res)
      : error(msg), residual(res) {}
};

/// The wave packet reached the lattice boundary; a larger lattice is needed.
struct lattice_too_small_error : error {
  int suggested_cells;
  lattice_too_small_error(const std::string& msg, int suggestion)
      : error(msg), suggested_cells(suggestion) {}
};

}  // namespace nhfp
