#pragma once

namespace qre {

/// Global numeric tolerances. The defaults are what the rest of the library
/// assumes; override fields on numeric_config() before constructing objects
/// if a different working precision is needed.
struct NumericConfig {
  /// Allowed deviation from exact Hermitian symmetry after construction.
  double hermiticity_tol = 1e-12;
  /// Allowed imaginary residue in tr(AB), relative to 1 + |A|_F |B|_F.
  double inner_imag_tol = 1e-10;
  /// Smallest eigenvalue herm_log accepts by default.
  double log_floor = 1e-12;
  /// Default slack when testing positive semidefiniteness.
  double psd_tol = 1e-9;
};

NumericConfig& numeric_config();

}  // namespace qre
