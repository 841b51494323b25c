#pragma once

// Linear stability of equilibria of the relative system. At a positive
// equilibrium z the Jacobian is a rank-one update of diag(z) K^T, so its
// spectrum is that of diag(z) K^T with z^T K z replaced by -z^T K z; the
// direct eigensolve of the Jacobian is kept alongside as a cross-check.

#include <complex>
#include <optional>
#include <vector>

#include <json.hpp>

#include "hyperchain/equilibria.hpp"
#include "hyperchain/graph.hpp"

namespace hyperchain {

using Complex = std::complex<double>;
using Spectrum = std::vector<Complex>;

enum class StabilityClass { LinearlyStable, ExponentiallyStable, Unstable, Marginal };

struct PropertyP {
  bool invertible = false;
  bool positive_solution = false;  // (K^T)^{-1} 1 > 0
  bool eigen_condition = false;    // n-1 eigenvalues of diag((K^T)^{-1} 1) K^T with Re < 0
  bool holds() const { return invertible && positive_solution && eigen_condition; }
};

struct StabilityReport {
  Matrix jacobian;
  Spectrum eigenvalues;             // full spectrum, sorted
  Spectrum transverse_eigenvalues;  // boundary only, one per i in I (in order of I)
  StabilityClass classification = StabilityClass::Marginal;
  /// Positive case: count of eigenvalues of diag(z) K^T with Re < -tol.
  int negative_count = 0;
  std::optional<PropertyP> property_p;
  /// Theorem-route and direct-route spectra agree within tolerance.
  bool cross_check = false;
  double tolerance = 0.0;
  /// Boundary only: classification of the induced system at its positive equilibrium.
  std::optional<StabilityClass> induced_classification;
};

inline constexpr double kSignTolerance = 1e-9;   // scaled by max(1, spectral radius)
inline constexpr double kLambda1Tolerance = 1e-8;
inline constexpr double kCrossCheckTolerance = 1e-6;

/// diag(K^T z - (z^T K z) 1) + diag(z) K^T - z z^T (K + K^T), valid at any z.
Matrix jacobian(const Matrix& k, const Vector& z);
Matrix jacobian(const HyperchainSystem& sys, const Vector& z);

/// Spectrum of m + u v^T, given that (lambda1, u) is an eigenpair of m:
/// the eigenvalue of m nearest lambda1 is replaced by lambda1 + v^T u.
/// Throws NotAnEigenpair when |m u - lambda1 u| exceeds the tolerance.
Spectrum rank_one_eigen_update(const Matrix& m, const Vector& u, Complex lambda1, const Vector& v);

struct EquilibriumSpectrum {
  Spectrum eigenvalues;  // theorem route, sorted
  Spectrum reduced;      // eigenvalues of diag(z) K^T other than lambda1, sorted
  double lambda1 = 0.0;  // z^T K z
  bool cross_check = false;
};

/// Throws Lambda1NotFound when z^T K z is not an eigenvalue of diag(z) K^T.
EquilibriumSpectrum equilibrium_eigenvalues(const Matrix& k, const Vector& z);
EquilibriumSpectrum equilibrium_eigenvalues(const HyperchainSystem& sys, const Vector& z);

PropertyP property_p(const Matrix& k);

/// Throws NotAnEquilibrium unless z is a positive equilibrium.
StabilityReport classify_positive_stability(const Matrix& k, const Vector& z);
StabilityReport classify_positive_stability(const HyperchainSystem& sys, const Vector& z);

StabilityReport boundary_stability(const HyperchainSystem& sys, const BoundaryEquilibrium& beq);

/// Sort by real part, then imaginary part; real parts within `tol` of each
/// other count as equal so conjugate pairs stay together.
void sort_spectrum(Spectrum& s, double tol = 1e-9);

/// Multiset equality within `tol`: a perfect matching exists between the two
/// lists pairing only values at distance <= tol.
bool spectra_match(const Spectrum& a, const Spectrum& b, double tol);

/// Dense eigenvalues, sorted.
Spectrum eigenvalues(const Matrix& m);

double sign_tolerance(const Spectrum& s);

std::string_view to_string(StabilityClass c);
nlohmann::json spectrum_to_json(const Spectrum& s);
nlohmann::json to_json(const StabilityReport& report);
nlohmann::json to_json(const PropertyP& p);

}  // namespace hyperchain
