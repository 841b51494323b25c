#include "hyperchain/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "hyperchain/graph_analysis.hpp"
#include "hyperchain/network_io.hpp"

namespace hyperchain {

Matrix jacobian(const Matrix& k, const Vector& z) {
  const Vector f = k.transpose() * z;
  const double rho = z.dot(f);
  const Vector sym = (k + k.transpose()) * z;
  Matrix j = z.asDiagonal() * k.transpose();
  j -= z * sym.transpose();
  j.diagonal() += f - Vector::Constant(z.size(), rho);
  return j;
}

Matrix jacobian(const HyperchainSystem& sys, const Vector& z) { return jacobian(sys.K(), z); }

void sort_spectrum(Spectrum& s, double tol) {
  std::sort(s.begin(), s.end(), [](Complex a, Complex b) { return a.real() < b.real(); });
  std::size_t start = 0;
  while (start < s.size()) {
    std::size_t end = start + 1;
    while (end < s.size() &&
           s[end].real() - s[end - 1].real() <= tol * std::max(1.0, std::abs(s[end].real())))
      ++end;
    std::sort(s.begin() + static_cast<std::ptrdiff_t>(start), s.begin() + static_cast<std::ptrdiff_t>(end),
              [](Complex a, Complex b) { return a.imag() < b.imag(); });
    start = end;
  }
}

Spectrum eigenvalues(const Matrix& m) {
  Eigen::EigenSolver<Matrix> es(m, false);
  const Eigen::VectorXcd ev = es.eigenvalues();
  Spectrum s(ev.begin(), ev.end());
  sort_spectrum(s);
  return s;
}

bool spectra_match(const Spectrum& a, const Spectrum& b, double tol) {
  if (a.size() != b.size()) return false;
  const int n = static_cast<int>(a.size());
  std::vector<std::vector<int>> adjacency(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (std::abs(a[i] - b[j]) <= tol) adjacency[i].push_back(j);
  const auto match = maximum_bipartite_matching(n, n, adjacency);
  return std::find(match.begin(), match.end(), -1) == match.end();
}

double sign_tolerance(const Spectrum& s) {
  double radius = 0.0;
  for (Complex c : s) radius = std::max(radius, std::abs(c));
  return kSignTolerance * std::max(1.0, radius);
}

Spectrum rank_one_eigen_update(const Matrix& m, const Vector& u, Complex lambda1, const Vector& v) {
  if (m.rows() != m.cols() || u.size() != m.rows() || v.size() != m.rows())
    throw Error(ErrorCode::DimensionMismatch, "rank-one update dimensions differ");
  const double unorm = u.norm();
  if (unorm == 0.0) throw Error(ErrorCode::NotAnEigenpair, "eigenvector is zero");
  const Eigen::VectorXcd uc = u.cast<Complex>();
  const double defect = (m.cast<Complex>() * uc - lambda1 * uc).norm();
  const double scale = std::max({1.0, std::abs(lambda1), m.cwiseAbs().maxCoeff()});
  if (defect > kLambda1Tolerance * scale * unorm)
    throw Error(ErrorCode::NotAnEigenpair,
                "(lambda1, u) is not an eigenpair: defect " + format_shortest(defect));

  Eigen::EigenSolver<Matrix> es(m, false);
  const Eigen::VectorXcd ev = es.eigenvalues();
  Spectrum s(ev.begin(), ev.end());
  const auto nearest = std::min_element(s.begin(), s.end(), [&](Complex a, Complex b) {
    return std::abs(a - lambda1) < std::abs(b - lambda1);
  });
  *nearest = lambda1 + v.dot(u);
  sort_spectrum(s);
  return s;
}

EquilibriumSpectrum equilibrium_eigenvalues(const Matrix& k, const Vector& z) {
  const Matrix m = z.asDiagonal() * k.transpose();
  const double lambda1 = z.dot(k * z);

  Eigen::EigenSolver<Matrix> es(m, false);
  const Eigen::VectorXcd ev = es.eigenvalues();
  Spectrum all(ev.begin(), ev.end());
  const auto nearest = std::min_element(all.begin(), all.end(), [&](Complex a, Complex b) {
    return std::abs(a - lambda1) < std::abs(b - lambda1);
  });
  if (std::abs(*nearest - lambda1) > kLambda1Tolerance * std::max(1.0, std::abs(lambda1)))
    throw Error(ErrorCode::Lambda1NotFound,
                "z^T K z = " + format_shortest(lambda1) + " is not an eigenvalue of diag(z) K^T");

  EquilibriumSpectrum out;
  out.lambda1 = lambda1;
  all.erase(nearest);
  out.reduced = all;
  sort_spectrum(out.reduced);
  // D g(z) = M + z v^T with v = -(K + K^T) z, and v^T z = -2 lambda1.
  out.eigenvalues = rank_one_eigen_update(m, z, lambda1, -((k + k.transpose()) * z));
  out.cross_check = spectra_match(out.eigenvalues, eigenvalues(jacobian(k, z)),
                                  kCrossCheckTolerance * std::max(1.0, std::abs(lambda1)));
  return out;
}

EquilibriumSpectrum equilibrium_eigenvalues(const HyperchainSystem& sys, const Vector& z) {
  return equilibrium_eigenvalues(sys.K(), z);
}

PropertyP property_p(const Matrix& k) {
  PropertyP p;
  const int n = static_cast<int>(k.rows());
  Eigen::JacobiSVD<Matrix> svd(k);
  const Vector& sigma = svd.singularValues();
  p.invertible = sigma[0] > 0.0 && sigma[n - 1] > kRankTolerance * sigma[0];
  if (!p.invertible) return p;
  const Vector z = k.transpose().fullPivLu().solve(Vector::Ones(n));
  p.positive_solution = z.minCoeff() > 0.0;
  // Scaling z by a positive constant leaves the signs alone; normalizing keeps
  // the tolerance identical to the one used at the simplex equilibrium.
  const Vector x = z.sum() > 0.0 ? Vector(z / z.sum()) : z;
  const Spectrum s = eigenvalues(x.asDiagonal() * k.transpose());
  const double tol = sign_tolerance(s);
  const auto negative = std::count_if(s.begin(), s.end(), [&](Complex c) { return c.real() < -tol; });
  p.eigen_condition = negative == n - 1;
  return p;
}

namespace {

void require_positive_equilibrium(const Matrix& k, const Vector& z) {
  if (z.size() != k.rows()) throw Error(ErrorCode::DimensionMismatch, "point has the wrong dimension");
  if (!(z.minCoeff() > 0.0))
    throw Error(ErrorCode::NotAnEquilibrium, "point is not strictly positive");
  if (std::abs(z.sum() - 1.0) > 1e-9)
    throw Error(ErrorCode::NotAnEquilibrium, "point is not on the simplex");
  const double tol = kResidualTolerance * std::max(1.0, k.cwiseAbs().maxCoeff());
  if (equilibrium_residual(k, z) > tol)
    throw Error(ErrorCode::NotAnEquilibrium,
                "residual " + format_shortest(equilibrium_residual(k, z)) + " exceeds tolerance");
}

}  // namespace

StabilityReport classify_positive_stability(const Matrix& k, const Vector& z) {
  require_positive_equilibrium(k, z);
  const EquilibriumSpectrum spec = equilibrium_eigenvalues(k, z);

  StabilityReport r;
  r.jacobian = jacobian(k, z);
  r.eigenvalues = spec.eigenvalues;
  r.cross_check = spec.cross_check;
  Spectrum m_spectrum = spec.reduced;
  m_spectrum.push_back(spec.lambda1);
  r.tolerance = sign_tolerance(m_spectrum);
  r.negative_count = static_cast<int>(std::count_if(
      spec.reduced.begin(), spec.reduced.end(), [&](Complex c) { return c.real() < -r.tolerance; }));
  r.property_p = property_p(k);

  const bool any_positive = std::any_of(spec.reduced.begin(), spec.reduced.end(),
                                        [&](Complex c) { return c.real() > r.tolerance; });
  const int n = static_cast<int>(z.size());
  if (any_positive)
    r.classification = StabilityClass::Unstable;
  else if (r.negative_count == n - 1 && r.property_p->invertible)
    r.classification = StabilityClass::LinearlyStable;
  else
    r.classification = StabilityClass::Marginal;
  return r;
}

StabilityReport classify_positive_stability(const HyperchainSystem& sys, const Vector& z) {
  return classify_positive_stability(sys.K(), z);
}

StabilityReport boundary_stability(const HyperchainSystem& sys, const BoundaryEquilibrium& beq) {
  const Matrix& k = sys.K();
  const Vector& z = beq.point;
  const Vector f = k.transpose() * z;
  const double rho = z.dot(f);

  StabilityReport r;
  r.jacobian = jacobian(k, z);
  r.eigenvalues = eigenvalues(r.jacobian);
  r.tolerance = sign_tolerance(r.eigenvalues);
  double max_transverse = -std::numeric_limits<double>::infinity();
  for (int i : beq.face) {
    r.transverse_eigenvalues.emplace_back(f[i] - rho, 0.0);
    max_transverse = std::max(max_transverse, f[i] - rho);
  }

  const int m = static_cast<int>(beq.support.size());
  Matrix local(m, m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) local(a, b) = k(beq.support[a], beq.support[b]);
  const Vector& zhat = *beq.induced.point;

  Spectrum induced_spectrum;
  if (m == 1) {
    // A single species has no directions inside its face.
    induced_spectrum = eigenvalues(jacobian(local, zhat));
    r.induced_classification = StabilityClass::LinearlyStable;
  } else {
    const StabilityReport inner = classify_positive_stability(local, zhat);
    induced_spectrum = inner.eigenvalues;
    r.induced_classification = inner.classification;
  }

  Spectrum combined = r.transverse_eigenvalues;
  combined.insert(combined.end(), induced_spectrum.begin(), induced_spectrum.end());
  r.cross_check = spectra_match(combined, r.eigenvalues,
                                1e-8 * std::max(1.0, sign_tolerance(r.eigenvalues) / kSignTolerance));

  if (*r.induced_classification == StabilityClass::Unstable || max_transverse > r.tolerance)
    r.classification = StabilityClass::Unstable;
  else if (*r.induced_classification == StabilityClass::LinearlyStable && max_transverse < -r.tolerance)
    r.classification = StabilityClass::ExponentiallyStable;
  else
    r.classification = StabilityClass::Marginal;
  return r;
}

std::string_view to_string(StabilityClass c) {
  switch (c) {
    case StabilityClass::LinearlyStable: return "LinearlyStable";
    case StabilityClass::ExponentiallyStable: return "ExponentiallyStable";
    case StabilityClass::Unstable: return "Unstable";
    case StabilityClass::Marginal: return "Marginal";
  }
  return "Unknown";
}

nlohmann::json spectrum_to_json(const Spectrum& s) {
  nlohmann::json out = nlohmann::json::array();
  for (Complex c : s) {
    const double scale = std::max(1.0, std::abs(c));
    const double re = std::abs(c.real()) <= 1e-13 * scale ? 0.0 : c.real();
    const double im = std::abs(c.imag()) <= 1e-13 * scale ? 0.0 : c.imag();
    out.push_back({round_significant(re, 12), round_significant(im, 12)});
  }
  return out;
}

nlohmann::json to_json(const PropertyP& p) {
  return {{"invertible", p.invertible},
          {"positive_solution", p.positive_solution},
          {"eigen_condition", p.eigen_condition},
          {"holds", p.holds()}};
}

nlohmann::json to_json(const StabilityReport& r) {
  nlohmann::json j = {{"classification", to_string(r.classification)},
                      {"eigenvalues", spectrum_to_json(r.eigenvalues)},
                      {"negative_count", r.negative_count},
                      {"cross_check", r.cross_check},
                      {"tolerance", r.tolerance}};
  if (!r.transverse_eigenvalues.empty())
    j["transverse_eigenvalues"] = spectrum_to_json(r.transverse_eigenvalues);
  if (r.property_p) j["property_p"] = to_json(*r.property_p);
  if (r.induced_classification) j["induced_classification"] = to_string(*r.induced_classification);
  return j;
}

}  // namespace hyperchain
