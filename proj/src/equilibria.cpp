#include "hyperchain/equilibria.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hyperchain/network_io.hpp"
#include "simplex_lp.hpp"

namespace hyperchain {

Vector replicator_field(const Matrix& k, const Vector& x) {
  const Vector f = k.transpose() * x;
  const double rho = x.dot(f);
  return x.cwiseProduct(f - Vector::Constant(x.size(), rho));
}

double equilibrium_residual(const Matrix& k, const Vector& x) {
  const Vector f = k.transpose() * x;
  return (f - Vector::Constant(x.size(), x.dot(f))).cwiseAbs().maxCoeff();
}

namespace {

std::string near_degenerate_warning(double depth) {
  return "NearDegenerate: smallest coordinate " + format_shortest(depth) +
         " is within the positivity tolerance";
}

// Vertices of {c : x0 + B c >= 0} by solving every d-subset of active rows.
std::vector<Eigen::VectorXd> polytope_vertices(const Vector& x0, const Matrix& b) {
  const int n = static_cast<int>(b.rows()), d = static_cast<int>(b.cols());
  std::vector<Eigen::VectorXd> out;
  std::vector<int> rows(d);
  std::iota(rows.begin(), rows.end(), 0);
  while (true) {
    Matrix a(d, d);
    Vector rhs(d);
    for (int r = 0; r < d; ++r) {
      a.row(r) = b.row(rows[r]);
      rhs[r] = -x0[rows[r]];
    }
    Eigen::FullPivLU<Matrix> lu(a);
    lu.setThreshold(1e-10);
    if (lu.rank() == d) {
      const Vector c = lu.solve(rhs);
      if ((x0 + b * c).minCoeff() >= -1e-10) {
        const bool dup = std::any_of(out.begin(), out.end(),
                                     [&](const Vector& v) { return (v - c).norm() < 1e-9; });
        if (!dup) out.push_back(c);
      }
    }
    int i = d - 1;
    while (i >= 0 && rows[i] == n - d + i) --i;
    if (i < 0) break;
    ++rows[i];
    for (int j = i + 1; j < d; ++j) rows[j] = rows[j - 1] + 1;
  }
  std::sort(out.begin(), out.end(), [](const Vector& l, const Vector& r) {
    return std::lexicographical_compare(l.begin(), l.end(), r.begin(), r.end());
  });
  return out;
}

// Positive points of span(W) intersected with {sum x = 1}; `w` has orthonormal columns.
void classify_subspace(const Matrix& k, const Matrix& w, EquilibriumSet& out) {
  const int n = static_cast<int>(w.rows());
  const Vector a = w.transpose() * Vector::Ones(n);
  if (a.norm() < 1e-12) return;  // the subspace never meets the simplex plane
  const Vector x0 = w * a / a.squaredNorm();
  const int d = static_cast<int>(w.cols()) - 1;

  if (d == 0) {
    const double depth = x0.minCoeff();
    if (depth > kPositivityTolerance) {
      out.kind = EquilibriumKind::Unique;
      out.point = x0;
      out.residual = equilibrium_residual(k, x0);
    } else if (depth > -kPositivityTolerance) {
      out.warnings.push_back(near_degenerate_warning(depth));
    }
    return;
  }

  // Directions inside the subspace that keep the coordinate sum fixed.
  Eigen::HouseholderQR<Matrix> qr(a);
  const Matrix complement = Matrix(qr.householderQ()).rightCols(d);
  const Matrix basis = w * complement;

  // max t subject to x0 + B c >= t, written with c = p - q and t = t0 + s.
  const double t0 = x0.minCoeff() - 1.0;
  Matrix lp(n + 1, 2 * d + 1);
  lp.setZero();
  lp.topLeftCorner(n, d) = -basis;
  lp.block(0, d, n, d) = basis;
  lp.col(2 * d).head(n).setOnes();
  lp(n, 2 * d) = 1.0;
  Vector rhs(n + 1);
  rhs.head(n) = x0 - Vector::Constant(n, t0);
  rhs[n] = 2.0 - t0;
  Vector obj = Vector::Zero(2 * d + 1);
  obj[2 * d] = 1.0;
  const detail::LpResult sol = detail::maximize_from_origin(lp, rhs, obj);
  if (!sol.optimal) {
    out.warnings.push_back("LinearProgramFailed: continuum depth could not be determined");
    return;
  }
  const double depth = t0 + sol.y[2 * d];
  if (depth <= kPositivityTolerance) {
    if (depth > -kPositivityTolerance) out.warnings.push_back(near_degenerate_warning(depth));
    return;
  }

  ContinuumSet cs;
  cs.depth = depth;
  Vector c_base = sol.y.head(d) - sol.y.segment(d, d);
  if (d <= kVertexReportDimension) {
    std::vector<Eigen::VectorXd> vs = polytope_vertices(x0, basis);
    if (!vs.empty()) {
      c_base.setZero();
      for (const Vector& v : vs) c_base += v;
      c_base /= static_cast<double>(vs.size());
    }
    for (const Vector& v : vs) cs.vertices.push_back(x0 + basis * v);
    if (d == 1 && vs.size() == 2) cs.interval = std::pair{vs[0][0] - c_base[0], vs[1][0] - c_base[0]};
  }
  cs.base = x0 + basis * c_base;
  cs.basis = basis;

  double residual = equilibrium_residual(k, cs.base);
  for (const Vector& v : cs.vertices) residual = std::max(residual, equilibrium_residual(k, v));
  out.kind = EquilibriumKind::Continuum;
  out.point = cs.base;
  out.residual = residual;
  out.continuum = std::move(cs);
}

}  // namespace

EquilibriumSet positive_equilibria(const Matrix& k) {
  if (k.rows() != k.cols() || k.rows() == 0)
    throw Error(ErrorCode::DimensionMismatch, "rate matrix must be square and nonempty");
  const int n = static_cast<int>(k.rows());
  EquilibriumSet out;

  if (n == 1) {
    // x = 1 is always fixed: the relative system on one species is trivial.
    out.kind = EquilibriumKind::Unique;
    out.point = Vector::Ones(1);
    out.rank = k(0, 0) > 0.0 ? 1 : 0;
    out.invertible = out.rank == 1;
    out.residual = 0.0;
    return out;
  }

  if (k.cwiseAbs().maxCoeff() == 0.0) {
    // No reactions at all: every point of the simplex is fixed.
    out.rank = 0;
    classify_subspace(k, Matrix::Identity(n, n), out);
    out.warnings.push_back("NoReactions: every point of the simplex is an equilibrium");
    return out;
  }

  const Matrix kt = k.transpose();
  Eigen::JacobiSVD<Matrix> svd(kt, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vector& sigma = svd.singularValues();
  const double cutoff = kRankTolerance * sigma[0];
  int rank = 0;
  while (rank < n && sigma[rank] > cutoff) ++rank;
  out.rank = rank;
  out.invertible = rank == n;

  // Minimum-norm solution of K^T z = 1, restricted to the numerical range.
  const Vector ut1 = svd.matrixU().transpose() * Vector::Ones(n);
  Vector z = Vector::Zero(n);
  for (int i = 0; i < rank; ++i) z += svd.matrixV().col(i) * (ut1[i] / sigma[i]);
  const double solve_residual = (kt * z - Vector::Ones(n)).cwiseAbs().maxCoeff();
  const double scale = std::max(1.0, kt.cwiseAbs().rowwise().sum().maxCoeff() * z.cwiseAbs().maxCoeff());
  if (solve_residual > 1e-9 * scale) {
    // No z with K^T z = 1; then K^T x = c 1 forces c = 0, impossible for x > 0
    // once any reaction is present.
    return out;
  }

  Matrix w(n, 1 + n - rank);
  w.col(0) = z.normalized();
  w.rightCols(n - rank) = svd.matrixV().rightCols(n - rank);
  classify_subspace(k, w, out);
  return out;
}

EquilibriumSet positive_equilibria(const HyperchainSystem& sys) { return positive_equilibria(sys.K()); }

RateMatrix construct_existence_rates(const Hyperchain& h) {
  const int n = h.size();
  Matrix k = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    if (h.indegree(i) == 0)
      throw Error(ErrorCode::RootedGraph,
                  "vertex " + std::to_string(i + 1) + " is an initial node (indegree 0)");
    for (int j : h.in_neighbors(i)) k(j, i) = 1.0 / h.indegree(i);
  }
  const Vector uniform = Vector::Constant(n, 1.0 / n);
  if (equilibrium_residual(k, uniform) > kResidualTolerance)
    throw Error(ErrorCode::NotAnEquilibrium, "uniform point failed the residual check");
  return RateMatrix(std::move(k));
}

RateMatrix construct_uniqueness_rates(const Hyperchain& h, double epsilon,
                                      const std::optional<LinearSubgraph>& subgraph) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon))
    throw Error(ErrorCode::InvalidArgument, "epsilon must be positive");
  std::optional<LinearSubgraph> d = subgraph ? subgraph : find_spanning_linear_subgraph(h);
  if (!d) throw Error(ErrorCode::NoSpanningLinearSubgraph, "graph has no spanning linear subgraph");
  if (static_cast<int>(d->successor.size()) != h.size())
    throw Error(ErrorCode::NotASubgraph, "linear subgraph has a different species count");
  Matrix k = h.adjacency() * epsilon;
  for (const Edge& e : d->edges()) {
    if (!h.has_edge(e.tail, e.head))
      throw Error(ErrorCode::NotASubgraph, "edge (" + std::to_string(e.tail + 1) + "," +
                                               std::to_string(e.head + 1) + ") is not in the graph");
    k(e.tail, e.head) = 1.0;
  }
  return RateMatrix(std::move(k));
}

Vector BoundaryEquilibrium::embed(const Vector& local) const {
  Vector x = Vector::Zero(static_cast<Eigen::Index>(face.size() + support.size()));
  for (std::size_t i = 0; i < support.size(); ++i) x[support[i]] = local[static_cast<Eigen::Index>(i)];
  return x;
}

std::vector<BoundaryEquilibrium> boundary_equilibria(const HyperchainSystem& sys) {
  const int n = sys.size();
  if (n > kBoundaryEnumerationBound)
    throw Error(ErrorCode::TooLarge, "boundary enumeration over " + std::to_string(n) +
                                         " species exceeds bound " +
                                         std::to_string(kBoundaryEnumerationBound));
  std::vector<BoundaryEquilibrium> out;
  const unsigned full = (1u << n) - 1u;
  for (unsigned mask = 1; mask < full; ++mask) {
    BoundaryEquilibrium beq;
    for (int i = 0; i < n; ++i) ((mask >> i) & 1u ? beq.face : beq.support).push_back(i);
    Matrix local(beq.support.size(), beq.support.size());
    for (std::size_t a = 0; a < beq.support.size(); ++a)
      for (std::size_t b = 0; b < beq.support.size(); ++b)
        local(a, b) = sys.K()(beq.support[a], beq.support[b]);
    beq.induced = positive_equilibria(local);
    if (beq.induced.kind == EquilibriumKind::Empty) continue;
    beq.point = beq.embed(*beq.induced.point);
    out.push_back(std::move(beq));
  }
  std::sort(out.begin(), out.end(), [](const BoundaryEquilibrium& l, const BoundaryEquilibrium& r) {
    return l.face < r.face;
  });
  return out;
}

std::string_view to_string(EquilibriumKind kind) {
  switch (kind) {
    case EquilibriumKind::Empty: return "Empty";
    case EquilibriumKind::Unique: return "Unique";
    case EquilibriumKind::Continuum: return "Continuum";
  }
  return "Unknown";
}

nlohmann::json vector_to_json(const Vector& v, int digits) {
  nlohmann::json out = nlohmann::json::array();
  for (double x : v) out.push_back(round_significant(x, digits));
  return out;
}

namespace {

nlohmann::json matrix_columns_to_json(const Matrix& m) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    // Basis directions carry orthogonalization noise; drop it relative to the column.
    Vector col = m.col(j);
    const double cut = 1e-13 * col.cwiseAbs().maxCoeff();
    for (double& x : col)
      if (std::abs(x) <= cut) x = 0.0;
    out.push_back(vector_to_json(col));
  }
  return out;
}

nlohmann::json one_based(const std::vector<int>& vs) {
  nlohmann::json out = nlohmann::json::array();
  for (int v : vs) out.push_back(v + 1);
  return out;
}

}  // namespace

nlohmann::json to_json(const EquilibriumSet& set) {
  nlohmann::json j = {{"classification", to_string(set.kind)},
                      {"rank", set.rank},
                      {"invertible", set.invertible},
                      {"residual", set.residual},
                      {"warnings", set.warnings}};
  j["point"] = set.point ? vector_to_json(*set.point) : nlohmann::json(nullptr);
  if (set.continuum) {
    const ContinuumSet& cs = *set.continuum;
    nlohmann::json c = {{"dimension", cs.dimension()},
                        {"base", vector_to_json(cs.base)},
                        {"basis", matrix_columns_to_json(cs.basis)},
                        {"depth", round_significant(cs.depth, 12)},
                        {"closure_note",
                         "closure meets the simplex boundary; only points with all coordinates "
                         "positive are positive equilibria"}};
    nlohmann::json vertices = nlohmann::json::array();
    for (const Vector& v : cs.vertices) vertices.push_back(vector_to_json(v));
    c["vertices"] = std::move(vertices);
    if (cs.interval)
      c["interval"] = {round_significant(cs.interval->first, 12),
                       round_significant(cs.interval->second, 12)};
    j["continuum"] = std::move(c);
  }
  return j;
}

nlohmann::json to_json(const BoundaryEquilibrium& beq) {
  return {{"face", one_based(beq.face)},
          {"support", one_based(beq.support)},
          {"point", vector_to_json(beq.point)},
          {"induced", to_json(beq.induced)}};
}

}  // namespace hyperchain
