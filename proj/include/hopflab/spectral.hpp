#pragma once

// Eigen-structure of shape operators, the pointwise algebraic identities for
// Hopf hypersurfaces, the eta-umbilical classifier and curvature cross-checks.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "hopflab/ambient.hpp"
#include "hopflab/catalog.hpp"
#include "hopflab/engine.hpp"

namespace hopflab {

struct Cluster {
  double value = 0.0;
  int algebraic = 0;
  int geometric = 0;
};

struct ComplexCluster {
  Complex value;
  int algebraic = 0;
};

struct SpectralSummary {
  std::vector<Cluster> clusters;  // sorted by value
  std::vector<ComplexCluster> complex_clusters;
  bool diagonalizable = true;
  double cluster_tol = 0.0;
  int dimension = 0;

  /// Cluster whose value is within `tol` of v, if any.
  const Cluster* find(double v, double tol) const {
    for (const auto& c : clusters)
      if (std::abs(c.value - v) <= tol) return &c;
    return nullptr;
  }
};

namespace detail {

// Single-linkage grouping of points in the complex plane.
inline std::vector<std::vector<int>> link_groups(const std::vector<Complex>& pts, const std::vector<int>& idx,
                                                 double radius) {
  std::vector<int> label(idx.size(), -1);
  int next = 0;
  for (std::size_t s = 0; s < idx.size(); ++s) {
    if (label[s] >= 0) continue;
    label[s] = next;
    std::vector<std::size_t> stack{s};
    while (!stack.empty()) {
      const std::size_t a = stack.back();
      stack.pop_back();
      for (std::size_t b = 0; b < idx.size(); ++b)
        if (label[b] < 0 && std::abs(pts[idx[a]] - pts[idx[b]]) <= radius) {
          label[b] = next;
          stack.push_back(b);
        }
    }
    ++next;
  }
  std::vector<std::vector<int>> groups(next);
  for (std::size_t s = 0; s < idx.size(); ++s) groups[label[s]].push_back(idx[s]);
  return groups;
}

inline int numerical_nullity(const RealMatrix& M, double rel_tol) {
  Eigen::JacobiSVD<RealMatrix> svd(M);
  const auto& s = svd.singularValues();
  const double scale = std::max(1.0, s.size() ? s[0] : 0.0);
  int null = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s[i] <= rel_tol * scale) ++null;
  return static_cast<int>(M.cols()) - static_cast<int>(s.size()) + null;
}

struct EigenResult {
  Eigen::VectorXcd values;
  Eigen::MatrixXcd vectors;  // empty unless requested
};

// The real QR iteration occasionally stalls on nearly diagonal input with
// denormal-sized entries; fall back to the complex solver, then to a copy with
// roundoff-level entries zeroed.
inline EigenResult eigen_decompose(const RealMatrix& A, bool vectors) {
  Eigen::EigenSolver<RealMatrix> es(A, vectors);
  if (es.info() == Eigen::Success) return {es.eigenvalues(), vectors ? es.eigenvectors() : Eigen::MatrixXcd()};
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> ces(A.cast<Complex>(), vectors);
  if (ces.info() == Eigen::Success) return {ces.eigenvalues(), vectors ? ces.eigenvectors() : Eigen::MatrixXcd()};
  const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
  const RealMatrix C = (A.array().abs() < 1e-15 * scale).select(0.0, A);
  Eigen::EigenSolver<RealMatrix> es2(C, vectors);
  if (es2.info() == Eigen::Success) return {es2.eigenvalues(), vectors ? es2.eigenvectors() : Eigen::MatrixXcd()};
  throw NumericFailure("eigen decomposition did not converge");
}

// Eigenvalues of a defective block of size k scatter by ~eps^(1/k) around the
// true value, so nearby eigenvalues are merged when (A - cI)^k has nullity k.
inline constexpr double kJordanRadius = 1e-3;
inline constexpr double kJordanNullTol = 1e-10;

}  // namespace detail

inline SpectralSummary spectral_summary(const RealMatrix& A, const TolerancePolicy& tol = {}) {
  if (A.rows() != A.cols()) throw DimensionMismatch("spectral_summary: matrix must be square");
  const int dim = static_cast<int>(A.rows());
  SpectralSummary out;
  out.cluster_tol = tol.eig_cluster_tol;
  out.dimension = dim;
  if (dim == 0) return out;

  const Eigen::VectorXcd vals = detail::eigen_decompose(A, false).values;
  std::vector<Complex> ev(vals.data(), vals.data() + dim);
  std::vector<int> all(dim);
  std::iota(all.begin(), all.end(), 0);

  struct Group {
    Complex value;
    int size;
  };
  std::vector<Group> groups;
  const double loose = std::max(detail::kJordanRadius, tol.eig_cluster_tol);
  for (const auto& g : detail::link_groups(ev, all, loose)) {
    auto mean = [&](const std::vector<int>& ids) {
      Complex m{0.0, 0.0};
      for (int i : ids) m += ev[i];
      return m / static_cast<double>(ids.size());
    };
    const auto tight = detail::link_groups(ev, g, tol.eig_cluster_tol);
    const int k = static_cast<int>(g.size());
    const Complex c = mean(g);
    bool merge = tight.size() == 1;
    if (!merge && std::abs(c.imag()) <= tol.eig_cluster_tol) {
      RealMatrix P = RealMatrix::Identity(dim, dim);
      const RealMatrix B = A - c.real() * RealMatrix::Identity(dim, dim);
      for (int i = 0; i < k; ++i) P = P * B;
      merge = detail::numerical_nullity(P, detail::kJordanNullTol) >= k;
    }
    if (merge)
      groups.push_back({c, k});
    else
      for (const auto& t : tight) groups.push_back({mean(t), static_cast<int>(t.size())});
  }

  for (const auto& g : groups) {
    if (std::abs(g.value.imag()) > tol.eig_cluster_tol) {
      out.complex_clusters.push_back({g.value, g.size});
      continue;
    }
    const double lambda = g.value.real();
    const RealMatrix B = A - lambda * RealMatrix::Identity(dim, dim);
    Eigen::JacobiSVD<RealMatrix> svd(B);
    const auto& s = svd.singularValues();
    const double scale = std::max(1.0, s[0]);
    int rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
      if (s[i] > tol.rank_tol * scale) ++rank;
    const int geo = std::min(g.size, dim - rank);
    out.clusters.push_back({lambda, g.size, geo});
    if (geo < g.size) out.diagonalizable = false;
  }
  if (!out.complex_clusters.empty()) out.diagonalizable = false;
  std::sort(out.clusters.begin(), out.clusters.end(),
            [](const Cluster& a, const Cluster& b) { return a.value < b.value; });
  std::sort(out.complex_clusters.begin(), out.complex_clusters.end(), [](const auto& a, const auto& b) {
    return a.value.real() != b.value.real() ? a.value.real() < b.value.real() : a.value.imag() < b.value.imag();
  });
  return out;
}

// ---------------------------------------------------------------------------
// Hopf data and the principal-curvature algebra

struct HopfData {
  double mu = 0.0;
  double residual = 0.0;
};

/// mu = eps g(A xi, xi) and |A xi - mu xi| in frame coordinates (xi is frame vector 0).
inline HopfData hopf_data(const WeingartenData& w) {
  if (w.matrix.rows() == 0) throw PreconditionError("hopf_data: empty operator");
  const RealMatrix GA = w.frame.gram * w.matrix;
  HopfData h;
  h.mu = w.epsilon * GA(0, 0);
  RealVector col = w.matrix.col(0);
  col[0] -= h.mu;
  h.residual = col.norm();
  return h;
}

/// (lambda mu + 2 eps) / (2 lambda - mu).
inline double hat_lambda(double lambda, double mu, int epsilon, double tol = 1e-12) {
  if (std::abs(2.0 * lambda - mu) <= tol)
    throw ExceptionalCase("hat_lambda: mu = 2 lambda; this branch forces eps = -1 and lambda^2 = 1");
  return (lambda * mu + 2.0 * epsilon) / (2.0 * lambda - mu);
}

/// Roots of lambda^2 - mu lambda - eps = 0.
inline std::vector<double> lambda_from_mu(double mu, int epsilon) {
  const double disc = mu * mu + 4.0 * epsilon;
  if (disc < 0.0) return {};
  if (disc == 0.0) return {mu / 2.0};
  const double r = std::sqrt(disc);
  return {(mu - r) / 2.0, (mu + r) / 2.0};
}

namespace detail {

struct RealEigenpair {
  double value;
  RealVector vector;  // full-frame coordinates, unit Euclidean norm
};

// Real eigenpairs of the block of M acting on frame vectors 1..k-1.
inline std::vector<RealEigenpair> dee_eigenpairs(const RealMatrix& M) {
  const Eigen::Index k = M.rows();
  std::vector<RealEigenpair> out;
  if (k < 2) return out;
  const auto es = eigen_decompose(M.bottomRightCorner(k - 1, k - 1), true);
  for (Eigen::Index i = 0; i < k - 1; ++i) {
    if (std::abs(es.values[i].imag()) > 1e-9) continue;
    // a real eigenvector times an arbitrary phase: take the larger of Re, Im
    const RealVector re = es.vectors.col(i).real(), im = es.vectors.col(i).imag();
    RealVector v = RealVector::Zero(k);
    v.tail(k - 1) = re.norm() >= im.norm() ? re : im;
    v /= v.norm();
    out.push_back({es.values[i].real(), v});
  }
  return out;
}

}  // namespace detail

/// max over eigenpairs (lambda, X), X in D, of
/// |(2 lambda - mu) A phi X - (lambda mu + 2 eps) phi X| / max(1, |phi X|).
inline double lemma_aphix_residual(const WeingartenData& w, const RealMatrix& phi) {
  const double mu = hopf_data(w).mu;
  double worst = 0.0;
  for (const auto& [lambda, X] : detail::dee_eigenpairs(w.matrix)) {
    const RealVector phiX = phi * X;
    const RealVector r = (2.0 * lambda - mu) * (w.matrix * phiX) - (lambda * mu + 2.0 * w.epsilon) * phiX;
    worst = std::max(worst, r.norm() / std::max(1.0, phiX.norm()));
  }
  return worst;
}

/// max over eigenpairs (lambda, X) in D of |A phi X - lambda_hat phi X| / |phi X|,
/// where lambda_hat is the eigenvalue phi X is expected to carry.
inline double phi_pairing_residual(const WeingartenData& w, const RealMatrix& phi) {
  const double mu = hopf_data(w).mu;
  double worst = 0.0;
  for (const auto& [lambda, X] : detail::dee_eigenpairs(w.matrix)) {
    const RealVector phiX = phi * X;
    const double target = hat_lambda(lambda, mu, w.epsilon);
    worst = std::max(worst, (w.matrix * phiX - target * phiX).norm() / std::max(1e-300, phiX.norm()));
  }
  return worst;
}

/// |A phi - phi A| (max entry) in the frame.
inline double commutator_norm(const RealMatrix& A, const RealMatrix& phi) {
  return (A * phi - phi * A).cwiseAbs().maxCoeff();
}

struct KillingReport {
  double commutator_norm = 0.0;
  double killing_residual = 0.0;
};

/// Commutator norm plus the finite-difference check of
/// L_xi g(X,Y) = g(nabla_X xi, Y) + g(X, nabla_Y xi) = g((phi A - A phi) X, Y).
inline KillingReport commutator_killing(const HypersurfaceSpec& spec, const AmbientVector& z,
                                        const WeingartenData& w, const RealMatrix& phi, std::uint64_t seed,
                                        int pairs = 5, const TolerancePolicy& tol = {}) {
  KillingReport out;
  out.commutator_norm = commutator_norm(w.matrix, phi);
  const auto& sig = spec.sig();
  std::mt19937_64 rng(seed);
  const RealMatrix K = phi * w.matrix - w.matrix * phi;
  for (int i = 0; i < pairs; ++i) {
    const AmbientVector X = random_horizontal(w.frame, rng);
    const AmbientVector Y = random_horizontal(w.frame, rng);
    const double lie = real_metric(reeb_covariant_derivative(spec, z, X, tol), Y, sig) +
                       real_metric(X, reeb_covariant_derivative(spec, z, Y, tol), sig);
    const RealVector x = w.frame.coordinates(X, sig), y = w.frame.coordinates(Y, sig);
    const double rhs = y.dot(w.frame.gram * (K * x));
    out.killing_residual = std::max(out.killing_residual, std::abs(lie - rhs));
  }
  return out;
}

struct EtaUmbilicalFit {
  double lambda = 0.0;
  double rho = 0.0;
  double residual = 0.0;
};

/// Least squares for A = lambda I + rho xi (x) eta, with eta(X) = g(X, xi).
inline EtaUmbilicalFit eta_umbilical_fit(const RealMatrix& A, const RealVector& eta, const RealVector& xi) {
  const Eigen::Index k = A.rows();
  const RealMatrix I = RealMatrix::Identity(k, k);
  const RealMatrix E = xi * eta.transpose();
  Eigen::Matrix2d N;
  N << (I.array() * I.array()).sum(), (I.array() * E.array()).sum(), (E.array() * I.array()).sum(),
      (E.array() * E.array()).sum();
  const Eigen::Vector2d b((A.array() * I.array()).sum(), (A.array() * E.array()).sum());
  const Eigen::Vector2d c = N.fullPivLu().solve(b);
  EtaUmbilicalFit fit{c[0], c[1], 0.0};
  fit.residual = (A - fit.lambda * I - fit.rho * E).cwiseAbs().maxCoeff();
  return fit;
}

// ---------------------------------------------------------------------------
// classification of eta-umbilical Hopf hypersurfaces

enum class ClassTag {
  A_plus_class1,
  A_plus_class2,
  A_minus_class3,
  A_minus_class4,
  Horosphere,
  NotEtaUmbilical,
  Indeterminate
};

inline const char* to_string(ClassTag t) {
  switch (t) {
    case ClassTag::A_plus_class1: return "A_plus_class1";
    case ClassTag::A_plus_class2: return "A_plus_class2";
    case ClassTag::A_minus_class3: return "A_minus_class3";
    case ClassTag::A_minus_class4: return "A_minus_class4";
    case ClassTag::Horosphere: return "Horosphere";
    case ClassTag::NotEtaUmbilical: return "NotEtaUmbilical";
    case ClassTag::Indeterminate: return "Indeterminate";
  }
  return "?";
}

struct Classification {
  ClassTag tag = ClassTag::Indeterminate;
  double r = std::numeric_limits<double>::quiet_NaN();
  double mu = 0.0;      // after normalization to mu >= 0
  double lambda = std::numeric_limits<double>::quiet_NaN();
  bool flipped = false;  // operator sign was reversed
  std::string constraint;
  std::string reason;
};

/// Decides which eta-umbilical model (if any) the descended operator matches.
/// `summary` is the spectrum of the full (2n-1)-dimensional operator.
inline Classification classify(int epsilon, const SpectralSummary& summary, double mu, int n, double tol = 1e-6) {
  Classification out;
  out.flipped = mu < 0.0;
  const double sgn = out.flipped ? -1.0 : 1.0;
  out.mu = sgn * mu;
  std::vector<Cluster> rest;
  for (const auto& c : summary.clusters) rest.push_back({sgn * c.value, c.algebraic, c.geometric});
  const auto close = [&](double a, double b) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); };

  auto it = std::find_if(rest.begin(), rest.end(), [&](const Cluster& c) { return close(c.value, out.mu); });
  if (it == rest.end() || !summary.complex_clusters.empty()) {
    out.reason = "xi is not principal";
    return out;
  }
  if (--it->algebraic == 0) rest.erase(it);
  if (rest.size() != 1 || rest[0].algebraic != 2 * n - 2) {
    out.tag = ClassTag::NotEtaUmbilical;
    out.reason = "more than one principal curvature on D";
    return out;
  }
  const double lambda = rest[0].value;
  out.lambda = lambda;
  out.constraint = "m = q+2 or m = n+q+1";
  if (std::abs(2.0 * lambda - out.mu) <= tol * std::max(1.0, out.mu)) {
    if (epsilon == -1 && close(out.mu, 2.0) && close(lambda, 1.0)) {
      out.tag = ClassTag::Horosphere;
      out.constraint.clear();
    } else {
      out.reason = "mu = 2 lambda outside the horosphere branch";
    }
    return out;
  }
  if (epsilon == 1) {
    const double r = 0.5 * std::atan2(2.0, out.mu);
    out.r = r;
    if (close(lambda, 1.0 / std::tan(r)))
      out.tag = ClassTag::A_plus_class1;
    else if (close(lambda, -std::tan(r)))
      out.tag = ClassTag::A_plus_class2;
    else
      out.reason = "lambda is not a root for mu";
    return out;
  }
  if (epsilon == -1 && out.mu > 2.0 && !close(out.mu, 2.0)) {
    const double r = 0.5 * std::atanh(2.0 / out.mu);
    out.r = r;
    if (close(lambda, 1.0 / std::tanh(r)))
      out.tag = ClassTag::A_minus_class3;
    else if (close(lambda, std::tanh(r)))
      out.tag = ClassTag::A_minus_class4;
    else
      out.reason = "lambda is not a root for mu";
    return out;
  }
  out.reason = epsilon == -1 ? "no real principal curvature for mu < 2" : "invalid causal character";
  return out;
}

// ---------------------------------------------------------------------------
// curvature cross-checks

struct CurvatureReport {
  double ricci = 0.0;        // closed-form S vs trace of the Gauss-equation R
  double symmetries = 0.0;   // antisymmetries, pair symmetry, first Bianchi
  double holomorphic = 0.0;  // |K(X, JX) - 4|
};

/// Closed-form Ricci endomorphism (2n+1) I - 3 eps xi (x) eta + eps tr(A) A - eps A^2.
inline RealMatrix ricci_closed_form(const RealMatrix& A, const StructureTensors& st, int n) {
  const Eigen::Index k = A.rows();
  return (2.0 * n + 1.0) * RealMatrix::Identity(k, k) - 3.0 * st.epsilon * st.xi * st.eta.transpose() +
         st.epsilon * A.trace() * A - st.epsilon * A * A;
}

inline CurvatureReport curvature_identities(const HypersurfaceSpec& spec, const WeingartenData& w,
                                            const StructureTensors& st, std::uint64_t seed) {
  require_nondegenerate(spec, "curvature_identities");
  const auto& sig = spec.sig();
  const int n = sig.n;
  const auto& F = w.frame;
  const int k = F.size();
  const RealMatrix& A = w.matrix;
  const RealMatrix& G = F.gram;
  const RealMatrix GA = G * A;  // GA(a,b) = g(A e_b, e_a)
  const int eps = w.epsilon;

  // R(e_i, e_j) e_l = (Rbar)^T + eps (g(A e_j, e_l) A e_i - g(A e_i, e_l) A e_j)
  std::vector<RealVector> R(static_cast<std::size_t>(k * k * k));
  auto at = [&](int i, int j, int l) -> RealVector& { return R[static_cast<std::size_t>((i * k + j) * k + l)]; };
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      for (int l = 0; l < k; ++l)
        at(i, j, l) = F.coordinates(curvature_bar(F.vectors[i], F.vectors[j], F.vectors[l], sig), sig) +
                      eps * (GA(l, j) * A.col(i) - GA(l, i) * A.col(j));
  auto R4 = [&](int i, int j, int l, int m) { return G.row(m).dot(at(i, j, l)); };

  CurvatureReport rep;
  RealMatrix Ric(k, k);
  for (int j = 0; j < k; ++j)
    for (int l = 0; l < k; ++l) {
      double s = 0.0;
      for (int i = 0; i < k; ++i) s += F.signs[static_cast<std::size_t>(i)] * R4(i, j, l, i);
      Ric(j, l) = s;
    }
  const RealMatrix S = G.inverse() * Ric.transpose();
  rep.ricci = (S - ricci_closed_form(A, st, n)).cwiseAbs().maxCoeff();

  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      for (int l = 0; l < k; ++l)
        for (int m = 0; m < k; ++m) {
          const double v = R4(i, j, l, m);
          rep.symmetries = std::max({rep.symmetries, std::abs(v + R4(j, i, l, m)), std::abs(v + R4(i, j, m, l)),
                                     std::abs(v - R4(l, m, i, j)),
                                     std::abs(v + R4(j, l, i, m) + R4(l, i, j, m))});
        }

  std::mt19937_64 rng(seed);
  for (int trial = 0, done = 0; trial < 1000 && done < 5; ++trial) {
    const AmbientVector X0 = random_horizontal(F, rng);
    const double q = metric_norm2(X0, sig);
    if (q < 0.1) continue;
    const AmbientVector X = X0 / std::sqrt(q);
    const AmbientVector JX = apply_J(X);
    rep.holomorphic = std::max(rep.holomorphic, std::abs(real_metric(curvature_bar(X, JX, JX, sig), X, sig) - 4.0));
    ++done;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// isometries

/// |U* G U - G| (max entry).
inline double isometry_defect(const Eigen::MatrixXcd& U, const Signature& sig) {
  Eigen::VectorXcd d(sig.complex_dim());
  for (int j = 0; j < d.size(); ++j) d[j] = sig.sign(j);
  const Eigen::MatrixXcd G = d.asDiagonal();
  return (U.adjoint() * G * U - G).cwiseAbs().maxCoeff();
}

namespace detail {

// Left-multiplies U by an elementary isometry acting on coordinates (a, b).
inline void apply_pair(Eigen::MatrixXcd& U, int a, int b, const Signature& sig, std::mt19937_64& rng, bool real) {
  std::uniform_real_distribution<double> ang(-std::numbers::pi, std::numbers::pi);
  std::uniform_real_distribution<double> rap(-0.5, 0.5);
  const Complex ph = real ? Complex(1.0, 0.0) : std::polar(1.0, ang(rng));
  Eigen::Matrix2cd B;
  if (sig.sign(a) == sig.sign(b)) {
    const double th = ang(rng);
    B << std::cos(th), -std::sin(th) * ph, std::sin(th) * std::conj(ph), std::cos(th);
  } else {
    const double r = rap(rng);
    B << std::cosh(r), std::sinh(r) * ph, std::sinh(r) * std::conj(ph), std::cosh(r);
  }
  const Eigen::RowVectorXcd ra = U.row(a), rb = U.row(b);
  U.row(a) = B(0, 0) * ra + B(0, 1) * rb;
  U.row(b) = B(1, 0) * ra + B(1, 1) * rb;
}

inline void mix_block(Eigen::MatrixXcd& U, const std::vector<int>& idx, const Signature& sig, std::mt19937_64& rng,
                      bool real) {
  for (int sweep = 0; sweep < 2; ++sweep)
    for (std::size_t i = 0; i < idx.size(); ++i)
      for (std::size_t j = i + 1; j < idx.size(); ++j) apply_pair(U, idx[i], idx[j], sig, rng, real);
}

}  // namespace detail

/// Random indefinite-unitary map preserving the family's defining function.
inline Eigen::MatrixXcd random_block_isometry(const HypersurfaceSpec& spec, std::uint64_t seed) {
  const auto& sig = spec.sig();
  const int dim = sig.complex_dim();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ang(-std::numbers::pi, std::numbers::pi);
  Eigen::MatrixXcd U = Eigen::MatrixXcd::Identity(dim, dim);
  switch (spec.family()) {
    case Family::TypeA: {
      std::vector<int> b1, b2;
      for (int j = 0; j < dim; ++j) (spec.in_q1(j) ? b1 : b2).push_back(j);
      detail::mix_block(U, b1, sig, rng, false);
      detail::mix_block(U, b2, sig, rng, false);
      for (int j = 0; j < dim; ++j) U.row(j) *= std::polar(1.0, ang(rng));
      break;
    }
    case Family::TypeB:
    case Family::Degenerate: {
      std::vector<int> all(dim);
      std::iota(all.begin(), all.end(), 0);
      detail::mix_block(U, all, sig, rng, true);
      U *= std::polar(1.0, ang(rng));
      break;
    }
    case Family::Horosphere: {
      std::vector<int> mid;
      for (int j = 1; j < dim - 1; ++j) mid.push_back(j);
      detail::mix_block(U, mid, sig, rng, false);
      U *= std::polar(1.0, ang(rng));
      break;
    }
  }
  return U;
}

struct InvarianceReport {
  int points = 0;
  double max_defining_residual = 0.0;
  double max_eigenvalue_difference = 0.0;
  bool multiplicities_match = true;
};

inline bool summaries_match(const SpectralSummary& a, const SpectralSummary& b, double tol, double* max_diff) {
  bool same = a.clusters.size() == b.clusters.size() && a.complex_clusters.size() == b.complex_clusters.size();
  for (std::size_t i = 0; same && i < a.clusters.size(); ++i) {
    const auto &x = a.clusters[i], &y = b.clusters[i];
    if (x.algebraic != y.algebraic || x.geometric != y.geometric) same = false;
    const double d = std::abs(x.value - y.value);
    if (max_diff) *max_diff = std::max(*max_diff, d);
    if (d > tol) same = false;
  }
  return same;
}

/// Maps sampled points through U and compares defining residuals and spectra.
inline InvarianceReport isometry_invariance(const HypersurfaceSpec& spec, const Eigen::MatrixXcd& U,
                                            std::uint64_t seed, int points = 20, const TolerancePolicy& tol = {}) {
  const auto& sig = spec.sig();
  if (U.rows() != sig.complex_dim() || U.cols() != sig.complex_dim())
    throw DimensionMismatch("isometry_invariance: matrix size does not match the signature");
  if (isometry_defect(U, sig) > 1e-10) throw PreconditionError("isometry_invariance: U does not preserve g_C");
  require_nondegenerate(spec, "isometry_invariance");
  InvarianceReport rep;
  for (int i = 0; i < points; ++i) {
    const AmbientVector z = sample_point(spec, seed + static_cast<std::uint64_t>(i));
    const AmbientVector w = U * z;
    const double res = defining_residual(spec, w).max_abs();
    rep.max_defining_residual = std::max(rep.max_defining_residual, res);
    ++rep.points;
    if (res > tol.constraint_tol) {
      rep.multiplicities_match = false;
      continue;
    }
    const auto sz = spectral_summary(descend(spec, z, tol).matrix, tol);
    const auto sw = spectral_summary(descend(spec, w, tol).matrix, tol);
    double diff = 0.0;
    const bool same = summaries_match(sz, sw, std::numeric_limits<double>::infinity(), &diff);
    if (!same) rep.multiplicities_match = false;
    rep.max_eigenvalue_difference = std::max(rep.max_eigenvalue_difference, diff);
  }
  return rep;
}

}  // namespace hopflab
