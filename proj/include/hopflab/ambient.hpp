#pragma once

// Indefinite hermitian space C^{n+1}_p, its unit hyperquadric and the curvature
// tensor of the projective quotient.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "hopflab/errors.hpp"

namespace hopflab {

using Complex = std::complex<double>;
using AmbientVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

inline constexpr Complex kI{0.0, 1.0};

/// Complex dimension n of the projective space and the number p of timelike
/// coordinates. The ambient space is C^{n+1} with real index 2p.
struct Signature {
  int n = 4;
  int p = 2;

  Signature() = default;
  Signature(int n_, int p_) : n(n_), p(p_) {
    if (n < 1 || p < 0 || p > n + 1)
      throw PreconditionError("signature: need n >= 1 and 0 <= p <= n+1, got n=" + std::to_string(n) +
                              " p=" + std::to_string(p));
  }

  int complex_dim() const { return n + 1; }
  int real_dim() const { return 2 * (n + 1); }
  int real_index() const { return 2 * p; }
  /// Sign of the metric on coordinate j (0-based).
  double sign(int j) const { return j < p ? -1.0 : 1.0; }
  /// The projective space itself needs n >= 2 and 1 <= p <= n-1.
  bool projective() const { return n >= 2 && p >= 1 && p <= n - 1; }

  friend bool operator==(const Signature&, const Signature&) = default;
};

inline void require_projective(const Signature& sig) {
  if (!sig.projective())
    throw PreconditionError("signature (n=" + std::to_string(sig.n) + ", p=" + std::to_string(sig.p) +
                            ") does not satisfy n >= 2, 1 <= p <= n-1");
}

/// Numerical knobs shared by every module.
struct TolerancePolicy {
  double constraint_tol = 1e-10;
  double eig_cluster_tol = 1e-6;
  double rank_tol = 1e-7;
  double fd_step = 1e-5;
  double newton_tol = 1e-13;
  int newton_max_iter = 30;

  void validate() const {
    if (!(constraint_tol > 0 && eig_cluster_tol > 0 && rank_tol > 0 && fd_step > 0 && newton_tol > 0))
      throw PreconditionError("tolerances must be strictly positive");
    if (newton_max_iter < 1) throw PreconditionError("newton_max_iter must be >= 1");
    if (newton_tol > constraint_tol) throw PreconditionError("newton_tol must not exceed constraint_tol");
  }
};

inline void check_length(const AmbientVector& v, const Signature& sig, const char* what) {
  if (v.size() != sig.complex_dim())
    throw DimensionMismatch(std::string(what) + ": expected " + std::to_string(sig.complex_dim()) +
                            " coordinates, got " + std::to_string(v.size()));
}

/// g_C(z, w) = -sum_{j<=p} z_j conj(w_j) + sum_{j>p} z_j conj(w_j).
inline Complex herm_product(const AmbientVector& z, const AmbientVector& w, const Signature& sig) {
  check_length(z, sig, "herm_product");
  check_length(w, sig, "herm_product");
  Complex acc{0.0, 0.0};
  for (int j = 0; j < sig.complex_dim(); ++j) acc += sig.sign(j) * z[j] * std::conj(w[j]);
  return acc;
}

/// g = Re g_C.
inline double real_metric(const AmbientVector& z, const AmbientVector& w, const Signature& sig) {
  return herm_product(z, w, sig).real();
}

inline double metric_norm2(const AmbientVector& v, const Signature& sig) { return real_metric(v, v, sig); }

inline AmbientVector apply_J(const AmbientVector& v) { return kI * v; }

inline AmbientVector conjugate_vector(const AmbientVector& v) { return v.conjugate(); }

enum class Causal { Spacelike, Timelike, Null };

inline const char* to_string(Causal c) {
  switch (c) {
    case Causal::Spacelike: return "spacelike";
    case Causal::Timelike: return "timelike";
    case Causal::Null: return "null";
  }
  return "?";
}

inline Causal causal_character(const AmbientVector& v, const Signature& sig, const TolerancePolicy& tol) {
  const double q = metric_norm2(v, sig);
  if (q > tol.constraint_tol) return Causal::Spacelike;
  if (q < -tol.constraint_tol) return Causal::Timelike;
  return Causal::Null;
}

// Real coordinates (Re z_1..Re z_{n+1}, Im z_1..Im z_{n+1}).
inline RealVector to_real(const AmbientVector& v) {
  RealVector r(2 * v.size());
  r.head(v.size()) = v.real();
  r.tail(v.size()) = v.imag();
  return r;
}

inline AmbientVector from_real(const RealVector& r) {
  const Eigen::Index m = r.size() / 2;
  AmbientVector v(m);
  for (Eigen::Index j = 0; j < m; ++j) v[j] = Complex(r[j], r[m + j]);
  return v;
}

/// Real Gram matrix g(v_i, v_j).
inline RealMatrix gram_matrix(std::span<const AmbientVector> vs, const Signature& sig) {
  const auto k = static_cast<Eigen::Index>(vs.size());
  RealMatrix G(k, k);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = i; j < k; ++j) G(i, j) = G(j, i) = real_metric(vs[i], vs[j], sig);
  return G;
}

/// A g-orthonormal family with its causal signs.
struct OrthoBasis {
  std::vector<AmbientVector> vectors;
  std::vector<int> signs;

  int negatives() const { return static_cast<int>(std::count(signs.begin(), signs.end(), -1)); }
};

/// Result of orthonormal_complement: the orthonormalized input span and its complement.
struct ComplementResult {
  OrthoBasis span;
  OrthoBasis complement;
};

namespace detail {

inline void project_out(AmbientVector& v, const OrthoBasis& basis, const Signature& sig) {
  // two passes keep the projection accurate when pivots are small
  for (int pass = 0; pass < 2; ++pass)
    for (std::size_t k = 0; k < basis.vectors.size(); ++k)
      v -= (basis.signs[k] * real_metric(v, basis.vectors[k], sig)) * basis.vectors[k];
}

// Pivoted indefinite Gram-Schmidt: extends `basis` by real combinations of the
// candidates until `target` vectors were added or the candidates are exhausted.
// At each step the candidate with the largest |g(v,v)| after projection wins; if
// every survivor is null, a pair with large |g(v_i,v_j)| is combined instead.
// Returns the number of vectors added and sets `stuck` when nonzero but
// totally null candidates remain.
inline int pivoted_extend(OrthoBasis& basis, std::vector<AmbientVector> cands, int target, const Signature& sig,
                          double tol, bool& stuck) {
  stuck = false;
  int added = 0;
  while (added < target && !cands.empty()) {
    for (auto& c : cands) project_out(c, basis, sig);
    std::erase_if(cands, [&](const AmbientVector& c) { return c.norm() <= tol; });
    if (cands.empty()) break;

    std::size_t best = 0;
    double best_q = -1.0;
    for (std::size_t i = 0; i < cands.size(); ++i) {
      const double q = std::abs(metric_norm2(cands[i], sig)) / std::max(1.0, cands[i].squaredNorm());
      if (q > best_q) best_q = q, best = i;
    }
    AmbientVector pick;
    if (best_q > tol) {
      pick = cands[best];
      cands.erase(cands.begin() + static_cast<std::ptrdiff_t>(best));
    } else {
      double best_c = -1.0;
      std::size_t bi = 0, bj = 0;
      for (std::size_t i = 0; i < cands.size(); ++i)
        for (std::size_t j = i + 1; j < cands.size(); ++j) {
          const double c = std::abs(real_metric(cands[i], cands[j], sig)) /
                           std::max(1.0, cands[i].norm() * cands[j].norm());
          if (c > best_c) best_c = c, bi = i, bj = j;
        }
      if (best_c <= tol) {
        stuck = true;
        break;
      }
      pick = cands[bi] + cands[bj];
    }
    const double q = metric_norm2(pick, sig);
    basis.vectors.push_back(pick / std::sqrt(std::abs(q)));
    basis.signs.push_back(q > 0 ? 1 : -1);
    ++added;
  }
  return added;
}

// Rank over R of complex vectors viewed in R^{2n+2}.
inline int real_rank(std::span<const AmbientVector> vs, double tol) {
  if (vs.empty()) return 0;
  RealMatrix M(2 * vs[0].size(), static_cast<Eigen::Index>(vs.size()));
  for (std::size_t k = 0; k < vs.size(); ++k) M.col(static_cast<Eigen::Index>(k)) = to_real(vs[k]);
  Eigen::JacobiSVD<RealMatrix> svd(M);
  const auto& s = svd.singularValues();
  const double scale = std::max(1.0, s.size() ? s[0] : 0.0);
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s[i] > tol * scale) ++r;
  return r;
}

}  // namespace detail

/// g-orthonormal basis of the real g-orthogonal complement of `span`.
/// Throws DegeneracyError when the span carries a null direction.
inline ComplementResult orthonormal_complement(std::span<const AmbientVector> span, const Signature& sig,
                                               const TolerancePolicy& tol) {
  for (const auto& v : span) check_length(v, sig, "orthonormal_complement");
  ComplementResult out;
  const int rank = detail::real_rank(span, tol.rank_tol);
  bool stuck = false;
  const int got = detail::pivoted_extend(out.span, {span.begin(), span.end()}, rank, sig, tol.constraint_tol, stuck);
  if (got < rank) throw DegeneracyError("orthonormal_complement: span is degenerate", rank - got);

  std::vector<AmbientVector> cands;
  for (int j = 0; j < sig.complex_dim(); ++j) {
    AmbientVector e = AmbientVector::Zero(sig.complex_dim());
    e[j] = 1.0;
    cands.push_back(e);
    e[j] = kI;
    cands.push_back(e);
  }
  OrthoBasis full = out.span;
  const int want = sig.real_dim() - rank;
  const int added = detail::pivoted_extend(full, std::move(cands), want, sig, tol.constraint_tol, stuck);
  if (added < want) throw DegeneracyError("orthonormal_complement: complement is degenerate", want - added);
  out.complement.vectors.assign(full.vectors.begin() + rank, full.vectors.end());
  out.complement.signs.assign(full.signs.begin() + rank, full.signs.end());
  return out;
}

/// gamma(s) = cos(s) z + sin(s) v for a unit spacelike v orthogonal to z.
inline AmbientVector sphere_geodesic(const AmbientVector& z, const AmbientVector& v, double s, const Signature& sig,
                                     const TolerancePolicy& tol) {
  check_length(z, sig, "sphere_geodesic");
  check_length(v, sig, "sphere_geodesic");
  if (std::abs(metric_norm2(z, sig) - 1.0) > tol.constraint_tol ||
      std::abs(metric_norm2(v, sig) - 1.0) > tol.constraint_tol ||
      std::abs(real_metric(z, v, sig)) > tol.constraint_tol)
    throw PreconditionError("sphere_geodesic: need g(z,z)=g(v,v)=1 and g(z,v)=0");
  return std::cos(s) * z + std::sin(s) * v;
}

/// Curvature tensor of CP^n_p on horizontal representatives:
/// g(Y,Z)X - g(X,Z)Y + g(JY,Z)JX - g(JX,Z)JY + 2g(X,JY)JZ.
inline AmbientVector curvature_bar(const AmbientVector& X, const AmbientVector& Y, const AmbientVector& Z,
                                   const Signature& sig) {
  const AmbientVector JX = apply_J(X), JY = apply_J(Y), JZ = apply_J(Z);
  return real_metric(Y, Z, sig) * X - real_metric(X, Z, sig) * Y + real_metric(JY, Z, sig) * JX -
         real_metric(JX, Z, sig) * JY + 2.0 * real_metric(X, JY, sig) * JZ;
}

/// True iff w = e^{i theta} z for some theta, up to `tol` in the Euclidean norm.
inline bool s1_equivalent(const AmbientVector& z, const AmbientVector& w, const Signature& sig, double tol) {
  check_length(z, sig, "s1_equivalent");
  check_length(w, sig, "s1_equivalent");
  const Complex c = herm_product(w, z, sig);
  if (std::abs(c) >= tol) {
    const Complex phase = c / std::abs(c);
    return (w - phase * z).norm() <= tol;
  }
  // g_C(w,z) can vanish in indefinite signature; fall back to a coarse grid
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 256; ++k) {
    const double th = 2.0 * std::numbers::pi * k / 256.0;
    best = std::min(best, (w - std::polar(1.0, th) * z).norm());
  }
  return best <= tol;
}

/// Base point plus an ordered family of ambient vectors and their Gram data.
struct FrameAtPoint {
  AmbientVector base;
  std::vector<AmbientVector> vectors;
  RealMatrix gram;
  std::vector<int> signs;
  bool orthonormal = false;

  int size() const { return static_cast<int>(vectors.size()); }

  static FrameAtPoint make(const AmbientVector& base, std::vector<AmbientVector> vs, const Signature& sig,
                           bool orthonormal) {
    FrameAtPoint f;
    f.base = base;
    f.vectors = std::move(vs);
    f.gram = gram_matrix(f.vectors, sig);
    f.signs.reserve(f.vectors.size());
    for (Eigen::Index i = 0; i < f.gram.rows(); ++i) f.signs.push_back(f.gram(i, i) >= 0 ? 1 : -1);
    f.orthonormal = orthonormal;
    return f;
  }

  /// max |gram - diag(signs)|.
  double orthonormality_defect() const {
    double d = 0.0;
    for (Eigen::Index i = 0; i < gram.rows(); ++i)
      for (Eigen::Index j = 0; j < gram.cols(); ++j)
        d = std::max(d, std::abs(gram(i, j) - (i == j ? signs[static_cast<std::size_t>(i)] : 0.0)));
    return d;
  }

  /// Coordinates of v in the frame: g-duality when orthonormal, least squares otherwise.
  RealVector coordinates(const AmbientVector& v, const Signature& sig) const {
    RealVector c(size());
    if (orthonormal) {
      for (int i = 0; i < size(); ++i) c[i] = signs[static_cast<std::size_t>(i)] * real_metric(v, vectors[i], sig);
      return c;
    }
    return real_basis().colPivHouseholderQr().solve(to_real(v));
  }

  AmbientVector combine(const RealVector& c) const {
    AmbientVector v = AmbientVector::Zero(base.size());
    for (int i = 0; i < size(); ++i) v += c[i] * vectors[i];
    return v;
  }

  RealMatrix real_basis() const {
    RealMatrix B(2 * base.size(), size());
    for (int i = 0; i < size(); ++i) B.col(i) = to_real(vectors[i]);
    return B;
  }

  RealMatrix signs_matrix() const {
    RealVector d(size());
    for (int i = 0; i < size(); ++i) d[i] = signs[static_cast<std::size_t>(i)];
    return d.asDiagonal();
  }
};

}  // namespace hopflab
