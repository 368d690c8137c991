#pragma once

// Finite-difference shape operator, Newton retraction onto the lifted
// hypersurface, descent through the Hopf map and the differential identities
// (Reeb derivative, Codazzi, Lie derivative of the metric).

#include <Eigen/Dense>

#include <cmath>
#include <random>

#include "hopflab/ambient.hpp"
#include "hopflab/catalog.hpp"

namespace hopflab {

struct RetractResult {
  AmbientVector point;
  int iterations = 0;
  double residual = 0.0;
};

/// Newton iteration on (g(y,y) - 1, F(y)) moving along the Euclidean gradients
/// of the two constraints.
inline RetractResult retract(const HypersurfaceSpec& spec, const AmbientVector& y, const TolerancePolicy& tol = {}) {
  const auto& sig = spec.sig();
  check_length(y, sig, "retract");
  auto euclid = [&](const AmbientVector& w) {
    AmbientVector e = w;
    for (int j = 0; j < e.size(); ++j) e[j] *= sig.sign(j);
    return e;
  };
  RetractResult out{y, 0, 0.0};
  for (int it = 0;; ++it) {
    const auto r = defining_residual(spec, out.point);
    out.residual = r.max_abs();
    out.iterations = it;
    if (out.residual <= tol.newton_tol) return out;
    if (!std::isfinite(out.residual) || it >= tol.newton_max_iter)
      throw NumericFailure("retract: no convergence after " + std::to_string(it) + " iterations (residual " +
                           std::to_string(out.residual) + ")");
    const auto [w0, w1] = constraint_gradients(spec, out.point);
    const AmbientVector e0 = euclid(w0), e1 = euclid(w1);
    Eigen::Matrix2d J;
    J << real_metric(e0, w0, sig), real_metric(e1, w0, sig), real_metric(e0, w1, sig), real_metric(e1, w1, sig);
    const double scale = e0.squaredNorm() * e1.squaredNorm();
    if (scale == 0.0 || std::abs(J.determinant()) <= 1e-14 * scale)
      throw NumericFailure("retract: singular Newton system");
    const Eigen::Vector2d c = J.inverse() * Eigen::Vector2d(r.sphere, r.family);
    out.point -= c[0] * e0 + c[1] * e1;
  }
}

// ---------------------------------------------------------------------------
// projections at a point of the lifted hypersurface

/// g-orthogonal projection onto T_z M~ (non-degenerate) or onto T_z S (lightlike).
inline AmbientVector tangent_projection(const HypersurfaceSpec& spec, const AmbientVector& z, const AmbientVector& v) {
  const auto& sig = spec.sig();
  AmbientVector out = v - real_metric(v, z, sig) * z;
  if (!spec.degenerate()) {
    const AmbientVector N = normal_field(spec, z);
    out -= (spec.epsilon() * real_metric(v, N, sig)) * N;
  }
  return out;
}

/// Projection onto the horizontal part of T_z M~, i.e. the lift of T M.
inline AmbientVector horizontal_projection(const HypersurfaceSpec& spec, const AmbientVector& z,
                                           const AmbientVector& v) {
  const auto& sig = spec.sig();
  const AmbientVector Jz = apply_J(z);
  const AmbientVector N = normal_field(spec, z);
  return v - real_metric(v, z, sig) * z - real_metric(v, Jz, sig) * Jz - (spec.epsilon() * real_metric(v, N, sig)) * N;
}

/// (AX)~ = A_N X~ - g(xi, X) J chi for horizontal X~.
inline AmbientVector descended_apply(const HypersurfaceSpec& spec, const AmbientVector& z, const AmbientVector& X) {
  return weingarten_formula(spec, z, X) - real_metric(reeb_field(spec, z), X, spec.sig()) * apply_J(z);
}

/// phi X = tangential part of J X.
inline AmbientVector phi_apply(const HypersurfaceSpec& spec, const AmbientVector& z, const AmbientVector& X) {
  return horizontal_projection(spec, z, apply_J(X));
}

inline void require_horizontal(const HypersurfaceSpec& spec, const AmbientVector& z, const AmbientVector& X,
                               const TolerancePolicy& tol, const char* what) {
  const double defect = (X - horizontal_projection(spec, z, X)).norm();
  if (defect > tol.constraint_tol * std::max(1.0, X.norm()))
    throw PreconditionError(std::string(what) + ": vector is not a horizontal tangent vector");
}

inline void require_nondegenerate(const HypersurfaceSpec& spec, const char* what) {
  if (spec.degenerate()) throw DegeneracyError(std::string(what) + ": induced metric is degenerate", 1);
}

// ---------------------------------------------------------------------------
// finite-difference Weingarten oracle

/// -P_T((N(c(h)) - N(c(-h))) / 2h) along the retracted curve c(s) = retract(z + s X).
inline AmbientVector numeric_weingarten(const HypersurfaceSpec& spec, const AmbientVector& z, const AmbientVector& X,
                                        const TolerancePolicy& tol = {}, std::optional<double> step = {}) {
  require_tangent(spec, z, X, tol, "numeric_weingarten");
  const double h = step.value_or(tol.fd_step);
  const AmbientVector cp = retract(spec, z + h * X, tol).point;
  const AmbientVector cm = retract(spec, z - h * X, tol).point;
  const AmbientVector d = (normal_field(spec, cp) - normal_field(spec, cm)) / (2.0 * h);
  return -tangent_projection(spec, z, d);
}

// ---------------------------------------------------------------------------
// descent to the projective space

struct WeingartenData {
  RealMatrix matrix;   // A in the horizontal frame {xi, D~}
  FrameAtPoint frame;  // horizontal frame at z
  int epsilon = 0;
  double mu = 0.0;
  double hopf_residual = 0.0;
  double selfadjoint_defect = 0.0;  // |G M - M^T G|
  double expansion_residual = 0.0;  // how far A X left the frame span
};

inline WeingartenData descend(const HypersurfaceSpec& spec, const AmbientVector& z, const TolerancePolicy& tol = {}) {
  require_nondegenerate(spec, "descend");
  const auto& sig = spec.sig();
  const auto frames = tangent_and_dee_frames(spec, z, tol);
  WeingartenData w;
  w.frame = frames.horizontal;
  w.epsilon = spec.epsilon();
  const int k = w.frame.size();
  w.matrix.resize(k, k);
  for (int j = 0; j < k; ++j) {
    const AmbientVector AX = descended_apply(spec, z, w.frame.vectors[j]);
    const RealVector c = w.frame.coordinates(AX, sig);
    w.matrix.col(j) = c;
    w.expansion_residual = std::max(w.expansion_residual, (AX - w.frame.combine(c)).norm());
  }
  w.mu = w.matrix(0, 0);  // eps * g(A xi, xi) with g(xi, xi) = eps
  RealVector col = w.matrix.col(0);
  col[0] -= w.mu;
  w.hopf_residual = col.norm();
  w.selfadjoint_defect = (w.frame.gram * w.matrix - w.matrix.transpose() * w.frame.gram).cwiseAbs().maxCoeff();
  return w;
}

struct StructureTensors {
  RealMatrix phi;
  RealVector eta;  // eta(e_j) = g(e_j, xi)
  RealVector xi;   // coordinates of xi
  int epsilon = 0;
  RealMatrix gram;
};

inline StructureTensors structure_tensors(const HypersurfaceSpec& spec, const AmbientVector& z,
                                          const FrameAtPoint& frame) {
  require_nondegenerate(spec, "structure_tensors");
  const auto& sig = spec.sig();
  const int k = frame.size();
  StructureTensors s;
  s.epsilon = spec.epsilon();
  s.gram = frame.gram;
  s.phi.resize(k, k);
  for (int j = 0; j < k; ++j) s.phi.col(j) = frame.coordinates(phi_apply(spec, z, frame.vectors[j]), sig);
  const AmbientVector xi = reeb_field(spec, z);
  s.xi = frame.coordinates(xi, sig);
  s.eta.resize(k);
  for (int j = 0; j < k; ++j) s.eta[j] = real_metric(frame.vectors[j], xi, sig);
  return s;
}

inline StructureTensors structure_tensors(const HypersurfaceSpec& spec, const AmbientVector& z,
                                          const TolerancePolicy& tol = {}) {
  require_nondegenerate(spec, "structure_tensors");
  return structure_tensors(spec, z, tangent_and_dee_frames(spec, z, tol).horizontal);
}

/// Max defects of the almost contact identities.
struct StructureDefects {
  double phi_squared = 0.0;  // phi^2 + I - eps xi (x) eta
  double phi_xi = 0.0;
  double eta_xi = 0.0;       // eta(xi) - eps
  double phi_isometry = 0.0; // g(phi X, phi Y) - g(X,Y) + eps eta(X) eta(Y)
  double phi_skew = 0.0;     // g(phi X, Y) + g(X, phi Y)

  double max() const { return std::max({phi_squared, phi_xi, eta_xi, phi_isometry, phi_skew}); }
};

inline StructureDefects structure_defects(const StructureTensors& s) {
  const Eigen::Index k = s.phi.rows();
  const RealMatrix I = RealMatrix::Identity(k, k);
  StructureDefects d;
  d.phi_squared = (s.phi * s.phi + I - s.epsilon * s.xi * s.eta.transpose()).cwiseAbs().maxCoeff();
  d.phi_xi = (s.phi * s.xi).cwiseAbs().maxCoeff();
  d.eta_xi = std::abs(s.eta.dot(s.xi) - s.epsilon);
  d.phi_isometry =
      (s.phi.transpose() * s.gram * s.phi - s.gram + s.epsilon * s.eta * s.eta.transpose()).cwiseAbs().maxCoeff();
  d.phi_skew = (s.gram * s.phi + s.phi.transpose() * s.gram).cwiseAbs().maxCoeff();
  return d;
}

// ---------------------------------------------------------------------------
// covariant derivatives by finite differences

namespace detail {

// P_z((F(c(h)) - F(c(-h))) / 2h) along c(s) = retract(z + s X).
template <class Field>
AmbientVector covariant_fd(const HypersurfaceSpec& spec, const AmbientVector& z, const AmbientVector& X,
                           const TolerancePolicy& tol, Field&& field) {
  if (X.norm() == 0.0) return AmbientVector::Zero(z.size());
  const double h = tol.fd_step;
  const AmbientVector cp = retract(spec, z + h * X, tol).point;
  const AmbientVector cm = retract(spec, z - h * X, tol).point;
  return horizontal_projection(spec, z, (field(cp) - field(cm)) / (2.0 * h));
}

}  // namespace detail

/// nabla_X xi, lifted.
inline AmbientVector reeb_covariant_derivative(const HypersurfaceSpec& spec, const AmbientVector& z,
                                               const AmbientVector& X, const TolerancePolicy& tol = {}) {
  require_nondegenerate(spec, "reeb_covariant_derivative");
  require_horizontal(spec, z, X, tol, "reeb_covariant_derivative");
  return detail::covariant_fd(spec, z, X, tol, [&](const AmbientVector& w) { return reeb_field(spec, w); });
}

/// |nabla_X xi - phi A X|.
inline double reeb_derivative_residual(const HypersurfaceSpec& spec, const AmbientVector& z, const AmbientVector& X,
                                       const TolerancePolicy& tol = {}) {
  const AmbientVector lhs = reeb_covariant_derivative(spec, z, X, tol);
  const AmbientVector rhs = phi_apply(spec, z, descended_apply(spec, z, X));
  return (lhs - rhs).norm();
}

/// (nabla_X A)Y with Y extended by projecting its frozen ambient value onto the
/// moving horizontal tangent space.
inline AmbientVector shape_covariant_derivative(const HypersurfaceSpec& spec, const AmbientVector& z,
                                                const AmbientVector& X, const AmbientVector& Y,
                                                const TolerancePolicy& tol = {}) {
  auto ext = [&](const AmbientVector& w) { return horizontal_projection(spec, w, Y); };
  const AmbientVector nabla_AY = detail::covariant_fd(
      spec, z, X, tol, [&](const AmbientVector& w) { return descended_apply(spec, w, ext(w)); });
  const AmbientVector nabla_Y = detail::covariant_fd(spec, z, X, tol, ext);
  return nabla_AY - descended_apply(spec, z, nabla_Y);
}

/// LHS - RHS of (nabla_X A)Y - (nabla_Y A)X = eta(X) phi Y - eta(Y) phi X + 2 g(X, phi Y) xi.
inline AmbientVector codazzi_defect(const HypersurfaceSpec& spec, const AmbientVector& z, const AmbientVector& X,
                                    const AmbientVector& Y, const TolerancePolicy& tol = {}) {
  require_nondegenerate(spec, "codazzi_defect");
  require_horizontal(spec, z, X, tol, "codazzi_defect");
  require_horizontal(spec, z, Y, tol, "codazzi_defect");
  const auto& sig = spec.sig();
  const AmbientVector xi = reeb_field(spec, z);
  const AmbientVector lhs =
      shape_covariant_derivative(spec, z, X, Y, tol) - shape_covariant_derivative(spec, z, Y, X, tol);
  const AmbientVector phiX = phi_apply(spec, z, X), phiY = phi_apply(spec, z, Y);
  const AmbientVector rhs = real_metric(X, xi, sig) * phiY - real_metric(Y, xi, sig) * phiX +
                            2.0 * real_metric(X, phiY, sig) * xi;
  return lhs - rhs;
}

inline double codazzi_residual(const HypersurfaceSpec& spec, const AmbientVector& z, const AmbientVector& X,
                               const AmbientVector& Y, const TolerancePolicy& tol = {}) {
  return codazzi_defect(spec, z, X, Y, tol).norm();
}

/// mu = eps g(A xi, xi) evaluated from the closed-form operator at z.
inline double hopf_curvature_at(const HypersurfaceSpec& spec, const AmbientVector& z) {
  const AmbientVector xi = reeb_field(spec, z);
  return spec.epsilon() * real_metric(descended_apply(spec, z, xi), xi, spec.sig());
}

/// Central difference of mu along X.
inline double mu_directional_derivative(const HypersurfaceSpec& spec, const AmbientVector& z, const AmbientVector& X,
                                        const TolerancePolicy& tol = {}) {
  require_nondegenerate(spec, "mu_directional_derivative");
  if (X.norm() == 0.0) return 0.0;
  const double h = tol.fd_step;
  const AmbientVector cp = retract(spec, z + h * X, tol).point;
  const AmbientVector cm = retract(spec, z - h * X, tol).point;
  return (hopf_curvature_at(spec, cp) - hopf_curvature_at(spec, cm)) / (2.0 * h);
}

/// Matrix of X -> A_N X (hyperquadric level, closed form) in an arbitrary frame,
/// plus how far the images stray from the frame span.
struct LiftOperator {
  RealMatrix matrix;
  FrameAtPoint frame;
  double expansion_residual = 0.0;
};

inline LiftOperator lift_operator(const HypersurfaceSpec& spec, const AmbientVector& z, const FrameAtPoint& frame) {
  LiftOperator out;
  out.frame = frame;
  out.matrix.resize(frame.size(), frame.size());
  for (int j = 0; j < frame.size(); ++j) {
    const AmbientVector AX = weingarten_formula(spec, z, frame.vectors[j]);
    const RealVector c = frame.coordinates(AX, spec.sig());
    out.matrix.col(j) = c;
    out.expansion_residual = std::max(out.expansion_residual, (AX - frame.combine(c)).norm());
  }
  return out;
}

/// Random combination of the horizontal frame with unit Euclidean norm.
inline AmbientVector random_horizontal(const FrameAtPoint& horizontal, std::mt19937_64& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  RealVector c(horizontal.size());
  for (int i = 0; i < c.size(); ++i) c[i] = nd(rng);
  const AmbientVector v = horizontal.combine(c);
  return v / v.norm();
}

/// Random combination of any frame (e.g. the full tangent frame).
inline AmbientVector random_tangent(const FrameAtPoint& frame, std::mt19937_64& rng) {
  return random_horizontal(frame, rng);
}

}  // namespace hopflab
