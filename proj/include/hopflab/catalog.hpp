#pragma once

// The example hypersurface families (lifted to the hyperquadric): Type A tubes,
// Type B tubes over the complex quadric, the lightlike t = 1 tube and the
// horosphere. Everything here is closed form.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "hopflab/ambient.hpp"

namespace hopflab {

enum class Family { TypeA, TypeB, Degenerate, Horosphere };

inline const char* to_string(Family f) {
  switch (f) {
    case Family::TypeA: return "TypeA";
    case Family::TypeB: return "TypeB";
    case Family::Degenerate: return "Degenerate";
    case Family::Horosphere: return "Horosphere";
  }
  return "?";
}

struct TypeAParams {
  int q = 1;
  int m = 4;
  double t = 0.75;
};
struct TypeBParams {
  double t = 4.0;
};
struct DegenerateParams {};
struct HorosphereParams {
  double t = 1.0;
};

using FamilyParams = std::variant<TypeAParams, TypeBParams, DegenerateParams, HorosphereParams>;

class HypersurfaceSpec {
 public:
  HypersurfaceSpec(FamilyParams params, Signature sig) : params_(params), sig_(sig) { validate(); }

  static HypersurfaceSpec type_a(Signature sig, int q, int m, double t) { return {TypeAParams{q, m, t}, sig}; }
  static HypersurfaceSpec type_b(Signature sig, double t) { return {TypeBParams{t}, sig}; }
  static HypersurfaceSpec degenerate(Signature sig) { return {DegenerateParams{}, sig}; }
  static HypersurfaceSpec horosphere(Signature sig, double t) { return {HorosphereParams{t}, sig}; }

  const Signature& sig() const { return sig_; }
  const FamilyParams& params() const { return params_; }

  Family family() const { return static_cast<Family>(params_.index()); }
  bool degenerate() const { return family() == Family::Degenerate; }

  /// Causal character of the normal; 0 for the lightlike example.
  int epsilon() const {
    switch (family()) {
      case Family::TypeA: return t() * (1.0 - t()) > 0 ? 1 : -1;
      case Family::TypeB: return t() * (1.0 - t()) > 0 ? 1 : -1;
      case Family::Degenerate: return 0;
      case Family::Horosphere: return -1;
    }
    return 0;
  }

  double t() const {
    return std::visit(
        [](const auto& p) -> double {
          if constexpr (std::is_same_v<std::decay_t<decltype(p)>, DegenerateParams>)
            return 1.0;
          else
            return p.t;
        },
        params_);
  }

  const TypeAParams& a() const { return std::get<TypeAParams>(params_); }

  /// alpha = 1/sqrt(eps t (1-t)) for TypeB; (1-t)/sqrt(...) for TypeA.
  double scale() const { return std::sqrt(epsilon() * t() * (1.0 - t())); }

  /// Human-readable name, e.g. "TypeA(q=1,m=4,t=0.75)".
  std::string label() const {
    std::ostringstream os;
    os.precision(17);
    os << to_string(family());
    switch (family()) {
      case Family::TypeA: os << "(q=" << a().q << ",m=" << a().m << ",t=" << t() << ")"; break;
      case Family::TypeB:
      case Family::Horosphere: os << "(t=" << t() << ")"; break;
      case Family::Degenerate: break;
    }
    return os.str();
  }

  /// True when coordinate j (0-based) belongs to the q1-block of a TypeA spec.
  bool in_q1(int j) const {
    const int k = j + 1;
    return k <= a().q || k >= a().m;
  }

  /// (negative, positive) coordinate counts of the q1 and q2 blocks.
  std::pair<std::pair<int, int>, std::pair<int, int>> block_signatures() const {
    std::pair<int, int> b1{0, 0}, b2{0, 0};
    for (int j = 0; j < sig_.complex_dim(); ++j) {
      auto& b = in_q1(j) ? b1 : b2;
      (sig_.sign(j) < 0 ? b.first : b.second)++;
    }
    return {b1, b2};
  }

 private:
  void validate() const {
    require_projective(sig_);
    const int n = sig_.n, p = sig_.p;
    switch (family()) {
      case Family::TypeA: {
        const auto& [q, m, tt] = a();
        if (!(0 <= q && q <= p && p <= m && m <= n + 2 && m > q + 1))
          throw InfeasibleSpec("TypeA: need 0 <= q <= p <= m <= n+2 and m > q+1 (q=" + std::to_string(q) +
                               ", m=" + std::to_string(m) + ", p=" + std::to_string(p) + ")");
        if (q == 0 && m == n + 2) throw InfeasibleSpec("TypeA: the case q=0, m=n+2 is excluded");
        if (!std::isfinite(tt) || tt == 0.0 || tt == 1.0) throw InfeasibleSpec("TypeA: need t != 0, 1");
        const auto [b1, b2] = block_signatures();
        auto check = [](const char* name, std::pair<int, int> b, double target) {
          if (target > 0 && b.second == 0)
            throw InfeasibleSpec(std::string("TypeA: ") + name + " is negative definite but must carry norm " +
                                 std::to_string(target) + " > 0");
          if (target < 0 && b.first == 0)
            throw InfeasibleSpec(std::string("TypeA: ") + name + " is positive definite but must carry norm " +
                                 std::to_string(target) + " < 0");
        };
        check("q1-block", b1, tt);
        check("q2-block", b2, 1.0 - tt);
        break;
      }
      case Family::TypeB:
        if (!std::isfinite(t()) || t() <= 0.0 || t() == 1.0) throw InfeasibleSpec("TypeB: need t > 0, t != 1");
        break;
      case Family::Degenerate: break;
      case Family::Horosphere:
        if (!std::isfinite(t()) || t() <= 0.0) throw InfeasibleSpec("Horosphere: need t > 0");
        break;
    }
  }

  FamilyParams params_;
  Signature sig_;
};

// ---------------------------------------------------------------------------
// polynomial pieces

/// Q(z) = -sum_{j<=p} z_j^2 + sum_{j>p} z_j^2 = g_C(z, conj z).
inline Complex q_polynomial(const AmbientVector& z, const Signature& sig) {
  check_length(z, sig, "q_polynomial");
  Complex acc{0.0, 0.0};
  for (int j = 0; j < sig.complex_dim(); ++j) acc += sig.sign(j) * z[j] * z[j];
  return acc;
}

/// sum_j s_j X_j z_j, i.e. g_C(X, conj z) = g_C(z, conj X).
inline Complex bilinear(const AmbientVector& X, const AmbientVector& z, const Signature& sig) {
  Complex acc{0.0, 0.0};
  for (int j = 0; j < sig.complex_dim(); ++j) acc += sig.sign(j) * X[j] * z[j];
  return acc;
}

struct BlockPair {
  AmbientVector q1;
  AmbientVector q2;
};

inline BlockPair block_projectors(const HypersurfaceSpec& spec, const AmbientVector& z) {
  if (spec.family() != Family::TypeA) throw PreconditionError("block_projectors: TypeA spec required");
  check_length(z, spec.sig(), "block_projectors");
  BlockPair out{AmbientVector::Zero(z.size()), AmbientVector::Zero(z.size())};
  for (int j = 0; j < z.size(); ++j) (spec.in_q1(j) ? out.q1 : out.q2)[j] = z[j];
  return out;
}

/// zeta = (z_1 - z_{n+1}, 0, ..., 0, z_1 - z_{n+1}).
inline AmbientVector horosphere_zeta(const AmbientVector& z) {
  AmbientVector zeta = AmbientVector::Zero(z.size());
  const Complex d = z[0] - z[z.size() - 1];
  zeta[0] = d;
  zeta[z.size() - 1] = d;
  return zeta;
}

struct DefiningResidual {
  double family = 0.0;  // F(z) - target
  double sphere = 0.0;  // g(z,z) - 1
  double max_abs() const { return std::max(std::abs(family), std::abs(sphere)); }
};

inline double defining_function(const HypersurfaceSpec& spec, const AmbientVector& z) {
  const auto& sig = spec.sig();
  switch (spec.family()) {
    case Family::TypeA: {
      const auto b = block_projectors(spec, z);
      return metric_norm2(b.q1, sig) - spec.t();
    }
    case Family::TypeB:
    case Family::Degenerate: return std::norm(q_polynomial(z, sig)) - spec.t();
    case Family::Horosphere: return std::norm(z[0] - z[z.size() - 1]) - spec.t();
  }
  return 0.0;
}

inline DefiningResidual defining_residual(const HypersurfaceSpec& spec, const AmbientVector& z) {
  check_length(z, spec.sig(), "defining_residual");
  return {defining_function(spec, z), metric_norm2(z, spec.sig()) - 1.0};
}

/// g-gradients of (g(z,z), F(z)): dF(X) = g(X, W).
inline std::pair<AmbientVector, AmbientVector> constraint_gradients(const HypersurfaceSpec& spec,
                                                                    const AmbientVector& z) {
  const auto& sig = spec.sig();
  AmbientVector w1;
  switch (spec.family()) {
    case Family::TypeA: w1 = 2.0 * block_projectors(spec, z).q1; break;
    case Family::TypeB:
    case Family::Degenerate: w1 = 4.0 * q_polynomial(z, sig) * z.conjugate(); break;
    case Family::Horosphere: w1 = -2.0 * horosphere_zeta(z); break;
  }
  return {2.0 * z, w1};
}

inline void require_on_surface(const HypersurfaceSpec& spec, const AmbientVector& z, const TolerancePolicy& tol,
                               const char* what) {
  const auto r = defining_residual(spec, z);
  if (r.max_abs() > tol.constraint_tol)
    throw PreconditionError(std::string(what) + ": point is off the hypersurface (residuals " +
                            std::to_string(r.family) + ", " + std::to_string(r.sphere) + ")");
}

inline void require_tangent(const HypersurfaceSpec& spec, const AmbientVector& z, const AmbientVector& X,
                            const TolerancePolicy& tol, const char* what) {
  check_length(X, spec.sig(), what);
  const auto [w0, w1] = constraint_gradients(spec, z);
  const double scale = std::max(1.0, X.norm());
  const double d0 = std::abs(real_metric(X, w0, spec.sig())) / (scale * std::max(1.0, w0.norm()));
  const double d1 = std::abs(real_metric(X, w1, spec.sig())) / (scale * std::max(1.0, w1.norm()));
  if (d0 > tol.constraint_tol || d1 > tol.constraint_tol)
    throw PreconditionError(std::string(what) + ": vector is not tangent to the lifted hypersurface");
}

struct UnitNormal {
  AmbientVector N;
  int epsilon = 0;
};

/// Closed-form normal, valid wherever the formula makes sense; no on-surface check.
inline AmbientVector normal_field(const HypersurfaceSpec& spec, const AmbientVector& z) {
  const auto& sig = spec.sig();
  const double t = spec.t();
  switch (spec.family()) {
    case Family::TypeA: {
      const auto b = block_projectors(spec, z);
      const double s = spec.scale();
      return ((1.0 - t) / s) * b.q1 + (-t / s) * b.q2;
    }
    case Family::TypeB: return (q_polynomial(z, sig) * z.conjugate() - t * z) / spec.scale();
    case Family::Degenerate: return q_polynomial(z, sig) * z.conjugate() - z;
    case Family::Horosphere: return -horosphere_zeta(z) / t - z;
  }
  return {};
}

inline UnitNormal unit_normal(const HypersurfaceSpec& spec, const AmbientVector& z, const TolerancePolicy& tol = {}) {
  check_length(z, spec.sig(), "unit_normal");
  require_on_surface(spec, z, tol, "unit_normal");
  return {normal_field(spec, z), spec.epsilon()};
}

/// Structure field xi~ = -J N~.
inline AmbientVector reeb_field(const HypersurfaceSpec& spec, const AmbientVector& z) {
  return -apply_J(normal_field(spec, z));
}

/// A_N X = -D_X N at the hyperquadric level, closed form, no checks.
inline AmbientVector weingarten_formula(const HypersurfaceSpec& spec, const AmbientVector& z, const AmbientVector& X) {
  const auto& sig = spec.sig();
  const double t = spec.t();
  switch (spec.family()) {
    case Family::TypeA: {
      const auto b = block_projectors(spec, X);
      const double s = spec.scale();
      return -((1.0 - t) / s) * b.q1 - (-t / s) * b.q2;
    }
    case Family::TypeB: {
      const AmbientVector zb = z.conjugate();
      return -(2.0 * bilinear(X, z, sig) * zb + q_polynomial(z, sig) * X.conjugate() - t * X) / spec.scale();
    }
    case Family::Degenerate: {
      const AmbientVector zb = z.conjugate();
      return -2.0 * bilinear(X, z, sig) * zb - q_polynomial(z, sig) * X.conjugate() + X;
    }
    case Family::Horosphere: return horosphere_zeta(X) / t + X;
  }
  return {};
}

inline AmbientVector analytic_weingarten(const HypersurfaceSpec& spec, const AmbientVector& z, const AmbientVector& X,
                                         const TolerancePolicy& tol = {}) {
  require_tangent(spec, z, X, tol, "analytic_weingarten");
  return weingarten_formula(spec, z, X);
}

// ---------------------------------------------------------------------------
// samplers

inline constexpr int kRejectionBudget = 10000;

namespace detail {

inline double normal_draw(std::mt19937_64& rng) {
  std::normal_distribution<double> d(0.0, 1.0);
  return d(rng);
}

// Signed real metric on R^{n+1} with the signature's signs.
inline double real_form(const RealVector& x, const RealVector& y, const Signature& sig) {
  double acc = 0.0;
  for (int j = 0; j < sig.complex_dim(); ++j) acc += sig.sign(j) * x[j] * y[j];
  return acc;
}

// Random real vector supported on `mask` with real_form == target (target != 0).
inline RealVector real_with_norm(const std::vector<bool>& mask, double target, const Signature& sig,
                                 std::mt19937_64& rng, const RealVector* orth = nullptr) {
  for (int attempt = 0; attempt < kRejectionBudget; ++attempt) {
    RealVector v(sig.complex_dim());
    for (int j = 0; j < v.size(); ++j) v[j] = mask[static_cast<std::size_t>(j)] ? normal_draw(rng) : 0.0;
    if (orth) v -= (real_form(v, *orth, sig) / real_form(*orth, *orth, sig)) * *orth;
    const double q = real_form(v, v, sig);
    if (q * target > 0 && std::abs(q) > 1e-3) return v * std::sqrt(target / q);
  }
  throw NumericFailure("sampler: rejection budget exhausted");
}

// Random complex vector supported on `mask` with g(v,v) == target (target != 0).
inline AmbientVector complex_with_norm(const std::vector<bool>& mask, double target, const Signature& sig,
                                       std::mt19937_64& rng) {
  for (int attempt = 0; attempt < kRejectionBudget; ++attempt) {
    AmbientVector v(sig.complex_dim());
    for (int j = 0; j < v.size(); ++j)
      v[j] = mask[static_cast<std::size_t>(j)] ? Complex(normal_draw(rng), normal_draw(rng)) : Complex(0.0, 0.0);
    const double q = metric_norm2(v, sig);
    if (q * target > 0 && std::abs(q) > 1e-3) return v * std::sqrt(target / q);
  }
  throw NumericFailure("sampler: rejection budget exhausted");
}

}  // namespace detail

/// z = x + i y with x, y real, <x,x> = 1/2 = <y,y>, <x,y> = 0, so Q(z) = 0 and g(z,z) = 1.
inline AmbientVector sample_quadric_point(const Signature& sig, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const std::vector<bool> all(static_cast<std::size_t>(sig.complex_dim()), true);
  const RealVector x = detail::real_with_norm(all, 0.5, sig, rng);
  const RealVector y = detail::real_with_norm(all, 0.5, sig, rng, &x);
  AmbientVector z(sig.complex_dim());
  for (int j = 0; j < z.size(); ++j) z[j] = Complex(x[j], y[j]);
  return z;
}

/// Deterministic on-surface sample for a fixed seed.
inline AmbientVector sample_point(const HypersurfaceSpec& spec, std::uint64_t seed) {
  const auto& sig = spec.sig();
  const int dim = sig.complex_dim();
  std::mt19937_64 rng(seed);
  const std::vector<bool> all(static_cast<std::size_t>(dim), true);
  switch (spec.family()) {
    case Family::TypeA: {
      std::vector<bool> m1(static_cast<std::size_t>(dim)), m2(static_cast<std::size_t>(dim));
      for (int j = 0; j < dim; ++j) {
        m1[static_cast<std::size_t>(j)] = spec.in_q1(j);
        m2[static_cast<std::size_t>(j)] = !spec.in_q1(j);
      }
      return detail::complex_with_norm(m1, spec.t(), sig, rng) + detail::complex_with_norm(m2, 1.0 - spec.t(), sig, rng);
    }
    case Family::TypeB: {
      const double rt = std::sqrt(spec.t());
      const RealVector x = detail::real_with_norm(all, (1.0 + rt) / 2.0, sig, rng);
      const RealVector y = detail::real_with_norm(all, (1.0 - rt) / 2.0, sig, rng, &x);
      AmbientVector z(dim);
      for (int j = 0; j < dim; ++j) z[j] = Complex(x[j], y[j]);
      return z;
    }
    case Family::Degenerate: {
      // <x,x> = 1, y null and orthogonal to x, so Q = 1 and rank{z,iz,zb,izb} = 4
      for (int attempt = 0; attempt < kRejectionBudget; ++attempt) {
        const RealVector x = detail::real_with_norm(all, 1.0, sig, rng);
        const RealVector yp = detail::real_with_norm(all, 1.0, sig, rng, &x);
        RealVector yn = detail::real_with_norm(all, -1.0, sig, rng, &x);
        yn -= (detail::real_form(yn, yp, sig) / detail::real_form(yp, yp, sig)) * yp;
        const double qn = detail::real_form(yn, yn, sig);
        if (qn >= -1e-3) continue;
        yn /= std::sqrt(-qn);
        const double scale = 0.25 + std::abs(detail::normal_draw(rng));
        const RealVector y = scale * (yp + yn);
        AmbientVector z(dim);
        for (int j = 0; j < dim; ++j) z[j] = Complex(x[j], y[j]);
        const AmbientVector zb = z.conjugate();
        const std::vector<AmbientVector> four{z, kI * z, zb, kI * zb};
        if (detail::real_rank(four, 1e-8) == 4) return z;
      }
      throw NumericFailure("sampler: rejection budget exhausted (degenerate family)");
    }
    case Family::Horosphere: {
      // middle coordinates random; then solve |a-b|^2 = t and -|a|^2 + |b|^2 + nu = 1
      AmbientVector z = AmbientVector::Zero(dim);
      for (int j = 1; j < dim - 1; ++j) z[j] = 0.5 * Complex(detail::normal_draw(rng), detail::normal_draw(rng));
      double nu = 0.0;
      for (int j = 1; j < dim - 1; ++j) nu += sig.sign(j) * std::norm(z[j]);
      const double t = spec.t();
      const double phi = 2.0 * std::numbers::pi * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
      const Complex d = std::polar(std::sqrt(t), phi);
      const Complex w((t + nu - 1.0) / 2.0, detail::normal_draw(rng));
      const Complex a = d * w / t;
      z[0] = a;
      z[dim - 1] = a - d;
      return z;
    }
  }
  return {};
}

// ---------------------------------------------------------------------------
// frames

struct HypersurfaceFrames {
  FrameAtPoint full;        // spans T_z M~ (2n)
  FrameAtPoint horizontal;  // xi~ first, then D~ (2n-1); empty for the lightlike family
  FrameAtPoint dee;         // D~ (2n-2); orthonormal except for the lightlike family
};

namespace detail {

// Real basis of {X : g(X, c) = 0 for c in constraints}, seeded with `seed` vectors.
inline std::vector<AmbientVector> annihilator_basis(std::span<const AmbientVector> constraints,
                                                    std::vector<AmbientVector> seed, const Signature& sig) {
  const int dim = sig.real_dim();
  RealMatrix C(static_cast<Eigen::Index>(constraints.size()), dim);
  const RealMatrix Gs = [&] {
    RealVector d(dim);
    for (int j = 0; j < sig.complex_dim(); ++j) d[j] = d[sig.complex_dim() + j] = sig.sign(j);
    return RealMatrix(d.asDiagonal());
  }();
  for (std::size_t k = 0; k < constraints.size(); ++k)
    C.row(static_cast<Eigen::Index>(k)) = (Gs * to_real(constraints[k])).transpose();
  Eigen::FullPivLU<RealMatrix> lu(C);
  const RealMatrix K = lu.kernel();
  std::vector<AmbientVector> out = std::move(seed);
  for (Eigen::Index c = 0; c < K.cols(); ++c) {
    std::vector<AmbientVector> trial = out;
    trial.push_back(from_real(K.col(c)));
    if (real_rank(trial, 1e-9) > static_cast<int>(out.size())) out = std::move(trial);
  }
  return out;
}

}  // namespace detail

inline HypersurfaceFrames tangent_and_dee_frames(const HypersurfaceSpec& spec, const AmbientVector& z,
                                                 const TolerancePolicy& tol = {}) {
  const auto& sig = spec.sig();
  require_on_surface(spec, z, tol, "tangent_and_dee_frames");
  const AmbientVector N = normal_field(spec, z);
  const AmbientVector xi = -apply_J(N);
  const AmbientVector Jz = apply_J(z);
  HypersurfaceFrames f;
  if (spec.degenerate()) {
    const AmbientVector zb = z.conjugate();
    const AmbientVector qz = q_polynomial(z, sig) * zb;
    const std::vector<AmbientVector> tcons{z, qz};
    f.full = FrameAtPoint::make(z, detail::annihilator_basis(tcons, {N, xi, Jz}, sig), sig, false);
    const std::vector<AmbientVector> dcons{z, Jz, zb, apply_J(zb)};
    f.dee = FrameAtPoint::make(z, detail::annihilator_basis(dcons, {N, xi}, sig), sig, false);
    f.horizontal = FrameAtPoint::make(z, {}, sig, false);
    if (f.full.size() != 2 * sig.n || f.dee.size() != 2 * sig.n - 2)
      throw DegeneracyError("tangent_and_dee_frames: rank condition fails at this point",
                            2 * sig.n - f.full.size());
    return f;
  }
  const std::vector<AmbientVector> span{z, Jz, N, xi};
  const auto comp = orthonormal_complement(span, sig, tol);
  std::vector<AmbientVector> dee = comp.complement.vectors;
  std::vector<AmbientVector> hor{xi};
  hor.insert(hor.end(), dee.begin(), dee.end());
  std::vector<AmbientVector> full = hor;
  full.push_back(Jz);
  f.dee = FrameAtPoint::make(z, std::move(dee), sig, true);
  f.horizontal = FrameAtPoint::make(z, std::move(hor), sig, true);
  f.full = FrameAtPoint::make(z, std::move(full), sig, true);
  return f;
}

// ---------------------------------------------------------------------------
// predicted invariants

enum class PhiBehavior { EachEigenspaceJInvariant, PhiSwapsPair };

struct EigenEntry {
  double value = 0.0;
  int multiplicity = 0;
};

struct PredictedInvariants {
  double mu = 0.0;
  std::vector<EigenEntry> eigenvalues;  // on D, sorted by value, zero multiplicities dropped
  PhiBehavior phi_behavior = PhiBehavior::EachEigenspaceJInvariant;
  bool orientation_caveat = false;
  /// Tube radius on the principal branch for the family (NaN when none applies).
  double r = std::numeric_limits<double>::quiet_NaN();
};

inline PredictedInvariants predicted_invariants(const HypersurfaceSpec& spec) {
  if (spec.degenerate()) throw PreconditionError("predicted_invariants: lightlike family has no unit normal");
  const int n = spec.sig().n;
  const double t = spec.t();
  PredictedInvariants out;
  switch (spec.family()) {
    case Family::TypeA: {
      const auto& [q, m, tt] = spec.a();
      const double s = spec.scale();
      const double alpha = (1.0 - t) / s, beta = -t / s;
      out.mu = (2.0 * t - 1.0) / s;
      // -alpha lives on the q1-block, -beta on the q2-block
      out.eigenvalues = {{-alpha, 2 * (n + q - m + 1)}, {-beta, 2 * (m - q - 2)}};
      out.r = t < 1.0 ? std::acos(std::sqrt(t)) : std::acosh(std::sqrt(t));
      break;
    }
    case Family::TypeB: {
      const double alpha = 1.0 / spec.scale();
      const double rt = std::sqrt(t);
      out.mu = 2.0 * (t - 1.0) * alpha;
      out.eigenvalues = {{alpha * (t - rt), n - 1}, {alpha * (t + rt), n - 1}};
      out.phi_behavior = PhiBehavior::PhiSwapsPair;
      out.orientation_caveat = t < 1.0;
      out.r = t < 1.0 ? std::asin(rt) / 2.0 : std::acosh(rt) / 2.0;
      break;
    }
    case Family::Horosphere:
      out.mu = 2.0;
      out.eigenvalues = {{1.0, 2 * n - 2}};
      break;
    case Family::Degenerate: break;
  }
  std::erase_if(out.eigenvalues, [](const EigenEntry& e) { return e.multiplicity == 0; });
  std::sort(out.eigenvalues.begin(), out.eigenvalues.end(),
            [](const EigenEntry& a, const EigenEntry& b) { return a.value < b.value; });
  return out;
}

// ---------------------------------------------------------------------------
// tube over the complex quadric

/// gamma_theta(s) = cos(s) z0 + sin(s)(cos(theta) conj(z0) + sin(theta) i conj(z0)).
inline AmbientVector tube_point(const AmbientVector& z0, double theta, double s, const Signature& sig,
                                const TolerancePolicy& tol = {}) {
  check_length(z0, sig, "tube_point");
  if (std::abs(metric_norm2(z0, sig) - 1.0) > tol.constraint_tol ||
      std::abs(q_polynomial(z0, sig)) > tol.constraint_tol)
    throw PreconditionError("tube_point: z0 must lie on the lifted complex quadric");
  const AmbientVector zb = z0.conjugate();
  const AmbientVector v = std::cos(theta) * zb + std::sin(theta) * apply_J(zb);
  return sphere_geodesic(z0, v, s, sig, tol);
}

}  // namespace hopflab
