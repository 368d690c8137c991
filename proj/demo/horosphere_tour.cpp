// Walks through one point of each example family: samples a point, descends
// the shape operator and prints mu, the principal curvatures and the
// eta-umbilical class.

#include <cstdio>

#include "hopflab/hopflab.hpp"

using namespace hopflab;

static void show(const char* name, const HypersurfaceSpec& spec) {
  const AmbientVector z = sample_point(spec, 2024);
  const auto w = descend(spec, z);
  const auto s = spectral_summary(w.matrix);
  const auto c = classify(w.epsilon, s, w.mu, spec.sig().n);
  std::printf("%-4s %-28s eps=%+d mu=% .6f  ", name, spec.label().c_str(), w.epsilon, w.mu);
  for (const auto& k : s.clusters) std::printf("%.6f(x%d) ", k.value, k.algebraic);
  std::printf(" -> %s\n", to_string(c.tag));
}

int main() {
  const Signature sig(4, 2);
  const double ch = std::cosh(1.0);
  show("A+", HypersurfaceSpec::type_a(sig, 1, 4, 0.75));
  show("A-", HypersurfaceSpec::type_a(sig, 1, 4, 2.0));
  show("B+", HypersurfaceSpec::type_b(sig, 0.5));
  show("B0", HypersurfaceSpec::type_b(sig, 4.0));
  show("B-", HypersurfaceSpec::type_b(sig, ch * ch));
  show("C", HypersurfaceSpec::horosphere(sig, 1.0));
  show("A+w", HypersurfaceSpec::type_a(sig, 2, 4, 0.25));

  // the lightlike example has no descent; look at A_N upstairs instead
  const auto deg = HypersurfaceSpec::degenerate(sig);
  const AmbientVector z = sample_point(deg, 2024);
  const auto lift = lift_operator(deg, z, tangent_and_dee_frames(deg, z).full);
  const auto s = spectral_summary(lift.matrix);
  std::printf("lightlike lift: ");
  for (const auto& k : s.clusters) std::printf("%.3g(alg %d, geo %d) ", k.value, k.algebraic, k.geometric);
  std::printf("diagonalizable=%s\n", s.diagonalizable ? "yes" : "no");
}
