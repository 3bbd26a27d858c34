// Minimal usage demo: build the trefoil linking form (x, y) -> x y# / (t - 1 + t^{-1}),
// classify it, and print the jump table and a few signature values.

#include <cstdio>

#include "linkform/linkform.hpp"

using namespace linkform;

int main() {
  FieldContext ctx = FieldContext::make(12);

  LinkingForm form;
  form.mode = Mode::Real;
  form.ctx = ctx;
  form.summands.push_back(CyclicPairing{basic_poly(ctx, Mode::Real, RootOfUnity(1, 6)),
                                        LaurentPoly::one(ctx), Mode::Real});

  Decomposition d = classify(form);
  for (const auto& p : d.parts)
    std::printf("e(n=%ld, k=%ld, eps=%+d, xi=exp(2 pi i %ld/%ld))\n", p.n, p.k, p.eps, p.xi.num,
                p.xi.den);

  JumpTable t = jumps(d);
  for (const auto& [xi, v] : t.support())
    std::printf("jump at %ld/%ld: %+ld\n", xi.num, xi.den, v);

  for (long j : {1L, 6L, 12L}) {
    RootOfUnity omega(j, 24);
    std::printf("sigma(exp(2 pi i %ld/24)) = %ld, averaged %s\n", j,
                signature_function(d, omega),
                averaged_signature(d, omega).get_str().c_str());
  }
  std::printf("metabolic: %s\n", is_metabolic(d) ? "yes" : "no");
  return 0;
}
