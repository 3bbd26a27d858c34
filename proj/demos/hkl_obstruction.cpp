// Reproduce the sliceness obstruction for
//   K = T(2,3;2,13) # T(2,15) # -T(2,3;2,15) # -T(2,13):
// sweep the Z_ell characters of the double branched cover for
// ell = 3, 5, 13 and report how many classes give a metabolic
// metabelian Blanchfield form.

#include <cstdio>

#include "linkform/linkform.hpp"

using namespace linkform;

int main() {
  for (long ell : {3L, 5L, 13L}) {
    SweepReport rep = hkl_sweep(ell, 2);
    std::printf("ell = %2ld: %3ld nontrivial classes, %ld metabolic; trivial class %s\n", ell,
                rep.nontrivial_classes, rep.nontrivial_metabolic,
                rep.trivial_metabolic ? "metabolic" : "NOT metabolic");
  }
  std::printf("\n%s\n", hkl_sweep(3).note.c_str());
  return 0;
}
