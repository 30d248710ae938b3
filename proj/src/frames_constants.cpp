// Generated by tools/regen_constants (d=4, k=5 complex family maximum).
#include "nullwit/frames.hpp"

namespace nullwit {

D4K5Params d4k5_complex_best() {
  return D4K5Params{-0.70665687055494353, 0.03566698850077301, 0.33827314890825416,
                    0.62043147079792293, -0.47869505355028114, -0.87798123311748155};
}

}  // namespace nullwit
