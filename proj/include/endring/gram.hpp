#pragma once

#include <array>

#include "endring/arith.hpp"

namespace endring {

// Gram matrix G[i][j] = Trd(g_i conj(g_j)) of a candidate basis g_0 = 1, g_1, g_2, g_3.
struct GramMatrix {
  std::array<std::array<Int, 4>, 4> g;

  Int det() const;
  bool symmetric() const;
  bool operator==(const GramMatrix& o) const { return g == o.g; }
};

}  // namespace endring
