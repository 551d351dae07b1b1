#pragma once

#include <vector>

namespace pmod {

// Gauss-Legendre rule mapped to [0, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Cached per order; order >= 1.
const GaussRule& gauss_legendre(int order);

}  // namespace pmod
