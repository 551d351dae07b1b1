#include "pmod/quadrature.hpp"

#include <algorithm>
#include <boost/math/special_functions/legendre.hpp>
#include <map>
#include <mutex>

#include "pmod/error.hpp"

namespace pmod {

namespace {

GaussRule make_rule(int order) {
  // legendre_p_zeros returns the nonnegative roots on [-1, 1].
  const auto half = boost::math::legendre_p_zeros<double>(order);
  std::vector<std::pair<double, double>> pts;
  for (double x : half) {
    const double dp = boost::math::legendre_p_prime(order, x);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    pts.emplace_back(x, w);
    if (x != 0.0) pts.emplace_back(-x, w);
  }
  std::sort(pts.begin(), pts.end());
  GaussRule rule;
  for (auto [x, w] : pts) {
    rule.nodes.push_back(0.5 * (x + 1.0));
    rule.weights.push_back(0.5 * w);
  }
  return rule;
}

}  // namespace

const GaussRule& gauss_legendre(int order) {
  if (order < 1 || order > 200) throw InvalidInput("quadrature order out of range");
  static std::mutex mutex;
  static std::map<int, GaussRule> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, make_rule(order)).first;
  return it->second;
}

}  // namespace pmod
