#include <cmath>
#include <random>

#include "doctest.h"
#include "pmod/error.hpp"
#include "pmod/mollifier.hpp"
#include "support.hpp"

using namespace pmod;
using testing_support::box;
using testing_support::unit_square;

namespace {

// Straight segment {y = 1/2} across the unit square at m = 16.
SliceMember horizontal_segment(const GridComplex& g) {
  SliceMember s;
  s.dim = 1;
  for (const auto& e : g.cells(1)) {
    if (e.coord[1] == g.cells_along(1) && e.spans(0)) {
      s.cells.push_back(e);
      s.weights.push_back(g.measure(e));
    }
  }
  return s;
}

}  // namespace

TEST_SUITE("mollifier") {
  TEST_CASE("bump normalization in one dimension") {
    // integral_{-1}^{1} exp(-1/(1-r^2)) dr = 0.44399381616807943...
    CHECK(kernel_normalization(1, KernelProfile::bump) == doctest::Approx(1.0 / 0.44399381616807943).epsilon(1e-10));
    CHECK(kernel_normalization(2, KernelProfile::indicator) == doctest::Approx(1.0 / M_PI).epsilon(1e-14));
    CHECK(kernel_normalization(3, KernelProfile::indicator) == doctest::Approx(3.0 / (4.0 * M_PI)).epsilon(1e-14));
  }

  TEST_CASE("kernels integrate to one") {
    for (int n : {2, 3}) {
      const auto k = make_kernel(n, 0.1);
      const int cells = n == 2 ? 800 : 120;
      const double step = 0.2 / cells;
      double sum = 0.0;
      Point x{};
      std::array<int, 3> i{};
      const long total = static_cast<long>(std::pow(cells, n));
      for (long idx = 0; idx < total; ++idx) {
        long rest = idx;
        for (int a = 0; a < n; ++a) {
          i[a] = static_cast<int>(rest % cells);
          rest /= cells;
          x[a] = -0.1 + (i[a] + 0.5) * step;
        }
        sum += kernel_eval(k, x);
      }
      CHECK(sum * std::pow(step, n) == doctest::Approx(1.0).epsilon(1e-4));
      Point far{};
      far[0] = 0.1;
      CHECK(kernel_eval(k, far) == 0.0);
    }
  }

  TEST_CASE("segment convolution matches dense quadrature") {
    const auto g = build_grid(unit_square(16));
    const auto seg = horizontal_segment(g);
    const auto k = make_kernel(2, 0.1);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.15, 0.85);
    for (int trial = 0; trial < 5; ++trial) {
      const Point x{u(rng), 0.5 + 0.08 * (u(rng) - 0.5), 0.0, 0.0};
      // phi_eps^S(x) = integral over t of phi(x - (t, 1/2)), dense midpoint rule.
      const int steps = 200000;
      const double lo = x[0] - 0.1;
      const double dt = 0.2 / steps;
      double dense = 0.0;
      for (int i = 0; i < steps; ++i) dense += kernel_eval(k, {x[0] - (lo + (i + 0.5) * dt), x[1] - 0.5, 0, 0});
      dense *= dt;
      CHECK(convolve_surface(g, seg, k, x, kOracleMollifierOrder) == doctest::Approx(dense).epsilon(1e-7));
      CHECK(convolve_surface(g, seg, k, x, 4) == doctest::Approx(dense).epsilon(1e-2));
    }
  }

  TEST_CASE("translated member equals shifted evaluation") {
    const auto g = build_grid(unit_square(32));
    const auto fibers = axis_members(g, FamilyHandle{FamilySide::A, FamilyMode::axis_restricted, 0.45});
    const auto& s = fibers.front();
    const auto moved = translate_member(g, s, {0, 1, 0, 0}, 0.45);
    const auto k = make_kernel(2, 0.1);
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
      const Point x{u(rng), 0.35 + 0.3 * u(rng), 0.0, 0.0};
      Point back = x;
      back[1] -= g.spacing();
      CHECK(std::abs(convolve_surface(g, moved, k, x) - convolve_surface(g, s, k, back)) <= 1e-12);
    }
  }

  TEST_CASE("mollified fiber keeps unit mass") {
    const auto g = build_grid(unit_square(16));
    const auto fibers = axis_members(g, FamilyHandle{FamilySide::A, FamilyMode::axis_restricted, 0.2});
    const auto k = make_kernel(2, 0.1);
    // Mass lost at the two ends of the fiber is at most about epsilon/2 each.
    const double mass = mollified_mass(g, fibers[fibers.size() / 2], k);
    CHECK(mass <= 1.0 + 1e-3);
    CHECK(mass >= 0.9);
  }

  TEST_CASE("straight blockers see unit weight") {
    const auto g = build_grid(unit_square(16));
    const auto s = axis_members(g, FamilyHandle{FamilySide::A, FamilyMode::axis_restricted, 0.2})[3];
    const auto stars = axis_members(g, FamilyHandle{FamilySide::B, FamilyMode::axis_restricted, 0.2});
    const auto k = make_kernel(2, 0.1);
    const auto rep = admissibility_margin(g, s, k, stars, 0.2, kOracleMollifierOrder);
    CHECK(rep.values.size() == stars.size());
    for (double v : rep.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-6));
  }

  TEST_CASE("admissibility preconditions") {
    const auto g = build_grid(unit_square(16));
    const auto s = axis_members(g, FamilyHandle{FamilySide::A, FamilyMode::axis_restricted, 0.2})[3];
    const auto near = axis_members(g, FamilyHandle{FamilySide::B, FamilyMode::axis_restricted, 0.0});
    const auto k = make_kernel(2, 0.1);
    CHECK_THROWS_AS(admissibility_margin(g, s, k, {near[5]}, 0.05), InvalidInput);      // epsilon >= margin
    CHECK_THROWS_AS(admissibility_margin(g, s, k, {near.front()}, 0.2), InvalidInput);  // too close to A
    CHECK_THROWS_AS(admissibility_margin(g, s, k, {}, 0.2), InvalidInput);
    CHECK_NOTHROW(admissibility_margin(g, s, k, {near.front()}, 0.2, 4, false));
    CHECK_THROWS_AS(convolve_surface(g, s, make_kernel(3, 0.1), {0.5, 0.5, 0, 0}), InvalidInput);
    const auto sheared = build_grid(box(2, 1, {1.0}, {1.0}, 16, {DeformationKind::shear, 0.3}));
    CHECK_THROWS_AS(member_pieces(sheared, s), InvalidInput);
  }

  TEST_CASE("coarea factor of tangent planes") {
    Eigen::MatrixXd e0(2, 1), e1(2, 1), diag(2, 1);
    e0 << 1, 0;
    e1 << 0, 1;
    diag << 1, 1;
    CHECK(coarea_factor(e1, e0) == doctest::Approx(1.0));
    CHECK(coarea_factor(e0, e0) == doctest::Approx(0.0));
    CHECK(coarea_factor(diag, e0) == doctest::Approx(std::sqrt(0.5)));
    Eigen::MatrixXd plane(3, 2), line(3, 1);
    plane << 1, 0, 0, 1, 0, 0;
    line << 0, 0, 2;
    CHECK(coarea_factor(plane, line) == doctest::Approx(1.0));
    CHECK_THROWS_AS(coarea_factor(plane, plane), InvalidInput);
  }
}
