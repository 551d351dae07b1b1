#include <cmath>

#include "doctest.h"
#include "pmod/error.hpp"
#include "pmod/homology.hpp"
#include "support.hpp"

using namespace pmod;
using testing_support::box;

namespace {

long binomial(int n, int r) {
  long v = 1;
  for (int i = 1; i <= r; ++i) v = v * (n - r + i) / i;
  return v;
}

}  // namespace

TEST_SUITE("grid") {
  TEST_CASE("cell counts match the cubical formula") {
    // cells of dim d in an N^n grid: C(n,d) N^d (N+1)^(n-d)
    for (int n = 2; n <= 4; ++n) {
      const int m = 3;
      const auto g = build_grid(box(n, 1, {1.0}, std::vector<double>(n - 1, 1.0), m));
      std::size_t total = 0;
      for (int d = 0; d <= n; ++d) {
        const long expect = binomial(n, d) * static_cast<long>(std::pow(m, d) * std::pow(m + 1, n - d));
        CHECK(static_cast<long>(g.num_cells(d)) == expect);
        total += g.num_cells(d);
      }
      CHECK(g.total_cells() == total);
      CHECK(total == static_cast<std::size_t>(std::pow(2 * m + 1, n)));
    }
  }

  TEST_CASE("top measures sum to the volume") {
    const auto g = build_grid(box(3, 1, {2.0}, {1.0, 0.5}, 4));
    double vol = 0.0;
    for (std::size_t i = 0; i < g.num_top_cells(); ++i) vol += g.measure(3, i);
    CHECK(vol == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(g.cells_along(0) == 8);
    CHECK(g.cells_along(2) == 2);
  }

  TEST_CASE("shear keeps area and stretches transverse edges") {
    const double s = 0.3;
    const auto g = build_grid(box(2, 1, {1.0}, {1.0}, 4, {DeformationKind::shear, s}));
    double area = 0.0;
    for (std::size_t i = 0; i < g.num_top_cells(); ++i) area += g.measure(2, i);
    CHECK(area == doctest::Approx(1.0).epsilon(1e-12));
    // An edge along axis 1 maps to a segment of length h sqrt(1 + s^2).
    CellId e{};
    e.coord = {2, 3, 0, 0};
    CHECK(g.measure(e) == doctest::Approx(0.25 * std::sqrt(1.0 + s * s)).epsilon(1e-12));
    e.coord = {3, 2, 0, 0};
    CHECK(g.measure(e) == doctest::Approx(0.25).epsilon(1e-12));
  }

  TEST_CASE("radial bump fixes the boundary") {
    // The map is a diffeomorphism of the square, so the area is 1; the bump is
    // only C^1 across its sphere, which costs quadrature accuracy there.
    auto area_error = [](int m) {
      const auto g = build_grid(box(2, 1, {1.0}, {1.0}, m, {DeformationKind::radial_bump, 0.3}));
      double area = 0.0;
      for (std::size_t i = 0; i < g.num_top_cells(); ++i) area += g.measure(2, i);
      return std::abs(area - 1.0);
    };
    CHECK(area_error(8) < 1e-3);
    CHECK(area_error(32) < area_error(8) / 10.0);
    const auto g = build_grid(box(2, 1, {1.0}, {1.0}, 8, {DeformationKind::radial_bump, 0.3}));
    CellId e{};
    e.coord = {1, 0, 0, 0};
    CHECK(g.measure(e) == doctest::Approx(0.125).epsilon(1e-12));
  }

  TEST_CASE("degenerate deformation is refused") {
    CHECK_THROWS_AS(build_grid(box(2, 1, {1.0}, {1.0}, 4, {DeformationKind::radial_bump, -1.0})), InvalidInput);
  }

  TEST_CASE("invalid specs") {
    CHECK_THROWS_AS(build_grid(box(2, 1, {1.0}, {1.0}, 1)), InvalidInput);
    CHECK_THROWS_AS(build_grid(box(2, 2, {1.0, 1.0}, {}, 4)), InvalidInput);
    CHECK_THROWS_AS(build_grid(box(2, 1, {1.0, 1.0}, {1.0}, 4)), InvalidInput);
    CHECK_THROWS_AS(build_grid(box(2, 1, {0.3}, {1.0}, 4)), InvalidInput);
    CHECK_THROWS_AS(build_grid(box(2, 1, {-1.0}, {1.0}, 4)), InvalidInput);
    CHECK_THROWS_AS(build_grid(box(5, 1, {1.0}, {1.0, 1.0, 1.0, 1.0}, 2)), InvalidInput);
  }

  TEST_CASE("boundary of a boundary vanishes") {
    for (int n = 2; n <= 4; ++n) {
      const auto g = build_grid(box(n, 2 <= n - 1 ? 2 : 1, std::vector<double>(n >= 3 ? 2 : 1, 1.0),
                                    std::vector<double>(n - (n >= 3 ? 2 : 1), 1.0), 2));
      for (int d = 2; d <= n; ++d) {
        for (const auto& c : g.cells(d)) {
          Chain ch;
          ch.dim = d;
          ch.add(c, 1);
          CHECK(boundary(g, boundary(g, ch)).empty());
        }
      }
    }
  }

  TEST_CASE("facets of a square") {
    const auto g = build_grid(testing_support::unit_square(2));
    CellId sq{};
    sq.coord = {1, 1, 0, 0};
    const auto f = g.lattice().facets(sq);
    CHECK(f.size() == 4);
    int sum = 0;
    for (const auto& x : f) sum += x.sign;
    CHECK(sum == 0);
    CHECK(g.lattice().incident_top_cells(CellId{{2, 2, 0, 0}}).size() == 4);
    CHECK(g.lattice().closure_vertices(sq).size() == 4);
  }

  TEST_CASE("boundary pieces and distances") {
    const auto g = build_grid(testing_support::unit_square(4));
    const auto& lat = g.lattice();
    CHECK(lat.in_A(CellId{{0, 3, 0, 0}}));
    CHECK_FALSE(lat.in_A(CellId{{1, 0, 0, 0}}));
    CHECK(lat.in_B(CellId{{1, 0, 0, 0}}));
    CHECK(lat.touches_A(CellId{{1, 3, 0, 0}}));
    CHECK_FALSE(lat.touches_A(CellId{{3, 3, 0, 0}}));
    CHECK(g.distance_to_A(CellId{{3, 3, 0, 0}}) == doctest::Approx(0.25));
    CHECK(g.distance_to_B(CellId{{3, 4, 0, 0}}) == doctest::Approx(0.5));
    CHECK_THROWS_AS(g.index(CellId{{9, 1, 0, 0}}), InvalidInput);
  }

  TEST_CASE("face density averages incident cells") {
    const auto g = build_grid(testing_support::unit_square(2));
    DensityField rho{{1.0, 2.0, 3.0, 4.0}};
    CHECK(face_density_value(g, rho, CellId{{2, 2, 0, 0}}) == doctest::Approx(2.5));
    CHECK(face_density_value(g, rho, CellId{{0, 1, 0, 0}}) == doctest::Approx(1.0));
    CHECK(face_density_value(g, rho, CellId{{2, 1, 0, 0}}) == doctest::Approx(2.0));
  }
}
