#include <cmath>

#include "doctest.h"
#include "pmod/error.hpp"
#include "pmod/families.hpp"
#include "pmod/homology.hpp"
#include "pmod/max_flow.hpp"
#include "pmod/simplex.hpp"
#include "support.hpp"

using namespace pmod;
using testing_support::box;
using testing_support::brute_force_cut;
using testing_support::brute_force_path;
using testing_support::random_density;
using testing_support::unit_square;

TEST_SUITE("families") {
  TEST_CASE("axis members of a box") {
    const auto g = build_grid(box(2, 1, {2.0}, {1.0}, 4));
    const auto a = axis_members(g, FamilyHandle{FamilySide::A, FamilyMode::axis_restricted, 0.0});
    const auto b = axis_members(g, FamilyHandle{FamilySide::B, FamilyMode::axis_restricted, 0.0});
    CHECK(a.size() == 4);
    CHECK(b.size() == 8);
    for (const auto& s : a) {
      CHECK(s.size() == 8);
      CHECK(s.total_weight() == doctest::Approx(2.0));
      CHECK(member_weight(g, s, DensityField::constant(g.num_top_cells(), 1.0)) == doctest::Approx(2.0));
    }
    for (const auto& s : b) CHECK(s.total_weight() == doctest::Approx(1.0));
  }

  TEST_CASE("margin filters fibers near the excluded side") {
    const auto g = build_grid(unit_square(4));
    CHECK(axis_members(g, FamilyHandle{FamilySide::A, FamilyMode::axis_restricted, 0.3}).size() == 2);
    CHECK(axis_members(g, FamilyHandle{FamilySide::A, FamilyMode::axis_restricted, 0.4}).empty());
    CHECK_THROWS_AS(FamilyHandle({FamilySide::A, FamilyMode::axis_restricted, 0.5}).validate(g), InvalidInput);
    CHECK_THROWS_AS(FamilyHandle({FamilySide::A, FamilyMode::axis_restricted, -0.1}).validate(g), InvalidInput);
    const auto none = min_weight_member(g, DensityField::constant(16, 1.0),
                                        FamilyHandle{FamilySide::A, FamilyMode::axis_restricted, 0.4});
    CHECK_FALSE(none.has_value());
  }

  TEST_CASE("face coefficients split over incident cells") {
    const auto g = build_grid(unit_square(2));
    SliceMember s;
    s.dim = 1;
    s.cells = {CellId{{2, 1, 0, 0}}, CellId{{0, 3, 0, 0}}};
    s.weights = {0.5, 0.5};
    const auto co = member_coefficients(g, s);
    REQUIRE(co.cells.size() == 3);
    double total = 0.0;
    for (double v : co.values) total += v;
    CHECK(total == doctest::Approx(1.0));
    CHECK(member_weight(g, s, DensityField{{1.0, 2.0, 3.0, 4.0}}) == doctest::Approx(0.5 * 2.0 + 0.5 * 2.0));
    CHECK_THROWS_AS(member_weight(g, s, DensityField{{1.0}}), InvalidInput);
  }

  TEST_CASE("shortest path matches exhaustive enumeration") {
    for (const auto& spec : {unit_square(3), unit_square(4), box(2, 1, {2.0}, {1.0}, 2), box(3, 1, {1.0}, {1.0, 1.0}, 3)}) {
      const auto g = build_grid(spec);
      for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        const auto rho = random_density(g, seed);
        const auto path = min_weight_path(g, rho);
        CHECK(member_weight(g, path, rho) == doctest::Approx(brute_force_path(g, rho)).epsilon(1e-12));
        REQUIRE(path.chain.has_value());
        CHECK(is_relative_cycle(g, *path.chain, Side::A));
      }
    }
  }

  TEST_CASE("minimum cut matches exhaustive enumeration") {
    for (const auto& spec : {unit_square(3), unit_square(4), box(3, 1, {1.0}, {1.0, 1.0}, 3)}) {
      const auto g = build_grid(spec);
      for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        const auto rho = random_density(g, 10 + seed);
        const auto cut = min_weight_cut(g, rho);
        CHECK(member_weight(g, cut, rho) == doctest::Approx(brute_force_cut(g, rho, 0)).epsilon(1e-12));
        REQUIRE(cut.chain.has_value());
        CHECK(is_relative_cycle(g, *cut.chain, Side::B));
        CHECK(is_in_star_family(g, refine_cells(cut.cells)));
      }
    }
  }

  TEST_CASE("constant density gives straight members") {
    const auto g = build_grid(box(2, 1, {2.0}, {1.0}, 4));
    const auto rho = DensityField::constant(g.num_top_cells(), 1.0);
    CHECK(member_weight(g, min_weight_path(g, rho), rho) == doctest::Approx(2.0));
    CHECK(member_weight(g, min_weight_cut(g, rho), rho) == doctest::Approx(1.0));
  }

  TEST_CASE("chain LP on a four-dimensional cube") {
    const auto g = build_grid(box(4, 2, {1.0, 1.0}, {1.0, 1.0}, 2));
    double value = -1.0;
    const auto s = min_weight_chain_lp(g, DensityField::constant(g.num_top_cells(), 1.0),
                                       FamilyHandle{FamilySide::A, FamilyMode::full, 0.0}, &value);
    CHECK(value == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(s.integral);
    CHECK(oracle_name(g, FamilyHandle{FamilySide::A, FamilyMode::full, 0.0}) == "chain-lp");
  }

  TEST_CASE("chain LP reproduces the shortest path for k = 1") {
    const auto g = build_grid(unit_square(3));
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      const auto rho = random_density(g, 30 + seed);
      double value = 0.0;
      min_weight_chain_lp(g, rho, FamilyHandle{FamilySide::A, FamilyMode::full, 0.0}, &value);
      CHECK(value == doctest::Approx(brute_force_path(g, rho)).epsilon(1e-9));
    }
  }

  TEST_CASE("oracle table") {
    auto name = [](int n, int k, FamilySide side) {
      const auto g = build_grid(box(n, k, std::vector<double>(k, 1.0), std::vector<double>(n - k, 1.0), 2));
      return oracle_name(g, FamilyHandle{side, FamilyMode::full, 0.0});
    };
    CHECK(name(2, 1, FamilySide::A) == "path");
    CHECK(name(2, 1, FamilySide::B) == "path");
    CHECK(name(2, 1, FamilySide::A_star) == "cut");
    CHECK(name(3, 1, FamilySide::B) == "cut");
    CHECK(name(3, 2, FamilySide::A) == "cut");
    CHECK(name(3, 2, FamilySide::A_star) == "path");
    CHECK(name(4, 2, FamilySide::B) == "chain-lp");
    CHECK(name(4, 2, FamilySide::A_star).empty());
    const auto g = build_grid(box(4, 2, {1.0, 1.0}, {1.0, 1.0}, 2));
    CHECK_THROWS_AS(min_weight_member(g, DensityField::constant(g.num_top_cells(), 1.0),
                                      FamilyHandle{FamilySide::A_star, FamilyMode::full, 0.0}),
                    InvalidInput);
    const auto sheared = build_grid(box(2, 1, {1.0}, {1.0}, 4, {DeformationKind::shear, 0.3}));
    CHECK(oracle_name(sheared, FamilyHandle{FamilySide::A, FamilyMode::axis_restricted, 0.0}).empty());
    CHECK_THROWS_AS(axis_members(sheared, FamilyHandle{}), InvalidInput);
  }

  TEST_CASE("translation of members") {
    const auto g = build_grid(unit_square(32));
    const auto fibers = axis_members(g, FamilyHandle{FamilySide::A, FamilyMode::axis_restricted, 0.45});
    REQUIRE_FALSE(fibers.empty());
    const auto& s = fibers.front();
    CHECK(translate_member(g, s, {0, 0, 0, 0}, 0.0).cells == s.cells);
    const auto up = translate_member(g, s, {0, 1, 0, 0}, 0.45);
    CHECK(up.cells.front().coord[1] == s.cells.front().coord[1] + 2);
    CHECK_THROWS_AS(translate_member(g, s, {0, 2, 0, 0}, 0.45), InvalidInput);  // 2h > margin / 10
    CHECK_THROWS_AS(translate_member(g, s, {1, 0, 0, 0}, 0.45), InvalidInput);  // leaves Q
  }

  TEST_CASE("transverse fibers meet, parallel fibers do not") {
    const auto g = build_grid(unit_square(4));
    const auto a = axis_members(g, FamilyHandle{FamilySide::A, FamilyMode::axis_restricted, 0.0});
    const auto b = axis_members(g, FamilyHandle{FamilySide::B, FamilyMode::axis_restricted, 0.0});
    for (const auto& x : a)
      for (const auto& y : b) CHECK(members_intersect(g, x, y));
    CHECK_FALSE(members_intersect(g, a[0], a[2]));
  }
}

TEST_SUITE("families") {
  TEST_CASE("max flow agrees with cut enumeration") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
      const int nodes = 7;
      std::vector<std::array<double, 3>> edges;
      MaxFlow flow(nodes);
      for (int a = 0; a < nodes; ++a) {
        for (int b = a + 1; b < nodes; ++b) {
          if (u(rng) < 0.5) continue;
          const double c = std::floor(u(rng) * 10.0);
          edges.push_back({double(a), double(b), c});
          flow.add_undirected(a, b, c);
        }
      }
      const double value = flow.solve(0, nodes - 1);
      double best = std::numeric_limits<double>::infinity();
      for (int mask = 0; mask < (1 << (nodes - 2)); ++mask) {
        auto in = [&](int v) { return v == 0 || (v != nodes - 1 && ((mask >> (v - 1)) & 1)); };
        double c = 0.0;
        for (const auto& e : edges) {
          if (in(int(e[0])) != in(int(e[1]))) c += e[2];
        }
        best = std::min(best, c);
      }
      CHECK(value == doctest::Approx(best));
      const auto side = flow.source_side();
      double c = 0.0;
      for (const auto& e : edges) {
        if (side[int(e[0])] != side[int(e[1])]) c += e[2];
      }
      CHECK(c == doctest::Approx(best));
    }
  }

  TEST_CASE("simplex on small programs") {
    // min -x - y  s.t. x + 2y + s1 = 4, 3x + y + s2 = 6
    auto r = solve_standard_lp({{1, 2, 1, 0}, {3, 1, 0, 1}}, {4, 6}, {-1, -1, 0, 0});
    REQUIRE(r.status == LpStatus::optimal);
    CHECK(r.value == doctest::Approx(-2.8));
    CHECK(r.x[0] == doctest::Approx(1.6));
    CHECK(r.x[1] == doctest::Approx(1.2));
    CHECK(solve_standard_lp({{1, 1}}, {-1}, {1, 1}).status == LpStatus::infeasible);
    CHECK(solve_standard_lp({{1, -1}}, {1}, {-1, 0}).status == LpStatus::unbounded);
  }
}
