#include "pmod/families.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <unordered_map>
#include <unordered_set>

#include "pmod/error.hpp"
#include "pmod/max_flow.hpp"
#include "pmod/simplex.hpp"

namespace pmod {

std::string to_string(FamilySide side) {
  switch (side) {
    case FamilySide::A: return "A";
    case FamilySide::B: return "B";
    case FamilySide::A_star: return "A-star";
  }
  return "A";
}

std::string to_string(FamilyMode mode) {
  return mode == FamilyMode::full ? "full" : "axis-restricted";
}

FamilySide family_side_from_string(const std::string& name) {
  if (name == "A") return FamilySide::A;
  if (name == "B") return FamilySide::B;
  if (name == "A-star" || name == "A_star" || name == "star") return FamilySide::A_star;
  throw InvalidInput("unknown family side '" + name + "'");
}

FamilyMode family_mode_from_string(const std::string& name) {
  if (name == "axis-restricted" || name == "axis") return FamilyMode::axis_restricted;
  if (name == "full") return FamilyMode::full;
  throw InvalidInput("unknown family mode '" + name + "'");
}

namespace {

// Axes whose end planes the members of `side` must stay away from.
Side excluded_side(FamilySide side) { return side == FamilySide::A ? Side::B : Side::A; }

double distance_to(const GridComplex& complex, Side side, const CellId& id) {
  return side == Side::A ? complex.distance_to_A(id) : complex.distance_to_B(id);
}

}  // namespace

void FamilyHandle::validate(const GridComplex& complex) const {
  if (!(delta_margin >= 0.0) || !std::isfinite(delta_margin)) throw InvalidInput("delta_margin must be >= 0");
  const Side ex = excluded_side(side);
  double half = std::numeric_limits<double>::infinity();
  for (int a = 0; a < complex.n(); ++a) {
    const bool is_a = a < complex.k();
    if ((ex == Side::A) == is_a) half = std::min(half, 0.5 * complex.side(a));
  }
  if (delta_margin >= half) throw InvalidInput("delta_margin must be below half the relevant side length");
}

int member_dim(const GridComplex& complex, FamilySide side) {
  return side == FamilySide::A ? complex.k() : complex.n() - complex.k();
}

double SliceMember::total_weight() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

MemberCoefficients member_coefficients(const GridComplex& complex, const SliceMember& member) {
  if (member.weights.size() != member.cells.size()) throw InvalidInput("member weights and cells differ in size");
  std::vector<std::pair<std::uint32_t, double>> acc;
  acc.reserve(member.cells.size() * 2);
  for (std::size_t i = 0; i < member.cells.size(); ++i) {
    const auto& c = member.cells[i];
    if (member.kind == MemberKind::fiber) {
      acc.emplace_back(static_cast<std::uint32_t>(complex.index(c)), member.weights[i]);
    } else {
      const auto tops = complex.lattice().incident_top_cells(c);
      const double share = member.weights[i] / static_cast<double>(tops.size());
      for (const auto& t : tops) acc.emplace_back(static_cast<std::uint32_t>(complex.index(t)), share);
    }
  }
  std::sort(acc.begin(), acc.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  MemberCoefficients out;
  for (const auto& [c, v] : acc) {
    if (!out.cells.empty() && out.cells.back() == c) {
      out.values.back() += v;
    } else {
      out.cells.push_back(c);
      out.values.push_back(v);
    }
  }
  return out;
}

double member_weight(const GridComplex& complex, const SliceMember& member, const DensityField& rho) {
  if (rho.size() != complex.num_top_cells()) throw InvalidInput("density does not match the complex");
  const auto coeffs = member_coefficients(complex, member);
  double s = 0.0;
  for (std::size_t i = 0; i < coeffs.cells.size(); ++i) s += coeffs.values[i] * rho.values[coeffs.cells[i]];
  return s;
}

std::vector<SliceMember> axis_members(const GridComplex& complex, const FamilyHandle& handle) {
  if (!complex.spec().deformation.is_identity()) throw InvalidInput("axis members require an undeformed box");
  handle.validate(complex);
  const int n = complex.n();
  const int k = complex.k();
  unsigned tangent = 0;
  for (int a = 0; a < n; ++a) {
    const bool is_a = a < k;
    if (is_a == (handle.side == FamilySide::A)) tangent |= 1u << a;
  }
  const int dim = __builtin_popcount(tangent);
  const double piece = std::pow(complex.spacing(), dim);
  const Side ex = excluded_side(handle.side);

  // Group top cells by their transverse coordinates; cells(n) is lexicographic
  // so groups come out in a deterministic order.
  std::map<std::array<int, kMaxDim>, SliceMember> groups;
  for (const auto& c : complex.cells(n)) {
    std::array<int, kMaxDim> key{};
    for (int a = 0; a < n; ++a) key[a] = (tangent >> a) & 1u ? -1 : c.coord[a];
    auto& m = groups[key];
    m.cells.push_back(c);
    m.weights.push_back(piece);
  }
  std::vector<SliceMember> out;
  for (auto& [key, m] : groups) {
    double dist = std::numeric_limits<double>::infinity();
    for (int a = 0; a < n; ++a) {
      if ((tangent >> a) & 1u) continue;
      const bool is_a = a < k;
      if ((ex == Side::A) != is_a) continue;
      const double x = 0.5 * key[a] * complex.spacing();
      dist = std::min({dist, x, complex.side(a) - x});
    }
    if (dist < handle.delta_margin) continue;
    m.dim = dim;
    m.kind = MemberKind::fiber;
    m.tangent_mask = tangent;
    m.origin = "axis";
    out.push_back(std::move(m));
  }
  return out;
}

namespace {

std::vector<double> face_costs(const GridComplex& complex, const DensityField& rho, int dim) {
  const auto& faces = complex.cells(dim);
  std::vector<double> cost(faces.size());
  for (std::size_t i = 0; i < faces.size(); ++i) {
    cost[i] = face_density_value(complex, rho, faces[i]) * complex.measure(dim, i);
  }
  return cost;
}

void check_rho(const GridComplex& complex, const DensityField& rho) {
  if (rho.size() != complex.num_top_cells()) throw InvalidInput("density does not match the complex");
  for (double v : rho.values) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidInput("density values must be finite and nonnegative");
  }
}

Side side_of_axis(const GridComplex& complex, int axis) { return axis < complex.k() ? Side::A : Side::B; }
Side other(Side s) { return s == Side::A ? Side::B : Side::A; }

}  // namespace

SliceMember shortest_connecting_path(const GridComplex& complex, const DensityField& rho, int axis, double margin) {
  check_rho(complex, rho);
  if (axis < 0 || axis >= complex.n()) throw InvalidInput("path axis out of range");
  const auto& lat = complex.lattice();
  const Side own = side_of_axis(complex, axis);
  const Side avoid = other(own);
  const auto& vertices = complex.cells(0);
  const auto& edges = complex.cells(1);
  const auto cost = face_costs(complex, rho, 1);

  auto usable = [&](const CellId& v) {
    if (lat.in(avoid, v)) return false;
    return margin <= 0.0 || distance_to(complex, avoid, v) >= margin;
  };
  const std::size_t nv = vertices.size();
  std::vector<double> dist(nv, std::numeric_limits<double>::infinity());
  std::vector<std::int64_t> via(nv, -1);  // edge index used to reach the vertex
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
  for (std::size_t i = 0; i < nv; ++i) {
    if (vertices[i].coord[axis] == 0 && usable(vertices[i])) {
      dist[i] = 0.0;
      heap.emplace(0.0, i);
    }
  }
  const int target = 2 * complex.cells_along(axis);
  std::int64_t reached = -1;
  std::vector<bool> done(nv, false);
  while (!heap.empty()) {
    const auto [d, i] = heap.top();
    heap.pop();
    if (done[i]) continue;
    done[i] = true;
    if (vertices[i].coord[axis] == target) {
      reached = static_cast<std::int64_t>(i);
      break;
    }
    // Neighbors in axis order, lower then upper: the order fixes tie-breaks.
    for (int a = 0; a < complex.n(); ++a) {
      for (int dir : {-1, 1}) {
        CellId e = vertices[i];
        e.coord[a] += dir;
        if (!lat.contains(e) || lat.in(own, e)) continue;
        CellId w = vertices[i];
        w.coord[a] += 2 * dir;
        if (!usable(w)) continue;
        const auto wi = static_cast<std::size_t>(lat.index_of(w));
        const auto ei = static_cast<std::size_t>(lat.index_of(e));
        const double nd = d + cost[ei];
        if (nd < dist[wi]) {
          dist[wi] = nd;
          via[wi] = static_cast<std::int64_t>(ei);
          heap.emplace(nd, wi);
        }
      }
    }
  }
  if (reached < 0) throw InvalidInput("no admissible path; margin too large for the grid");

  SliceMember m;
  m.dim = 1;
  m.kind = MemberKind::face_chain;
  m.origin = "path";
  Chain chain;
  chain.dim = 1;
  std::size_t cur = static_cast<std::size_t>(reached);
  while (via[cur] >= 0) {
    const auto& e = edges[static_cast<std::size_t>(via[cur])];
    m.cells.push_back(e);
    m.weights.push_back(complex.measure(e));
    // Which endpoint are we at?
    int a = 0;
    while (!e.spans(a)) ++a;
    const bool at_upper = vertices[cur].coord[a] > e.coord[a];
    chain.add(e, at_upper ? 1 : -1);
    CellId prev = vertices[cur];
    prev.coord[a] += at_upper ? -2 : 2;
    cur = static_cast<std::size_t>(lat.index_of(prev));
  }
  std::reverse(m.cells.begin(), m.cells.end());
  std::reverse(m.weights.begin(), m.weights.end());
  m.chain = std::move(chain);
  return m;
}

SliceMember minimum_separating_cut(const GridComplex& complex, const DensityField& rho, int axis, double margin) {
  check_rho(complex, rho);
  if (axis < 0 || axis >= complex.n()) throw InvalidInput("cut axis out of range");
  if (complex.cells_along(axis) < 2) throw InvalidInput("cut needs at least two cells along the separated axis");
  const auto& lat = complex.lattice();
  const int n = complex.n();
  const Side own = side_of_axis(complex, axis);
  const auto& tops = complex.cells(n);
  const auto& faces = complex.cells(n - 1);
  const auto cost = face_costs(complex, rho, n - 1);

  double total = 0.0;
  for (double c : cost) total += c;
  const double big = 1e3 * total + 1.0;

  const int nt = static_cast<int>(tops.size());
  const int s = nt;
  const int t = nt + 1;
  MaxFlow flow(nt + 2);
  const int last = 2 * complex.cells_along(axis) - 1;
  for (int i = 0; i < nt; ++i) {
    if (tops[i].coord[axis] == 1) flow.add_directed(s, i, big * 10.0);
  }
  std::vector<std::pair<int, int>> face_ends(faces.size(), {-1, -1});
  for (std::size_t f = 0; f < faces.size(); ++f) {
    const auto inc = lat.incident_top_cells(faces[f]);
    if (inc.size() != 2) continue;
    const int u = static_cast<int>(complex.index(inc[0]));
    const int v = static_cast<int>(complex.index(inc[1]));
    face_ends[f] = {u, v};
    const bool forbidden = lat.touches(own, faces[f]) || (margin > 0.0 && distance_to(complex, own, faces[f]) < margin);
    flow.add_undirected(u, v, forbidden ? big : cost[f]);
  }
  for (int i = 0; i < nt; ++i) {
    if (tops[i].coord[axis] == last) flow.add_directed(i, t, big * 10.0);
  }
  flow.solve(s, t);
  const auto side = flow.source_side();

  SliceMember m;
  m.dim = n - 1;
  m.kind = MemberKind::face_chain;
  m.origin = "cut";
  Chain region;
  region.dim = n;
  for (int i = 0; i < nt; ++i) {
    if (side[i]) region.add(tops[i], 1);
  }
  Chain b = boundary(complex, region);
  Chain chain;
  chain.dim = n - 1;
  for (const auto& [cell, c] : b.coeffs) {
    if (lat.in_A(cell) || lat.in_B(cell)) continue;
    chain.add(cell, c);
  }
  for (std::size_t f = 0; f < faces.size(); ++f) {
    const auto [u, v] = face_ends[f];
    if (u < 0 || side[u] == side[v]) continue;
    m.cells.push_back(faces[f]);
    m.weights.push_back(complex.measure(n - 1, f));
  }
  m.chain = std::move(chain);
  return m;
}

SliceMember min_weight_path(const GridComplex& complex, const DensityField& rho, double margin) {
  if (complex.k() != 1) throw InvalidInput("min_weight_path requires k = 1");
  return shortest_connecting_path(complex, rho, 0, margin);
}

SliceMember min_weight_cut(const GridComplex& complex, const DensityField& rho, double margin) {
  if (complex.k() != 1) throw InvalidInput("min_weight_cut requires k = 1");
  return minimum_separating_cut(complex, rho, 0, margin);
}

SliceMember min_weight_chain_lp(const GridComplex& complex, const DensityField& rho, const FamilyHandle& handle,
                                double* lp_value) {
  check_rho(complex, rho);
  if (handle.side == FamilySide::A_star) throw InvalidInput("chain LP covers sides A and B only");
  handle.validate(complex);
  if (complex.total_cells() > kChainLpCellLimit) {
    throw LimitExceeded("chain LP limited to " + std::to_string(kChainLpCellLimit) + " cells");
  }
  const auto& lat = complex.lattice();
  const int n = complex.n();
  const int k = complex.k();
  const Side rel = handle.side == FamilySide::A ? Side::A : Side::B;
  const Side avoid = other(rel);
  const int d = handle.side == FamilySide::A ? k : n - k;

  // Reference cycle: the straight slice through the middle grid point.
  std::map<CellId, std::int64_t> ref;
  for (const auto& c : lat.cells(d)) {
    bool ok = true;
    for (int a = 0; a < n && ok; ++a) {
      const bool tangent = (a < k) == (rel == Side::A);
      if (tangent) {
        ok = c.spans(a);
      } else {
        ok = c.coord[a] == 2 * (lat.extent(a) / 2);
      }
    }
    if (ok) ref[c] = 1;
  }

  std::vector<CellId> rows;
  std::unordered_map<CellId, int, CellIdHash> row_of;
  for (const auto& c : lat.cells(d)) {
    if (lat.in(rel, c)) continue;
    row_of.emplace(c, static_cast<int>(rows.size()));
    rows.push_back(c);
  }
  std::vector<int> x_rows;  // rows carrying a free face variable
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& c = rows[r];
    if (lat.touches(avoid, c)) continue;
    if (handle.delta_margin > 0.0 && distance_to(complex, avoid, c) < handle.delta_margin) continue;
    x_rows.push_back(static_cast<int>(r));
  }
  for (const auto& [c, v] : ref) {
    if (lat.touches(avoid, c)) throw InvalidInput("grid too coarse: the reference slice touches the opposite boundary");
  }
  std::vector<CellId> higher;
  for (const auto& c : lat.cells(d + 1)) {
    if (!lat.in(rel, c)) higher.push_back(c);
  }
  const int nr = static_cast<int>(rows.size());
  const int nx = static_cast<int>(x_rows.size());
  const int ny = static_cast<int>(higher.size());
  const int cols = 2 * nx + 2 * ny;
  std::vector<std::vector<double>> a(static_cast<std::size_t>(nr), std::vector<double>(cols, 0.0));
  std::vector<double> b(static_cast<std::size_t>(nr), 0.0);
  std::vector<double> c(static_cast<std::size_t>(cols), 0.0);
  for (int j = 0; j < nx; ++j) {
    const int r = x_rows[j];
    a[r][2 * j] = 1.0;
    a[r][2 * j + 1] = -1.0;
    const double w = face_density_value(complex, rho, rows[r]) * complex.measure(rows[r]);
    c[2 * j] = w;
    c[2 * j + 1] = w;
  }
  for (int j = 0; j < ny; ++j) {
    for (const auto& f : lat.facets(higher[j])) {
      auto it = row_of.find(f.cell);
      if (it == row_of.end()) continue;
      a[it->second][2 * nx + 2 * j] -= f.sign;
      a[it->second][2 * nx + 2 * j + 1] += f.sign;
    }
  }
  for (const auto& [cell, v] : ref) {
    auto it = row_of.find(cell);
    if (it != row_of.end()) b[it->second] = static_cast<double>(v);
  }
  const auto lp = solve_standard_lp(a, b, c);
  if (lp.status != LpStatus::optimal) throw InternalError("chain LP did not reach an optimum");
  if (lp_value) *lp_value = lp.value;

  SliceMember m;
  m.dim = d;
  m.kind = MemberKind::face_chain;
  m.origin = "chain-lp";
  Chain chain;
  chain.dim = d;
  bool integral = true;
  std::vector<double> coeff(static_cast<std::size_t>(nx));
  for (int j = 0; j < nx; ++j) {
    coeff[j] = lp.x[2 * j] - lp.x[2 * j + 1];
    if (std::abs(coeff[j] - std::round(coeff[j])) > 1e-7) integral = false;
  }
  for (int j = 0; j < nx; ++j) {
    if (std::abs(coeff[j]) <= 1e-9) continue;
    const auto& f = rows[x_rows[j]];
    m.cells.push_back(f);
    m.weights.push_back((integral ? 1.0 : std::abs(coeff[j])) * complex.measure(f));
    if (integral) chain.add(f, static_cast<std::int64_t>(std::llround(coeff[j])));
  }
  m.integral = integral;
  if (integral) m.chain = std::move(chain);
  return m;
}

SliceMember translate_member(const GridComplex& complex, const SliceMember& member, const std::array<int, kMaxDim>& z,
                             double delta_margin) {
  double norm2 = 0.0;
  for (int a = 0; a < kMaxDim; ++a) {
    if (a >= complex.n() && z[a] != 0) throw InvalidInput("translation has components beyond the dimension");
    norm2 += static_cast<double>(z[a]) * z[a];
  }
  if (norm2 == 0.0) return member;
  if (!(std::sqrt(norm2) * complex.spacing() < delta_margin / 10.0)) {
    throw InvalidInput("translation exceeds a tenth of the margin");
  }
  SliceMember out = member;
  for (auto& c : out.cells) {
    for (int a = 0; a < complex.n(); ++a) c.coord[a] += 2 * z[a];
    if (!complex.contains(c)) throw InvalidInput("translated member leaves Q");
  }
  if (member.chain) {
    Chain moved;
    moved.dim = member.chain->dim;
    moved.grid = member.chain->grid;
    for (const auto& [cell, v] : member.chain->coeffs) {
      CellId c = cell;
      for (int a = 0; a < complex.n(); ++a) c.coord[a] += 2 * z[a];
      moved.add(c, v);
    }
    out.chain = std::move(moved);
  }
  return out;
}

std::vector<CellId> refined_support(const GridComplex& complex, const SliceMember& member) {
  std::vector<CellId> out;
  for (const auto& cell : member.cells) {
    unsigned mask = 0;
    if (member.kind == MemberKind::fiber) {
      mask = member.tangent_mask;
    } else {
      for (int a = 0; a < complex.n(); ++a) mask |= cell.spans(a) ? (1u << a) : 0u;
    }
    std::vector<CellId> acc{CellId{}};
    for (int a = 0; a < complex.n(); ++a) {
      std::vector<CellId> next;
      for (auto c : acc) {
        if ((mask >> a) & 1u) {
          for (int d : {-1, 1}) {
            c.coord[a] = 2 * cell.coord[a] + d;
            next.push_back(c);
          }
        } else {
          c.coord[a] = 2 * cell.coord[a];
          next.push_back(c);
        }
      }
      acc.swap(next);
    }
    out.insert(out.end(), acc.begin(), acc.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool members_intersect(const GridComplex& complex, const SliceMember& a, const SliceMember& b) {
  const auto lat = refined_lattice(complex);
  std::unordered_set<CellId, CellIdHash> verts;
  for (const auto& c : refined_support(complex, a)) {
    for (const auto& v : lat.closure_vertices(c)) verts.insert(v);
  }
  for (const auto& c : refined_support(complex, b)) {
    for (const auto& v : lat.closure_vertices(c)) {
      if (verts.count(v)) return true;
    }
  }
  return false;
}

std::string oracle_name(const GridComplex& complex, const FamilyHandle& handle) {
  if (handle.mode == FamilyMode::axis_restricted) {
    return complex.spec().deformation.is_identity() ? "axis-scan" : "";
  }
  const int n = complex.n();
  const int k = complex.k();
  switch (handle.side) {
    case FamilySide::A:
      if (k == 1) return "path";
      if (k == n - 1) return "cut";
      return "chain-lp";
    case FamilySide::B:
      if (n - k == 1) return "path";
      if (k == 1) return "cut";
      return "chain-lp";
    case FamilySide::A_star:
      if (k == 1) return "cut";
      if (k == n - 1) return "path";
      return "";
  }
  return "";
}

std::optional<SliceMember> min_weight_member(const GridComplex& complex, const DensityField& rho,
                                             const FamilyHandle& handle) {
  handle.validate(complex);
  const std::string name = oracle_name(complex, handle);
  if (name.empty()) {
    throw InvalidInput("no member oracle for side " + to_string(handle.side) + ", mode " + to_string(handle.mode) +
                       " at n=" + std::to_string(complex.n()) + ", k=" + std::to_string(complex.k()));
  }
  const int n = complex.n();
  if (name == "axis-scan") {
    check_rho(complex, rho);
    auto members = axis_members(complex, handle);
    if (members.empty()) return std::nullopt;
    std::size_t best = 0;
    double best_w = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < members.size(); ++i) {
      const double w = member_weight(complex, members[i], rho);
      if (w < best_w) {
        best_w = w;
        best = i;
      }
    }
    return std::move(members[best]);
  }
  const double margin = handle.delta_margin;
  if (name == "path") {
    // Side A paths run along the A axis; B and star paths along the B axis.
    const int axis = handle.side == FamilySide::A ? 0 : n - 1;
    return shortest_connecting_path(complex, rho, axis, margin);
  }
  if (name == "cut") {
    const int axis = handle.side == FamilySide::A ? n - 1 : 0;
    return minimum_separating_cut(complex, rho, axis, margin);
  }
  return min_weight_chain_lp(complex, rho, handle);
}

}  // namespace pmod
