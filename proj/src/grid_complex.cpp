#include "pmod/grid_complex.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <limits>

#include "pmod/error.hpp"
#include "pmod/quadrature.hpp"

namespace pmod {

namespace {

constexpr int kMeasureOrder = 3;
constexpr double kMinJacobian = 1e-3;

}  // namespace

std::string to_string(DeformationKind kind) {
  switch (kind) {
    case DeformationKind::identity: return "identity";
    case DeformationKind::shear: return "shear";
    case DeformationKind::radial_bump: return "radial-bump";
  }
  return "identity";
}

DeformationKind deformation_from_string(const std::string& name) {
  if (name == "identity") return DeformationKind::identity;
  if (name == "shear") return DeformationKind::shear;
  if (name == "radial-bump" || name == "radial_bump") return DeformationKind::radial_bump;
  throw InvalidInput("unknown deformation '" + name + "'");
}

void BoxSpec::validate() const {
  if (n < 2 || n > kMaxDim) throw InvalidInput("box dimension n must be in [2, 4]");
  if (k < 1 || k > n - 1) throw InvalidInput("slice dimension k must be in [1, n-1]");
  if (static_cast<int>(side_q1.size()) != k) throw InvalidInput("side_Q1 must have k entries");
  if (static_cast<int>(side_q2.size()) != n - k) throw InvalidInput("side_Q2 must have n-k entries");
  if (m < 2) throw InvalidInput("resolution m must be at least 2");
  for (int a = 0; a < n; ++a) {
    const double s = side(a);
    if (!(s > 0.0) || !std::isfinite(s)) throw InvalidInput("side lengths must be positive");
    const double cells = s * m;
    if (std::abs(cells - std::round(cells)) > 1e-9 * std::max(1.0, cells)) {
      throw InvalidInput("m * side must be an integer on every axis");
    }
  }
  if (!std::isfinite(deformation.parameter)) throw InvalidInput("deformation parameter must be finite");
}

GridComplex GridComplex::build(const BoxSpec& spec) {
  spec.validate();
  GridComplex gc;
  gc.spec_ = spec;
  gc.spacing_ = 1.0 / spec.m;
  std::array<int, kMaxDim> extent{};
  for (int a = 0; a < spec.n; ++a) extent[a] = static_cast<int>(std::lround(spec.side(a) * spec.m));
  gc.lattice_ = CubicalLattice(spec.n, spec.k, extent);

  if (!spec.deformation.is_identity()) {
    // Jacobian determinant sampled at every vertex and every top-cell quadrature point.
    const auto& rule = gauss_legendre(kMeasureOrder);
    auto check = [&](const Point& x) {
      const double det = gc.jacobian(x).determinant();
      if (!(det > kMinJacobian)) {
        throw InvalidInput("deformation Jacobian degenerate at a sample point (det = " + std::to_string(det) + ")");
      }
    };
    for (const auto& v : gc.cells(0)) check(gc.center(v));
    const int n = spec.n;
    int points = 1;
    for (int a = 0; a < n; ++a) points *= kMeasureOrder;
    for (const auto& c : gc.cells(n)) {
      for (int q = 0; q < points; ++q) {
        Point x{};
        int rest = q;
        for (int a = 0; a < n; ++a) {
          x[a] = (0.5 * (c.coord[a] - 1) + rule.nodes[rest % kMeasureOrder]) * gc.spacing_;
          rest /= kMeasureOrder;
        }
        check(x);
      }
    }
  }

  for (int d = 0; d <= spec.n; ++d) {
    const auto& cells = gc.cells(d);
    auto& out = gc.measures_[d];
    out.resize(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) {
      out[i] = spec.deformation.is_identity() ? std::pow(gc.spacing_, d) : gc.deformed_measure(cells[i]);
    }
  }
  return gc;
}

std::size_t GridComplex::index(const CellId& id) const {
  const auto idx = lattice_.index_of(id);
  if (idx < 0) throw InvalidInput("unknown cell " + to_string(id));
  return static_cast<std::size_t>(idx);
}

double GridComplex::measure(const CellId& id) const { return measures_[id.dim()][index(id)]; }

Point GridComplex::center(const CellId& id) const {
  Point p{};
  for (int a = 0; a < spec_.n; ++a) p[a] = 0.5 * id.coord[a] * spacing_;
  return p;
}

Point GridComplex::physical(const Point& x) const {
  Point y = x;
  const auto& def = spec_.deformation;
  switch (def.kind) {
    case DeformationKind::identity:
      break;
    case DeformationKind::shear:
      y[0] += def.parameter * x[1];
      break;
    case DeformationKind::radial_bump: {
      double radius = side(0);
      for (int a = 1; a < spec_.n; ++a) radius = std::min(radius, side(a));
      radius *= 0.5;
      double r2 = 0.0;
      for (int a = 0; a < spec_.n; ++a) {
        const double d = x[a] - 0.5 * side(a);
        r2 += d * d;
      }
      const double t = 1.0 - r2 / (radius * radius);
      if (t > 0.0) {
        const double beta = t * t;
        for (int a = 0; a < spec_.n; ++a) y[a] += def.parameter * beta * (x[a] - 0.5 * side(a));
      }
      break;
    }
  }
  return y;
}

JacobianMatrix GridComplex::jacobian(const Point& x) const {
  const int n = spec_.n;
  JacobianMatrix jac = JacobianMatrix::Identity(n, n);
  const auto& def = spec_.deformation;
  switch (def.kind) {
    case DeformationKind::identity:
      break;
    case DeformationKind::shear:
      jac(0, 1) = def.parameter;
      break;
    case DeformationKind::radial_bump: {
      double radius = side(0);
      for (int a = 1; a < n; ++a) radius = std::min(radius, side(a));
      radius *= 0.5;
      const double r2max = radius * radius;
      Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1> d(n);
      for (int a = 0; a < n; ++a) d[a] = x[a] - 0.5 * side(a);
      const double t = 1.0 - d.squaredNorm() / r2max;
      if (t > 0.0) {
        // D[x + a*beta*(x-c)] = (1 + a*beta) I + a * (dbeta/dr / r) (x-c)(x-c)^T
        const double beta = t * t;
        const double dbeta_over_r = -4.0 * t / r2max;
        jac = (1.0 + def.parameter * beta) * JacobianMatrix::Identity(n, n) +
              def.parameter * dbeta_over_r * (d * d.transpose());
      }
      break;
    }
  }
  return jac;
}

double GridComplex::deformed_measure(const CellId& id) const {
  const int n = spec_.n;
  std::vector<int> axes;
  for (int a = 0; a < n; ++a) {
    if (id.spans(a)) axes.push_back(a);
  }
  const int j = static_cast<int>(axes.size());
  if (j == 0) return 1.0;
  const auto& rule = gauss_legendre(kMeasureOrder);
  int points = 1;
  for (int i = 0; i < j; ++i) points *= kMeasureOrder;
  double sum = 0.0;
  for (int q = 0; q < points; ++q) {
    Point x = center(id);
    double w = 1.0;
    int rest = q;
    for (int a : axes) {
      const int node = rest % kMeasureOrder;
      rest /= kMeasureOrder;
      x[a] = 0.5 * (id.coord[a] - 1) * spacing_ + rule.nodes[node] * spacing_;
      w *= rule.weights[node];
    }
    const JacobianMatrix jac = jacobian(x);
    JacobianMatrix cols(n, j);
    for (int i = 0; i < j; ++i) cols.col(i) = jac.col(axes[i]);
    const JacobianMatrix gram = cols.transpose() * cols;
    sum += w * std::sqrt(std::max(0.0, gram.determinant()));
  }
  return sum * std::pow(spacing_, j);
}

double GridComplex::distance_to_A(const CellId& id) const {
  double best = std::numeric_limits<double>::infinity();
  for (int a = 0; a < spec_.k; ++a) {
    const int lo = id.spans(a) ? id.coord[a] - 1 : id.coord[a];
    const int hi = id.spans(a) ? id.coord[a] + 1 : id.coord[a];
    best = std::min(best, 0.5 * lo * spacing_);
    best = std::min(best, side(a) - 0.5 * hi * spacing_);
  }
  return std::max(0.0, best);
}

double GridComplex::distance_to_B(const CellId& id) const {
  double best = std::numeric_limits<double>::infinity();
  for (int a = spec_.k; a < spec_.n; ++a) {
    const int lo = id.spans(a) ? id.coord[a] - 1 : id.coord[a];
    const int hi = id.spans(a) ? id.coord[a] + 1 : id.coord[a];
    best = std::min(best, 0.5 * lo * spacing_);
    best = std::min(best, side(a) - 0.5 * hi * spacing_);
  }
  return std::max(0.0, best);
}

double cell_measure(const GridComplex& complex, const CellId& id) { return complex.measure(id); }

double face_density_value(const GridComplex& complex, const DensityField& rho, const CellId& face) {
  const auto cells = complex.lattice().incident_top_cells(face);
  double sum = 0.0;
  for (const auto& c : cells) sum += rho.values[complex.index(c)];
  return sum / static_cast<double>(cells.size());
}

}  // namespace pmod
