#include "pmod/mollifier.hpp"

#include <Eigen/Dense>
#include <boost/math/constants/constants.hpp>
#include <cmath>
#include <limits>

#include "pmod/error.hpp"
#include "pmod/quadrature.hpp"

namespace pmod {

std::string to_string(KernelProfile profile) { return profile == KernelProfile::bump ? "bump" : "indicator"; }

KernelProfile kernel_profile_from_string(const std::string& name) {
  if (name == "bump") return KernelProfile::bump;
  if (name == "indicator") return KernelProfile::indicator;
  throw InvalidInput("unknown kernel profile '" + name + "'");
}

double kernel_normalization(int n, KernelProfile profile) {
  if (n < 1 || n > kMaxDim) throw InvalidInput("kernel dimension out of range");
  const double pi = boost::math::constants::pi<double>();
  const double sphere = 2.0 * std::pow(pi, 0.5 * n) / std::tgamma(0.5 * n);
  if (profile == KernelProfile::indicator) return n / sphere;
  // Radial integral of r^{n-1} exp(-1/(1-r^2)) on [0, 1], composite Gauss.
  const auto& rule = gauss_legendre(20);
  const int panels = 64;
  double radial = 0.0;
  for (int j = 0; j < panels; ++j) {
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      const double r = (j + rule.nodes[q]) / panels;
      radial += rule.weights[q] / panels * std::pow(r, n - 1) * std::exp(-1.0 / (1.0 - r * r));
    }
  }
  return 1.0 / (sphere * radial);
}

Kernel make_kernel(int n, double epsilon, KernelProfile profile) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw InvalidInput("epsilon must be positive");
  return Kernel{n, epsilon, kernel_normalization(n, profile), profile};
}

double kernel_eval(const Kernel& kernel, const Point& x) {
  double r2 = 0.0;
  for (int a = 0; a < kernel.n; ++a) r2 += x[a] * x[a];
  r2 /= kernel.epsilon * kernel.epsilon;
  if (r2 >= 1.0) return 0.0;
  const double scale = kernel.normalization / std::pow(kernel.epsilon, kernel.n);
  if (kernel.profile == KernelProfile::indicator) return scale;
  return scale * std::exp(-1.0 / (1.0 - r2));
}

std::vector<MemberPiece> member_pieces(const GridComplex& complex, const SliceMember& member) {
  if (!complex.spec().deformation.is_identity()) throw InvalidInput("mollifier geometry needs an undeformed box");
  const double h = complex.spacing();
  std::vector<MemberPiece> out;
  out.reserve(member.cells.size());
  for (std::size_t i = 0; i < member.cells.size(); ++i) {
    const auto& c = member.cells[i];
    MemberPiece piece;
    double geometric = 1.0;
    for (int a = 0; a < complex.n(); ++a) {
      const bool along = member.kind == MemberKind::fiber ? ((member.tangent_mask >> a) & 1u) != 0 : c.spans(a);
      if (along) {
        piece.mask |= 1u << a;
        piece.lo[a] = 0.5 * (c.coord[a] - 1) * h;
        piece.hi[a] = 0.5 * (c.coord[a] + 1) * h;
        geometric *= h;
      } else {
        piece.lo[a] = piece.hi[a] = 0.5 * c.coord[a] * h;
      }
    }
    piece.density = member.weights[i] / geometric;
    out.push_back(piece);
  }
  return out;
}

namespace {

// Squared distance from x to the box [lo, hi].
double box_distance2(const MemberPiece& piece, const Point& x, int n) {
  double d2 = 0.0;
  for (int a = 0; a < n; ++a) {
    double d = 0.0;
    if (x[a] < piece.lo[a]) d = piece.lo[a] - x[a];
    else if (x[a] > piece.hi[a]) d = x[a] - piece.hi[a];
    d2 += d * d;
  }
  return d2;
}

// Calls f(y, w) for the tensor Gauss nodes of the piece; w includes H^dim.
// With `clip_center`, the piece is first cut to the box of half-width `clip`
// around it and every spanned axis is split into panels no longer than
// `panel`, so the nodes resolve the kernel profile.
template <class F>
void for_each_node(const MemberPiece& piece, int n, int order, F&& f, const Point* clip_center = nullptr,
                   double clip = 0.0, double panel = 0.0) {
  const auto& rule = gauss_legendre(order);
  int axes[kMaxDim];
  double lo[kMaxDim], len[kMaxDim];
  int panels[kMaxDim];
  int dim = 0;
  for (int a = 0; a < n; ++a) {
    if (!((piece.mask >> a) & 1u)) continue;
    double l = piece.lo[a], r = piece.hi[a];
    if (clip_center) {
      l = std::max(l, (*clip_center)[a] - clip);
      r = std::min(r, (*clip_center)[a] + clip);
      if (r <= l) return;
    }
    axes[dim] = a;
    lo[dim] = l;
    panels[dim] = panel > 0.0 ? std::max(1, static_cast<int>(std::ceil((r - l) / panel - 1e-12))) : 1;
    len[dim] = (r - l) / panels[dim];
    ++dim;
  }
  int per_axis[kMaxDim];
  int total = 1;
  for (int i = 0; i < dim; ++i) {
    per_axis[i] = order * panels[i];
    total *= per_axis[i];
  }
  for (int q = 0; q < total; ++q) {
    Point y = piece.lo;
    double w = piece.density;
    int rest = q;
    for (int i = 0; i < dim; ++i) {
      const int k = rest % per_axis[i];
      rest /= per_axis[i];
      const int node = k % order;
      const int cell = k / order;
      const int a = axes[i];
      y[a] = lo[i] + (cell + rule.nodes[node]) * len[i];
      w *= rule.weights[node] * len[i];
    }
    f(y, w);
  }
}

// Sub-panel length relative to epsilon for the inner convolution.
constexpr double kPanelFraction = 0.125;

double convolve_pieces(const std::vector<MemberPiece>& pieces, const Kernel& kernel, const Point& x, int order) {
  const int n = kernel.n;
  const double eps2 = kernel.epsilon * kernel.epsilon;
  double sum = 0.0;
  for (const auto& piece : pieces) {
    if (box_distance2(piece, x, n) >= eps2) continue;
    for_each_node(
        piece, n, order,
        [&](const Point& y, double w) {
          Point d{};
          for (int a = 0; a < n; ++a) d[a] = x[a] - y[a];
          sum += w * kernel_eval(kernel, d);
        },
        &x, kernel.epsilon, kPanelFraction * kernel.epsilon);
  }
  return sum;
}

}  // namespace

double convolve_surface(const GridComplex& complex, const SliceMember& member, const Kernel& kernel, const Point& x,
                        int order) {
  if (kernel.n != complex.n()) throw InvalidInput("kernel dimension differs from the complex");
  return convolve_pieces(member_pieces(complex, member), kernel, x, order);
}

MarginReport admissibility_margin(const GridComplex& complex, const SliceMember& s, const Kernel& kernel,
                                  const std::vector<SliceMember>& sample, double delta_margin, int order,
                                  bool enforce) {
  if (kernel.n != complex.n()) throw InvalidInput("kernel dimension differs from the complex");
  if (enforce && !(kernel.epsilon < delta_margin)) {
    throw InvalidInput("epsilon must be smaller than the margin");
  }
  if (sample.empty()) throw InvalidInput("empty member sample");
  const auto s_pieces = member_pieces(complex, s);
  MarginReport report;
  report.margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const auto& star = sample[i];
    const auto star_pieces = member_pieces(complex, star);
    if (enforce) {
      for (const auto& piece : star_pieces) {
        for (int a = 0; a < complex.k(); ++a) {
          if (std::min(piece.lo[a], complex.side(a) - piece.hi[a]) < delta_margin - 1e-12) {
            throw InvalidInput("sampled member comes closer to A than the margin");
          }
        }
      }
    }
    double total = 0.0;
    for (const auto& piece : star_pieces) {
      for_each_node(
          piece, complex.n(), order,
          [&](const Point& x, double w) { total += w * convolve_pieces(s_pieces, kernel, x, order); }, nullptr, 0.0,
          kPanelFraction * kernel.epsilon);
    }
    report.values.push_back(total);
    if (total < report.margin) {
      report.margin = total;
      report.argmin = i;
    }
  }
  return report;
}

double mollified_mass(const GridComplex& complex, const SliceMember& s, const Kernel& kernel, int order) {
  const auto pieces = member_pieces(complex, s);
  double total = 0.0;
  const int n = complex.n();
  for (std::size_t c = 0; c < complex.num_top_cells(); ++c) {
    total += complex.measure(n, c) * convolve_pieces(pieces, kernel, complex.center(complex.cells(n)[c]), order);
  }
  return total;
}

double coarea_factor(const Eigen::MatrixXd& tangent_star, const Eigen::MatrixXd& tangent) {
  const auto n = tangent.rows();
  if (tangent_star.rows() != n || tangent_star.cols() + tangent.cols() != n) {
    throw InvalidInput("tangent dimensions must add up to the ambient dimension");
  }
  auto orthonormal = [](const Eigen::MatrixXd& t) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(t);
    return Eigen::MatrixXd(qr.householderQ() * Eigen::MatrixXd::Identity(t.rows(), t.cols()));
  };
  Eigen::MatrixXd m(n, n);
  m << orthonormal(tangent_star), -orthonormal(tangent);
  return std::abs(m.determinant());
}

}  // namespace pmod
