#include "detail.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <cmath>

namespace gagliardo::detail {

const GaussRule& gauss10() {
  static const GaussRule rule = [] {
    using G = boost::math::quadrature::gauss<double, 10>;
    GaussRule r;
    const auto& a = G::abscissa();
    const auto& w = G::weights();
    // Boost stores the non-negative half of a symmetric rule.
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i] == 0.0) {
        r.x.push_back(0.0);
        r.w.push_back(w[i]);
        continue;
      }
      r.x.push_back(-a[i]);
      r.w.push_back(w[i]);
      r.x.push_back(a[i]);
      r.w.push_back(w[i]);
    }
    return r;
  }();
  return rule;
}

std::vector<double> clean_breaks(std::vector<double> pts, double lo, double hi) {
  std::vector<double> out{lo, hi};
  for (double p : pts) {
    if (std::isfinite(p) && p > lo && p < hi) out.push_back(p);
  }
  std::sort(out.begin(), out.end());
  const double tol = 16.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(lo), std::abs(hi));
  std::vector<double> uniq;
  for (double p : out) {
    if (uniq.empty() || p - uniq.back() > tol) uniq.push_back(p);
  }
  if (uniq.back() != hi) uniq.back() = hi;
  return uniq;
}

void graded_split(double lo, double hi, const std::vector<double>& centres, double floor,
                  std::vector<double>& out, int depth) {
  double dist = std::numeric_limits<double>::infinity();
  for (double c : centres) {
    const double d = c < lo ? lo - c : (c > hi ? c - hi : 0.0);
    dist = std::min(dist, d);
  }
  if (hi - lo <= std::max(dist, floor) || depth >= 60) return;
  const double mid = 0.5 * (lo + hi);
  graded_split(lo, mid, centres, floor, out, depth + 1);
  out.push_back(mid);
  graded_split(mid, hi, centres, floor, out, depth + 1);
}

std::vector<double> graded(const std::vector<double>& breaks, const std::vector<double>& centres,
                           double floor) {
  std::vector<double> out;
  if (breaks.empty()) return out;
  out.push_back(breaks.front());
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    graded_split(breaks[i], breaks[i + 1], centres, floor, out);
    out.push_back(breaks[i + 1]);
  }
  return out;
}

std::vector<double> kink_points_1d(const ScalarField& u) {
  std::vector<double> pts;
  for (const Kink& k : u.kinks) {
    pts.push_back(k.center[0] - k.radius);
    if (k.radius > 0.0) pts.push_back(k.center[0] + k.radius);
  }
  return pts;
}

std::vector<double> ray_breaks(const ScalarField& u, const Point& x, const Point& e) {
  std::vector<double> out;
  if (u.dim == 1) {
    for (double p : kink_points_1d(u)) {
      const double r = (p - x[0]) * e[0];
      if (r > 0.0) out.push_back(r);
    }
    return out;
  }
  for (const Kink& k : u.kinks) {
    const Point d = x - k.center;
    const double b = dot(e, d, 2);
    if (k.radius == 0.0) {
      if (-b > 0.0) out.push_back(-b);
      continue;
    }
    const double disc = b * b - (dot(d, d, 2) - k.radius * k.radius);
    if (disc < 0.0) continue;
    const double root = std::sqrt(disc);
    if (-b - root > 0.0) out.push_back(-b - root);
    if (-b + root > 0.0) out.push_back(-b + root);
  }
  return out;
}

int panels(const QuadratureSpec& spec) { return std::max(1, spec.cells_per_axis / 64); }

double powabs(double a, double p) {
  a = std::abs(a);
  if (p == 1.0) return a;
  if (p == 2.0) return a * a;
  return std::pow(a, p);
}

int angle_nodes(const ScalarField& u, const Point& centre, const QuadratureSpec& spec, int minimum) {
  if (u.radial && norm(centre - u.origin, 2) == 0.0) return 1;
  return std::max(minimum, spec.cells_per_axis / 4);
}

unsigned worker_count() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("GAGLIARDO_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1) hw = std::min<unsigned>(hw, static_cast<unsigned>(cap));
  }
  return hw;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace gagliardo::detail
