#pragma once

// Internal helpers shared by the engines: Gauss-Legendre panels, breakpoint
// handling and deterministic chunked parallelism.

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

#include "gagliardo/fields.hpp"
#include "gagliardo/quadrature.hpp"

namespace gagliardo::detail {

/// 10-point Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> x;
  std::vector<double> w;
};
const GaussRule& gauss10();

/// Sums f over [a, b] split into q equal subpanels, each with the 10-point rule.
template <class F>
double gl(double a, double b, int q, F&& f) {
  if (!(b > a)) return 0.0;
  const GaussRule& g = gauss10();
  double total = 0.0;
  const double step = (b - a) / q;
  for (int k = 0; k < q; ++k) {
    const double lo = a + k * step;
    const double half = 0.5 * step;
    const double mid = lo + half;
    double s = 0.0;
    for (std::size_t i = 0; i < g.x.size(); ++i) s += g.w[i] * f(mid + half * g.x[i]);
    total += half * s;
  }
  return total;
}

/// Sorted, de-duplicated breakpoints restricted to [lo, hi], endpoints included.
std::vector<double> clean_breaks(std::vector<double> pts, double lo, double hi);

/// Splits [lo, hi] recursively at midpoints until every piece is no longer than
/// max(distance to the nearest centre, floor). Appends interior points to out.
void graded_split(double lo, double hi, const std::vector<double>& centres, double floor,
                  std::vector<double>& out, int depth = 0);

/// Applies graded_split between consecutive breakpoints.
std::vector<double> graded(const std::vector<double>& breaks, const std::vector<double>& centres,
                           double floor);

/// Kink locations on the real line (n = 1).
std::vector<double> kink_points_1d(const ScalarField& u);

/// Distances r > 0 at which the ray x + r e meets a kink set of u (and closest approaches).
std::vector<double> ray_breaks(const ScalarField& u, const Point& x, const Point& e);

/// GL subpanels per panel for a given resolution.
int panels(const QuadratureSpec& spec);

/// |a|^p with fast paths for p = 1, 2.
double powabs(double a, double p);

/// Angular trapezoid nodes for polar rules about `centre` (1 when the field is
/// radial about that centre).
int angle_nodes(const ScalarField& u, const Point& centre, const QuadratureSpec& spec, int minimum);

/// Calls emit(r, w) for quadrature nodes on the ray x + r e, r in [r0, r1],
/// split at kink crossings and graded toward the field's origin.
template <class W>
void along_nodes(const ScalarField& u, const Point& x, const Point& e, double r0, double r1, int q,
                 W&& emit) {
  if (!(r1 > r0)) return;
  const std::vector<double> br = clean_breaks(ray_breaks(u, x, e), r0, r1);
  const double ro = dot(e, u.origin - x, u.dim);
  const std::vector<double> pieces = graded(br, {ro}, u.feature_scale);
  const GaussRule& g = gauss10();
  for (std::size_t i = 0; i + 1 < pieces.size(); ++i) {
    const double step = (pieces[i + 1] - pieces[i]) / q;
    for (int k = 0; k < q; ++k) {
      const double half = 0.5 * step;
      const double mid = pieces[i] + k * step + half;
      for (std::size_t j = 0; j < g.x.size(); ++j) emit(mid + half * g.x[j], half * g.w[j]);
    }
  }
}

template <class F>
double along(const ScalarField& u, const Point& x, const Point& e, double r0, double r1, int q, F&& f) {
  double s = 0.0;
  along_nodes(u, x, e, r0, r1, q, [&](double r, double w) { s += w * f(r); });
  return s;
}

/// Number of worker threads: hardware concurrency capped by GAGLIARDO_THREADS.
unsigned worker_count();

/// Evaluates f(i) for i in [0, count) on the worker pool; results keep index order.
template <class T, class F>
std::vector<T> parallel_map(std::size_t count, F&& f) {
  std::vector<T> out(count);
  const unsigned workers = std::min<std::size_t>(worker_count(), count == 0 ? 1 : count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) out[i] = f(i);
    return out;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < count; i += workers) out[i] = f(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

/// splitmix64 mix of (seed, stream) used to seed per-chunk generators.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

/// Sum in index order (fixed association).
inline double ordered_sum(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

}  // namespace gagliardo::detail
