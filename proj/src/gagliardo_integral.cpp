// Engines for the singular double integral
//   I = int int |u(x) - u(y)|^p / |x - y|^{n + sp} dx dy.
//
// n = 1, tensor: difference coordinates, I = 2 int_0^inf h^{-1-sp} D(h) dh with
//   D(h) = int |u(x + h) - u(x)|^p dx, on a geometric h-mesh near 0.
// Otherwise: rays. For x in the core ball B and a direction e,
//   int_0^L r^{-1-sp} |u(x + r e) - u(x)|^p dr + 2 |u(x) - c_e|^p L^{-sp} / sp,
// where L is the exit distance from B and c_e the exterior value; x is
// integrated by a polar tensor rule or by Monte Carlo.

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "detail.hpp"
#include "gagliardo/quadrature.hpp"

namespace gagliardo {

using namespace detail;

namespace {

// Below ~2^-20 the differences lose digits to cancellation; the power-law
// remainder covers the rest.
constexpr int kLineLevels = 20;
constexpr int kRayLevels = 30;
constexpr int kXOctaves = 24;
constexpr int kHOctaves = 30;
constexpr std::int64_t kChunk = 1024;

struct Kernel {
  double p;
  double sp;
};

double exterior_jump(const ScalarField& u, double p) {
  if (u.tail.kind != DecayKind::flat || u.dim != 1) return 0.0;
  return powabs(u.tail.above - u.tail.below, p);
}

// Contribution of h in (0, hmin] assuming D(h) ~ c h^a, with a read off
// from two samples. Samples at or below `floor` are rounding noise; so is a
// bad exponent whose remainder scale d1 hmin^{-sp} stays under `negligible`.
double small_h_remainder(double d1, double d2, double hmin, double sp, double floor = 0.0,
                         double negligible = 0.0) {
  if (!(d1 > floor)) return 0.0;
  const double a = d2 > 0.0 ? std::log2(d1 / d2) : 2.0 * sp + 2.0;
  if (!(a > sp + 1e-3)) {
    if (d1 * std::pow(hmin, -sp) <= negligible) return 0.0;
    throw Error(ErrorKind::non_integrable_tail, "integrand is not integrable at the diagonal");
  }
  return d1 * std::pow(hmin, -sp) / (a - sp);
}

// ---------------------------------------------------------------------------
// n = 1 in difference coordinates

class LineEngine {
 public:
  LineEngine(const ScalarField& u, Kernel k, int q, PairOrder order)
      : u_(u), k_(k), q_(q), sign_(order == PairOrder::xy ? 1.0 : -1.0) {
    c_ = u.tail.core.center[0];
    R_ = u.tail.core.radius;
    bounded_ = u.tail.bounded();
    kinks_ = kink_points_1d(u);
    o_ = u.origin[0];
    scale_ = std::max(std::abs(u.tail.below), std::abs(u.tail.above));
    for (double x : kinks_) scale_ = std::max(scale_, std::abs(u({x, 0.0})));
    for (double x : {o_, c_}) scale_ = std::max(scale_, std::abs(u({x, 0.0})));
  }

  double D(double h) const {
    const double s = sign_ * h;
    auto g = [&](double x) { return powabs(u_({x + s, 0.0}) - u_({x, 0.0}), k_.p); };
    std::vector<double> pts{o_, o_ - s, o_ - 0.5 * s};
    for (double p : kinks_) {
      pts.push_back(p);
      pts.push_back(p - s);
    }
    double lo, hi;
    if (bounded_) {
      for (double e : {c_ - R_, c_ + R_}) {
        pts.push_back(e);
        pts.push_back(e - s);
      }
      lo = std::min(c_ - R_, c_ - R_ - s);
      hi = std::max(c_ + R_, c_ + R_ - s);
    } else {
      const double X0 = R_ + h;
      lo = std::min(c_, c_ - s) - X0;
      hi = std::max(c_, c_ - s) + X0;
    }
    const auto pieces = graded(clean_breaks(pts, lo, hi), {o_, o_ - s}, u_.feature_scale);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < pieces.size(); ++i) total += gl(pieces[i], pieces[i + 1], q_, g);
    if (bounded_) return total;

    const double ratio = std::pow(2.0, 1.0 - (u_.tail.rate + 1.0) * k_.p);
    if (!(ratio < 1.0)) throw Error(ErrorKind::non_integrable_tail, "difference quotient decays too slowly");
    for (int side : {1, -1}) {
      const double d0 = side > 0 ? hi - c_ : c_ - lo;
      double last = 0.0;
      for (int k = 0; k < kXOctaves; ++k) {
        const double a = d0 * std::ldexp(1.0, k);
        const double lo_k = side > 0 ? c_ + a : c_ - 2 * a;
        const double hi_k = side > 0 ? c_ + 2 * a : c_ - a;
        const auto br = clean_breaks(pts, lo_k, hi_k);
        last = 0.0;
        for (std::size_t i = 0; i + 1 < br.size(); ++i) last += gl(br[i], br[i + 1], q_, g);
        total += last;
      }
      total += last * ratio / (1.0 - ratio);
    }
    return total;
  }

  double integral(double delta) const {
    std::vector<double> hbreaks;
    for (double a : kinks_) {
      for (double b : kinks_) {
        if (b > a) hbreaks.push_back(b - a);
      }
    }
    if (bounded_) hbreaks.push_back(2 * R_);

    std::vector<double> hs, ws;
    auto add = [&](double a, double b) {
      const auto br = clean_breaks(hbreaks, a, b);
      const GaussRule& g = gauss10();
      for (std::size_t i = 0; i + 1 < br.size(); ++i) {
        const double step = (br[i + 1] - br[i]) / q_;
        for (int k = 0; k < q_; ++k) {
          const double half = 0.5 * step, mid = br[i] + k * step + half;
          for (std::size_t j = 0; j < g.x.size(); ++j) {
            hs.push_back(mid + half * g.x[j]);
            ws.push_back(half * g.w[j]);
          }
        }
      }
    };
    for (int k = 0; k < kLineLevels; ++k) add(std::ldexp(delta, -k - 1), std::ldexp(delta, -k));
    const double hmin = std::ldexp(delta, -kLineLevels);

    const double hend = bounded_ ? std::max(2 * R_, delta) : std::max(std::ldexp(R_, kHOctaves), 2 * delta);
    std::size_t last_octave_begin = hs.size();
    for (double a = delta; a < hend;) {
      const double b = std::min(2 * a, hend);
      last_octave_begin = hs.size();
      add(a, b);
      a = b;
    }
    const std::size_t nodes = hs.size();
    hs.push_back(hmin);
    hs.push_back(0.5 * hmin);
    hs.push_back(hend);
    const auto d = parallel_map<double>(hs.size(), [&](std::size_t i) { return D(hs[i]); });

    double sum = 0.0, last = 0.0;
    for (std::size_t i = 0; i < nodes; ++i) {
      const double term = ws[i] * std::pow(hs[i], -1.0 - k_.sp) * d[i];
      sum += term;
      if (i >= last_octave_begin) last += term;
    }
    const double noise = powabs(64.0 * std::numeric_limits<double>::epsilon() * scale_, k_.p) * 4.0 * R_;
    sum += small_h_remainder(d[nodes], d[nodes + 1], hmin, k_.sp, noise);

    const double sp = k_.sp;
    if (bounded_) {
      const double jump = exterior_jump(u_, k_.p);
      sum += d[nodes + 2] * std::pow(hend, -sp) / sp;
      if (jump > 0.0) {
        if (!(sp > 1.0)) {
          throw Error(ErrorKind::non_integrable_tail, "field '" + u_.label + "' has different limits at +-inf and sp <= 1");
        }
        sum += jump * std::pow(hend, 1.0 - sp) * (1.0 / (sp - 1.0) - 1.0 / sp);
      }
    } else {
      const double r = std::pow(2.0, std::max(1.0 - u_.tail.rate * k_.p, 0.0) - sp);
      if (!(r < 1.0)) throw Error(ErrorKind::non_integrable_tail, "field '" + u_.label + "' decays too slowly");
      sum += last * r / (1.0 - r);
    }
    return 2.0 * sum;
  }

 private:
  const ScalarField& u_;
  Kernel k_;
  int q_;
  double sign_;
  double c_ = 0.0, R_ = 1.0, o_ = 0.0, scale_ = 0.0;
  bool bounded_ = true;
  std::vector<double> kinks_;
};

// ---------------------------------------------------------------------------
// Rays

struct RayEngine {
  const ScalarField& u;
  Kernel k;
  int q;
  double delta;
  PairOrder order;

  // int_0^L r^{-1-sp} |u(x + r e) - u(x)|^p dr
  double inner(const Point& x, double ux, const Point& e, double L) const {
    if (!(L > 0.0)) return 0.0;
    auto diff = [&](double r) {
      const double v = u(x + r * e);
      return order == PairOrder::xy ? v - ux : ux - v;
    };
    auto f = [&](double r) { return std::pow(r, -1.0 - k.sp) * powabs(diff(r), k.p); };
    std::vector<double> breaks = ray_breaks(u, x, e);
    const double dr = std::min(delta, L);
    double s = 0.0;
    for (int lv = 0; lv < kRayLevels; ++lv) {
      const auto br = clean_breaks(breaks, std::ldexp(dr, -lv - 1), std::ldexp(dr, -lv));
      for (std::size_t i = 0; i + 1 < br.size(); ++i) s += gl(br[i], br[i + 1], q, f);
    }
    const double hmin = std::ldexp(dr, -kRayLevels);
    const double far = u(x + hmin * e);
    const double noise = powabs(64.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(ux), std::abs(far)), k.p);
    // A ray that truly diverges at 0 is dominated by its finest levels, far above 1e-6 of the sum.
    s += small_h_remainder(powabs(diff(hmin), k.p), powabs(diff(0.5 * hmin), k.p), hmin, k.sp, noise, 1e-6 * s);
    for (double a = dr; a < L;) {
      const double b = std::min(2 * a, L);
      const auto br = clean_breaks(breaks, a, b);
      for (std::size_t i = 0; i + 1 < br.size(); ++i) s += gl(br[i], br[i + 1], q, f);
      a = b;
    }
    return s;
  }
};

// Distance from x (inside the ball) to the sphere along e.
double exit_distance(const Point& x, const Point& e, const Ball& b, int n) {
  const Point d = x - b.center;
  const double bb = dot(e, d, n);
  const double cc = dot(d, d, n) - b.radius * b.radius;
  return std::max(0.0, -bb + std::sqrt(std::max(0.0, bb * bb - cc)));
}

// Per-x quantity: integral over all directions (sum over +-1 in 1-D, over the
// circle in 2-D) of the ray contribution.
struct Directions {
  int n;
  int ntheta;  // 2-D trapezoid nodes

  template <class F>
  double sum(F&& ray) const {
    if (n == 1) return ray(Point{1.0, 0.0}) + ray(Point{-1.0, 0.0});
    double s = 0.0;
    for (int j = 0; j < ntheta; ++j) {
      const double t = 2.0 * std::numbers::pi * (j + 0.5) / ntheta;
      s += ray(Point{std::cos(t), std::sin(t)});
    }
    return s * 2.0 * std::numbers::pi / ntheta;
  }
};

struct Domain {
  Point centre;
  double r0;       // inner radius (0 for the full ball)
  double r1;       // outer radius of the x-region
  Ball ybox;       // y is confined to this ball; beyond it u is constant
  bool exterior;   // add the y-outside contribution
};

double ray_total(const RayEngine& eng, const Domain& dom, const Point& x, const Point& e) {
  const ScalarField& u = eng.u;
  const double ux = u(x);
  const double L = exit_distance(x, e, dom.ybox, u.dim);
  double v = eng.inner(x, ux, e, L);
  if (dom.exterior) {
    double ce = u.tail.below;
    if (u.dim == 1 && e[0] > 0.0) ce = u.tail.above;
    if (u.tail.kind != DecayKind::flat) ce = 0.0;
    const double jump = powabs(ux - ce, eng.k.p);
    if (jump > 0.0) v += 2.0 * jump * std::pow(L, -eng.k.sp) / eng.k.sp;
  }
  return v;
}

// Both points outside the core ball; nonzero only for 1-D flat fields with
// different limits.
double both_outside(const ScalarField& u, Kernel k) {
  const double jump = exterior_jump(u, k.p);
  if (jump == 0.0) return 0.0;
  if (!(k.sp > 1.0)) {
    throw Error(ErrorKind::non_integrable_tail, "field '" + u.label + "' has different limits at +-inf and sp <= 1");
  }
  const double R = u.tail.core.radius;
  return 2.0 * jump * std::pow(2 * R, 1.0 - k.sp) / (k.sp * (k.sp - 1.0));
}

double tensor_rays(const RayEngine& eng, const Domain& dom, const QuadratureSpec& spec, int q) {
  const ScalarField& u = eng.u;
  const int n = u.dim;
  std::vector<Point> xs;
  std::vector<double> wx;
  if (n == 1) {
    for (Point e : {Point{1.0, 0.0}, Point{-1.0, 0.0}}) {
      along_nodes(u, dom.centre, e, dom.r0, dom.r1, q, [&](double r, double w) {
        xs.push_back(dom.centre + r * e);
        wx.push_back(w);
      });
    }
  } else {
    const int nphi = angle_nodes(u, dom.centre, spec, 16);
    const double dphi = 2.0 * std::numbers::pi / nphi;
    for (int j = 0; j < nphi; ++j) {
      const double phi = dphi * (j + 0.5);
      const Point e{std::cos(phi), std::sin(phi)};
      along_nodes(u, dom.centre, e, dom.r0, dom.r1, q, [&](double r, double w) {
        xs.push_back(dom.centre + r * e);
        wx.push_back(w * r * dphi);
      });
    }
  }
  const Directions dirs{n, std::max(8, spec.cells_per_axis)};
  const auto vals = parallel_map<double>(xs.size(), [&](std::size_t i) {
    return wx[i] * dirs.sum([&](const Point& e) { return ray_total(eng, dom, xs[i], e); });
  });
  return ordered_sum(vals);
}

Estimate montecarlo_rays(const RayEngine& eng, const Domain& dom, const QuadratureSpec& spec) {
  const ScalarField& u = eng.u;
  const int n = u.dim;
  const double measure = n == 1 ? 2.0 * (dom.r1 - dom.r0)
                                : std::numbers::pi * (dom.r1 * dom.r1 - dom.r0 * dom.r0);
  const std::int64_t N = spec.samples;
  const std::int64_t nchunks = (N + kChunk - 1) / kChunk;
  struct Moments {
    double s = 0.0, s2 = 0.0;
  };
  const auto parts = parallel_map<Moments>(static_cast<std::size_t>(nchunks), [&](std::size_t c) {
    std::mt19937_64 rng(mix_seed(spec.seed, c));
    auto unit = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    Moments m;
    const std::int64_t begin = static_cast<std::int64_t>(c) * kChunk;
    const std::int64_t end = std::min(N, begin + kChunk);
    for (std::int64_t i = begin; i < end; ++i) {
      double y;
      if (n == 1) {
        const double a = unit(), b = unit();
        const double r = dom.r0 + a * (dom.r1 - dom.r0);
        const Point x{dom.centre[0] + (b < 0.5 ? -r : r), 0.0};
        y = measure * (ray_total(eng, dom, x, {1.0, 0.0}) + ray_total(eng, dom, x, {-1.0, 0.0}));
      } else {
        const double a = unit(), b = unit(), t = unit();
        const double r = std::sqrt(dom.r0 * dom.r0 + a * (dom.r1 * dom.r1 - dom.r0 * dom.r0));
        const double phi = 2.0 * std::numbers::pi * b;
        const Point x = dom.centre + r * Point{std::cos(phi), std::sin(phi)};
        const double th = 2.0 * std::numbers::pi * t;
        const Point e{std::cos(th), std::sin(th)};
        y = measure * std::numbers::pi * (ray_total(eng, dom, x, e) + ray_total(eng, dom, x, -1.0 * e));
      }
      m.s += y;
      m.s2 += y * y;
    }
    return m;
  });
  double s = 0.0, s2 = 0.0;
  for (const auto& m : parts) {
    s += m.s;
    s2 += m.s2;
  }
  const double mean = s / N;
  const double var = N > 1 ? std::max(0.0, (s2 - N * mean * mean) / (N - 1)) : 0.0;
  return {mean, std::sqrt(var / N)};
}

void require_ray_field(const ScalarField& u) {
  if (u.tail.kind == DecayKind::none) {
    throw Error(ErrorKind::non_integrable_tail, "field '" + u.label + "' has no decay metadata");
  }
  if (!u.tail.bounded()) {
    throw Error(ErrorKind::invalid_argument,
                "field '" + u.label + "' has a polynomial tail; use --method tensor with n = 1");
  }
}

void check_budget(const Estimate& e, const QuadratureSpec& spec) {
  if (spec.target_rel_error && e.error > *spec.target_rel_error * std::abs(e.value)) {
    throw Error(ErrorKind::budget_exceeded, "error indicator above the requested relative target");
  }
}

Kernel kernel_of(const SeminormParams& params) {
  if (!(params.s() < 1.0)) {
    throw Error(ErrorKind::invalid_argument, "the double integral needs s < 1; s = 1 uses the gradient");
  }
  return {params.p(), params.sp()};
}

double line_value(const ScalarField& u, Kernel k, const QuadratureSpec& spec, double delta) {
  return LineEngine(u, k, panels(spec), spec.order).integral(delta);
}

double ray_tensor_value(const ScalarField& u, Kernel k, const QuadratureSpec& spec, double delta,
                        const Domain& dom) {
  const int q = panels(spec);
  const RayEngine eng{u, k, q, delta, spec.order};
  return tensor_rays(eng, dom, spec, q);
}

}  // namespace

Estimate gagliardo_double_integral(const ScalarField& u, const SeminormParams& params,
                                   const QuadratureSpec& spec) {
  spec.validate();
  if (params.n() != u.dim) throw Error(ErrorKind::invalid_argument, "--n does not match the field dimension");
  const Kernel k = kernel_of(params);
  if (u.tail.kind == DecayKind::none) {
    throw Error(ErrorKind::non_integrable_tail, "field '" + u.label + "' has no decay metadata");
  }
  const double delta = diagonal_band(u, spec);
  QuadratureSpec coarse = spec;
  coarse.cells_per_axis = std::max(1, spec.cells_per_axis / 2);
  Estimate out;
  if (u.dim == 1 && spec.method == Method::tensor) {
    const double fine = line_value(u, k, spec, delta);
    const double rough = line_value(u, k, coarse, 2 * delta);
    out = {fine, std::abs(fine - rough)};
  } else {
    require_ray_field(u);
    const Ball core = u.tail.core;
    const Domain dom{core.center, 0.0, core.radius, core, true};
    if (spec.method == Method::tensor) {
      const double fine = ray_tensor_value(u, k, spec, delta, dom);
      const double rough = ray_tensor_value(u, k, coarse, 2 * delta, dom);
      out = {fine + both_outside(u, k), std::abs(fine - rough)};
    } else {
      const RayEngine eng{u, k, 1, delta, spec.order};
      out = montecarlo_rays(eng, dom, spec);
      out.value += both_outside(u, k);
    }
  }
  check_budget(out, spec);
  return out;
}

Estimate annulus_double_integral(const ScalarField& u, const Point& x0, double r, double R,
                                 const SeminormParams& params, const QuadratureSpec& spec) {
  spec.validate();
  if (!(r > 0.0 && r < R)) throw Error(ErrorKind::invalid_argument, "annulus needs 0 < r < R");
  if (params.n() != u.dim) throw Error(ErrorKind::invalid_argument, "--n does not match the field dimension");
  const Kernel k = kernel_of(params);
  const Domain dom{x0, r, R, Ball(x0, R), false};
  const double delta = std::min(diagonal_band(u, spec), 2.0 * R / spec.cells_per_axis * 4.0);
  Estimate out;
  if (spec.method == Method::tensor) {
    QuadratureSpec coarse = spec;
    coarse.cells_per_axis = std::max(1, spec.cells_per_axis / 2);
    const double fine = ray_tensor_value(u, k, spec, delta, dom);
    const double rough = ray_tensor_value(u, k, coarse, 2 * delta, dom);
    out = {fine, std::abs(fine - rough)};
  } else {
    const RayEngine eng{u, k, 1, delta, spec.order};
    out = montecarlo_rays(eng, dom, spec);
  }
  check_budget(out, spec);
  return out;
}

}  // namespace gagliardo
