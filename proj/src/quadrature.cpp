#include "gagliardo/quadrature.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "detail.hpp"

namespace gagliardo {

using namespace detail;

std::string_view to_string(Method m) { return m == Method::tensor ? "tensor" : "montecarlo"; }

Method parse_method(std::string_view text) {
  if (text == "tensor") return Method::tensor;
  if (text == "montecarlo" || text == "mc") return Method::montecarlo;
  throw Error(ErrorKind::invalid_argument, "--method must be 'tensor' or 'montecarlo'");
}

void QuadratureSpec::validate() const {
  if (cells_per_axis < 1) throw Error(ErrorKind::invalid_argument, "--cells must be positive");
  if (samples < 1) throw Error(ErrorKind::invalid_argument, "--samples must be positive");
  if (truncation_radius && !(*truncation_radius > 0.0)) {
    throw Error(ErrorKind::invalid_argument, "--truncation must be positive");
  }
  if (diagonal_band && !(*diagonal_band > 0.0)) throw Error(ErrorKind::invalid_argument, "--band must be positive");
  if (truncation_radius && diagonal_band) {
    const double width = 2.0 * *truncation_radius / cells_per_axis;
    if (*diagonal_band < width * (1.0 - 1e-12)) {
      throw Error(ErrorKind::invalid_argument, "--band is smaller than one cell width");
    }
  }
}

std::string QuadratureSpec::str() const {
  std::ostringstream os;
  os.precision(17);
  os << "method=" << to_string(method) << ";cells=" << cells_per_axis << ";samples=" << samples;
  if (truncation_radius) os << ";T=" << *truncation_radius;
  if (diagonal_band) os << ";band=" << *diagonal_band;
  os << ";seed=" << seed;
  return os.str();
}

QuadratureSpec default_spec(int n) {
  QuadratureSpec spec;
  spec.method = n == 1 ? Method::tensor : Method::montecarlo;
  return spec;
}

QuadratureSpec refined(const QuadratureSpec& spec, int factor) {
  QuadratureSpec out = spec;
  out.cells_per_axis = spec.cells_per_axis * factor;
  out.samples = spec.samples * factor;
  if (spec.diagonal_band) out.diagonal_band = *spec.diagonal_band / factor;
  return out;
}

double truncation_radius(const ScalarField& u, const QuadratureSpec& spec) {
  if (spec.truncation_radius) return *spec.truncation_radius;
  return 4.0 * u.extent().radius;
}

double diagonal_band(const ScalarField& u, const QuadratureSpec& spec) {
  const double T = truncation_radius(u, spec);
  const double width = 2.0 * T / spec.cells_per_axis;
  if (!spec.diagonal_band) return width;
  if (*spec.diagonal_band < width * (1.0 - 1e-12)) {
    throw Error(ErrorKind::invalid_argument, "--band is smaller than one cell width");
  }
  return *spec.diagonal_band;
}


namespace {

void require_integrable(const ScalarField& u, double p, int n) {
  const Tail& t = u.tail;
  if (t.kind == DecayKind::none) {
    throw Error(ErrorKind::non_integrable_tail, "field '" + u.label + "' has no decay");
  }
  if (t.kind == DecayKind::flat && (t.below != 0.0 || t.above != 0.0)) {
    throw Error(ErrorKind::non_integrable_tail, "field '" + u.label + "' tends to a nonzero constant");
  }
  if (t.kind == DecayKind::polynomial && !(t.rate * p > n)) {
    throw Error(ErrorKind::non_integrable_tail, "field '" + u.label + "' decays too slowly for this exponent");
  }
}

// Integral of f over R^n where f vanishes wherever u does and decays like
// |u|^p (or |grad u|^p with the extra rate).
template <class F>
double lp_core(const ScalarField& u, double p, double extra_rate, int q, int nphi, F f) {
  const int n = u.dim;
  const Point c = u.tail.core.center;
  const double R = u.tail.core.radius;
  const bool poly = u.tail.kind == DecayKind::polynomial;
  const double ratio = std::pow(2.0, n - (u.tail.rate + extra_rate) * p);
  auto ray = [&](const Point& e, double weight_power) {
    auto g = [&](double r) { return f(c + r * e) * (weight_power ? r : 1.0); };
    double s = along(u, c, e, 0.0, R, q, g);
    if (poly) {
      double last = 0.0;
      for (int k = 0; k < 30; ++k) {
        const double a = R * std::ldexp(1.0, k);
        last = along(u, c, e, a, 2 * a, q, g);
        s += last;
      }
      s += last * ratio / (1.0 - ratio);
    }
    return s;
  };
  if (n == 1) return ray({1.0, 0.0}, 0) + ray({-1.0, 0.0}, 0);
  double total = 0.0;
  for (int j = 0; j < nphi; ++j) {
    const double phi = 2.0 * std::numbers::pi * (j + 0.5) / nphi;
    total += ray({std::cos(phi), std::sin(phi)}, 1);
  }
  return total * 2.0 * std::numbers::pi / nphi;
}

}  // namespace

Estimate lp_integral(const ScalarField& u, double p, const QuadratureSpec& spec) {
  if (!std::isfinite(p)) throw Error(ErrorKind::unsupported_exponent, "p = infinity is handled by sup_norm");
  if (!(p > 0.0)) throw Error(ErrorKind::invalid_argument, "exponent must be positive");
  require_integrable(u, p, u.dim);
  const int q = panels(spec);
  const int nphi = angle_nodes(u, u.tail.core.center, spec, 32);
  auto f = [&](const Point& x) { return powabs(u(x), p); };
  const double fine = lp_core(u, p, 0.0, q, nphi, f);
  const double coarse = lp_core(u, p, 0.0, std::max(1, q / 2), std::max(1, nphi / 2), f);
  return {fine, std::abs(fine - coarse)};
}

Estimate lp_integral_vector(const ScalarField& shape, const GradientFn& g, double p,
                            const QuadratureSpec& spec) {
  if (!std::isfinite(p)) throw Error(ErrorKind::unsupported_exponent, "p = infinity is handled by sup_norm");
  const Tail& t = shape.tail;
  if (t.kind == DecayKind::none) {
    throw Error(ErrorKind::non_integrable_tail, "field '" + shape.label + "' has no decay");
  }
  if (t.kind == DecayKind::polynomial && !((t.rate + 1.0) * p > shape.dim)) {
    throw Error(ErrorKind::non_integrable_tail, "gradient of '" + shape.label + "' decays too slowly");
  }
  const int q = panels(spec);
  const int nphi = angle_nodes(shape, t.core.center, spec, 32);
  const int n = shape.dim;
  auto f = [&](const Point& x) { return powabs(norm(g(x), n), p); };
  const double fine = lp_core(shape, p, 1.0, q, nphi, f);
  const double coarse = lp_core(shape, p, 1.0, std::max(1, q / 2), std::max(1, nphi / 2), f);
  return {fine, std::abs(fine - coarse)};
}

Estimate sup_norm(const ScalarField& u, const QuadratureSpec& spec) {
  const Tail& t = u.tail;
  const double inf = std::numeric_limits<double>::infinity();
  if (t.kind == DecayKind::none) {
    // Only constants are bounded among fields without decay metadata; probe.
    const double a = std::abs(u({1e6, 1e6})), b = std::abs(u({-1e6, 0.0}));
    if (a != b || a != std::abs(u({0.0, 0.0}))) return {inf, 0.0};
  }
  if (t.kind == DecayKind::polynomial && t.rate < 0.0) return {inf, 0.0};
  const int n = u.dim;
  const Ball box = u.extent();
  const double half = 2.0 * box.radius;
  const int m = n == 1 ? 16 * spec.cells_per_axis : 4 * spec.cells_per_axis;
  const double h = 2.0 * half / m;
  double best = -1.0;
  Point arg{0.0, 0.0};
  auto consider = [&](const Point& x) {
    const double v = std::abs(u(x));
    if (v > best) {
      best = v;
      arg = x;
    }
  };
  consider(u.origin);
  for (const Kink& k : u.kinks) consider(k.center);
  if (n == 1) {
    for (double p : kink_points_1d(u)) consider({p, 0.0});
    for (int i = 0; i <= m; ++i) consider({box.center[0] - half + i * h, 0.0});
  } else {
    for (int i = 0; i <= m; ++i) {
      for (int j = 0; j <= m; ++j) consider({box.center[0] - half + i * h, box.center[1] - half + j * h});
    }
  }
  if (t.kind == DecayKind::flat) best = std::max({best, std::abs(t.below), std::abs(t.above)});
  const double coarse = best;
  // Pattern search around the argmax.
  double step = h;
  const std::array<Point, 4> dirs{{{1, 0}, {-1, 0}, {0, 1}, {0, -1}}};
  const int ndirs = n == 1 ? 2 : 4;
  while (step > 1e-13 * (1.0 + norm(arg, n))) {
    bool moved = false;
    for (int d = 0; d < ndirs; ++d) {
      const Point y = arg + step * dirs[d];
      const double v = std::abs(u(y));
      if (v > best) {
        best = v;
        arg = y;
        moved = true;
      }
    }
    if (!moved) step *= 0.5;
  }
  return {best, best - coarse};
}

BallRule ball_rule(const ScalarField& u, const Ball& b, const QuadratureSpec& spec) {
  BallRule rule;
  const int q = panels(spec);
  if (u.dim == 1) {
    for (Point e : {Point{1.0, 0.0}, Point{-1.0, 0.0}}) {
      along_nodes(u, b.center, e, 0.0, b.radius, q, [&](double r, double w) {
        rule.points.push_back(b.center + r * e);
        rule.weights.push_back(w);
      });
    }
    return rule;
  }
  const int nphi = angle_nodes(u, b.center, spec, 32);
  const double dphi = 2.0 * std::numbers::pi / nphi;
  for (int j = 0; j < nphi; ++j) {
    const double phi = dphi * (j + 0.5);
    const Point e{std::cos(phi), std::sin(phi)};
    along_nodes(u, b.center, e, 0.0, b.radius, q, [&](double r, double w) {
      rule.points.push_back(b.center + r * e);
      rule.weights.push_back(w * r * dphi);
    });
  }
  return rule;
}

double ball_integral(const ScalarField& u, const Ball& b, const QuadratureSpec& spec,
                     const std::function<double(double)>& g) {
  const BallRule rule = ball_rule(u, b, spec);
  double s = 0.0;
  for (std::size_t i = 0; i < rule.points.size(); ++i) s += rule.weights[i] * g(u(rule.points[i]));
  return s;
}

std::pair<double, Ball> sup_over_balls(const std::function<double(const Ball&)>& f,
                                       const std::vector<Point>& centers,
                                       const std::vector<double>& radii) {
  if (centers.empty() || radii.empty()) {
    throw Error(ErrorKind::invalid_argument, "empty ball family");
  }
  double best = -std::numeric_limits<double>::infinity();
  Ball arg(centers.front(), radii.front());
  for (const Point& c : centers) {
    for (double r : radii) {
      const Ball b(c, r);
      const double v = f(b);
      if (v > best) {
        best = v;
        arg = b;
      }
    }
  }
  return {best, arg};
}

namespace {

double weighted_core(const ScalarField& u, double p, double R, double shift, int q, int nphi) {
  const int n = u.dim;
  const Tail& t = u.tail;
  const double reach = norm(t.core.center, n) + t.core.radius;
  const bool poly = t.kind == DecayKind::polynomial;
  double tmax = std::max(std::log((poly ? std::ldexp(reach, 30) : reach) / R), 1.0);
  // A nonzero limit needs t large enough that exp(-n t) is negligible next to
  // |t|^{p+2} before the asymptotic tail takes over.
  if (t.kind == DecayKind::flat || shift != 0.0) tmax = std::max(tmax, std::log(reach / R) + 40.0);
  const double tmin = -60.0;
  auto ray = [&](const Point& e) {
    std::vector<double> pts{0.0};
    for (double r : ray_breaks(u, {0.0, 0.0}, e)) pts.push_back(std::log(r / R));
    std::vector<double> br = clean_breaks(pts, tmin, tmax);
    // uniform pieces of width <= 1/2 in t
    std::vector<double> fine;
    for (std::size_t i = 0; i + 1 < br.size(); ++i) {
      const int k = std::max(1, static_cast<int>(std::ceil((br[i + 1] - br[i]) / 0.5)));
      for (int j = 0; j < k; ++j) fine.push_back(br[i] + (br[i + 1] - br[i]) * j / k);
    }
    fine.push_back(br.back());
    auto g = [&](double tt) {
      const double r = R * std::exp(tt);
      const double v = powabs(u(r * e) - shift, p);
      if (v == 0.0) return 0.0;
      return v / (std::exp(-n * tt) + std::pow(std::abs(tt), p + 2.0));
    };
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < fine.size(); ++i) s += gl(fine[i], fine[i + 1], q, g);
    const double end = powabs(u(R * std::exp(tmax) * e) - shift, p);
    if (t.kind == DecayKind::flat || shift != 0.0) {
      s += end * std::pow(tmax, -p - 1.0) / (p + 1.0);
    } else if (poly) {
      s += end * std::pow(tmax, -p - 2.0) / (t.rate * p);
    }
    return s;
  };
  if (n == 1) return ray({1.0, 0.0}) + ray({-1.0, 0.0});
  double total = 0.0;
  for (int j = 0; j < nphi; ++j) {
    const double phi = 2.0 * std::numbers::pi * (j + 0.5) / nphi;
    total += ray({std::cos(phi), std::sin(phi)});
  }
  return total * 2.0 * std::numbers::pi / nphi;
}

}  // namespace

Estimate weighted_log_integral(const ScalarField& u, double p, double R, const QuadratureSpec& spec,
                               double shift) {
  if (!(R > 0.0)) throw Error(ErrorKind::invalid_argument, "radius must be positive");
  const Tail& t = u.tail;
  if (t.kind == DecayKind::none || (t.kind == DecayKind::polynomial && !(t.rate > 0.0))) {
    throw Error(ErrorKind::non_integrable_tail, "weighted integral of '" + u.label + "' diverges");
  }
  const int q = panels(spec);
  const int nphi = angle_nodes(u, {0.0, 0.0}, spec, 32);
  const double fine = weighted_core(u, p, R, shift, 2 * q, nphi);
  const double coarse = weighted_core(u, p, R, shift, q, std::max(1, nphi / 2));
  return {fine, std::abs(fine - coarse)};
}

}  // namespace gagliardo
