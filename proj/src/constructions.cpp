#include "gagliardo/constructions.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "detail.hpp"
#include "gagliardo/seminorms.hpp"

namespace gagliardo {

namespace {

std::string fmt(const char* pattern, double v) {
  char buf[96];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

Kink scaled(const Kink& k, double inv) { return {inv * k.center, inv * k.radius}; }

}  // namespace

ScalarField scale(const ScalarField& u, double lambda) {
  if (!(lambda > 0.0)) throw Error(ErrorKind::invalid_argument, "scaling factor must be positive");
  const double inv = 1.0 / lambda;
  ScalarField f = u;
  f.label = u.label + fmt("(%.10g*x)", lambda);
  f.eval = [e = u.eval, lambda](const Point& x) { return e(lambda * x); };
  if (u.grad) {
    f.grad = [g = *u.grad, lambda](const Point& x) { return lambda * g(lambda * x); };
  }
  f.tail.core = Ball(inv * u.tail.core.center, inv * u.tail.core.radius);
  for (auto& k : f.kinks) k = scaled(k, inv);
  f.origin = inv * u.origin;
  f.feature_scale = inv * u.feature_scale;
  return f;
}

ScalarField superconformal_null(const ScalarField& phi, int m) {
  if (m < 1) throw Error(ErrorKind::invalid_argument, "null-sequence index must be >= 1");
  ScalarField f = scale(phi, 1.0 / m);
  f.label = phi.label + ":m=" + std::to_string(m);
  return f;
}

ScalarField conformal_null(int n, int m) {
  if (m < 2) throw Error(ErrorKind::invalid_argument, "conformal null sequence needs m >= 2");
  if (n != 1 && n != 2) throw Error(ErrorKind::invalid_argument, "dimension must be 1 or 2");
  const double a = m, b = static_cast<double>(m) * m, lm = std::log(a);
  ScalarField f;
  f.dim = n;
  f.label = "psi:m=" + std::to_string(m);
  f.eval = [=](const Point& x) {
    const double r = norm(x, n);
    if (r < a) return 1.0;
    if (r > b) return 0.0;
    return std::log(b / r) / lm;
  };
  f.grad = [=](const Point& x) -> Point {
    const double r = norm(x, n);
    if (r <= a || r >= b) return {0.0, 0.0};
    return (-1.0 / (r * r * lm)) * x;
  };
  f.tail = {DecayKind::compact, Ball({0.0, 0.0}, b)};
  f.kinks = {{{0.0, 0.0}, a}, {{0.0, 0.0}, b}};
  f.feature_scale = a;
  f.radial = true;
  return f;
}

double mollifier_normalizer(int n) {
  static const std::array<double, 2> values = [] {
    auto prof = [](double r) { return r < 1.0 ? std::exp(-1.0 / (1.0 - r * r)) : 0.0; };
    double z1 = 0.0, z2 = 0.0;
    constexpr int panels = 256;
    for (int k = 0; k < panels; ++k) {
      const double lo = static_cast<double>(k) / panels, hi = static_cast<double>(k + 1) / panels;
      z1 += detail::gl(lo, hi, 1, prof);
      z2 += detail::gl(lo, hi, 1, [&](double r) { return prof(r) * r; });
    }
    return std::array<double, 2>{2.0 * z1, 2.0 * std::numbers::pi * z2};
  }();
  if (n != 1 && n != 2) throw Error(ErrorKind::invalid_argument, "dimension must be 1 or 2");
  return values[n - 1];
}

ScalarField mollifier(int n, int m) {
  if (m < 1) throw Error(ErrorKind::invalid_argument, "mollifier index must be >= 1");
  const double z = mollifier_normalizer(n);
  const double mm = m, scale_n = std::pow(mm, n) / z;
  ScalarField f;
  f.dim = n;
  f.label = "mollifier:m=" + std::to_string(m);
  f.eval = [=](const Point& x) {
    const double r = mm * norm(x, n);
    return r < 1.0 ? scale_n * std::exp(-1.0 / (1.0 - r * r)) : 0.0;
  };
  f.grad = [=](const Point& x) -> Point {
    const double r = mm * norm(x, n);
    if (r >= 1.0) return {0.0, 0.0};
    const double q = 1.0 - r * r;
    return (-2.0 * mm * mm * scale_n * std::exp(-1.0 / q) / (q * q)) * x;
  };
  f.tail = {DecayKind::compact, Ball({0.0, 0.0}, 1.0 / mm)};
  f.kinks = {{{0.0, 0.0}, 1.0 / mm}};
  f.feature_scale = 0.25 / mm;
  f.radial = true;
  return f;
}

namespace {

// Nodes y and weights w for int_{B_{1/m}} g(y) rho_m(y) dy, split where
// x - y crosses a kink set of u.
struct ConvolutionRule {
  std::vector<Point> y;
  std::vector<double> w;
};

ConvolutionRule convolution_rule(const ScalarField& u, const Point& x, int m, int q) {
  ConvolutionRule rule;
  const double r1 = 1.0 / m;
  // Unnormalized profile; the rule is normalized to unit mass below.
  auto rho = [m](double r) {
    const double t = m * r;
    return t < 1.0 ? std::exp(-1.0 / (1.0 - t * t)) : 0.0;
  };
  const detail::GaussRule& g = detail::gauss10();
  auto add_ray = [&](const Point& e, double weight_scale, bool polar) {
    // Points y = r e, so x - y = x + r (-e).
    std::vector<double> pts;
    for (double r : detail::ray_breaks(u, x, -1.0 * e)) pts.push_back(r);
    for (int k = 1; k < 4; ++k) pts.push_back(r1 * k / 4.0);
    const auto br = detail::clean_breaks(pts, 0.0, r1);
    for (std::size_t i = 0; i + 1 < br.size(); ++i) {
      const double step = (br[i + 1] - br[i]) / q;
      for (int k = 0; k < q; ++k) {
        const double half = 0.5 * step, mid = br[i] + k * step + half;
        for (std::size_t j = 0; j < g.x.size(); ++j) {
          const double r = mid + half * g.x[j];
          const Point y = r * e;
          const double w = half * g.w[j] * weight_scale * (polar ? r : 1.0) * rho(r);
          if (w == 0.0) continue;
          rule.y.push_back(y);
          rule.w.push_back(w);
        }
      }
    }
  };
  if (u.dim == 1) {
    add_ray({1.0, 0.0}, 1.0, false);
    add_ray({-1.0, 0.0}, 1.0, false);
  } else {
    constexpr int nphi = 32;
    const double dphi = 2.0 * std::numbers::pi / nphi;
    for (int j = 0; j < nphi; ++j) {
      const double phi = dphi * (j + 0.5);
      add_ray({std::cos(phi), std::sin(phi)}, dphi, true);
    }
  }
  double mass = 0.0;
  for (double w : rule.w) mass += w;
  for (double& w : rule.w) w /= mass;
  return rule;
}

Tail widened(const Tail& t, double by) {
  Tail out = t;
  out.core = Ball(t.core.center, t.core.radius + by);
  return out;
}

}  // namespace

ScalarField mollify(const ScalarField& u, int m, const QuadratureSpec& spec) {
  if (m < 1) throw Error(ErrorKind::invalid_argument, "mollifier index must be >= 1");
  const int q = std::max(1, detail::panels(spec) / 2);
  ScalarField f = u;
  f.label = u.label + "*rho:m=" + std::to_string(m);
  f.eval = [u, m, q](const Point& x) {
    const ConvolutionRule rule = convolution_rule(u, x, m, q);
    double s = 0.0;
    for (std::size_t i = 0; i < rule.y.size(); ++i) s += rule.w[i] * u(x - rule.y[i]);
    return s;
  };
  if (u.grad) {
    f.grad = [u, m, q](const Point& x) {
      const ConvolutionRule rule = convolution_rule(u, x, m, q);
      Point s{0.0, 0.0};
      for (std::size_t i = 0; i < rule.y.size(); ++i) s = s + rule.w[i] * (*u.grad)(x - rule.y[i]);
      return s;
    };
  } else {
    f.grad.reset();
  }
  const double r = 1.0 / m;
  f.tail = widened(u.tail, r);
  f.kinks.clear();
  for (const Kink& k : u.kinks) {
    if (k.radius == 0.0) {
      f.kinks.push_back({k.center, r});
    } else {
      f.kinks.push_back({k.center, k.radius + r});
      if (k.radius > r) f.kinks.push_back({k.center, k.radius - r});
      else f.kinks.push_back({k.center, 0.0});
    }
  }
  f.feature_scale = std::min(u.feature_scale, 0.5 * r);
  f.lipschitz = true;
  return f;
}

std::string_view to_string(CutoffVariant v) { return v == CutoffVariant::linear ? "linear" : "logarithmic"; }

double CutoffFamily::outer_radius() const {
  return variant == CutoffVariant::linear ? 2.0 * j : static_cast<double>(j) * j;
}

double CutoffFamily::gradient_bound() const {
  return variant == CutoffVariant::linear ? constant / j : constant / (static_cast<double>(j) * j);
}

CutoffFamily cutoff(CutoffVariant variant, int n, int j) {
  if (j < 1) throw Error(ErrorKind::invalid_argument, "cutoff index must be >= 1");
  if (variant == CutoffVariant::logarithmic && j < 2) {
    throw Error(ErrorKind::invalid_argument, "logarithmic cutoff needs j >= 2");
  }
  if (n != 1 && n != 2) throw Error(ErrorKind::invalid_argument, "dimension must be 1 or 2");
  const double inner = j;
  const double outer = variant == CutoffVariant::linear ? 2.0 * j : static_cast<double>(j) * j;
  const double width = outer - inner;
  ScalarField f;
  f.dim = n;
  f.label = std::string("cutoff:") + std::string(to_string(variant)) + ":j=" + std::to_string(j);
  f.eval = [=](const Point& x) { return smooth_step((outer - norm(x, n)) / width); };
  f.grad = [=](const Point& x) -> Point {
    const double r = norm(x, n);
    if (r <= inner || r >= outer) return {0.0, 0.0};
    return (-smooth_step_derivative((outer - r) / width) / (width * r)) * x;
  };
  f.tail = {DecayKind::compact, Ball({0.0, 0.0}, outer)};
  f.kinks = {{{0.0, 0.0}, inner}, {{0.0, 0.0}, outer}};
  f.feature_scale = 0.25 * width;
  f.radial = true;
  // smooth_step has slope at most 2, so |grad| <= 2 / width.
  const double c = variant == CutoffVariant::linear ? 2.0 : 4.0;
  return {variant, j, std::move(f), c};
}

namespace {

bool finite_critical_norm(const ScalarField& u, const SeminormParams& params) {
  const Tail& t = u.tail;
  if (t.kind == DecayKind::compact || t.kind == DecayKind::rapid) return true;
  if (t.kind == DecayKind::flat) return t.below == 0.0 && t.above == 0.0;
  if (t.kind == DecayKind::polynomial) return t.rate * params.critical_exponent().value() > u.dim;
  return false;
}

ScalarField complement(const ScalarField& eta) {
  return add_constant(scalar_multiple(eta, -1.0), 1.0);
}

}  // namespace

ScalarField truncated_field(const ScalarField& u, int j, const SeminormParams& params,
                            const QuadratureSpec& spec) {
  if (params.n() != u.dim) throw Error(ErrorKind::invalid_argument, "--n does not match the field dimension");
  const Regime reg = params.regime().regime;
  if (reg == Regime::subconformal) {
    if (!finite_critical_norm(u, params)) {
      throw Error(ErrorKind::regime_mismatch, "field '" + u.label + "' has no finite critical Lebesgue norm");
    }
  } else if (reg == Regime::superconformal) {
    const double scale = std::max(1.0, std::abs(u(u.origin)));
    if (std::abs(u({0.0, 0.0})) > 1e-12 * scale) {
      throw Error(ErrorKind::regime_mismatch, "field '" + u.label + "' does not vanish at the origin");
    }
    if (!u.lipschitz) throw Error(ErrorKind::regime_mismatch, "field '" + u.label + "' is not Holder continuous");
  } else {
    const Tail& t = u.tail;
    if (t.kind == DecayKind::none || (t.kind == DecayKind::polynomial && t.rate < 0.0)) {
      throw Error(ErrorKind::regime_mismatch, "field '" + u.label + "' has no finite Campanato seminorm");
    }
  }
  if (reg != Regime::conformal) {
    const CutoffFamily eta = cutoff(CutoffVariant::linear, u.dim, j);
    ScalarField f = multiply(complement(eta.field), u);
    f.label = "(1-eta_" + std::to_string(j) + ")" + u.label;
    return f;
  }
  const CutoffFamily eta = cutoff(CutoffVariant::logarithmic, u.dim, j);
  const double outer = eta.outer_radius();
  const double mean = mean_on_ball(u, Ball({0.0, 0.0}, outer), spec);
  // (1 - eta)(u - mean) differs from (1 - eta) u + mean * eta by a constant.
  ScalarField f = add(multiply(complement(eta.field), u), scalar_multiple(eta.field, mean));
  f.label = "(1-eta_" + std::to_string(j) + ")(" + u.label + "-mean)";
  return f;
}

Estimate truncation_error(const ScalarField& u, int j, const SeminormParams& params, const QuadratureSpec& spec) {
  const ScalarField f = truncated_field(u, j, params, spec);
  return gagliardo_seminorm(f, params, spec).estimate;
}

ScalarField resolve_field(std::string_view label, int n) {
  auto arg = [&](std::string_view key) -> int {
    const auto pos = label.find(key);
    if (pos == std::string_view::npos) throw Error(ErrorKind::invalid_argument, "--field '" + std::string(label) + "' needs " + std::string(key) + "<int>");
    return static_cast<int>(Rational::parse(label.substr(pos + key.size())).value());
  };
  if (label.rfind("psi", 0) == 0) return conformal_null(n, arg("m="));
  if (label.rfind("mollifier", 0) == 0) return mollifier(n, arg("m="));
  return field_from_label(label, n);
}

}  // namespace gagliardo
