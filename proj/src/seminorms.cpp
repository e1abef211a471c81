#include "gagliardo/seminorms.hpp"

#include <cmath>
#include <array>
#include <limits>
#include <numbers>

#include "detail.hpp"

namespace gagliardo {

using detail::powabs;

std::string_view to_string(SeminormKind k) {
  switch (k) {
    case SeminormKind::gagliardo: return "gagliardo";
    case SeminormKind::gradient_lp: return "gradient_lp";
    case SeminormKind::lp: return "lp";
    case SeminormKind::campanato: return "campanato";
    case SeminormKind::bmo: return "bmo";
    case SeminormKind::holder: return "holder";
    case SeminormKind::weighted_campanato: return "weighted_campanato";
  }
  return "?";
}

namespace {

// value^{1/p} with first-order error propagation.
Estimate root(const Estimate& e, double p) {
  if (!(e.value > 0.0)) return {0.0, std::pow(std::max(e.error, 0.0), 1.0 / p)};
  const double v = std::pow(e.value, 1.0 / p);
  return {v, v * (e.error / e.value) / p};
}

struct NodeValues {
  BallRule rule;
  std::vector<double> values;
  double mean = 0.0;
};

NodeValues sample_ball(const ScalarField& u, const Ball& b, const QuadratureSpec& spec) {
  NodeValues nv;
  nv.rule = ball_rule(u, b, spec);
  nv.values.reserve(nv.rule.points.size());
  bool constant = true;
  for (const Point& x : nv.rule.points) {
    nv.values.push_back(u(x));
    constant = constant && nv.values.back() == nv.values.front();
  }
  if (nv.values.empty()) return nv;
  if (constant) {
    nv.mean = nv.values.front();
    return nv;
  }
  double s = 0.0, w = 0.0;
  for (std::size_t i = 0; i < nv.values.size(); ++i) {
    s += nv.rule.weights[i] * nv.values[i];
    w += nv.rule.weights[i];
  }
  nv.mean = s / w;
  return nv;
}

double weighted_deviation(const NodeValues& nv, double c, double p) {
  double s = 0.0;
  for (std::size_t i = 0; i < nv.values.size(); ++i) s += nv.rule.weights[i] * powabs(nv.values[i] - c, p);
  return s;
}

}  // namespace

SeminormValue gagliardo_seminorm(const ScalarField& u, const SeminormParams& params,
                                 const QuadratureSpec& spec) {
  SeminormValue out;
  out.params = params;
  const double p = params.p();
  if (params.s_exact() == Rational(1)) {
    if (!u.grad) throw Error(ErrorKind::missing_gradient, "field '" + u.label + "' declares no gradient");
    out.kind = SeminormKind::gradient_lp;
    out.estimate = root(lp_integral_vector(u, *u.grad, p, spec), p);
    return out;
  }
  out.kind = SeminormKind::gagliardo;
  const double s = params.s();
  Estimate raw = gagliardo_double_integral(u, params, spec);
  raw.value *= s * (1.0 - s);
  raw.error *= s * (1.0 - s);
  out.estimate = root(raw, p);
  return out;
}

SeminormValue lp_norm(const ScalarField& u, double p, const QuadratureSpec& spec) {
  SeminormValue out;
  out.kind = SeminormKind::lp;
  out.p = p;
  out.estimate = root(lp_integral(u, p, spec), p);
  return out;
}

double mean_on_ball(const ScalarField& u, const Ball& b, const QuadratureSpec& spec) {
  return sample_ball(u, b, spec).mean;
}

double oscillation(const ScalarField& u, const Ball& b, double p, const QuadratureSpec& spec) {
  const NodeValues nv = sample_ball(u, b, spec);
  return weighted_deviation(nv, nv.mean, p);
}

double deviation(const ScalarField& u, const Ball& b, double p, double c, const QuadratureSpec& spec) {
  return weighted_deviation(sample_ball(u, b, spec), c, p);
}

std::vector<Point> campanato_centers(const ScalarField& u) {
  const Ball e = u.extent();
  std::vector<Point> out;
  if (u.dim == 1) {
    constexpr int m = 32;
    for (int i = 0; i <= m; ++i) out.push_back({e.center[0] - e.radius + 2.0 * e.radius * i / m, 0.0});
  } else {
    constexpr int m = 8;
    for (int i = 0; i <= m; ++i) {
      for (int j = 0; j <= m; ++j) {
        out.push_back({e.center[0] - e.radius + 2.0 * e.radius * i / m,
                       e.center[1] - e.radius + 2.0 * e.radius * j / m});
      }
    }
  }
  bool has_origin = false;
  for (const Point& c : out) has_origin = has_origin || (c[0] == 0.0 && c[1] == 0.0);
  if (!has_origin) out.push_back({0.0, 0.0});
  // Slow decay can put the sup well outside the core.
  if (u.tail.kind == DecayKind::polynomial) {
    for (int j = 1; j <= 6; ++j) {
      const double d = std::ldexp(e.radius, j);
      for (double sgn : {1.0, -1.0}) {
        out.push_back({e.center[0] + sgn * d, e.center[1]});
        if (u.dim == 2) out.push_back({e.center[0], e.center[1] + sgn * d});
      }
    }
  }
  return out;
}

std::vector<double> campanato_radii(const ScalarField& u) {
  const double E = u.extent().radius;
  std::vector<double> out;
  const int top = u.tail.kind == DecayKind::polynomial ? 12 : 6;
  for (int k = -12; k <= top; ++k) out.push_back(E * std::pow(2.0, 0.5 * k));
  return out;
}

SeminormValue campanato_seminorm(const ScalarField& u, double p, double lambda, const QuadratureSpec& spec) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw Error(ErrorKind::invalid_argument, "Campanato exponent needs 1 <= p < inf");
  if (!(lambda >= 0.0 && lambda <= u.dim + p)) {
    throw Error(ErrorKind::invalid_argument, "Campanato needs 0 <= lambda <= n + p");
  }
  auto f = [&](const Ball& b) { return std::pow(b.radius, -lambda) * oscillation(u, b, p, spec); };
  const auto centers = campanato_centers(u);
  const auto radii = campanato_radii(u);
  // Best centre per radius; these seed the local search below.
  std::vector<std::pair<double, Ball>> grid;
  for (double r : radii) {
    std::pair<double, Ball> top{-std::numeric_limits<double>::infinity(), Ball(centers.front(), r)};
    for (const Point& c : centers) {
      const Ball b(c, r);
      const double v = f(b);
      if (v > top.first) top = {v, b};
    }
    grid.push_back(top);
  }
  std::stable_sort(grid.begin(), grid.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  const double coarse = grid.front().first;

  // Pattern search in (centre, log radius) from the leading radii, since
  // near-ties on the grid can sit in different local maxima.
  const double E = u.extent().radius;
  const int ndirs = u.dim == 1 ? 4 : 6;
  auto climb = [&](double best, Ball arg) {
    double cstep = 2.0 * E / (u.dim == 1 ? 32 : 8);
    double lstep = 0.5 * std::log(2.0);
    for (int iter = 0; iter < 200 && (cstep > 1e-4 * E || lstep > 1e-4); ++iter) {
      bool moved = false;
      for (int d = 0; d < ndirs; ++d) {
        Point c = arg.center;
        double r = arg.radius;
        switch (d) {
          case 0: r *= std::exp(lstep); break;
          case 1: r *= std::exp(-lstep); break;
          case 2: c[0] += cstep; break;
          case 3: c[0] -= cstep; break;
          case 4: c[1] += cstep; break;
          default: c[1] -= cstep; break;
        }
        const Ball b(c, r);
        const double v = f(b);
        if (v > best) {
          best = v;
          arg = b;
          moved = true;
        }
      }
      if (!moved) {
        cstep *= 0.5;
        lstep *= 0.5;
      }
    }
    return std::pair{best, arg};
  };
  constexpr std::size_t kStarts = 4;
  double best = -std::numeric_limits<double>::infinity();
  Ball arg = grid.front().second;
  for (std::size_t i = 0; i < std::min(kStarts, grid.size()); ++i) {
    const auto [v, b] = climb(grid[i].first, grid[i].second);
    if (v > best) {
      best = v;
      arg = b;
    }
  }
  SeminormValue out;
  out.kind = SeminormKind::campanato;
  out.p = p;
  out.lambda = lambda;
  out.argmax = arg;
  const double v = std::pow(std::max(best, 0.0), 1.0 / p);
  out.estimate = {v, v - std::pow(std::max(coarse, 0.0), 1.0 / p)};
  return out;
}

SeminormValue bmo_seminorm(const ScalarField& u, const QuadratureSpec& spec) {
  SeminormValue out = campanato_seminorm(u, 1.0, u.dim, spec);
  out.kind = SeminormKind::bmo;
  out.estimate.value /= omega(u.dim);
  out.estimate.error /= omega(u.dim);
  return out;
}

SeminormValue holder_seminorm(const ScalarField& u, double alpha, const QuadratureSpec& spec) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw Error(ErrorKind::invalid_argument, "Holder exponent must lie in (0, 1]");
  const int n = u.dim;
  const Ball e = u.extent();
  const double half = 2.0 * e.radius;
  std::vector<Point> pts;
  const int m = n == 1 ? std::max(64, 2 * spec.cells_per_axis) : std::max(16, spec.cells_per_axis / 4);
  const double h = 2.0 * half / m;
  if (n == 1) {
    for (int i = 0; i <= m; ++i) pts.push_back({e.center[0] - half + i * h, 0.0});
    for (double k : detail::kink_points_1d(u)) pts.push_back({k, 0.0});
  } else {
    for (int i = 0; i <= m; ++i) {
      for (int j = 0; j <= m; ++j) pts.push_back({e.center[0] - half + i * h, e.center[1] - half + j * h});
    }
    for (const Kink& k : u.kinks) {
      pts.push_back(k.center);
      for (int a = 0; a < 8; ++a) {
        const double t = a * std::numbers::pi / 4;
        pts.push_back(k.center + k.radius * Point{std::cos(t), std::sin(t)});
      }
    }
  }
  pts.push_back(u.origin);
  std::vector<double> vals;
  for (const Point& x : pts) vals.push_back(u(x));

  double best = 0.0;
  std::pair<Point, Point> arg{pts.front(), pts.front()};
  auto quotient = [&](const Point& x, const Point& y, double ux, double uy) {
    const double d = norm(x - y, n);
    if (!(d > 0.0)) return 0.0;
    return std::abs(ux - uy) / std::pow(d, alpha);
  };
  auto consider = [&](const Point& x, const Point& y, double ux, double uy) {
    const double q = quotient(x, y, ux, uy);
    if (q > best) {
      best = q;
      arg = {x, y};
    }
  };
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) consider(pts[i], pts[j], vals[i], vals[j]);
  }
  // Near-coincident pairs.
  const std::array<Point, 4> dirs{{{1, 0}, {0, 1}, {std::numbers::sqrt2 / 2, std::numbers::sqrt2 / 2}, {std::numbers::sqrt2 / 2, -std::numbers::sqrt2 / 2}}};
  const int ndirs = n == 1 ? 1 : 4;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (int d = 0; d < ndirs; ++d) {
      for (int k = 1; k <= 20; k += 3) {
        const Point y = pts[i] + std::ldexp(h, -k) * dirs[d];
        consider(pts[i], y, vals[i], u(y));
      }
    }
  }
  const double coarse = best;
  // Pattern search on the pair.
  double step = h;
  const std::array<Point, 4> moves{{{1, 0}, {-1, 0}, {0, 1}, {0, -1}}};
  const int nmoves = n == 1 ? 2 : 4;
  for (int iter = 0; iter < 2000 && step > 1e-10 * half; ++iter) {
    bool moved = false;
    for (int which = 0; which < 2; ++which) {
      for (int d = 0; d < nmoves; ++d) {
        Point x = arg.first, y = arg.second;
        (which == 0 ? x : y) = (which == 0 ? x : y) + step * moves[d];
        const double q = quotient(x, y, u(x), u(y));
        if (q > best) {
          best = q;
          arg = {x, y};
          moved = true;
        }
      }
    }
    if (!moved) step *= 0.5;
  }
  SeminormValue out;
  out.kind = SeminormKind::holder;
  out.alpha = alpha;
  out.arg_pair = arg;
  out.estimate = {best, best - coarse};
  return out;
}

Estimate weighted_campanato_integral(const ScalarField& u, double p, double R, const QuadratureSpec& spec,
                                     double shift) {
  if (!(p >= 1.0)) throw Error(ErrorKind::invalid_argument, "weighted integral needs p >= 1");
  const Ball b({0.0, 0.0}, R);
  const NodeValues nv = sample_ball(u, b, spec);
  const double scale = std::pow(weighted_deviation(nv, shift, p) / ball_measure(u.dim, R), 1.0 / p);
  if (std::abs(nv.mean - shift) > 1e-6 * scale) {
    throw Error(ErrorKind::nonzero_mean, "field '" + u.label + "' does not have zero mean on B_R(0)");
  }
  return weighted_log_integral(u, p, R, spec, shift);
}

Estimate annulus_gagliardo(const ScalarField& u, const Point& x0, double r, double R,
                           const SeminormParams& params, const QuadratureSpec& spec) {
  return annulus_double_integral(u, x0, r, R, params, spec);
}

}  // namespace gagliardo
