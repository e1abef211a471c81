#include "gagliardo/fields.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <numeric>

namespace gagliardo {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_argument: return "InvalidArgument";
    case ErrorKind::non_integrable_tail: return "NonIntegrableTail";
    case ErrorKind::budget_exceeded: return "BudgetExceeded";
    case ErrorKind::unsupported_exponent: return "UnsupportedExponent";
    case ErrorKind::missing_gradient: return "MissingGradient";
    case ErrorKind::nonzero_mean: return "NonzeroMean";
    case ErrorKind::regime_mismatch: return "RegimeMismatch";
    case ErrorKind::degenerate_fit: return "DegenerateFit";
    case ErrorKind::io: return "IoError";
  }
  return "Error";
}

double norm(const Point& x, int n) { return n == 1 ? std::abs(x[0]) : std::hypot(x[0], x[1]); }

double dot(const Point& a, const Point& b, int n) {
  return n == 1 ? a[0] * b[0] : a[0] * b[0] + a[1] * b[1];
}

// ---------------------------------------------------------------------------
// Rational

Rational::Rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw Error(ErrorKind::invalid_argument, "rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
  num_ = g ? num / g : 0;
  den_ = g ? den / g : 1;
}

namespace {

std::int64_t parse_int(std::string_view text) {
  std::int64_t v = 0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || first == last) {
    throw Error(ErrorKind::invalid_argument, "cannot parse integer '" + std::string(text) + "'");
  }
  return v;
}

}  // namespace

Rational Rational::parse(std::string_view text) {
  if (text.empty()) throw Error(ErrorKind::invalid_argument, "empty rational");
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    return Rational(parse_int(text.substr(0, slash)), parse_int(text.substr(slash + 1)));
  }
  auto dotpos = text.find('.');
  if (dotpos == std::string_view::npos) return Rational(parse_int(text));
  const bool negative = text.front() == '-';
  std::string digits(text.substr(0, dotpos));
  std::string_view frac = text.substr(dotpos + 1);
  if (frac.size() > 15) throw Error(ErrorKind::invalid_argument, "too many decimals in '" + std::string(text) + "'");
  std::int64_t den = 1;
  for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
  std::int64_t whole = (digits.empty() || digits == "-" || digits == "+") ? 0 : parse_int(digits);
  std::int64_t part = frac.empty() ? 0 : parse_int(frac);
  if (whole < 0) whole = -whole;
  std::int64_t num = whole * den + part;
  return Rational(negative ? -num : num, den);
}

std::string Rational::str() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

Rational operator*(const Rational& a, const Rational& b) { return Rational(a.num_ * b.num_, a.den_ * b.den_); }

Rational operator-(const Rational& a, const Rational& b) {
  return Rational(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
}

bool operator<(const Rational& a, const Rational& b) { return a.num_ * b.den_ < b.num_ * a.den_; }

// ---------------------------------------------------------------------------
// SeminormParams

std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::subconformal: return "subconformal";
    case Regime::conformal: return "conformal";
    case Regime::superconformal: return "superconformal";
  }
  return "?";
}

SeminormParams::SeminormParams(int n, Rational s, Rational p) : n_(n), s_(s), p_(p) {
  if (n != 1 && n != 2) throw Error(ErrorKind::invalid_argument, "dimension must be 1 or 2");
  if (!(Rational(0) < s) || Rational(1) < s) throw Error(ErrorKind::invalid_argument, "s must lie in (0, 1]");
  if (p < Rational(1)) throw Error(ErrorKind::invalid_argument, "p must be >= 1");
}

RegimeInfo SeminormParams::regime() const {
  const Rational sp = s_ * p_;
  const Rational dim(n_);
  RegimeInfo info{Regime::conformal, false};
  if (sp < dim) info.regime = Regime::subconformal;
  else if (dim < sp) info.regime = Regime::superconformal;
  info.exceptional_1d = n_ == 1 && s_ == Rational(1) && p_ == Rational(1);
  return info;
}

RegimeInfo regime(const SeminormParams& params) { return params.regime(); }

Rational SeminormParams::critical_exponent() const {
  if (regime().regime != Regime::subconformal) {
    throw Error(ErrorKind::regime_mismatch, "critical exponent needs s p < n (" + str() + ")");
  }
  const Rational denom = Rational(n_) - s_ * p_;
  const Rational numer = Rational(n_) * p_;
  return Rational(numer.num() * denom.den(), numer.den() * denom.num());
}

Rational SeminormParams::holder_exponent() const {
  if (regime().regime != Regime::superconformal) {
    throw Error(ErrorKind::regime_mismatch, "Holder exponent needs s p > n (" + str() + ")");
  }
  return s_ - Rational(n_ * p_.den(), p_.num());
}

std::string SeminormParams::str() const {
  return "n=" + std::to_string(n_) + ",s=" + s_.str() + ",p=" + p_.str();
}

// ---------------------------------------------------------------------------
// Balls and constants

Ball::Ball(Point c, double r) : center(c), radius(r) {
  if (!(r > 0.0)) throw Error(ErrorKind::invalid_argument, "ball radius must be positive");
}

double omega(int n) {
  if (n == 1) return 2.0;
  if (n == 2) return std::numbers::pi;
  return std::pow(std::numbers::pi, n / 2.0) / std::tgamma(n / 2.0 + 1.0);
}

double ball_measure(int n, double radius) { return omega(n) * std::pow(radius, n); }

std::string_view to_string(DecayKind k) {
  switch (k) {
    case DecayKind::compact: return "compact";
    case DecayKind::rapid: return "rapid";
    case DecayKind::flat: return "flat";
    case DecayKind::polynomial: return "polynomial";
    case DecayKind::none: return "none";
  }
  return "?";
}

std::optional<double> ScalarField::support_radius() const {
  if (tail.kind == DecayKind::compact) return tail.core.radius;
  return std::nullopt;
}

Ball ScalarField::extent() const {
  if (tail.kind != DecayKind::none) return tail.core;
  return Ball(origin, 1.0);
}

// ---------------------------------------------------------------------------
// Smooth step

namespace {
double step_kernel(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }
}  // namespace

double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = step_kernel(t);
  const double b = step_kernel(1.0 - t);
  return a / (a + b);
}

double smooth_step_derivative(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  const double a = step_kernel(t);
  const double b = step_kernel(1.0 - t);
  const double da = a / (t * t);
  const double db = b / ((1.0 - t) * (1.0 - t));
  return (da * b + a * db) / ((a + b) * (a + b));
}

// ---------------------------------------------------------------------------
// Catalog

namespace {

ScalarField radial_base(int n, std::string label) {
  if (n != 1 && n != 2) throw Error(ErrorKind::invalid_argument, "dimension must be 1 or 2");
  ScalarField f;
  f.dim = n;
  f.label = std::move(label);
  f.radial = true;
  return f;
}

Point zero_point() { return {0.0, 0.0}; }

}  // namespace

ScalarField hat_field(int n) {
  ScalarField f = radial_base(n, "hat");
  f.eval = [n](const Point& x) { return std::max(1.0 - norm(x, n), 0.0); };
  f.grad = [n](const Point& x) -> Point {
    const double r = norm(x, n);
    if (r <= 0.0 || r >= 1.0) return zero_point();
    return (-1.0 / r) * x;
  };
  f.tail = {DecayKind::compact, Ball({0, 0}, 1.0)};
  f.kinks = {{{0, 0}, 0.0}, {{0, 0}, 1.0}};
  return f;
}

ScalarField gauss_field(int n) {
  ScalarField f = radial_base(n, "gauss");
  f.eval = [n](const Point& x) {
    const double r = norm(x, n);
    return std::exp(-r * r);
  };
  f.grad = [n](const Point& x) -> Point {
    const double r = norm(x, n);
    return (-2.0 * std::exp(-r * r)) * x;
  };
  // exp(-6.5^2) ~ 4.5e-19
  f.tail = {DecayKind::rapid, Ball({0, 0}, 6.5)};
  return f;
}

ScalarField bump_field(int n) {
  ScalarField f = radial_base(n, "bump");
  f.eval = [n](const Point& x) {
    const double r = norm(x, n);
    return r < 1.0 ? std::exp(-1.0 / (1.0 - r * r)) : 0.0;
  };
  f.grad = [n](const Point& x) -> Point {
    const double r = norm(x, n);
    if (r >= 1.0) return zero_point();
    const double q = 1.0 - r * r;
    return (-2.0 * std::exp(-1.0 / q) / (q * q)) * x;
  };
  f.tail = {DecayKind::compact, Ball({0, 0}, 1.0)};
  // C-infinity, but every derivative degenerates at the support boundary.
  f.kinks = {{{0, 0}, 1.0}};
  f.feature_scale = 0.25;
  return f;
}

ScalarField powtail_field(int n, double alpha) {
  if (!(alpha > 0.0)) throw Error(ErrorKind::invalid_argument, "powtail needs alpha > 0");
  ScalarField f = radial_base(n, "powtail:alpha=" + Rational::parse(std::to_string(alpha).substr(0, 12)).str());
  char buf[64];
  std::snprintf(buf, sizeof buf, "powtail:alpha=%.10g", alpha);
  f.label = buf;
  f.eval = [n, alpha](const Point& x) {
    const double r = norm(x, n);
    return std::pow(1.0 + r * r, -0.5 * alpha);
  };
  f.grad = [n, alpha](const Point& x) -> Point {
    const double r = norm(x, n);
    return (-alpha * std::pow(1.0 + r * r, -0.5 * alpha - 1.0)) * x;
  };
  f.tail = {DecayKind::polynomial, Ball({0, 0}, 1.0)};
  f.tail.rate = alpha;
  return f;
}

ScalarField growpow_field(int n, double beta) {
  if (!(beta > 0.0 && beta < 1.0)) throw Error(ErrorKind::invalid_argument, "growpow needs beta in (0, 1)");
  ScalarField f = radial_base(n, "");
  char buf[64];
  std::snprintf(buf, sizeof buf, "growpow:beta=%.10g", beta);
  f.label = buf;
  f.eval = [n, beta](const Point& x) {
    const double r = norm(x, n);
    return std::pow(1.0 + r * r, 0.5 * beta) - 1.0;
  };
  f.grad = [n, beta](const Point& x) -> Point {
    const double r = norm(x, n);
    return (beta * std::pow(1.0 + r * r, 0.5 * beta - 1.0)) * x;
  };
  f.tail = {DecayKind::polynomial, Ball({0, 0}, 1.0)};
  f.tail.rate = -beta;
  return f;
}

ScalarField clamp_field() {
  ScalarField f;
  f.dim = 1;
  f.label = "clamp";
  f.eval = [](const Point& x) { return std::clamp(x[0], -1.0, 1.0); };
  f.grad = [](const Point& x) -> Point { return {std::abs(x[0]) < 1.0 ? 1.0 : 0.0, 0.0}; };
  f.tail = {DecayKind::flat, Ball({0, 0}, 1.0), -1.0, 1.0};
  f.kinks = {{{0, 0}, 1.0}};
  return f;
}

ScalarField sign_field() {
  ScalarField f;
  f.dim = 1;
  f.label = "sign";
  f.eval = [](const Point& x) { return x[0] > 0.0 ? 1.0 : (x[0] < 0.0 ? -1.0 : 0.0); };
  f.tail = {DecayKind::flat, Ball({0, 0}, 1.0), -1.0, 1.0};
  f.kinks = {{{0, 0}, 0.0}};
  f.lipschitz = false;
  return f;
}

ScalarField constant_field(int n, double c) {
  ScalarField f = radial_base(n, "");
  char buf[64];
  std::snprintf(buf, sizeof buf, "const:c=%.10g", c);
  f.label = buf;
  f.eval = [c](const Point&) { return c; };
  f.grad = [](const Point&) -> Point { return zero_point(); };
  f.tail = {c == 0.0 ? DecayKind::compact : DecayKind::flat, Ball({0, 0}, 1.0), c, c};
  return f;
}

ScalarField linear_field(int n) {
  if (n != 1 && n != 2) throw Error(ErrorKind::invalid_argument, "dimension must be 1 or 2");
  ScalarField f;
  f.dim = n;
  f.label = "linear";
  f.eval = [](const Point& x) { return x[0]; };
  f.grad = [](const Point&) -> Point { return {1.0, 0.0}; };
  f.tail = {DecayKind::none, Ball({0, 0}, 1.0)};
  return f;
}

ScalarField plateau_field(int n) {
  ScalarField f = radial_base(n, "plateau");
  f.eval = [n](const Point& x) { return smooth_step(2.0 - norm(x, n)); };
  f.grad = [n](const Point& x) -> Point {
    const double r = norm(x, n);
    if (r <= 1.0 || r >= 2.0) return zero_point();
    return (-smooth_step_derivative(2.0 - r) / r) * x;
  };
  f.tail = {DecayKind::compact, Ball({0, 0}, 2.0)};
  f.kinks = {{{0, 0}, 1.0}, {{0, 0}, 2.0}};
  f.feature_scale = 0.25;
  return f;
}

std::vector<ScalarField> catalog(int n, double alpha) {
  std::vector<ScalarField> out{hat_field(n), gauss_field(n), bump_field(n), plateau_field(n),
                               powtail_field(n, alpha)};
  if (n == 1) {
    out.push_back(clamp_field());
    out.push_back(sign_field());
  }
  out.push_back(constant_field(n, 1.0));
  out.push_back(constant_field(n, 0.0));
  out.push_back(linear_field(n));
  return out;
}

namespace {

struct ParsedLabel {
  std::string name;
  std::vector<std::pair<std::string, std::string>> args;

  std::optional<double> get(std::string_view key) const {
    for (const auto& [k, v] : args) {
      if (k == key) return Rational::parse(v).value();
    }
    return std::nullopt;
  }
};

ParsedLabel parse_label(std::string_view label) {
  ParsedLabel out;
  std::size_t pos = label.find(':');
  out.name = std::string(label.substr(0, pos));
  while (pos != std::string_view::npos) {
    std::size_t next = label.find(':', pos + 1);
    std::string_view item = label.substr(pos + 1, next == std::string_view::npos ? std::string_view::npos : next - pos - 1);
    auto eq = item.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorKind::invalid_argument, "malformed field argument '" + std::string(item) + "'");
    }
    out.args.emplace_back(std::string(item.substr(0, eq)), std::string(item.substr(eq + 1)));
    pos = next;
  }
  return out;
}

}  // namespace

ScalarField field_from_label(std::string_view label, int n) {
  const ParsedLabel parsed = parse_label(label);
  const std::string& name = parsed.name;
  auto need_1d = [&] {
    if (n != 1) throw Error(ErrorKind::invalid_argument, "field '" + name + "' is only defined for n = 1");
  };
  if (name == "hat") return hat_field(n);
  if (name == "gauss") return gauss_field(n);
  if (name == "bump") return bump_field(n);
  if (name == "plateau") return plateau_field(n);
  if (name == "powtail") return powtail_field(n, parsed.get("alpha").value_or(0.75));
  if (name == "growpow") return growpow_field(n, parsed.get("beta").value_or(0.125));
  if (name == "const") return constant_field(n, parsed.get("c").value_or(1.0));
  if (name == "linear") return linear_field(n);
  if (name == "clamp") {
    need_1d();
    return clamp_field();
  }
  if (name == "sign") {
    need_1d();
    return sign_field();
  }
  throw Error(ErrorKind::invalid_argument, "unknown field label '" + std::string(label) + "'");
}

// ---------------------------------------------------------------------------
// Field algebra

namespace {

Ball enclosing(const Ball& a, const Ball& b, int n) {
  const double r = std::max(a.radius, norm(b.center - a.center, n) + b.radius);
  return Ball(a.center, r);
}

Tail normalized(Tail t) {
  if (t.kind == DecayKind::flat && t.below == 0.0 && t.above == 0.0) t.kind = DecayKind::compact;
  return t;
}

bool vanishes_outside(const Tail& t) {
  return t.kind == DecayKind::compact || t.kind == DecayKind::rapid;
}

Tail sum_tail(const Tail& a, const Tail& b, int n) {
  Tail out;
  out.core = enclosing(a.core, b.core, n);
  if (a.bounded() && b.bounded()) {
    out.below = a.below + b.below;
    out.above = a.above + b.above;
    if (a.kind == DecayKind::flat || b.kind == DecayKind::flat) out.kind = DecayKind::flat;
    else if (a.kind == DecayKind::rapid || b.kind == DecayKind::rapid) out.kind = DecayKind::rapid;
    else out.kind = DecayKind::compact;
    return normalized(out);
  }
  const bool a_poly = a.kind == DecayKind::polynomial;
  const bool b_poly = b.kind == DecayKind::polynomial;
  if (a_poly && b_poly) {
    out.kind = DecayKind::polynomial;
    out.rate = std::min(a.rate, b.rate);
  } else if (a_poly && vanishes_outside(b)) {
    out.kind = DecayKind::polynomial;
    out.rate = a.rate;
  } else if (b_poly && vanishes_outside(a)) {
    out.kind = DecayKind::polynomial;
    out.rate = b.rate;
  } else {
    out.kind = DecayKind::none;
  }
  return out;
}

Tail product_tail(const Tail& a, const Tail& b, int n) {
  if (vanishes_outside(a) || vanishes_outside(b)) {
    const Tail* pick = nullptr;
    if (vanishes_outside(a) && vanishes_outside(b)) pick = a.core.radius <= b.core.radius ? &a : &b;
    else pick = vanishes_outside(a) ? &a : &b;
    Tail out = *pick;
    out.below = out.above = 0.0;
    out.rate = 0.0;
    if (a.kind == DecayKind::rapid || b.kind == DecayKind::rapid) {
      if (!(a.kind == DecayKind::compact || b.kind == DecayKind::compact)) out.kind = DecayKind::rapid;
    }
    return out;
  }
  Tail out;
  out.core = enclosing(a.core, b.core, n);
  if (a.kind == DecayKind::flat && b.kind == DecayKind::flat) {
    out.kind = DecayKind::flat;
    out.below = a.below * b.below;
    out.above = a.above * b.above;
    return normalized(out);
  }
  if (a.kind == DecayKind::polynomial && b.kind == DecayKind::polynomial) {
    out.kind = DecayKind::polynomial;
    out.rate = a.rate + b.rate;
    return out;
  }
  if (a.kind == DecayKind::polynomial && b.kind == DecayKind::flat) {
    out.kind = DecayKind::polynomial;
    out.rate = a.rate;
    return out;
  }
  if (b.kind == DecayKind::polynomial && a.kind == DecayKind::flat) {
    out.kind = DecayKind::polynomial;
    out.rate = b.rate;
    return out;
  }
  out.kind = DecayKind::none;
  return out;
}

void require_same_dim(const ScalarField& u, const ScalarField& v) {
  if (u.dim != v.dim) throw Error(ErrorKind::invalid_argument, "fields of different dimension");
}

}  // namespace

ScalarField translate(const ScalarField& u, const Point& shift) {
  ScalarField f = u;
  char buf[96];
  std::snprintf(buf, sizeof buf, "%s@(%.6g,%.6g)", u.label.c_str(), shift[0], u.dim == 2 ? shift[1] : 0.0);
  f.label = buf;
  f.eval = [e = u.eval, shift](const Point& x) { return e(x - shift); };
  if (u.grad) f.grad = [g = *u.grad, shift](const Point& x) { return g(x - shift); };
  f.tail.core.center = u.tail.core.center + shift;
  for (auto& k : f.kinks) k.center = k.center + shift;
  f.origin = u.origin + shift;
  return f;
}

ScalarField scalar_multiple(const ScalarField& u, double c) {
  ScalarField f = u;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g*", c);
  f.label = buf + u.label;
  f.eval = [e = u.eval, c](const Point& x) { return c * e(x); };
  if (u.grad) f.grad = [g = *u.grad, c](const Point& x) { return c * g(x); };
  f.tail.below *= c;
  f.tail.above *= c;
  if (f.tail.kind == DecayKind::flat) f.tail = normalized(f.tail);
  return f;
}

ScalarField add(const ScalarField& u, const ScalarField& v) {
  require_same_dim(u, v);
  ScalarField f;
  f.dim = u.dim;
  f.label = u.label + "+" + v.label;
  f.eval = [a = u.eval, b = v.eval](const Point& x) { return a(x) + b(x); };
  if (u.grad && v.grad) f.grad = [a = *u.grad, b = *v.grad](const Point& x) { return a(x) + b(x); };
  f.tail = sum_tail(u.tail, v.tail, u.dim);
  f.kinks = u.kinks;
  f.kinks.insert(f.kinks.end(), v.kinks.begin(), v.kinks.end());
  f.origin = u.origin;
  f.feature_scale = std::min(u.feature_scale, v.feature_scale);
  f.radial = u.radial && v.radial && u.origin == v.origin;
  f.lipschitz = u.lipschitz && v.lipschitz;
  return f;
}

ScalarField multiply(const ScalarField& u, const ScalarField& v) {
  require_same_dim(u, v);
  ScalarField f;
  f.dim = u.dim;
  f.label = u.label + "*" + v.label;
  f.eval = [a = u.eval, b = v.eval](const Point& x) { return a(x) * b(x); };
  if (u.grad && v.grad) {
    f.grad = [a = u.eval, b = v.eval, ga = *u.grad, gb = *v.grad](const Point& x) {
      return a(x) * gb(x) + b(x) * ga(x);
    };
  }
  f.tail = product_tail(u.tail, v.tail, u.dim);
  f.kinks = u.kinks;
  f.kinks.insert(f.kinks.end(), v.kinks.begin(), v.kinks.end());
  f.origin = u.origin;
  f.feature_scale = std::min(u.feature_scale, v.feature_scale);
  f.radial = u.radial && v.radial && u.origin == v.origin;
  f.lipschitz = u.lipschitz && v.lipschitz;
  return f;
}

ScalarField add_constant(const ScalarField& u, double c) {
  ScalarField f = u;
  char buf[64];
  std::snprintf(buf, sizeof buf, "+%.10g", c);
  f.label = u.label + buf;
  f.eval = [e = u.eval, c](const Point& x) { return e(x) + c; };
  if (u.tail.bounded()) {
    f.tail.kind = DecayKind::flat;
    f.tail.below += c;
    f.tail.above += c;
    f.tail = normalized(f.tail);
  } else if (c != 0.0) {
    f.tail.kind = DecayKind::none;
  }
  return f;
}

}  // namespace gagliardo
