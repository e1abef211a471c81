#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gagliardo/error.hpp"

namespace gagliardo {

// Points live in R^2; for n = 1 only the first coordinate is read.
using Point = std::array<double, 2>;

inline Point operator+(const Point& a, const Point& b) { return {a[0] + b[0], a[1] + b[1]}; }
inline Point operator-(const Point& a, const Point& b) { return {a[0] - b[0], a[1] - b[1]}; }
inline Point operator*(double c, const Point& a) { return {c * a[0], c * a[1]}; }

double norm(const Point& x, int n);
double dot(const Point& a, const Point& b, int n);

/// Exact rational number with positive denominator, kept in lowest terms.
class Rational {
 public:
  Rational() = default;
  Rational(std::int64_t num, std::int64_t den = 1);

  /// Accepts "3/4", "2", or a finite decimal such as "0.75".
  static Rational parse(std::string_view text);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  double value() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  std::string str() const;

  friend Rational operator*(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a, const Rational& b);
  friend bool operator==(const Rational& a, const Rational& b) = default;
  friend bool operator<(const Rational& a, const Rational& b);

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

enum class Regime { subconformal, conformal, superconformal };

std::string_view to_string(Regime r);

struct RegimeInfo {
  Regime regime;
  bool exceptional_1d = false;  // s = p = n = 1
};

/// The (n, s, p) triple. s and p are exact so that s*p = n is decided exactly.
class SeminormParams {
 public:
  SeminormParams(int n, Rational s, Rational p);

  int n() const { return n_; }
  const Rational& s_exact() const { return s_; }
  const Rational& p_exact() const { return p_; }
  double s() const { return s_.value(); }
  double p() const { return p_.value(); }
  double sp() const { return s() * p(); }

  RegimeInfo regime() const;
  /// n p / (n - s p); throws RegimeMismatch outside the subconformal regime.
  Rational critical_exponent() const;
  /// s - n / p; throws RegimeMismatch outside the superconformal regime.
  Rational holder_exponent() const;

  std::string str() const;

 private:
  int n_;
  Rational s_;
  Rational p_;
};

RegimeInfo regime(const SeminormParams& params);

struct Ball {
  Point center{0.0, 0.0};
  double radius = 1.0;

  Ball() = default;
  Ball(Point c, double r);
};

/// Measure of the unit ball in R^n.
double omega(int n);
double ball_measure(int n, double radius);

/// A set where the field fails to be smooth: the sphere |x - center| = radius
/// (a single point when radius = 0).
struct Kink {
  Point center{0.0, 0.0};
  double radius = 0.0;
};

enum class DecayKind {
  compact,     // u == 0 outside `core`
  rapid,       // |u| below 1e-16 * sup|u| outside `core`; treated as compact
  flat,        // u constant on each component of the complement of `core`
  polynomial,  // |u| ~ |x|^{-rate}, |grad u| ~ |x|^{-rate-1} outside `core`
  none,
};

std::string_view to_string(DecayKind k);

struct Tail {
  DecayKind kind = DecayKind::none;
  Ball core;
  // Exterior values of a flat field. In 1-D `below` applies left of the core
  // and `above` right of it; in 2-D both are equal.
  double below = 0.0;
  double above = 0.0;
  double rate = 0.0;

  bool bounded() const {
    return kind == DecayKind::compact || kind == DecayKind::rapid || kind == DecayKind::flat;
  }
};

using Evaluator = std::function<double(const Point&)>;
using GradientFn = std::function<Point(const Point&)>;

/// A real function on R^n with the metadata the quadrature engines rely on.
/// Immutable after construction; evaluators must be reentrant.
struct ScalarField {
  int dim = 1;
  std::string label;
  Evaluator eval;
  std::optional<GradientFn> grad;
  Tail tail;
  std::vector<Kink> kinks;
  Point origin{0.0, 0.0};      // centre of the field's multi-scale structure
  double feature_scale = 1.0;  // smallest length on which the field varies
  bool radial = false;         // u(x) depends only on |x - origin|
  bool lipschitz = true;       // false for fields with jumps

  double operator()(const Point& x) const { return eval(x); }
  /// Radius R with u(x) = 0 for |x - core.center| > R, when such an R exists.
  std::optional<double> support_radius() const;
  /// Ball enclosing the structure of the field; used to size sampling families.
  Ball extent() const;
};

ScalarField hat_field(int n);
ScalarField gauss_field(int n);
ScalarField bump_field(int n);
ScalarField powtail_field(int n, double alpha);
/// (1 + |x|^2)^{beta/2} - 1: grows like |x|^beta and vanishes at 0.
ScalarField growpow_field(int n, double beta);
ScalarField clamp_field();
ScalarField sign_field();
ScalarField constant_field(int n, double c);
ScalarField linear_field(int n);
/// Smooth radial cutoff, 1 on B_1 and 0 outside B_2.
ScalarField plateau_field(int n);

/// The built-in catalog for dimension n. `alpha` parametrizes powtail.
std::vector<ScalarField> catalog(int n, double alpha = 0.75);

/// Builds a field from a label such as "hat", "powtail:alpha=0.75",
/// "const:c=2", "psi:m=16" or "growpow:beta=0.125".
ScalarField field_from_label(std::string_view label, int n);

// Field algebra. Metadata is combined conservatively.
ScalarField translate(const ScalarField& u, const Point& shift);
ScalarField scalar_multiple(const ScalarField& u, double c);
ScalarField add(const ScalarField& u, const ScalarField& v);
ScalarField multiply(const ScalarField& u, const ScalarField& v);
ScalarField add_constant(const ScalarField& u, double c);

/// Smooth step: 0 for t <= 0, 1 for t >= 1, C-infinity, with max slope 2.
double smooth_step(double t);
double smooth_step_derivative(double t);

}  // namespace gagliardo
