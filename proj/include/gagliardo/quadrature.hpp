#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gagliardo/fields.hpp"

namespace gagliardo {

enum class Method { tensor, montecarlo };

std::string_view to_string(Method m);
Method parse_method(std::string_view text);

/// Order in which the two points of a pair enter the integrand. The kernel is
/// symmetric, so both orders must give the same double integral.
enum class PairOrder { xy, yx };

struct QuadratureSpec {
  Method method = Method::tensor;
  int cells_per_axis = 128;
  std::int64_t samples = 20000;
  // Unset means "derived from the field": T = 4R, delta = 2T / cells.
  std::optional<double> truncation_radius;
  std::optional<double> diagonal_band;
  std::uint64_t seed = 1;
  // Optional accuracy target; missing it raises BudgetExceeded.
  std::optional<double> target_rel_error;
  PairOrder order = PairOrder::xy;

  /// Rejects T <= 0, delta <= 0 and delta below one cell width 2T / cells.
  void validate() const;
  std::string str() const;
};

/// Default spec for dimension n: tensor for n = 1, Monte Carlo for n = 2.
QuadratureSpec default_spec(int n);

/// The same spec with `factor` times the resolution (cells, samples) and a
/// band shrunk by the same factor.
QuadratureSpec refined(const QuadratureSpec& spec, int factor);

struct Estimate {
  double value = 0.0;
  double error = 0.0;  // refinement difference or Monte Carlo standard error
};

/// T and delta resolved against a field.
double truncation_radius(const ScalarField& u, const QuadratureSpec& spec);
double diagonal_band(const ScalarField& u, const QuadratureSpec& spec);

/// Raw double integral of |u(x)-u(y)|^p / |x-y|^{n+sp} over R^n x R^n.
Estimate gagliardo_double_integral(const ScalarField& u, const SeminormParams& params,
                                   const QuadratureSpec& spec);

/// Same integrand over (B_R(x0) \ B_r(x0)) x B_R(x0).
Estimate annulus_double_integral(const ScalarField& u, const Point& x0, double r, double R,
                                 const SeminormParams& params, const QuadratureSpec& spec);

/// Integral of |u|^p over R^n (p < infinity).
Estimate lp_integral(const ScalarField& u, double p, const QuadratureSpec& spec);

/// Integral of |g|^p over R^n where g is a vector field, e.g. the gradient.
Estimate lp_integral_vector(const ScalarField& shape, const GradientFn& g, double p,
                            const QuadratureSpec& spec);

/// sup |u| over a dense sample of the truncated domain, refined at the argmax.
Estimate sup_norm(const ScalarField& u, const QuadratureSpec& spec);

/// Weighted nodes for integrating over a ball, placed with respect to the
/// field's kink sets.
struct BallRule {
  std::vector<Point> points;
  std::vector<double> weights;  // sum to |B| up to rounding
};
BallRule ball_rule(const ScalarField& u, const Ball& b, const QuadratureSpec& spec);

/// Integral of g(u(x)) over b for a scalar transform g.
double ball_integral(const ScalarField& u, const Ball& b, const QuadratureSpec& spec,
                     const std::function<double(double)>& g);

/// Maximum of f over centers x radii; ties go to the first occurrence
/// (centers outer, radii inner).
std::pair<double, Ball> sup_over_balls(const std::function<double(const Ball&)>& f,
                                       const std::vector<Point>& centers,
                                       const std::vector<double>& radii);

/// Integral of |u|^p / (R^n + |x|^n |log(|x|/R)|^{p+2}) over R^n, computed
/// along rays from the origin in the variable t = log(|x|/R). With `shift`
/// the integrand uses u - shift.
Estimate weighted_log_integral(const ScalarField& u, double p, double R, const QuadratureSpec& spec,
                               double shift = 0.0);

}  // namespace gagliardo
