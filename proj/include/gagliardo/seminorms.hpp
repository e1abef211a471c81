#pragma once

#include <optional>
#include <string_view>
#include <utility>

#include "gagliardo/fields.hpp"
#include "gagliardo/quadrature.hpp"

namespace gagliardo {

enum class SeminormKind { gagliardo, gradient_lp, lp, campanato, bmo, holder, weighted_campanato };

std::string_view to_string(SeminormKind k);

struct SeminormValue {
  SeminormKind kind = SeminormKind::gagliardo;
  Estimate estimate;
  std::optional<SeminormParams> params;  // gagliardo and gradient_lp
  double p = 0.0;                        // lp, campanato, weighted
  double lambda = 0.0;                   // campanato
  double alpha = 0.0;                    // holder
  double radius = 0.0;                   // weighted
  std::optional<Ball> argmax;            // campanato, bmo
  std::optional<std::pair<Point, Point>> arg_pair;  // holder

  double value() const { return estimate.value; }
};

/// (s(1-s) * double integral)^{1/p} for s < 1, ||grad u||_p for s = 1.
SeminormValue gagliardo_seminorm(const ScalarField& u, const SeminormParams& params,
                                 const QuadratureSpec& spec);

/// ||u||_{L^p}.
SeminormValue lp_norm(const ScalarField& u, double p, const QuadratureSpec& spec);

double mean_on_ball(const ScalarField& u, const Ball& b, const QuadratureSpec& spec);

/// int_B |u - u_B|^p.
double oscillation(const ScalarField& u, const Ball& b, double p, const QuadratureSpec& spec);

/// int_B |u - c|^p for a given constant c, on the same nodes as oscillation().
double deviation(const ScalarField& u, const Ball& b, double p, double c, const QuadratureSpec& spec);

/// (sup over balls of rho^{-lambda} int_B |u - u_B|^p)^{1/p}.
SeminormValue campanato_seminorm(const ScalarField& u, double p, double lambda,
                                 const QuadratureSpec& spec);

/// campanato(u, 1, n) / omega_n.
SeminormValue bmo_seminorm(const ScalarField& u, const QuadratureSpec& spec);

/// sup |u(x) - u(y)| / |x - y|^alpha over sampled and refined pairs.
SeminormValue holder_seminorm(const ScalarField& u, double alpha, const QuadratureSpec& spec);

/// int |u - shift|^p / (R^n + |x|^n |log(|x|/R)|^{p+2}) dx; u - shift must have
/// zero mean on B_R(0), otherwise NonzeroMean.
Estimate weighted_campanato_integral(const ScalarField& u, double p, double R, const QuadratureSpec& spec,
                                     double shift = 0.0);

/// Raw double integral over (B_R(x0) \ B_r(x0)) x B_R(x0).
Estimate annulus_gagliardo(const ScalarField& u, const Point& x0, double r, double R,
                           const SeminormParams& params, const QuadratureSpec& spec);

/// Ball family used for Campanato suprema: centres on a grid over the field's
/// extent plus the origin; radii geometric from 2^-6 E to 2^3 E.
std::vector<Point> campanato_centers(const ScalarField& u);
std::vector<double> campanato_radii(const ScalarField& u);

}  // namespace gagliardo
