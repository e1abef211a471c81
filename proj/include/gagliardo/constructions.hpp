#pragma once

#include <string_view>

#include "gagliardo/fields.hpp"
#include "gagliardo/quadrature.hpp"

namespace gagliardo {

/// x -> u(lambda x).
ScalarField scale(const ScalarField& u, double lambda);

/// phi(. / m) for a plateau-type phi (1 on B_1, supported in B_2).
ScalarField superconformal_null(const ScalarField& phi, int m);

/// Radial piecewise-logarithmic profile: 1 on B_m, log(m^2/|x|)/log(m) on
/// m <= |x| <= m^2, 0 outside B_{m^2}.
ScalarField conformal_null(int n, int m);

/// Normalizer Z_n of exp(-1/(1-|x|^2)) on B_1.
double mollifier_normalizer(int n);

/// rho_m(x) = m^n rho(m x), rho = Z^{-1} exp(-1/(1-|x|^2)) on B_1.
ScalarField mollifier(int n, int m);

/// u * rho_m evaluated by quadrature over B_{1/m}.
ScalarField mollify(const ScalarField& u, int m, const QuadratureSpec& spec);

enum class CutoffVariant { linear, logarithmic };

std::string_view to_string(CutoffVariant v);

struct CutoffFamily {
  CutoffVariant variant;
  int j;
  ScalarField field;
  double constant;  // gradient bound is constant / j (linear) or constant / j^2

  double inner_radius() const { return j; }
  double outer_radius() const;
  double gradient_bound() const;
};

/// linear(j): 1 on B_j, 0 outside B_{2j}, |grad| <= 2/j.
/// logarithmic(j), j >= 2: 1 on B_j, 0 outside B_{j^2}, |grad| <= 4/j^2.
CutoffFamily cutoff(CutoffVariant variant, int n, int j);

/// The function whose seminorm truncation_error() reports:
///   sp != n: (1 - eta_j) u with the linear cutoff;
///   sp == n: (1 - eta_j)(u - mean_{B_{j^2}} u) with the logarithmic cutoff.
ScalarField truncated_field(const ScalarField& u, int j, const SeminormParams& params,
                            const QuadratureSpec& spec);

/// Gagliardo seminorm of truncated_field(); RegimeMismatch when u lacks the
/// regime's hypothesis.
Estimate truncation_error(const ScalarField& u, int j, const SeminormParams& params,
                          const QuadratureSpec& spec);

/// Catalog labels plus "psi:m=<m>" and "mollifier:m=<m>".
ScalarField resolve_field(std::string_view label, int n);

}  // namespace gagliardo
