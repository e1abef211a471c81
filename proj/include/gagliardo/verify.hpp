#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gagliardo/fields.hpp"
#include "gagliardo/quadrature.hpp"
#include "gagliardo/seminorms.hpp"

namespace gagliardo {

struct InequalityReport {
  std::string name;
  Estimate lhs;
  Estimate rhs;
  double ratio = 0.0;
  std::optional<SeminormParams> params;  // absent for checks that only use p
  int n = 1;
  double p = 0.0;
  std::string field_label;
  bool pass = true;
  bool applicable = true;
  double budget = 0.0;
  std::string extra;  // key=value;key=value, includes the quadrature spec
};

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rss = 0.0;
  int points = 0;
};

/// Least-squares line through (log x, log y). DegenerateFit if all x coincide.
RateFit fit_rate(const std::vector<double>& xs, const std::vector<double>& ys);

/// Frozen constant for inequality `name` in dimension n. The method is accepted
/// for interface stability; the table is calibrated per dimension.
double budget(std::string_view name, int n, Method method);

/// Names accepted by run_suite besides "all".
const std::vector<std::string>& check_names();

/// Memoizes Gagliardo and Campanato values by (field label, parameters, spec).
class SeminormCache {
 public:
  SeminormValue gagliardo(const ScalarField& u, const SeminormParams& params, const QuadratureSpec& spec);
  SeminormValue campanato(const ScalarField& u, double p, double lambda, const QuadratureSpec& spec);

 private:
  std::map<std::string, SeminormValue> values_;
};

InequalityReport check_sobolev(const ScalarField& u, const SeminormParams& params, const QuadratureSpec& spec,
                               SeminormCache* cache = nullptr);
InequalityReport check_morrey_campanato(const ScalarField& u, const SeminormParams& params,
                                        const QuadratureSpec& spec, SeminormCache* cache = nullptr);
InequalityReport check_poincare_wirtinger(const ScalarField& u, const Point& x0, double R,
                                          const SeminormParams& params, const QuadratureSpec& spec,
                                          SeminormCache* cache = nullptr);
InequalityReport check_pw_flexible(const ScalarField& u, const Point& x0, double r, double R,
                                   const SeminormParams& params, const QuadratureSpec& spec,
                                   SeminormCache* cache = nullptr);
InequalityReport check_morrey(const ScalarField& u, const SeminormParams& params, const QuadratureSpec& spec,
                              SeminormCache* cache = nullptr);
InequalityReport check_weighted_integrability(const ScalarField& u, double p, double R,
                                              const QuadratureSpec& spec, SeminormCache* cache = nullptr);
InequalityReport check_local_pw(const ScalarField& u, const Point& x0, double r, double R,
                                const SeminormParams& params, const QuadratureSpec& spec);
/// 2 sup|u| <= ||u'||_1 in one dimension. Fields that do not vanish at
/// infinity (constants included) come back with applicable = false.
InequalityReport check_sharp_1d(const ScalarField& u, const QuadratureSpec& spec);

struct SuiteConfig {
  std::string suite = "all";
  std::vector<int> dims{1, 2};
  std::uint64_t seed = 1;
  std::optional<Method> method;  // default: tensor for n = 1, Monte Carlo for n = 2
  std::optional<int> cells;
  std::optional<std::int64_t> samples;
  std::optional<double> truncation;
  std::optional<double> band;
  std::optional<std::string> field;  // restrict to one catalog label
};

/// Parameter triples exercised by the suite in dimension n.
std::vector<SeminormParams> suite_params(int n);

/// Runs the selected checks over the catalog. Checks whose hypotheses fail for
/// a field come back with applicable = false. Output is sorted by
/// (name, field, n, s, p, extra).
std::vector<InequalityReport> run_suite(const SuiteConfig& config);

}  // namespace gagliardo
