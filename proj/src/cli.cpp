#include "gagliardo/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <fstream>
#include <iostream>
#include <sstream>

#include "gagliardo/constructions.hpp"
#include "gagliardo/seminorms.hpp"

namespace gagliardo::cli {

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

// Quote a field only when CSV requires it.
std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

void write_csv(std::ostream& os, const std::vector<CsvRow>& rows) {
  os << kCsvHeader << '\n';
  for (const CsvRow& r : rows) {
    os << csv_cell(r.case_name) << ',' << csv_cell(r.field) << ',' << r.n << ',' << csv_cell(r.s) << ','
       << csv_cell(r.p) << ',' << csv_cell(r.quantity) << ',' << format_real(r.value) << ','
       << format_real(r.error) << ',' << csv_cell(r.extra) << '\n';
  }
}

void emit_csv(const std::filesystem::path& path, const std::vector<CsvRow>& rows) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::io, "cannot open '" + path.string() + "' for writing");
  write_csv(f, rows);
  f.flush();
  if (!f) throw Error(ErrorKind::io, "failed writing '" + path.string() + "'");
}

namespace {

std::string command_name(Command c) {
  switch (c) {
    case Command::seminorm: return "seminorm";
    case Command::verify: return "verify";
    case Command::nullseq: return "nullseq";
    case Command::truncate: return "truncate";
    case Command::rates: return "rates";
    case Command::report: return "report";
  }
  return "?";
}

std::vector<double> parse_sweep_text(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const double v = std::stod(item, &used);
      if (used != item.size() || !std::isfinite(v)) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw ConfigError("--sweep: cannot parse '" + item + "' as a number");
    }
  }
  if (out.empty()) throw ConfigError("--sweep: empty list");
  return out;
}

Rational parse_rational(const std::string& flag, const std::string& text) {
  try {
    return Rational::parse(text);
  } catch (const Error& e) {
    throw ConfigError(flag + ": " + e.what());
  }
}

std::vector<int> integer_sweep(const std::vector<double>& sweep, int minimum) {
  std::vector<int> out;
  for (double v : sweep) {
    if (v != std::floor(v) || v < minimum || v > 1e6) {
      throw ConfigError("--sweep: expected integers >= " + std::to_string(minimum));
    }
    out.push_back(static_cast<int>(v));
  }
  return out;
}

int dimension(const RunConfig& c, int fallback = 1) {
  const int n = c.n.value_or(fallback);
  if (n != 1 && n != 2) throw ConfigError("--n must be 1 or 2");
  return n;
}

SeminormParams make_params(const RunConfig& c, Rational s_default = Rational(1, 2),
                           Rational p_default = Rational(2)) {
  const int n = dimension(c);
  const Rational s = c.s.value_or(s_default);
  const Rational p = c.p.value_or(p_default);
  if (!(Rational(0) < s) || Rational(1) < s) throw ConfigError("--s must lie in (0, 1]");
  if (p < Rational(1)) throw ConfigError("--p must be >= 1");
  return SeminormParams(n, s, p);
}

ScalarField make_field(const std::string& label, int n) {
  try {
    return resolve_field(label, n);
  } catch (const Error& e) {
    throw ConfigError(std::string("--field: ") + e.what());
  }
}

std::string extra_join(std::initializer_list<std::string> parts) {
  std::string out;
  for (const std::string& p : parts) {
    if (p.empty()) continue;
    if (!out.empty()) out += ';';
    out += p;
  }
  return out;
}

std::string kv(const std::string& k, double v) { return k + "=" + format_real(v); }

CsvRow base_row(const std::string& name, const std::string& field, const SeminormParams& prm) {
  CsvRow r;
  r.case_name = name;
  r.field = field;
  r.n = prm.n();
  r.s = prm.s_exact().str();
  r.p = prm.p_exact().str();
  return r;
}

// ---------------------------------------------------------------------------

struct Outcome {
  std::vector<CsvRow> rows;
  std::vector<std::string> summary;
  std::vector<std::string> failures;
};

Outcome do_seminorm(const RunConfig& c) {
  const SeminormParams prm = make_params(c);
  const int n = prm.n();
  const ScalarField u = make_field(c.field_label.value_or("hat"), n);
  const QuadratureSpec spec = c.quadrature.spec_for(n);
  SeminormValue v;
  std::string extra;
  if (c.kind == "gagliardo") {
    v = gagliardo_seminorm(u, prm, spec);
  } else if (c.kind == "lp") {
    v = lp_norm(u, prm.p(), spec);
  } else if (c.kind == "campanato") {
    const double lambda = c.lambda.value_or(prm.sp());
    v = campanato_seminorm(u, prm.p(), lambda, spec);
    extra = kv("lambda", lambda);
  } else if (c.kind == "bmo") {
    v = bmo_seminorm(u, spec);
  } else if (c.kind == "holder") {
    double alpha;
    if (c.alpha) {
      alpha = *c.alpha;
    } else if (prm.regime().regime == Regime::superconformal) {
      alpha = prm.holder_exponent().value();
    } else {
      throw ConfigError("--alpha is required unless s p > n");
    }
    v = holder_seminorm(u, alpha, spec);
    extra = kv("alpha", alpha);
  } else {
    throw ConfigError("--kind must be one of gagliardo, lp, campanato, bmo, holder");
  }
  if (v.argmax) {
    extra = extra_join({extra, kv("ball_x", v.argmax->center[0]),
                        n == 2 ? kv("ball_y", v.argmax->center[1]) : "", kv("ball_r", v.argmax->radius)});
  }
  if (v.arg_pair) {
    extra = extra_join({extra, kv("x", v.arg_pair->first[0]), n == 2 ? kv("x2", v.arg_pair->first[1]) : "",
                        kv("y", v.arg_pair->second[0]), n == 2 ? kv("y2", v.arg_pair->second[1]) : ""});
  }
  Outcome o;
  CsvRow r = base_row("seminorm", u.label, prm);
  r.quantity = std::string(to_string(v.kind));
  r.value = v.value();
  r.error = v.estimate.error;
  r.extra = extra_join({extra, spec.str()});
  o.rows.push_back(r);
  o.summary.push_back(r.quantity + "[" + u.label + "] (" + prm.str() + ") = " + format_real(r.value) + " +- " +
                      format_real(r.error));
  return o;
}

CsvRow report_row(const InequalityReport& rep) {
  CsvRow r;
  r.case_name = rep.name;
  r.field = rep.field_label;
  r.n = rep.n;
  if (rep.params) r.s = rep.params->s_exact().str();
  r.p = rep.params ? rep.params->p_exact().str() : format_real(rep.p);
  if (!rep.applicable) {
    r.quantity = "not_applicable";
    r.extra = rep.extra;
    return r;
  }
  r.quantity = "ratio";
  r.value = rep.ratio;
  double rel = 0.0;
  if (rep.lhs.value > 0.0) rel += std::abs(rep.lhs.error / rep.lhs.value);
  if (rep.rhs.value > 0.0) rel += std::abs(rep.rhs.error / rep.rhs.value);
  r.error = rep.ratio * rel;
  r.extra = extra_join({kv("lhs", rep.lhs.value), kv("rhs", rep.rhs.value), kv("budget", rep.budget),
                        std::string("pass=") + (rep.pass ? "1" : "0"), rep.extra});
  return r;
}

void collect_reports(const std::vector<InequalityReport>& reports, Outcome& o) {
  int pass = 0, skip = 0;
  for (const InequalityReport& rep : reports) {
    o.rows.push_back(report_row(rep));
    if (!rep.applicable) {
      ++skip;
    } else if (rep.pass) {
      ++pass;
    } else {
      o.failures.push_back("violation: " + rep.name + " on field '" + rep.field_label + "' (n=" +
                           std::to_string(rep.n) + ", ratio " + format_real(rep.ratio) + " > budget " +
                           format_real(rep.budget) + "; " + rep.extra + ")");
    }
  }
  o.summary.push_back(std::to_string(reports.size()) + " reports: " + std::to_string(pass) + " pass, " +
                      std::to_string(o.failures.size()) + " fail, " + std::to_string(skip) + " not applicable");
}

Outcome do_verify(const RunConfig& c) {
  SuiteConfig sc;
  sc.suite = c.suite;
  if (c.n) sc.dims = {dimension(c)};
  sc.seed = c.quadrature.seed;
  sc.method = c.quadrature.method;
  sc.cells = c.quadrature.cells;
  sc.samples = c.quadrature.samples;
  sc.truncation = c.quadrature.truncation;
  sc.band = c.quadrature.band;
  sc.field = c.field_label;
  if (sc.suite != "all" &&
      std::find(check_names().begin(), check_names().end(), sc.suite) == check_names().end()) {
    throw ConfigError("--suite must be 'all' or one of the check names");
  }
  Outcome o;
  collect_reports(run_suite(sc), o);
  return o;
}

// A one-parameter family evaluated along a sweep, with a log-log fit.
struct Family {
  std::string name;
  SeminormParams params;
  std::vector<int> sweep;
  bool log_abscissa = false;  // fit against log m
  double expected = 0.0;
  std::function<ScalarField(int)> member;
};

Family make_family(const RunConfig& c, bool allow_mollify) {
  const std::string& reg = c.regime;
  if (reg == "superconformal") {
    const SeminormParams prm = make_params(c, Rational(3, 4), Rational(2));
    if (prm.regime().regime != Regime::superconformal) throw ConfigError("--regime superconformal needs s p > n");
    if (prm.s() >= 1.0) throw ConfigError("--s must be < 1 for null sequences");
    const ScalarField phi = plateau_field(prm.n());
    Family f{"superconformal", prm, integer_sweep(c.sweep.empty() ? std::vector<double>{2, 4, 8, 16} : c.sweep, 1),
             false, prm.n() / prm.p() - prm.s(), {}};
    f.member = [phi](int m) { return superconformal_null(phi, m); };
    return f;
  }
  if (reg == "conformal") {
    const SeminormParams prm = make_params(c, Rational(1, 2), Rational(2));
    if (prm.regime().regime != Regime::conformal) throw ConfigError("--regime conformal needs s p = n");
    if (prm.s() >= 1.0) throw ConfigError("--s must be < 1 for null sequences");
    const int n = prm.n();
    Family f{"conformal", prm, integer_sweep(c.sweep.empty() ? std::vector<double>{4, 16, 64, 256} : c.sweep, 2),
             true, -(1.0 - prm.s() / n), {}};
    f.member = [n](int m) { return conformal_null(n, m); };
    return f;
  }
  if (reg == "mollify" && allow_mollify) {
    const SeminormParams prm = make_params(c);
    const ScalarField u = make_field(c.field_label.value_or("hat"), prm.n());
    const QuadratureSpec spec = c.quadrature.spec_for(prm.n());
    Family f{"mollify", prm, integer_sweep(c.sweep.empty() ? std::vector<double>{2, 4, 8, 16} : c.sweep, 1), false,
             std::nan(""), {}};
    f.member = [u, spec](int m) {
      ScalarField d = add(mollify(u, m, spec), scalar_multiple(u, -1.0));
      d.label = "mollify:" + u.label + ":m=" + std::to_string(m);
      return d;
    };
    return f;
  }
  throw ConfigError(allow_mollify ? "--regime must be superconformal, conformal or mollify"
                                  : "--regime must be superconformal or conformal");
}

struct Sweep {
  Outcome outcome;
  std::vector<double> xs, ys;
};

Sweep run_family(const RunConfig& c, const Family& f, const std::string& case_name) {
  const QuadratureSpec spec = c.quadrature.spec_for(f.params.n());
  Sweep sw;
  for (int m : f.sweep) {
    const ScalarField u = f.member(m);
    const SeminormValue v = gagliardo_seminorm(u, f.params, spec);
    CsvRow r = base_row(case_name, u.label, f.params);
    r.quantity = "seminorm";
    r.value = v.value();
    r.error = v.estimate.error;
    r.extra = extra_join({"m=" + std::to_string(m), spec.str()});
    sw.outcome.rows.push_back(r);
    sw.xs.push_back(f.log_abscissa ? std::log(static_cast<double>(m)) : m);
    sw.ys.push_back(v.value());
    sw.outcome.summary.push_back(f.name + " m=" + std::to_string(m) + ": " + format_real(v.value()));
  }
  if (sw.xs.size() >= 3) {
    RateFit fit;
    try {
      fit = fit_rate(sw.xs, sw.ys);
    } catch (const Error& e) {
      throw ConfigError(std::string("--sweep: ") + e.what());
    }
    CsvRow r = base_row(case_name, f.name, f.params);
    r.quantity = "rate";
    r.value = fit.slope;
    r.extra = extra_join({kv("intercept", fit.intercept), kv("rss", fit.rss), "points=" + std::to_string(fit.points),
                          std::string("abscissa=") + (f.log_abscissa ? "log_m" : "m"),
                          std::isnan(f.expected) ? "" : kv("expected", f.expected)});
    sw.outcome.rows.push_back(r);
    sw.outcome.summary.push_back("fitted slope " + format_real(fit.slope) +
                                 (std::isnan(f.expected) ? "" : " (expected " + format_real(f.expected) + ")"));
  } else {
    sw.outcome.summary.push_back("fewer than 3 sweep points; no rate fitted");
  }
  return sw;
}

Outcome do_nullseq(const RunConfig& c) {
  if (c.regime.empty()) throw ConfigError("--regime is required");
  return run_family(c, make_family(c, false), "nullseq").outcome;
}

std::filesystem::path dat_path(const RunConfig& c) {
  if (c.dat_path) return *c.dat_path;
  if (c.output_path) {
    std::filesystem::path p = *c.output_path;
    return p.replace_extension(".dat");
  }
  return "rates.dat";
}

Outcome do_rates(const RunConfig& c) {
  if (c.regime.empty()) throw ConfigError("--regime is required");
  const Family f = make_family(c, true);
  Sweep sw = run_family(c, f, "rates");
  const std::filesystem::path path = dat_path(c);
  std::ofstream dat(path, std::ios::binary);
  if (!dat) throw Error(ErrorKind::io, "cannot open '" + path.string() + "' for writing");
  dat << "# " << (f.log_abscissa ? "log_m" : "m") << " seminorm\n";
  for (std::size_t i = 0; i < sw.xs.size(); ++i) dat << format_real(sw.xs[i]) << ' ' << format_real(sw.ys[i]) << '\n';
  if (!dat) throw Error(ErrorKind::io, "failed writing '" + path.string() + "'");
  sw.outcome.summary.push_back("data file: " + path.string());
  return sw.outcome;
}

Outcome do_truncate(const RunConfig& c) {
  const SeminormParams prm = make_params(c);
  const ScalarField u = make_field(c.field_label.value_or("hat"), prm.n());
  const QuadratureSpec spec = c.quadrature.spec_for(prm.n());
  const std::vector<int> js = integer_sweep(c.sweep.empty() ? std::vector<double>{2, 4, 8} : c.sweep, 1);
  const bool conformal = prm.regime().regime == Regime::conformal;
  Outcome o;
  for (int j : js) {
    const Estimate e = truncation_error(u, j, prm, spec);
    CsvRow r = base_row("truncate", u.label, prm);
    r.quantity = "truncation_error";
    r.value = e.value;
    r.error = e.error;
    r.extra = extra_join({"j=" + std::to_string(j), std::string("regime=") + std::string(to_string(prm.regime().regime)),
                          std::string("cutoff=") + (conformal ? "logarithmic" : "linear"), spec.str()});
    o.rows.push_back(r);
    o.summary.push_back("j=" + std::to_string(j) + ": " + format_real(e.value));
  }
  return o;
}

// Scaling law, sharp one-dimensional inequality and the s-endpoint probe.
Outcome do_report(const RunConfig& c) {
  Outcome o;
  const QuadratureSpec spec = c.quadrature.spec_for(1);
  const ScalarField hat = hat_field(1);
  for (auto [s, p] : {std::pair{Rational(1, 2), Rational(2)}, {Rational(3, 4), Rational(2)}, {Rational(1, 4), Rational(3)}}) {
    const SeminormParams prm(1, s, p);
    const double base = gagliardo_seminorm(hat, prm, spec).value();
    for (double lambda : {0.5, 2.0, 4.0}) {
      const double v = gagliardo_seminorm(scale(hat, lambda), prm, spec).value();
      CsvRow r = base_row("scaling", hat.label, prm);
      r.quantity = "ratio";
      r.value = v / base;
      r.error = 0.0;
      r.extra = extra_join({kv("lambda", lambda), kv("expected", std::pow(lambda, prm.s() - 1.0 / prm.p())), spec.str()});
      o.rows.push_back(r);
    }
  }
  std::vector<InequalityReport> reps;
  for (const ScalarField& u : {hat_field(1), gauss_field(1)}) reps.push_back(check_sharp_1d(u, spec));
  for (auto s : {Rational(1, 10), Rational(1, 2), Rational(9, 10)}) {
    reps.push_back(check_morrey_campanato(hat, SeminormParams(1, s, Rational(2)), spec));
  }
  collect_reports(reps, o);
  return o;
}

}  // namespace

QuadratureSpec QuadratureFlags::spec_for(int n) const {
  QuadratureSpec s = default_spec(n);
  if (method) s.method = *method;
  if (cells) s.cells_per_axis = *cells;
  if (samples) s.samples = *samples;
  if (truncation) s.truncation_radius = *truncation;
  if (band) s.diagonal_band = *band;
  s.seed = seed;
  try {
    s.validate();
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  return s;
}

std::optional<RunConfig> parse(int argc, const char* const* argv, std::ostream& out) {
  CLI::App app{"Fractional Sobolev, Campanato, BMO and Holder seminorm toolkit"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::string field, s, p, method, sweep, outp, dat;
  int n = 0, cells = 0;
  std::int64_t samples = 0;
  double truncation = 0.0, band = 0.0, lambda = 0.0, alpha = 0.0;
  std::uint64_t seed = 1;

  struct Sub {
    Command cmd;
    const char* help;
  };
  const Sub subs[] = {
      {Command::seminorm, "compute one seminorm"},
      {Command::verify, "run inequality checks over the catalog"},
      {Command::nullseq, "null-sequence sweep with a fitted rate"},
      {Command::truncate, "truncation error sweep over j"},
      {Command::rates, "rate sweep plus a two-column data file"},
      {Command::report, "scaling, sharpness and endpoint summary"},
  };
  std::vector<std::pair<CLI::App*, Command>> apps;
  std::map<std::string, CLI::Option*> opts;
  for (const Sub& sub : subs) {
    CLI::App* a = app.add_subcommand(command_name(sub.cmd), sub.help);
    apps.emplace_back(a, sub.cmd);
    a->add_option("--field", field, "field label, e.g. hat, powtail:alpha=0.75, psi:m=16");
    a->add_option("--n", n, "dimension (1 or 2)");
    a->add_option("--s", s, "smoothness, rational allowed (3/4)");
    a->add_option("--p", p, "integrability, rational allowed");
    a->add_option("--method", method, "tensor or montecarlo");
    a->add_option("--cells", cells, "cells per axis");
    a->add_option("--samples", samples, "Monte Carlo samples");
    a->add_option("--truncation", truncation, "truncation radius T");
    a->add_option("--band", band, "diagonal band delta");
    a->add_option("--seed", seed, "random seed");
    a->add_option("--sweep", sweep, "comma-separated sweep values");
    a->add_option("--out", outp, "CSV output path (stdout when omitted)");
    if (sub.cmd == Command::verify) a->add_option("--suite", cfg.suite, "all or a single check name");
    if (sub.cmd == Command::nullseq || sub.cmd == Command::rates) {
      a->add_option("--regime", cfg.regime, "superconformal, conformal (rates: also mollify)");
    }
    if (sub.cmd == Command::rates) a->add_option("--dat", dat, "data file path");
    if (sub.cmd == Command::seminorm) {
      a->add_option("--kind", cfg.kind, "gagliardo, lp, campanato, bmo or holder");
      a->add_option("--lambda", lambda, "Campanato exponent (default s p)");
      a->add_option("--alpha", alpha, "Holder exponent (default s - n/p)");
    }
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();  // already the subcommand page when one was selected
    return std::nullopt;
  } catch (const CLI::ParseError& e) {
    throw ConfigError(e.what());
  }
  CLI::App* active = nullptr;
  for (auto& [a, cmd] : apps) {
    if (a->parsed()) {
      active = a;
      cfg.command = cmd;
    }
  }
  auto given = [&](const char* flag) { return active->count(flag) > 0; };
  if (given("--field")) cfg.field_label = field;
  if (given("--n")) cfg.n = n;
  if (given("--s")) cfg.s = parse_rational("--s", s);
  if (given("--p")) cfg.p = parse_rational("--p", p);
  if (given("--method")) {
    try {
      cfg.quadrature.method = parse_method(method);
    } catch (const Error&) {
      throw ConfigError("--method must be 'tensor' or 'montecarlo'");
    }
  }
  if (given("--cells")) cfg.quadrature.cells = cells;
  if (given("--samples")) cfg.quadrature.samples = samples;
  if (given("--truncation")) cfg.quadrature.truncation = truncation;
  if (given("--band")) cfg.quadrature.band = band;
  cfg.quadrature.seed = seed;
  if (given("--sweep")) cfg.sweep = parse_sweep_text(sweep);
  if (given("--out")) cfg.output_path = outp;
  if (cfg.command == Command::rates && given("--dat")) cfg.dat_path = dat;
  if (cfg.command == Command::seminorm) {
    if (given("--lambda")) cfg.lambda = lambda;
    if (given("--alpha")) cfg.alpha = alpha;
  }
  // Catch bad quadrature flags before any work starts.
  cfg.quadrature.spec_for(cfg.n.value_or(1) == 2 ? 2 : 1);
  return cfg;
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  Outcome o;
  try {
    switch (config.command) {
      case Command::seminorm: o = do_seminorm(config); break;
      case Command::verify: o = do_verify(config); break;
      case Command::nullseq: o = do_nullseq(config); break;
      case Command::truncate: o = do_truncate(config); break;
      case Command::rates: o = do_rates(config); break;
      case Command::report: o = do_report(config); break;
    }
    std::ostream& info = config.output_path ? out : err;
    if (config.output_path) {
      emit_csv(*config.output_path, o.rows);
    } else {
      write_csv(out, o.rows);
    }
    for (const std::string& line : o.summary) info << line << '\n';
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  for (const std::string& f : o.failures) err << f << '\n';
  return o.failures.empty() ? 0 : 2;
}

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::optional<RunConfig> cfg;
  try {
    cfg = parse(argc, argv, out);
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return 1;
  }
  if (!cfg) return 0;
  return run(*cfg, out, err);
}

}  // namespace gagliardo::cli
