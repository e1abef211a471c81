#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gagliardo/fields.hpp"
#include "gagliardo/quadrature.hpp"
#include "gagliardo/verify.hpp"

namespace gagliardo::cli {

enum class Command { seminorm, verify, nullseq, truncate, rates, report };

/// Quadrature flags as given; unset entries fall back to default_spec(n).
struct QuadratureFlags {
  std::optional<Method> method;
  std::optional<int> cells;
  std::optional<std::int64_t> samples;
  std::optional<double> truncation;
  std::optional<double> band;
  std::uint64_t seed = 1;

  QuadratureSpec spec_for(int n) const;
};

struct RunConfig {
  Command command = Command::seminorm;
  std::optional<std::string> field_label;  // command-specific default when unset
  std::optional<int> n;                    // verify runs both dimensions when unset
  std::optional<Rational> s;
  std::optional<Rational> p;
  QuadratureFlags quadrature;
  std::optional<std::filesystem::path> output_path;  // stdout when unset
  std::vector<double> sweep;
  std::string suite = "all";
  std::string regime;  // nullseq / rates
  std::string kind = "gagliardo";
  std::optional<double> lambda;
  std::optional<double> alpha;
  std::optional<std::filesystem::path> dat_path;
};

/// One line of the output table.
struct CsvRow {
  std::string case_name;
  std::string field;
  int n = 1;
  std::string s;
  std::string p;
  std::string quantity;
  double value = 0.0;
  double error = 0.0;
  std::string extra;
};

inline constexpr const char* kCsvHeader = "case,field,n,s,p,quantity,value,error,extra";

/// %.17g, with nan and inf spelled out.
std::string format_real(double v);

void write_csv(std::ostream& os, const std::vector<CsvRow>& rows);

/// Writes the table to `path`; Io error naming the path on failure.
void emit_csv(const std::filesystem::path& path, const std::vector<CsvRow>& rows);

/// Thrown for bad command lines; the message names the offending flag.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses argv (argv[0] is the program name). ConfigError on bad input;
/// returns nullopt when help was printed.
std::optional<RunConfig> parse(int argc, const char* const* argv, std::ostream& out);

/// Executes a parsed configuration: 0 ok, 2 when a report fails, 1 on errors.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// parse + run with the exit-code contract.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace gagliardo::cli
