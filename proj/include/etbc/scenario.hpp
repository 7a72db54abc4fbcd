#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "etbc/simulator.hpp"

namespace etbc {

/// Malformed scenario document. field() names the offending key as section.key,
/// line() is the 1-based source line when the reader knows it, else 0.
class ScenarioParseError : public std::runtime_error {
 public:
  ScenarioParseError(const std::string& what, std::string field, unsigned long line = 0)
      : std::runtime_error(what), field_(std::move(field)), line_(line) {}
  const std::string& field() const { return field_; }
  unsigned long line() const { return line_; }

 private:
  std::string field_;
  unsigned long line_;
};

/// Sections [plant] [bounds] [etm] [identifier] [grid] [initial] with scalar
/// `key = value` lines; '#' starts a comment line. Strings may be double-quoted.
ScenarioConfig parse_scenario(std::istream& in, const std::string& source = "<scenario>");
ScenarioConfig load_scenario(const std::filesystem::path& path);

/// Writes every key, doubles with round-trip precision.
void write_scenario(std::ostream& out, const ScenarioConfig& cfg);
void save_scenario(const std::filesystem::path& path, const ScenarioConfig& cfg);

const char* to_string(KernelScheme s);
const char* to_string(RegressorForm f);
const char* to_string(InitialShape s);

enum class CheckStatus { pass, warn, fail, note };
const char* to_string(CheckStatus s);

struct Check {
  std::string name;
  CheckStatus status = CheckStatus::pass;
  std::string detail;  ///< the inequality with numbers substituted
};

struct ValidationReport {
  std::vector<Check> checks;  ///< in design order: bounds, q, kappa, kappa1..4, lambda_d

  bool ok() const;
};

/// Design-order checks. Box containment, the Robin condition q > 1/4 + lambda_hi/(2 eps)
/// and kappa > a_hi/b fail hard; kappa1..kappa4 below their suggested values only warn.
ValidationReport validate(const ScenarioConfig& cfg, int search_resolution = 11);

}  // namespace etbc
