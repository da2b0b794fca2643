#pragma once

// Run configuration: flat "key = value" text with dotted section keys.

#include "isophasal/bracket.hpp"
#include "isophasal/cutoff.hpp"
#include "isophasal/errors.hpp"
#include "isophasal/heat_invariant.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace isophasal {

/// Parse or validation failure; line is 0 when the problem is not tied to a line.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& origin, int line, const std::string& field,
              const std::string& message);
  int line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  int line_;
  std::string field_;
};

/// A bracket given either by builtin name (cross1, cross2, quaternion, zero)
/// or by a tensor file.
struct BracketSource {
  std::string builtin;
  std::string file;
  std::string label() const { return file.empty() ? builtin : file; }
};

struct IntertwineSettings {
  int band = 2;
  int n_points = 40;
  std::uint64_t point_seed = 99;
  std::uint64_t function_seed = 2024;
  double tolerance = 1e-4;
  double negative_factor = 5.0;  // 0 disables the negative control
  double negative_threshold = 1e-1;
};

struct RunConfig {
  BracketSource first{"cross1", ""};
  std::optional<BracketSource> second;
  std::optional<int> m;
  std::optional<int> k;

  double r1sq = 1.0;
  double r2sq = 1.0;
  double amplitude = 1.0;
  double s = 1.0;

  QuadratureSpec quadrature;
  std::vector<double> s_list{1.0, 2.0, 4.0, 8.0, 16.0};
  IntertwineSettings intertwine;
  std::string out_dir = ".";

  std::string origin = "<defaults>";
  std::string base_dir;  // relative bracket files are resolved against this
  std::map<std::string, int> key_lines;  // where each key was set

  CutoffProfile profile() const { return {r1sq, r2sq, amplitude, s}; }

  /// Sorted key/value pairs of every setting after defaults and overrides.
  std::vector<std::pair<std::string, std::string>> resolved() const;

  /// FNV-1a 64 of the resolved settings, as 16 hex digits.
  std::string hash() const;
};

RunConfig parse_config(std::istream& in, const std::string& origin = "<stream>");
RunConfig load_config(const std::string& path);

/// Applies one "key = value" setting (also used for command-line overrides).
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value, int line);

/// Resolves the bracket sources and checks that m and k agree across them and
/// with any declared bracket.m / bracket.k. Throws ConfigError.
std::pair<Bracket, std::optional<Bracket>> resolve_brackets(const RunConfig& cfg);

Bracket builtin_bracket(const std::string& name);

std::vector<double> parse_double_list(const std::string& text);

}  // namespace isophasal
