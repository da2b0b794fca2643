#include "isophasal/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace isophasal {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string join(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += format_double(values[i]);
  }
  return out;
}

struct FieldContext {
  const RunConfig& cfg;
  const std::string& key;
  int line;

  [[noreturn]] void fail(const std::string& message) const {
    throw ConfigError(cfg.origin, line, key, message);
  }

  double real(const std::string& v) const {
    double out = 0.0;
    auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size() || !std::isfinite(out))
      fail("expected a real number, got '" + v + "'");
    return out;
  }

  double positive(const std::string& v) const {
    const double out = real(v);
    if (out <= 0.0) fail("must be positive");
    return out;
  }

  std::uint64_t unsigned_int(const std::string& v) const {
    std::uint64_t out = 0;
    auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size())
      fail("expected a non-negative integer, got '" + v + "'");
    return out;
  }

  int positive_int(const std::string& v) const {
    const auto out = unsigned_int(v);
    if (out == 0 || out > 1000000000ULL) fail("expected a positive integer, got '" + v + "'");
    return static_cast<int>(out);
  }

  bool boolean(const std::string& v) const {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    fail("expected true or false, got '" + v + "'");
  }
};

const std::vector<std::string>& builtin_names() {
  static const std::vector<std::string> names{"cross1", "cross2", "quaternion", "zero"};
  return names;
}

void check_builtin(const FieldContext& ctx, const std::string& v) {
  const auto& names = builtin_names();
  if (std::find(names.begin(), names.end(), v) == names.end())
    ctx.fail("unknown builtin bracket '" + v + "' (cross1, cross2, quaternion, zero)");
}

}  // namespace

ConfigError::ConfigError(const std::string& origin, int line, const std::string& field,
                         const std::string& message)
    : Error(origin + (line > 0 ? ":" + std::to_string(line) : std::string()) +
            (field.empty() ? std::string() : ": " + field) + ": " + message),
      line_(line),
      field_(field) {}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    double v = 0.0;
    auto res = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || res.ec != std::errc() || res.ptr != item.data() + item.size())
      throw std::invalid_argument("bad list entry '" + item + "'");
    out.push_back(v);
  }
  return out;
}

void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value, int line) {
  const FieldContext ctx{cfg, key, line};
  const std::string& v = value;
  if (v.empty()) ctx.fail("missing value");

  if (key == "bracket.builtin") {
    check_builtin(ctx, v);
    cfg.first = {v, ""};
  } else if (key == "bracket.file") {
    cfg.first = {"", v};
  } else if (key == "bracket.second") {
    check_builtin(ctx, v);
    cfg.second = BracketSource{v, ""};
  } else if (key == "bracket.second_file") {
    cfg.second = BracketSource{"", v};
  } else if (key == "bracket.m") {
    cfg.m = ctx.positive_int(v);
  } else if (key == "bracket.k") {
    cfg.k = ctx.positive_int(v);
  } else if (key == "cutoff.kind") {
    if (v != "bump_product") ctx.fail("unknown cutoff kind '" + v + "' (bump_product)");
  } else if (key == "cutoff.r1sq") {
    cfg.r1sq = ctx.positive(v);
  } else if (key == "cutoff.r2sq") {
    cfg.r2sq = ctx.positive(v);
  } else if (key == "cutoff.amplitude") {
    cfg.amplitude = ctx.real(v);
    if (cfg.amplitude < 0.0) ctx.fail("must be non-negative");
  } else if (key == "cutoff.s") {
    cfg.s = ctx.positive(v);
  } else if (key == "quadrature.method") {
    try {
      cfg.quadrature.method = parse_method(v);
    } catch (const std::exception&) {
      ctx.fail("unknown method '" + v + "' (qmc, mc, tensor_gauss)");
    }
  } else if (key == "quadrature.nodes") {
    cfg.quadrature.n_nodes = static_cast<std::size_t>(ctx.positive_int(v));
  } else if (key == "quadrature.replicates") {
    cfg.quadrature.n_replicates = ctx.positive_int(v);
  } else if (key == "quadrature.seed") {
    cfg.quadrature.seed = ctx.unsigned_int(v);
  } else if (key == "quadrature.preflight") {
    cfg.quadrature.preflight = ctx.boolean(v);
  } else if (key == "sweep.s_list") {
    std::vector<double> list;
    try {
      list = parse_double_list(v);
    } catch (const std::exception& e) {
      ctx.fail(e.what());
    }
    for (double s : list)
      if (!(s > 0.0) || !std::isfinite(s)) ctx.fail("scales must be positive");
    if (list.empty()) ctx.fail("empty list");
    cfg.s_list = list;
  } else if (key == "intertwine.band") {
    cfg.intertwine.band = ctx.positive_int(v);
  } else if (key == "intertwine.points") {
    cfg.intertwine.n_points = ctx.positive_int(v);
  } else if (key == "intertwine.seed") {
    cfg.intertwine.point_seed = ctx.unsigned_int(v);
  } else if (key == "intertwine.function_seed") {
    cfg.intertwine.function_seed = ctx.unsigned_int(v);
  } else if (key == "intertwine.tolerance") {
    cfg.intertwine.tolerance = ctx.positive(v);
  } else if (key == "intertwine.negative_factor") {
    cfg.intertwine.negative_factor = ctx.real(v);
    if (cfg.intertwine.negative_factor < 0.0) ctx.fail("must be non-negative");
  } else if (key == "intertwine.negative_threshold") {
    cfg.intertwine.negative_threshold = ctx.positive(v);
  } else if (key == "output.dir") {
    cfg.out_dir = v;
  } else {
    ctx.fail("unknown key");
  }
  cfg.key_lines[key] = line;
}

RunConfig parse_config(std::istream& in, const std::string& origin) {
  RunConfig cfg;
  cfg.origin = origin;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string text = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin, line, "", "expected 'key = value', got '" + text + "'");
    const std::string key = trim(text.substr(0, eq));
    if (key.empty()) throw ConfigError(origin, line, "", "missing key");
    if (cfg.key_lines.count(key))
      throw ConfigError(origin, line, key,
                        "duplicate key (first set on line " +
                            std::to_string(cfg.key_lines.at(key)) + ")");
    apply_setting(cfg, key, trim(text.substr(eq + 1)), line);
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, 0, "", "cannot open config file");
  RunConfig cfg = parse_config(in, path);
  cfg.base_dir = std::filesystem::path(path).parent_path().string();
  return cfg;
}

Bracket builtin_bracket(const std::string& name) {
  if (name == "cross1") return example_bracket(ExampleBracket::Cross1);
  if (name == "cross2") return example_bracket(ExampleBracket::Cross2);
  if (name == "quaternion") return example_bracket(ExampleBracket::Quaternion);
  if (name == "zero") return Bracket(6, 3);
  throw std::invalid_argument("unknown builtin bracket '" + name + "'");
}

std::pair<Bracket, std::optional<Bracket>> resolve_brackets(const RunConfig& cfg) {
  auto line_of = [&](const std::string& key) {
    auto it = cfg.key_lines.find(key);
    return it == cfg.key_lines.end() ? 0 : it->second;
  };
  auto load = [&](const BracketSource& src, const std::string& file_key) {
    if (!src.file.empty()) {
      try {
        std::filesystem::path path(src.file);
        if (path.is_relative() && !cfg.base_dir.empty()) path = cfg.base_dir / path;
        return read_bracket_file(path.string());
      } catch (const std::exception& e) {
        throw ConfigError(cfg.origin, line_of(file_key), file_key, e.what());
      }
    }
    return builtin_bracket(src.builtin);
  };

  Bracket first = load(cfg.first, "bracket.file");
  std::optional<Bracket> second;
  if (cfg.second) second = load(*cfg.second, "bracket.second_file");

  auto check = [&](const Bracket& b, const std::string& label) {
    if (cfg.m && *cfg.m != b.m())
      throw ConfigError(cfg.origin, line_of("bracket.m"), "bracket.m",
                        "declared m = " + std::to_string(*cfg.m) + " but bracket '" + label +
                            "' has m = " + std::to_string(b.m()));
    if (cfg.k && *cfg.k != b.k())
      throw ConfigError(cfg.origin, line_of("bracket.k"), "bracket.k",
                        "declared k = " + std::to_string(*cfg.k) + " but bracket '" + label +
                            "' has k = " + std::to_string(b.k()));
  };
  check(first, cfg.first.label());
  if (second) {
    check(*second, cfg.second->label());
    if (second->m() != first.m() || second->k() != first.k()) {
      const std::string key = cfg.second->file.empty() ? "bracket.second" : "bracket.second_file";
      throw ConfigError(cfg.origin, line_of(key), key,
                        "second bracket has (m, k) = (" + std::to_string(second->m()) + ", " +
                            std::to_string(second->k()) + "), first has (" +
                            std::to_string(first.m()) + ", " + std::to_string(first.k()) + ")");
    }
  }
  return {std::move(first), std::move(second)};
}

std::vector<std::pair<std::string, std::string>> RunConfig::resolved() const {
  std::vector<std::pair<std::string, std::string>> out{
      {"bracket.first", first.file.empty() ? "builtin:" + first.builtin : "file:" + first.file},
      {"bracket.second",
       !second ? "none"
               : (second->file.empty() ? "builtin:" + second->builtin : "file:" + second->file)},
      {"bracket.m", m ? std::to_string(*m) : "auto"},
      {"bracket.k", k ? std::to_string(*k) : "auto"},
      {"cutoff.kind", "bump_product"},
      {"cutoff.r1sq", format_double(r1sq)},
      {"cutoff.r2sq", format_double(r2sq)},
      {"cutoff.amplitude", format_double(amplitude)},
      {"cutoff.s", format_double(s)},
      {"quadrature.method", to_string(quadrature.method)},
      {"quadrature.nodes", std::to_string(quadrature.n_nodes)},
      {"quadrature.replicates", std::to_string(quadrature.n_replicates)},
      {"quadrature.seed", std::to_string(quadrature.seed)},
      {"quadrature.preflight", quadrature.preflight ? "true" : "false"},
      {"sweep.s_list", join(s_list)},
      {"intertwine.band", std::to_string(intertwine.band)},
      {"intertwine.points", std::to_string(intertwine.n_points)},
      {"intertwine.seed", std::to_string(intertwine.point_seed)},
      {"intertwine.function_seed", std::to_string(intertwine.function_seed)},
      {"intertwine.tolerance", format_double(intertwine.tolerance)},
      {"intertwine.negative_factor", format_double(intertwine.negative_factor)},
      {"intertwine.negative_threshold", format_double(intertwine.negative_threshold)},
  };
  std::sort(out.begin(), out.end());
  return out;
}

std::string RunConfig::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& [key, value] : resolved()) {
    for (char c : key + "=" + value + "\n") {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001b3ULL;
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace isophasal
