// isophasal <command> --config <path> [--nodes N] [--seed S] [--s-list 1,2,4] [--out DIR]

#include "isophasal/bracket.hpp"
#include "isophasal/config.hpp"
#include "isophasal/coord_oracle.hpp"
#include "isophasal/heat_invariant.hpp"
#include "isophasal/intertwine.hpp"
#include "isophasal/test_function.hpp"
#include "isophasal/validation.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace {

using isophasal::Bracket;
using isophasal::RunConfig;
using json = nlohmann::ordered_json;

constexpr int kOk = 0;
constexpr int kToleranceFailure = 1;
constexpr int kConfigError = 2;

class Emitter {
 public:
  Emitter(const RunConfig& cfg, const std::string& command) : cfg_(cfg) {
    std::filesystem::create_directories(cfg.out_dir);
    path_ = (std::filesystem::path(cfg.out_dir) / (command + ".jsonl")).string();
    out_.open(path_, std::ios::trunc);
    if (!out_) throw std::runtime_error("cannot write " + path_);
  }

  void emit(json record, std::uint64_t seed) {
    record["seed"] = seed;
    record["config_hash"] = cfg_.hash();
    const std::string line = record.dump();
    std::cout << line << '\n';
    out_ << line << '\n';
  }

  bool check(bool ok) {
    all_ok_ = all_ok_ && ok;
    return ok;
  }
  int status() const { return all_ok_ ? kOk : kToleranceFailure; }

 private:
  const RunConfig& cfg_;
  std::string path_;
  std::ofstream out_;
  bool all_ok_ = true;
};

std::vector<Eigen::VectorXd> fingerprint_grid(int k) {
  std::vector<Eigen::VectorXd> grid;
  for (int mask = 1; mask < (1 << k) && mask < 64; ++mask) {
    Eigen::VectorXd z = Eigen::VectorXd::Zero(k);
    for (int p = 0; p < k; ++p)
      if (mask & (1 << p)) z[p] = 1.0 + 0.5 * p;
    grid.push_back(z);
  }
  return grid;
}

struct Named {
  std::string name;
  Bracket bracket;
};

std::vector<Named> brackets_under_test(const RunConfig& cfg) {
  auto [first, second] = isophasal::resolve_brackets(cfg);
  if (second) return {{cfg.first.label(), first}, {cfg.second->label(), *second}};
  std::vector<Named> out;
  for (const char* name : {"cross1", "cross2", "quaternion"})
    out.push_back({name, isophasal::builtin_bracket(name)});
  return out;
}

int run_brackets(const RunConfig& cfg) {
  Emitter em(cfg, "brackets");
  const auto items = brackets_under_test(cfg);
  const std::uint64_t seed = cfg.quadrature.seed;
  std::vector<std::vector<double>> prints;
  for (const auto& it : items) {
    const auto fp = isophasal::equivalence_invariants(it.bracket, fingerprint_grid(it.bracket.k()));
    prints.push_back(fp);
    em.emit({{"record", "bracket"},
             {"name", it.name},
             {"m", it.bracket.m()},
             {"k", it.bracket.k()},
             {"centralizer_dim", isophasal::centralizer_dim(it.bracket)},
             {"trace_invariants", std::vector<double>(fp.begin() + 1, fp.begin() + 5)},
             {"fingerprint_size", fp.size()}},
            seed);
  }
  for (std::size_t a = 0; a < items.size(); ++a)
    for (std::size_t b = a + 1; b < items.size(); ++b) {
      const auto rep =
          isophasal::check_isospectral(items[a].bracket, items[b].bracket, 100, 1e-10, seed);
      em.check(rep.isospectral);
      em.emit({{"record", "pair"},
               {"a", items[a].name},
               {"b", items[b].name},
               {"isospectral", rep.isospectral},
               {"max_deviation", rep.max_deviation},
               {"n_checked", rep.n_checked},
               {"fingerprints_match", isophasal::fingerprints_match(prints[a], prints[b])}},
              seed);
    }
  return em.status();
}

json quadrature_record(const std::string& name, const isophasal::QuadratureResult& r, double s,
                       const RunConfig& cfg) {
  return {{"record", "a2"},
          {"bracket", name},
          {"s", s},
          {"a2", r.value},
          {"stderr", r.std_error},
          {"n_nodes", r.n_nodes},
          {"n_replicates", cfg.quadrature.n_replicates},
          {"method", isophasal::to_string(cfg.quadrature.method)},
          {"active_fraction",
           r.n_total ? static_cast<double>(r.n_active) / static_cast<double>(r.n_total) : 0.0},
          {"replicates", r.replicate_values}};
}

int run_a2(const RunConfig& cfg) {
  Emitter em(cfg, "a2");
  auto [first, second] = isophasal::resolve_brackets(cfg);
  const auto profile = cfg.profile();
  const auto r1 = isophasal::integrate_a2(first, profile, cfg.quadrature);
  em.emit(quadrature_record(cfg.first.label(), r1, cfg.s, cfg), cfg.quadrature.seed);
  if (second) {
    const auto rep = isophasal::isophasal_consistency(first, *second, profile, cfg.quadrature);
    em.emit(quadrature_record(cfg.second->label(), rep.second, cfg.s, cfg), cfg.quadrature.seed);
    em.check(rep.consistent);
    em.emit({{"record", "a2_consistency"},
             {"a", cfg.first.label()},
             {"b", cfg.second->label()},
             {"difference", rep.difference},
             {"combined_error", rep.combined_error},
             {"consistent", rep.consistent}},
            cfg.quadrature.seed);
  }
  return em.status();
}

int run_sweep(const RunConfig& cfg) {
  Emitter em(cfg, "sweep");
  const Bracket b = isophasal::resolve_brackets(cfg).first;
  const auto res = isophasal::sweep_s(b, cfg.profile(), cfg.s_list, cfg.quadrature);
  const auto csv_path = std::filesystem::path(cfg.out_dir) / "sweep.csv";
  std::ofstream csv(csv_path, std::ios::trunc);
  csv << "s,a2,stderr,n_nodes,seed,config_hash\n";
  for (const auto& row : res.rows) {
    em.emit(quadrature_record(cfg.first.label(), row.result, row.s, cfg), row.result.seed);
    csv << json(row.s).dump() << ',' << json(row.result.value).dump() << ','
        << json(row.result.std_error).dump() << ',' << row.result.n_nodes << ','
        << row.result.seed << ',' << cfg.hash() << '\n';
  }
  const auto& fit = res.fit;
  const bool ok = fit.residual < 0.05 && fit.leading > 0.0 && fit.leading > 3.0 * fit.leading_error;
  em.check(ok);
  em.emit({{"record", "sweep_fit"},
           {"bracket", cfg.first.label()},
           {"degrees", fit.degrees},
           {"coeffs", fit.coeffs},
           {"coeff_errors", fit.coeff_errors},
           {"residual", fit.residual},
           {"leading_degree", fit.leading_degree},
           {"leading", fit.leading},
           {"leading_error", fit.leading_error},
           {"pass", ok}},
          cfg.quadrature.seed);
  return em.status();
}

int run_intertwine(const RunConfig& cfg) {
  Emitter em(cfg, "intertwine");
  auto [first, second] = isophasal::resolve_brackets(cfg);
  std::vector<Named> partners;
  if (second) {
    partners.push_back({cfg.second->label(), *second});
  } else if (cfg.first.file.empty() && cfg.first.builtin == "cross1") {
    partners.push_back({"cross2", isophasal::builtin_bracket("cross2")});
    partners.push_back({"quaternion", isophasal::builtin_bracket("quaternion")});
  } else {
    throw isophasal::ConfigError(cfg.origin, 0, "bracket.second",
                                 "intertwine needs a second bracket unless the first is cross1");
  }

  const auto& st = cfg.intertwine;
  const auto profile = cfg.profile();
  const auto tests = isophasal::standard_test_set(first.m(), first.k(), st.function_seed);
  const auto points =
      isophasal::interior_points(first.m(), first.k(), profile, st.n_points, st.point_seed);
  const auto scheme = isophasal::laplacian_scheme(profile);

  auto report = [&](const std::string& pair, const isophasal::IntertwineReport& r, bool ok) {
    em.emit({{"record", "intertwine"},
             {"pair", pair},
             {"N", r.band},
             {"n_points", r.n_points},
             {"n_functions", r.n_functions},
             {"max_residual", r.max_residual},
             {"truncation_tail", r.truncation_tail},
             {"max_conjugation_residual", r.max_conjugation_residual},
             {"pass", ok}},
            st.point_seed);
  };

  for (const auto& partner : partners) {
    const auto q = isophasal::IntertwiningOperator::between(first, partner.bracket, st.band);
    const auto r =
        isophasal::intertwine_residual(q, first, partner.bracket, profile, tests, points, scheme);
    report(cfg.first.label() + "," + partner.name, r, em.check(r.max_residual <= st.tolerance));
  }
  if (st.negative_factor > 0.0) {
    const Bracket bad = isophasal::block_scaled(partners.front().bracket, st.negative_factor);
    const auto q = isophasal::IntertwiningOperator::aligned_unchecked(first, bad, st.band);
    const auto r = isophasal::intertwine_residual(q, first, bad, profile, tests, points, scheme);
    report(cfg.first.label() + ",scaled(" + partners.front().name + ")", r,
           em.check(r.max_residual > st.negative_threshold));
  }
  return em.status();
}

int run_validate(const RunConfig& cfg) {
  Emitter em(cfg, "validate");
  const std::uint64_t seed = cfg.quadrature.seed;
  const auto profile = cfg.profile();

  const auto known = isophasal::validate_known(isophasal::FDScheme{}, 1e-5);
  em.emit({{"record", "oracle_self_test"},
           {"max_error", known.max_error},
           {"n_points", known.n_points},
           {"pass", em.check(known.passed)}},
          seed);

  const auto items = brackets_under_test(cfg);
  const int m = items.front().bracket.m();
  const int k = items.front().bracket.k();
  const auto flat = isophasal::flatness_check(profile, m, k, 100, seed);
  em.emit({{"record", "flatness"},
           {"max_riem", flat.max_riem},
           {"n_points", flat.n_points},
           {"pass", em.check(flat.max_riem <= 1e-9)}},
          seed);

  const auto scheme = isophasal::FDScheme::defaults(profile);
  for (const auto& it : items) {
    const auto mv = isophasal::metric_validity(it.bracket, profile, 1000, seed);
    em.emit({{"record", "metric"},
             {"bracket", it.name},
             {"max_det_error", mv.max_det_error},
             {"max_outside_error", mv.max_outside_error},
             {"n_points", mv.n_points},
             {"n_outside", mv.n_outside},
             {"pass", em.check(mv.max_det_error <= 1e-12 && mv.max_outside_error == 0.0)}},
            seed);
    const auto cmp = isophasal::compare_with_oracle(it.bracket, profile, 20, seed, scheme);
    em.emit({{"record", "frame_vs_oracle"},
             {"bracket", it.name},
             {"tau_error", cmp.tau_error},
             {"ric_error", cmp.ric_error},
             {"riem_error", cmp.riem_error},
             {"symmetry_residual", cmp.symmetry_residual},
             {"n_points", cmp.n_points},
             {"pass", em.check(cmp.max_error() <= 1e-4 && cmp.symmetry_residual <= 1e-9)}},
            seed);
  }
  return em.status();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Isospectral bracket metrics: curvature, heat invariant and intertwining checks"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::size_t> nodes;
  std::optional<int> replicates;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> s_list;
  std::optional<std::string> out_dir;

  std::string command;
  for (const char* name : {"brackets", "a2", "sweep", "intertwine", "validate"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "configuration file");
    sub->add_option("--nodes", nodes, "quadrature nodes per replicate");
    sub->add_option("--replicates", replicates, "quadrature replicates");
    sub->add_option("--seed", seed, "quadrature seed");
    sub->add_option("--s-list", s_list, "comma-separated scales for the sweep");
    sub->add_option("--out", out_dir, "output directory");
    sub->callback([&command, name] { command = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }

  RunConfig cfg;
  try {
    if (!config_path.empty()) cfg = isophasal::load_config(config_path);
    cfg.origin = config_path.empty() ? "<defaults>" : config_path;
    if (nodes) isophasal::apply_setting(cfg, "quadrature.nodes", std::to_string(*nodes), 0);
    if (replicates)
      isophasal::apply_setting(cfg, "quadrature.replicates", std::to_string(*replicates), 0);
    if (seed) isophasal::apply_setting(cfg, "quadrature.seed", std::to_string(*seed), 0);
    if (s_list) isophasal::apply_setting(cfg, "sweep.s_list", *s_list, 0);
    if (out_dir) isophasal::apply_setting(cfg, "output.dir", *out_dir, 0);
    isophasal::resolve_brackets(cfg);
  } catch (const isophasal::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  }

  try {
    if (command == "brackets") return run_brackets(cfg);
    if (command == "a2") return run_a2(cfg);
    if (command == "sweep") return run_sweep(cfg);
    if (command == "intertwine") return run_intertwine(cfg);
    return run_validate(cfg);
  } catch (const isophasal::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << command << " failed: " << e.what() << '\n';
    return kToleranceFailure;
  }
}
