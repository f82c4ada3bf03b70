// Batch driver: every library operation as a subcommand with JSON configs,
// machine-readable reports, and reproducible seeds.
//
// Exit codes: 0 pass, 1 identity-check failure, 2 config/precondition error.

#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include <ffc/suites.hpp>

namespace {

using ffc::json;

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitConfigError = 2;

struct CommonOpts {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> n;
  std::optional<std::size_t> grid;
  std::string out_path;
  std::string format = "json";
};

void add_common(CLI::App* cmd, CommonOpts& o, bool config_required = true) {
  auto* c = cmd->add_option("--config", o.config_path, "JSON config file");
  if (config_required) c->required();
  cmd->add_option("--seed", o.seed, "RNG seed override");
  cmd->add_option("--n", o.n, "Monte Carlo sample count override");
  cmd->add_option("--grid", o.grid, "grid size M override");
  cmd->add_option("--out", o.out_path, "output file (default: stdout or $FFC_OUT_DIR)");
  cmd->add_option("--format", o.format, "output format")
      ->check(CLI::IsMember({"json", "csv"}));
}

json load_config(const CommonOpts& o) {
  if (o.config_path.empty()) return json::object();
  std::ifstream in(o.config_path);
  if (!in) throw std::invalid_argument("cannot open config file: " + o.config_path);
  json cfg;
  try {
    in >> cfg;
  } catch (const std::exception& e) {
    throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
  }
  return cfg;
}

// schema guard: reject unknown fields so typos fail loudly instead of
// silently falling back to defaults
void require_fields(const json& cfg, const std::set<std::string>& allowed,
                    const std::set<std::string>& required) {
  if (!cfg.is_object()) throw std::invalid_argument("config must be a JSON object");
  for (const auto& [key, value] : cfg.items())
    if (!allowed.count(key)) throw std::invalid_argument("unknown config field '" + key + "'");
  for (const auto& key : required)
    if (!cfg.contains(key)) throw std::invalid_argument("missing config field '" + key + "'");
}

void write_report(const CommonOpts& o, const std::string& default_name, const std::string& body) {
  std::string path = o.out_path;
  if (path.empty()) {
    if (const char* dir = std::getenv("FFC_OUT_DIR")) path = std::string(dir) + "/" + default_name;
  }
  if (path.empty()) {
    std::cout << body << "\n";
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write output file: " + path);
  out << body << "\n";
}

struct GridSpec {
  double T = 1.0;
  std::size_t M = 256;
};

GridSpec grid_spec(const json& cfg, const CommonOpts& o) {
  GridSpec g;
  if (cfg.contains("T")) g.T = cfg["T"].get<double>();
  if (cfg.contains("M")) g.M = cfg["M"].get<std::size_t>();
  if (o.grid) g.M = *o.grid;
  return g;
}

ffc::Kernel cfg_kernel(const json& cfg, const char* name, const GridSpec& g) {
  if (!cfg.contains(name))
    throw std::invalid_argument(std::string("missing kernel field '") + name + "'");
  return ffc::Kernel::from_expr(cfg[name], g.T, g.M);
}

ffc::ExpCombo cfg_combo(const json& cfg, const char* name, const GridSpec& g) {
  if (!cfg.contains(name))
    throw std::invalid_argument(std::string("missing functional field '") + name + "'");
  return ffc::ExpCombo::from_json(cfg[name], g.T, g.M);
}

std::string timestamp_utc() {
  std::time_t now = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

// ----- subcommand bodies -----------------------------------------------------

int run_eval_fft(const CommonOpts& o) {
  json cfg = load_config(o);
  require_fields(cfg, {"T", "M", "F", "k", "param"}, {"F", "k", "param"});
  GridSpec g = grid_spec(cfg, o);
  auto out = ffc::fft_exp(cfg_combo(cfg, "F", g), cfg_kernel(cfg, "k", g),
                          ffc::TransformParam::from_json(cfg["param"]));
  write_report(o, "eval_fft.json",
               json{{"T", g.T}, {"M", g.M}, {"result", out.to_json()}}.dump(2));
  return kExitPass;
}

int run_eval_cto(const CommonOpts& o) {
  json cfg = load_config(o);
  require_fields(cfg, {"T", "M", "F", "G", "g1", "g2", "h1", "h2", "param"},
                 {"F", "G", "g1", "g2", "h1", "h2", "param"});
  GridSpec g = grid_spec(cfg, o);
  ffc::CtoSpec spec{cfg_kernel(cfg, "g1", g), cfg_kernel(cfg, "g2", g),
                    cfg_kernel(cfg, "h1", g), cfg_kernel(cfg, "h2", g)};
  auto out = ffc::cto_exp(cfg_combo(cfg, "F", g), cfg_combo(cfg, "G", g), spec,
                          ffc::TransformParam::from_json(cfg["param"]));
  write_report(o, "eval_cto.json",
               json{{"T", g.T}, {"M", g.M}, {"result", out.to_json()}}.dump(2));
  return kExitPass;
}

int run_verify_rotation(const CommonOpts& o, bool three_paths) {
  json cfg = load_config(o);
  require_fields(cfg, {"T", "M", "h1", "h2", "h3", "h4", "functional", "seed", "n"},
                 {"h1", "h2", "h3", "h4"});
  GridSpec g = grid_spec(cfg, o);
  ffc::RotationCase rc{cfg_kernel(cfg, "h1", g), cfg_kernel(cfg, "h2", g),
                       cfg_kernel(cfg, "h3", g), cfg_kernel(cfg, "h4", g)};
  std::uint64_t seed = o.seed ? *o.seed : (cfg.contains("seed") ? cfg["seed"].get<std::uint64_t>() : 20240811);
  std::size_t n = o.n ? *o.n : (cfg.contains("n") ? cfg["n"].get<std::size_t>() : 20000);
  auto battery = ffc::suites::battery_2d(g.T, g.M);
  std::size_t fi = cfg.contains("functional") ? cfg["functional"].get<std::size_t>() : 0;
  if (fi >= battery.size()) throw std::invalid_argument("functional index out of range");
  ffc::PathSampler sampler(seed, g.M, g.T);
  ffc::RotationReport rep = three_paths ? ffc::verify_rotation_3d(rc, battery[fi], sampler, n)
                                        : ffc::verify_rotation_2d(rc, battery[fi], sampler, n);
  write_report(o, three_paths ? "rotation3d.json" : "rotation2d.json", rep.to_json().dump(2));
  return rep.pass ? kExitPass : kExitFail;
}

int run_verify_factorization(const CommonOpts& o, bool transform_of_cto) {
  json cfg = load_config(o);
  require_fields(cfg, {"T", "M", "draws", "seed"}, {});
  GridSpec g = grid_spec(cfg, o);
  std::size_t draws = cfg.contains("draws") ? cfg["draws"].get<std::size_t>() : 10;
  std::uint64_t seed = o.seed ? *o.seed : (cfg.contains("seed") ? cfg["seed"].get<std::uint64_t>() : 20240811);
  json rows = json::array();
  bool all = true;
  for (std::size_t i = 0; i < draws; ++i) {
    auto r = transform_of_cto
                 ? ffc::suites::draw_fft_of_cto_factorization(seed + i, g.T, g.M)
                 : ffc::suites::draw_cto_of_ffts_factorization(seed + i, g.T, g.M);
    all = all && r.pass;
    rows.push_back(json{{"draw", i},
                        {"q", r.q},
                        {"pass", r.pass},
                        {"max_coeff_rel", r.diff.max_coeff_rel},
                        {"max_kernel_abs", r.diff.max_kernel_abs}});
  }
  write_report(o, transform_of_cto ? "thm52.json" : "thm54.json",
               json{{"draws", draws}, {"seed", seed}, {"pass", all}, {"results", rows}}.dump(2));
  return all ? kExitPass : kExitFail;
}

int run_verify_composed(const CommonOpts& o) {
  json cfg = load_config(o);
  require_fields(cfg, {"system", "F", "G", "q", "T", "M"}, {"system", "F", "G", "q"});
  ffc::KernelSystem sys = ffc::KernelSystem::from_json(cfg["system"]);
  GridSpec g{sys.g1.T(), sys.g1.M()};
  auto rep = ffc::verify_composed_identity(sys, cfg_combo(cfg, "F", g), cfg_combo(cfg, "G", g),
                                           cfg["q"].get<double>());
  write_report(o, "composed.json", rep.to_json().dump(2));
  return rep.pass ? kExitPass : kExitFail;
}

int run_check_system(const CommonOpts& o) {
  json cfg = load_config(o);
  require_fields(cfg, {"system", "tol"}, {"system"});
  ffc::KernelSystem sys = ffc::KernelSystem::from_json(cfg["system"]);
  double tol = cfg.contains("tol") ? cfg["tol"].get<double>() : ffc::default_system_tol(sys);
  auto rep = ffc::check_system(sys, tol);
  write_report(o, "check_system.json", rep.to_json().dump(2));
  return rep.pass() ? kExitPass : kExitFail;
}

ffc::SupportSet cfg_intervals(const json& j) {
  std::vector<ffc::Interval> iv;
  if (j.is_array() && j.size() == 2 && j[0].is_number())
    iv.push_back({j[0].get<double>(), j[1].get<double>()});
  else
    for (const auto& e : j) iv.push_back({e[0].get<double>(), e[1].get<double>()});
  return ffc::SupportSet(std::move(iv));
}

int run_gen_trig(const CommonOpts& o) {
  json cfg = load_config(o);
  require_fields(cfg, {"T", "M", "g1", "g2", "k", "A", "B"}, {"g1", "g2", "k", "A", "B"});
  GridSpec g = grid_spec(cfg, o);
  ffc::KernelSystem sys =
      ffc::generate_family_trig(cfg_kernel(cfg, "g1", g), cfg_kernel(cfg, "g2", g),
                                cfg_kernel(cfg, "k", g), cfg_intervals(cfg["A"]),
                                cfg_intervals(cfg["B"]));
  auto rep = ffc::check_system(sys);
  write_report(o, "gen_trig.json",
               json{{"system", sys.to_json()}, {"check", rep.to_json()}}.dump(2));
  return rep.pass() ? kExitPass : kExitFail;
}

int run_gen_haar(const CommonOpts& o) {
  json cfg = load_config(o);
  require_fields(cfg, {"T", "M", "g1", "g2", "k", "n_terms", "depths"}, {"g1", "g2", "k"});
  GridSpec g = grid_spec(cfg, o);
  ffc::Kernel g1 = cfg_kernel(cfg, "g1", g);
  ffc::Kernel g2 = cfg_kernel(cfg, "g2", g);
  ffc::Kernel k = cfg_kernel(cfg, "k", g);
  if (o.format == "csv") {
    // residual sequence over a range of truncation depths
    std::vector<std::size_t> depths;
    if (cfg.contains("depths"))
      for (const auto& d : cfg["depths"]) depths.push_back(d.get<std::size_t>());
    else
      depths = {2, 4, 8, 16, 32};
    std::ostringstream csv;
    csv << "n_terms,trunc_residual_A1,trunc_residual_A2,trunc_residual_B1,trunc_residual_B2,"
           "parseval_residual_1,parseval_residual_2\n";
    for (std::size_t d : depths) {
      auto rep = ffc::generate_family_haar(g1, g2, k, d);
      csv << d << "," << rep.trunc_residual_A[0] << "," << rep.trunc_residual_A[1] << ","
          << rep.trunc_residual_B[0] << "," << rep.trunc_residual_B[1] << ","
          << rep.parseval_residual[0] << "," << rep.parseval_residual[1] << "\n";
    }
    write_report(o, "gen_haar.csv", csv.str());
    return kExitPass;
  }
  std::size_t n_terms = cfg.contains("n_terms") ? cfg["n_terms"].get<std::size_t>() : 16;
  auto rep = ffc::generate_family_haar(g1, g2, k, n_terms);
  write_report(o, "gen_haar.json", rep.to_json().dump(2));
  return kExitPass;
}

int run_suite_cmd(const std::string& name, const CommonOpts& o) {
  json cfg = load_config(o);
  require_fields(cfg, {"T", "M", "seed", "n"}, {});
  ffc::suites::SuiteParams sp;
  if (cfg.contains("T")) sp.T = cfg["T"].get<double>();
  if (cfg.contains("M")) sp.M = cfg["M"].get<std::size_t>();
  if (cfg.contains("seed")) sp.seed = cfg["seed"].get<std::uint64_t>();
  if (cfg.contains("n")) sp.n = cfg["n"].get<std::size_t>();
  if (o.seed) sp.seed = *o.seed;
  if (o.n) sp.n = *o.n;
  if (o.grid) sp.M = *o.grid;
  auto result = ffc::suites::run_suite(name, sp);
  if (o.format == "csv") {
    std::ostringstream csv;
    csv << "check,pass\n";
    for (const auto& c : result.checks) csv << c.name << "," << (c.pass ? 1 : 0) << "\n";
    write_report(o, "suite_" + name + ".csv", csv.str());
  } else {
    write_report(o, "suite_" + name + ".json", result.to_json(timestamp_utc()).dump(2));
  }
  return result.pass() ? kExitPass : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fourier-Feynman transform / convolution verification driver"};
  app.require_subcommand(1);

  CommonOpts eval_fft_o, eval_cto_o, rot2_o, rot3_o, t52_o, t54_o, comp_o, chk_o, trig_o,
      haar_o, suite_o;
  std::string suite_name;

  auto* eval = app.add_subcommand("eval", "evaluate closed-form operations");
  eval->require_subcommand(1);
  add_common(eval->add_subcommand("fft", "transform of an exponential combination"), eval_fft_o);
  add_common(eval->add_subcommand("cto", "convolution of exponential combinations"), eval_cto_o);

  auto* verify = app.add_subcommand("verify", "verify identities");
  verify->require_subcommand(1);
  add_common(verify->add_subcommand("rotation2d", "two-path rotation identity"), rot2_o);
  add_common(verify->add_subcommand("rotation3d", "three-path rotation identity"), rot3_o);
  add_common(verify->add_subcommand("thm52", "transform-of-convolution factorization"), t52_o,
             false);
  add_common(verify->add_subcommand("thm54", "convolution-of-transforms factorization"), t54_o,
             false);
  add_common(verify->add_subcommand("composed", "composed transform/convolution identity"),
             comp_o);

  auto* check = app.add_subcommand("check", "check kernel systems");
  check->require_subcommand(1);
  add_common(check->add_subcommand("system", "compatibility conditions (i)-(iv)"), chk_o);

  auto* gen = app.add_subcommand("gen", "generate kernel systems");
  gen->require_subcommand(1);
  add_common(gen->add_subcommand("trig", "partition-based family"), trig_o);
  add_common(gen->add_subcommand("haar", "dyadic series family with diagnostics"), haar_o);

  auto* suite = app.add_subcommand("suite", "run a built-in verification suite");
  suite->add_option("name", suite_name, "suite name")->required();
  add_common(suite, suite_o, false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (eval->got_subcommand("fft")) return run_eval_fft(eval_fft_o);
    if (eval->got_subcommand("cto")) return run_eval_cto(eval_cto_o);
    if (verify->parsed()) {
      if (verify->got_subcommand("rotation2d")) return run_verify_rotation(rot2_o, false);
      if (verify->got_subcommand("rotation3d")) return run_verify_rotation(rot3_o, true);
      if (verify->got_subcommand("thm52")) return run_verify_factorization(t52_o, true);
      if (verify->got_subcommand("thm54")) return run_verify_factorization(t54_o, false);
      if (verify->got_subcommand("composed")) return run_verify_composed(comp_o);
    }
    if (check->parsed()) return run_check_system(chk_o);
    if (gen->parsed()) {
      if (gen->got_subcommand("trig")) return run_gen_trig(trig_o);
      if (gen->got_subcommand("haar")) return run_gen_haar(haar_o);
    }
    if (suite->parsed()) return run_suite_cmd(suite_name, suite_o);
    std::cerr << "no subcommand executed\n";
    return kExitConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
}
