#include "reeftip_cli.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "reeftip/experiments.hpp"
#include "reeftip/folded.hpp"
#include "reeftip/integrate.hpp"
#include "reeftip/io.hpp"
#include "reeftip/manifold.hpp"
#include "reeftip/model.hpp"
#include "reeftip/params.hpp"

namespace reeftip::cli {
namespace {

using nlohmann::json;

constexpr const char* kUsage =
    "usage: reeftip <analyze|classify|simulate|sweep|rcrit|resurgence|limit-check> [flags]\n";

struct RunConfig {
  // model
  double beta = 0.2;
  double lambda = 0.2;
  double d = 0.22;
  double eps = 0.01;

  // ramp
  double r = 4e-3;
  double delta = 0.01;
  double alpha_max = 0.0;  // explicit clamp, active under rule "explicit"
  std::string alpha_max_rule = "min-plus-star";
  double tau_max = 0.0;  // 0 = automatic

  // operating points
  double alpha = 0.0;  // 0 = subcommand default
  double reset_alpha = 0.01;
  std::string eps_list = "0.01,0.005,0.0025";

  // sweep lattice
  int grid = 0;  // 0 = mode default (200 classify-only, 50 simulate)
  double beta_min = 0.05, beta_max = 0.95;
  double lambda_min = 0.05, lambda_max = 0.95;
  std::string mode = "classify-only";

  // solver
  double rtol = 1e-8;
  double atol = 1e-10;
  double max_step = 0.0;  // 0 = unbounded

  // I/O and execution
  std::string out;
  std::string events_out;
  int jobs = 0;
  unsigned seed = 0;
  std::string config_path;
  std::string config_command;  // optional "command" key, checked against argv

  // set while loading a config file so flag/rule precedence can be resolved
  bool cap_from_config = false;
  bool rule_from_config = false;
};

std::optional<std::string> find_config_path(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    std::string a = argv[i];
    if (a == "--config") {
      if (i + 1 >= argc) throw invalid_parameter("--config requires a file path");
      return std::string(argv[i + 1]);
    }
    if (a.rfind("--config=", 0) == 0) return a.substr(9);
  }
  return std::nullopt;
}

void apply_config_file(RunConfig& rc, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw invalid_parameter("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw invalid_parameter("config parse error in " + path + ": " + e.what());
  }
  if (!j.is_object()) throw invalid_parameter("config must be a flat JSON object: " + path);

  for (const auto& [key, val] : j.items()) {
    auto num = [&](double& slot) {
      if (!val.is_number()) throw invalid_parameter("config key '" + key + "' must be a number");
      slot = val.get<double>();
    };
    auto integer = [&](int& slot) {
      if (!val.is_number_integer())
        throw invalid_parameter("config key '" + key + "' must be an integer");
      slot = val.get<int>();
    };
    auto str = [&](std::string& slot) {
      if (!val.is_string()) throw invalid_parameter("config key '" + key + "' must be a string");
      slot = val.get<std::string>();
    };
    if (key == "beta") num(rc.beta);
    else if (key == "lambda") num(rc.lambda);
    else if (key == "d") num(rc.d);
    else if (key == "eps") num(rc.eps);
    else if (key == "r") num(rc.r);
    else if (key == "delta") num(rc.delta);
    else if (key == "alpha-max") { num(rc.alpha_max); rc.cap_from_config = true; }
    else if (key == "alpha-max-rule") { str(rc.alpha_max_rule); rc.rule_from_config = true; }
    else if (key == "tau-max") num(rc.tau_max);
    else if (key == "alpha") num(rc.alpha);
    else if (key == "reset-alpha") num(rc.reset_alpha);
    else if (key == "eps-list") str(rc.eps_list);
    else if (key == "grid") integer(rc.grid);
    else if (key == "beta-min") num(rc.beta_min);
    else if (key == "beta-max") num(rc.beta_max);
    else if (key == "lambda-min") num(rc.lambda_min);
    else if (key == "lambda-max") num(rc.lambda_max);
    else if (key == "mode") str(rc.mode);
    else if (key == "rtol") num(rc.rtol);
    else if (key == "atol") num(rc.atol);
    else if (key == "max-step") num(rc.max_step);
    else if (key == "out") str(rc.out);
    else if (key == "events-out") str(rc.events_out);
    else if (key == "jobs") integer(rc.jobs);
    else if (key == "seed") {
      if (!val.is_number_integer() || val.get<long long>() < 0)
        throw invalid_parameter("config key 'seed' must be a nonnegative integer");
      rc.seed = static_cast<unsigned>(val.get<long long>());
    } else if (key == "command") str(rc.config_command);
    else throw invalid_parameter("unknown config key: " + key);
  }
}

void add_common_flags(CLI::App* cmd, RunConfig& rc) {
  cmd->add_option("--beta", rc.beta, "coral mortality to growth ratio");
  cmd->add_option("--lambda", rc.lambda, "grazing pressure ratio");
  cmd->add_option("--d", rc.d, "minimum per-capita feeding rate");
  cmd->add_option("--eps", rc.eps, "timescale separation");
  cmd->add_option("--r", rc.r, "slow ramp rate of the fishing level");
  cmd->add_option("--delta", rc.delta,
                  "ramp margin: start at d+delta, clamp delta short of the rule threshold");
  cmd->add_option("--alpha-max", rc.alpha_max,
                  "explicit ramp clamp (implies --alpha-max-rule explicit)");
  cmd->add_option("--alpha-max-rule", rc.alpha_max_rule,
                  "ramp clamp rule: min-plus-star | plus | explicit");
  cmd->add_option("--tau-max", rc.tau_max, "slow-time horizon override (0 = automatic)");
  cmd->add_option("--alpha", rc.alpha, "operating fishing level (analyze, limit-check)");
  cmd->add_option("--reset-alpha", rc.reset_alpha, "post-collapse fishing level (resurgence)");
  cmd->add_option("--eps-list", rc.eps_list, "comma-separated epsilon values (limit-check)");
  cmd->add_option("--grid", rc.grid, "sweep lattice points per axis (0 = mode default)");
  cmd->add_option("--beta-min", rc.beta_min, "sweep beta range lower edge");
  cmd->add_option("--beta-max", rc.beta_max, "sweep beta range upper edge");
  cmd->add_option("--lambda-min", rc.lambda_min, "sweep lambda range lower edge");
  cmd->add_option("--lambda-max", rc.lambda_max, "sweep lambda range upper edge");
  cmd->add_option("--mode", rc.mode, "sweep mode: classify-only | simulate");
  cmd->add_option("--rtol", rc.rtol, "relative solver tolerance");
  cmd->add_option("--atol", rc.atol, "absolute solver tolerance");
  cmd->add_option("--max-step", rc.max_step, "fast-time step cap (0 = unbounded)");
  cmd->add_option("--out", rc.out, "primary output path");
  cmd->add_option("--events-out", rc.events_out, "events JSON path (default: out + .events.json)");
  cmd->add_option("--jobs", rc.jobs, "worker threads (0 = REEFTIP_JOBS or hardware count)");
  cmd->add_option("--seed", rc.seed, "seed reserved for randomised harnesses");
  cmd->add_option("--config", rc.config_path,
                  "flat JSON config mirroring these flags; flags override the file");
}

ModelParams make_params(const RunConfig& rc) {
  ModelParams p{rc.lambda, rc.beta, rc.d, rc.eps};
  for (const auto& w : p.validate()) std::cerr << "warning: " << w << "\n";
  return p;
}

AlphaMaxRule parse_rule(const std::string& s) {
  if (s == "min-plus-star") return AlphaMaxRule::MinPlusStar;
  if (s == "plus") return AlphaMaxRule::Plus;
  if (s == "explicit") return AlphaMaxRule::Explicit;
  throw invalid_parameter("unknown --alpha-max-rule: " + s +
                          " (expected min-plus-star | plus | explicit)");
}

RampConfig make_ramp(const RunConfig& rc) {
  RampConfig ramp;
  ramp.r = rc.r;
  ramp.delta = rc.delta;
  ramp.alpha_max_rule = parse_rule(rc.alpha_max_rule);
  ramp.alpha_max_explicit = rc.alpha_max;
  return ramp;
}

IntegratorConfig make_solver(const RunConfig& rc) {
  IntegratorConfig cfg;
  cfg.rtol = rc.rtol;
  cfg.atol = rc.atol;
  if (rc.max_step > 0.0) cfg.max_step = rc.max_step;
  return cfg;
}

std::string events_path(const RunConfig& rc, const std::string& out) {
  if (!rc.events_out.empty()) return rc.events_out;
  std::string base = out;
  if (base.size() >= 4 && base.compare(base.size() - 4, 4, ".csv") == 0)
    base.resize(base.size() - 4);
  return base + ".events.json";
}

std::vector<double> parse_eps_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &pos);
    } catch (const std::exception&) {
      throw invalid_parameter("bad epsilon value in --eps-list: '" + tok + "'");
    }
    while (pos < tok.size() && std::isspace(static_cast<unsigned char>(tok[pos]))) ++pos;
    if (pos != tok.size())
      throw invalid_parameter("bad epsilon value in --eps-list: '" + tok + "'");
    if (!(v > 0.0)) throw invalid_parameter("--eps-list values must be positive");
    out.push_back(v);
  }
  if (out.empty()) throw invalid_parameter("--eps-list is empty");
  return out;
}

json equilibrium_json(const EquilibriumInfo& e) {
  return json{{"H", e.state[0]},
              {"A", e.state[1]},
              {"C", e.state[2]},
              {"branch", branch_name(e.branch)},
              {"relevant", e.relevant},
              {"reduced", reduced_stability_name(e.reduced)}};
}

json thresholds_json(const ThresholdSet& t) {
  return json{{"alpha_plus", t.alpha_plus}, {"alpha_star", t.alpha_star},
              {"alpha_hat", t.alpha_hat},   {"H_hat", t.H_hat},
              {"H_I", t.H_I},               {"ordering", ordering_name(t.ordering)}};
}

json singularity_json(const FoldedSingularity& fs) {
  json j{{"H_FS", fs.H_FS},
         {"alpha_FS", fs.alpha_FS},
         {"kind", folded_kind_name(fs.kind)},
         {"trJ", fs.trJ},
         {"detJ", fs.detJ},
         {"Delta", fs.Delta},
         {"relevant", fs.relevant},
         {"boundary_warning", fs.boundary_warning}};
  j["eigenvalues"] = json::array({json::array({fs.eigenvalues[0].real(), fs.eigenvalues[0].imag()}),
                                  json::array({fs.eigenvalues[1].real(), fs.eigenvalues[1].imag()})});
  if (fs.kind == FoldedKind::Node) {
    j["mu"] = fs.mu;
    j["sectors"] = fs.sectors;
  }
  return j;
}

int cmd_analyze(const RunConfig& rc) {
  ModelParams p = make_params(rc);
  double alpha = rc.alpha > 0.0 ? rc.alpha : p.d + rc.delta;
  ReducedFlowRegime reg = reduced_flow_regime(alpha, p);
  const ThresholdSet& t = reg.thresholds;

  json j;
  j["beta"] = p.beta;
  j["lambda"] = p.lambda;
  j["d"] = p.d;
  j["alpha"] = alpha;
  j["thresholds"] = thresholds_json(t);
  j["regime_item"] = reg.item;
  j["H_0"] = fold_point(alpha, p);
  json eqs = json::object();
  eqs["e0"] = equilibrium_json(reg.equilibria.e0);
  eqs["eC"] = equilibrium_json(reg.equilibria.eC);
  eqs["eA"] = equilibrium_json(reg.equilibria.eA);
  if (reg.equilibria.eI) eqs["eI"] = equilibrium_json(*reg.equilibria.eI);
  if (reg.equilibria.enC_r) eqs["enC_r"] = equilibrium_json(*reg.equilibria.enC_r);
  if (reg.equilibria.enC_a) eqs["enC_a"] = equilibrium_json(*reg.equilibria.enC_a);
  j["equilibria"] = eqs;

  if (rc.out.empty()) {
    std::cout << j.dump() << "\n";
  } else {
    std::ofstream os(rc.out);
    if (!os) throw invalid_parameter("cannot open output file: " + rc.out);
    os << j.dump(2) << "\n";
    std::cout << "analyze ordering=" << ordering_name(t.ordering) << " regime_item=" << reg.item
              << " alpha_hat=" << fmt17(t.alpha_hat) << " out=" << rc.out << "\n";
  }
  return 0;
}

int cmd_classify(const RunConfig& rc) {
  ModelParams p = make_params(rc);
  RegionResult res = region_classify(p, rc.r, rc.delta);

  std::ostringstream line;
  line << "region=" << region_name(res.label) << " regime_item=" << res.regime_item;
  if (res.thresholds) line << " ordering=" << ordering_name(res.thresholds->ordering);
  if (res.singularity) {
    const FoldedSingularity& fs = *res.singularity;
    line << " kind=" << folded_kind_name(fs.kind) << " H_FS=" << fmt17(fs.H_FS)
         << " alpha_FS=" << fmt17(fs.alpha_FS);
    if (fs.kind == FoldedKind::Node)
      line << " mu=" << fmt17(fs.mu) << " sectors=" << fs.sectors;
  }
  std::cout << line.str() << "\n";

  if (!rc.out.empty()) {
    json j;
    j["beta"] = p.beta;
    j["lambda"] = p.lambda;
    j["d"] = p.d;
    j["r"] = rc.r;
    j["region"] = region_name(res.label);
    j["regime_item"] = res.regime_item;
    if (res.thresholds) j["thresholds"] = thresholds_json(*res.thresholds);
    if (res.singularity) j["singularity"] = singularity_json(*res.singularity);
    std::ofstream os(rc.out);
    if (!os) throw invalid_parameter("cannot open output file: " + rc.out);
    os << j.dump(2) << "\n";
  }
  return 0;
}

int cmd_simulate(const RunConfig& rc) {
  ModelParams p = make_params(rc);
  RampConfig ramp = make_ramp(rc);
  ExperimentOptions opts;
  if (rc.tau_max > 0.0) opts.tau_max = rc.tau_max;
  TippingRun run = run_tipping_experiment(p, ramp, make_solver(rc), opts);

  std::string out = rc.out.empty() ? "trajectory.csv" : rc.out;
  write_trajectory_csv(out, run.trajectory);
  std::string ev = events_path(rc, out);
  write_events_json(ev, run.trajectory);

  const Outcome& oc = run.outcome;
  std::ostringstream line;
  line << "outcome=" << outcome_name(oc.label) << " alpha_end=" << fmt17(oc.alpha_end);
  if (oc.first_fold_tau)
    line << " fold_tau=" << fmt17(*oc.first_fold_tau)
         << " fold_alpha=" << fmt17(*oc.first_fold_alpha);
  if (oc.tip_tau)
    line << " tip_tau=" << fmt17(*oc.tip_tau) << " tip_alpha=" << fmt17(*oc.tip_alpha);
  line << " dwell_tau=" << fmt17(oc.dwell_tau) << " oscillations=" << oc.oscillations
       << " out=" << out << " events=" << ev;
  std::cout << line.str() << "\n";
  return oc.label == OutcomeLabel::Unresolved ? 3 : 0;
}

int cmd_sweep(const RunConfig& rc) {
  bool simulate = false;
  if (rc.mode == "simulate") simulate = true;
  else if (rc.mode != "classify-only")
    throw invalid_parameter("unknown --mode: " + rc.mode + " (expected classify-only | simulate)");

  int n = rc.grid > 0 ? rc.grid : (simulate ? 50 : 200);
  if (n < 2) throw invalid_parameter("--grid must be at least 2");
  if (!(rc.beta_min < rc.beta_max) || !(rc.lambda_min < rc.lambda_max))
    throw invalid_parameter("sweep ranges must satisfy min < max");

  std::vector<double> betas(n), lambdas(n);
  for (int i = 0; i < n; ++i) {
    double f = static_cast<double>(i) / (n - 1);
    betas[i] = rc.beta_min + (rc.beta_max - rc.beta_min) * f;
    lambdas[i] = rc.lambda_min + (rc.lambda_max - rc.lambda_min) * f;
  }

  SweepResult res =
      sweep_regime_map(betas, lambdas, rc.d, rc.eps, rc.r, simulate, rc.jobs, make_solver(rc));

  std::string out = rc.out.empty() ? "sweep.csv" : rc.out;
  write_sweep_csv(out, res);

  std::size_t counts[6] = {0, 0, 0, 0, 0, 0};
  std::size_t errors = 0;
  for (const SweepCell& c : res.cells) {
    counts[static_cast<int>(c.region)]++;
    if (!c.error.empty()) errors++;
  }
  std::cout << "sweep " << n << "x" << n << " mode=" << rc.mode << " I=" << counts[0]
            << " II=" << counts[1] << " IIIa=" << counts[2] << " IIIb=" << counts[3]
            << " boundary=" << counts[4] << " excluded=" << counts[5] << " errors=" << errors
            << " out=" << out << "\n";
  return 0;
}

int cmd_rcrit(const RunConfig& rc) {
  ModelParams p = make_params(rc);
  CriticalRateResult res = critical_rate(p);
  if (!res.found) {
    std::cout << "r_crit=none (no eigenvalue degeneracy for r in [1e-12, 0.1])\n";
    return 0;
  }
  std::cout << "r_crit=" << fmt17(res.r_crit) << " H_FS=" << fmt17(res.at.H_FS)
            << " alpha_FS=" << fmt17(res.at.alpha_FS) << " mu=" << fmt17(res.at.mu)
            << " sectors=" << res.at.sectors << "\n";
  return 0;
}

int cmd_resurgence(const RunConfig& rc) {
  ModelParams p = make_params(rc);
  RampConfig ramp = make_ramp(rc);
  ExperimentOptions opts;
  if (rc.tau_max > 0.0) opts.tau_max = rc.tau_max;
  ResurgenceResult res = resurgence_experiment(p, ramp, rc.reset_alpha, make_solver(rc), opts);

  std::string out = rc.out.empty() ? "resurgence.csv" : rc.out;
  write_trajectory_csv(out, res.trajectory);
  std::string ev = events_path(rc, out);
  write_events_json(ev, res.trajectory);

  std::ostringstream line;
  line << "resurgence tipped=" << (res.tipped ? "true" : "false");
  if (res.tipped) {
    line << " reset_tau=" << fmt17(res.reset_tau) << " reset_alpha=" << fmt17(res.reset_alpha)
         << " recovered=" << (res.recovered ? "true" : "false")
         << " H_max=" << fmt17(res.H_max_recovery) << " H_end=" << fmt17(res.endpoint[0])
         << " C_end=" << fmt17(res.endpoint[2]);
  }
  line << " out=" << out << " events=" << ev;
  std::cout << line.str() << "\n";
  return 0;
}

int cmd_limit_check(const RunConfig& rc) {
  ModelParams p = make_params(rc);
  double alpha = rc.alpha > 0.0 ? rc.alpha : 0.4;
  std::vector<double> eps_values = parse_eps_list(rc.eps_list);
  LimitCheckResult res = singular_limit_check(p, alpha, eps_values, make_solver(rc));

  for (const LimitCheckRow& row : res.rows)
    std::cout << "eps=" << fmt17(row.eps) << " sup_err=" << fmt17(row.sup_err) << "\n";
  std::cout << "limit-check alpha=" << fmt17(res.alpha) << " H_start=" << fmt17(res.H_start)
            << " rows=" << res.rows.size() << " monotone=" << (res.monotone ? "true" : "false")
            << "\n";

  if (!rc.out.empty()) {
    std::ofstream os(rc.out);
    if (!os) throw invalid_parameter("cannot open output file: " + rc.out);
    os << "eps,sup_err\n";
    for (const LimitCheckRow& row : res.rows)
      os << fmt17(row.eps) << "," << fmt17(row.sup_err) << "\n";
  }
  return res.monotone ? 0 : 3;
}

}  // namespace

int run(int argc, char** argv) {
  RunConfig rc;
  CLI::App app{"fast-slow analysis of coral reef collapse under ramped fishing"};
  app.require_subcommand(1);

  CLI::App* analyze = app.add_subcommand("analyze", "thresholds, regime and equilibria as JSON");
  CLI::App* classify = app.add_subcommand("classify", "parameter-plane region and folded singularity");
  CLI::App* simulate = app.add_subcommand("simulate", "ramped trajectory with outcome label");
  CLI::App* sweep = app.add_subcommand("sweep", "region/outcome lattice over the parameter plane");
  CLI::App* rcrit = app.add_subcommand("rcrit", "critical ramp rate (node-focus transition)");
  CLI::App* resurgence =
      app.add_subcommand("resurgence", "collapse, reset the fishing level, test recovery");
  CLI::App* limit_check =
      app.add_subcommand("limit-check", "full system vs reduced flow as epsilon shrinks");
  for (CLI::App* cmd : {analyze, classify, simulate, sweep, rcrit, resurgence, limit_check})
    add_common_flags(cmd, rc);

  try {
    if (auto path = find_config_path(argc, argv)) apply_config_file(rc, *path);
  } catch (const invalid_parameter& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << kUsage;
    return 2;
  }

  CLI::App* active = app.get_subcommands().front();
  if (rc.jobs == 0) {
    if (const char* env = std::getenv("REEFTIP_JOBS")) rc.jobs = std::atoi(env);
  }
  bool cap_given = rc.cap_from_config || active->count("--alpha-max") > 0;
  bool rule_given = rc.rule_from_config || active->count("--alpha-max-rule") > 0;
  if (cap_given && !rule_given) rc.alpha_max_rule = "explicit";

  try {
    if (!rc.config_command.empty() && rc.config_command != active->get_name())
      throw invalid_parameter("config command '" + rc.config_command +
                              "' does not match subcommand '" + active->get_name() + "'");
    if (active == analyze) return cmd_analyze(rc);
    if (active == classify) return cmd_classify(rc);
    if (active == simulate) return cmd_simulate(rc);
    if (active == sweep) return cmd_sweep(rc);
    if (active == rcrit) return cmd_rcrit(rc);
    if (active == resurgence) return cmd_resurgence(rc);
    if (active == limit_check) return cmd_limit_check(rc);
    std::cerr << kUsage;
    return 2;
  } catch (const invalid_parameter& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const numeric_failure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace reeftip::cli
