#include "qghjm/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qghjm/errors.hpp"
#include "qghjm/explosion_criteria.hpp"
#include "qghjm/io.hpp"
#include "qghjm/ode_limit.hpp"
#include "qghjm/parallel.hpp"
#include "qghjm/pricing.hpp"
#include "qghjm/sde_engine.hpp"

namespace qghjm {

namespace fs = std::filesystem;

namespace {

struct RunConfig {
  ModelParams model;
  ForwardCurve curve = ForwardCurve::flat(0.1);
  SimConfig sim;
  Json raw;
};

// Exit-code carrying failure for analytic conditions that do not hold.
struct Unsatisfied : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string first_word(const std::string& s) { return s.substr(0, s.find(' ')); }

// Re-throws a validation error with a pointer guessed from its leading field name.
template <class Fn>
void validate_at(const std::string& pointer, Fn&& fn) {
  try {
    fn();
  } catch (const ConfigPathError&) {
    throw;
  } catch (const ConfigError& e) {
    const std::string field = first_word(e.what());
    throw ConfigPathError(pointer + "/" + field, pointer + ": " + e.what());
  }
}

const Json& section(const Json& root, const char* key) {
  static const Json empty = Json::object();
  const auto it = root.find(key);
  return it == root.end() ? empty : *it;
}

RunConfig load_config(const std::string& text, const std::string& command) {
  Json root;
  try {
    root = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  static constexpr std::array<std::string_view, 8> keys{
      "model", "curve", "sim", "simulate", "region", "verify", "ode", "price"};
  require_keys(root, keys, "");

  RunConfig rc;
  rc.raw = root;
  rc.model = model_from_json(section(root, "model"));
  if (command != "region") validate_at("/model", [&] { rc.model.validate(); });
  if (root.contains("curve")) {
    rc.curve = curve_from_json(root["curve"]);
    if (rc.curve.value(0.0) != rc.model.lambda0) {
      throw ConfigPathError("/curve", "/curve: lambda(0) must equal model.lambda0");
    }
  } else {
    rc.curve = ForwardCurve::flat(rc.model.lambda0);
  }
  rc.sim = sim_from_json(section(root, "sim"));
  return rc;
}

std::ofstream open_out(const fs::path& dir, const char* name) {
  std::ofstream os(dir / name);
  if (!os) throw std::runtime_error("cannot write " + (dir / name).string());
  return os;
}

void write_json(const fs::path& dir, const char* name, const Json& j) {
  auto os = open_out(dir, name);
  os << j.dump(2) << '\n';
}

Json resolved(const RunConfig& rc) {
  Json j;
  j["model"] = to_json(rc.model);
  j["curve"] = to_json(rc.curve);
  j["sim"] = to_json(rc.sim);
  for (const char* k : {"simulate", "region", "verify", "ode", "price"}) {
    if (rc.raw.contains(k)) j[k] = rc.raw[k];
  }
  return j;
}

std::vector<double> number_list(const Json& obj, const char* key, const std::string& pointer,
                                std::vector<double> fallback) {
  const auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  const std::string ptr = pointer + "/" + key;
  if (!it->is_array() || it->empty()) throw ConfigPathError(ptr, ptr + ": expected a list");
  std::vector<double> xs;
  for (const auto& v : *it) {
    if (!v.is_number()) throw ConfigPathError(ptr, ptr + ": expected numbers");
    xs.push_back(v.get<double>());
  }
  return xs;
}

int cmd_simulate(const RunConfig& rc, const fs::path& out_dir, std::ostream& out) {
  const Json& opts = section(rc.raw, "simulate");
  static constexpr std::array<std::string_view, 1> keys{"checkpoints"};
  require_keys(opts, keys, "/simulate");
  std::vector<double> defaults;
  for (double t = 10.0; t < rc.sim.horizon; t += 10.0) defaults.push_back(t);
  defaults.push_back(rc.sim.horizon);
  const auto checkpoints = number_list(opts, "checkpoints", "/simulate", defaults);
  for (const double t : checkpoints) {
    if (!(t > 0.0 && t <= rc.sim.horizon)) {
      throw ConfigPathError("/simulate/checkpoints",
                            "/simulate/checkpoints: checkpoints must lie in (0, horizon]");
    }
  }

  const auto paths = simulate_batch(rc.model, rc.curve, rc.sim);
  const auto curve = explosion_curve(paths, checkpoints);
  {
    auto os = open_out(out_dir, "paths.csv");
    write_paths_csv(os, paths);
  }
  {
    auto os = open_out(out_dir, "explosions.csv");
    write_explosions_csv(os, paths);
  }
  Json summary;
  summary["config"] = resolved(rc);
  summary["checkpoints"] = Json::array();
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    Json row;
    row["t"] = checkpoints[i];
    row["fraction"] = curve[i].mean;
    row["std_error"] = curve[i].std_error;
    row["n_exploded"] = curve[i].n_exploded;
    summary["checkpoints"].push_back(row);
  }
  write_json(out_dir, "summary.json", summary);
  out << "simulated " << rc.sim.n_paths << " paths; explosion fraction at t="
      << format_double(checkpoints.back()) << ": " << format_double(curve.back().mean) << '\n';
  return kExitOk;
}

int cmd_region(const RunConfig& rc, const fs::path& out_dir, std::ostream& out) {
  const Json& opts = section(rc.raw, "region");
  static constexpr std::array<std::string_view, 5> keys{"gammas", "sigmas", "sigma_min",
                                                        "sigma_max", "n_sigma"};
  require_keys(opts, keys, "/region");
  const auto gammas = number_list(opts, "gammas", "/region", {0.6, 0.75, 0.9, 1.0});
  std::vector<double> sigmas;
  if (opts.contains("sigmas")) {
    sigmas = number_list(opts, "sigmas", "/region", {});
  } else {
    const double lo = get_number(opts, "sigma_min", 0.01, "/region");
    const double hi = get_number(opts, "sigma_max", 1.45, "/region");
    const std::size_t n = get_count(opts, "n_sigma", 145, "/region");
    if (!(lo > 0.0 && hi >= lo && n >= 1)) {
      throw ConfigPathError("/region", "/region: need 0 < sigma_min <= sigma_max, n_sigma >= 1");
    }
    for (std::size_t i = 0; i < n; ++i) {
      sigmas.push_back(n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) /
                                              static_cast<double>(n - 1));
    }
  }
  for (const double s : sigmas) {
    if (!(s > 0.0)) throw ConfigPathError("/region/sigmas", "/region/sigmas: sigma must be > 0");
  }
  for (std::size_t i = 0; i < gammas.size(); ++i) {
    if (!(gammas[i] > 0.5 && gammas[i] <= 1.0)) {
      const std::string ptr = "/region/gammas/" + std::to_string(i);
      throw ConfigPathError(ptr, ptr + ": gamma must lie in (1/2, 1] (got " +
                                     format_double(gammas[i]) + ")");
    }
  }
  for (const double g : gammas) {
    const auto curve = region_curve(g, sigmas);
    const std::string name = "region_gamma_" + format_double(g) + ".csv";
    auto os = open_out(out_dir, name.c_str());
    write_region_csv(os, curve);
    out << "wrote " << name << '\n';
  }
  return kExitOk;
}

LyapunovSpec spec_from_json(const Json& j, const ModelParams& p) {
  static const std::string ptr = "/verify/lyapunov";
  // delta1, gamma, slope and construction are echoed by verify.json and ignored here
  static constexpr std::array<std::string_view, 10> keys{
      "c1", "c2", "c3", "delta2", "R", "C", "delta1", "gamma", "slope", "construction"};
  require_keys(j, keys, ptr);
  for (const char* k : {"c2", "c3", "delta2", "R"}) {
    if (!j.contains(k)) throw ConfigPathError(ptr + "/" + k, ptr + "/" + k + ": required");
  }
  LyapunovSpec s;
  try {
    s.deltas = DeltaPair::from_delta2(get_number(j, "delta2", 0.0, ptr), p.gamma);
  } catch (const DomainError& e) {
    throw ConfigPathError(ptr + "/delta2", ptr + "/delta2: " + e.what());
  }
  s.c2 = get_number(j, "c2", 0.0, ptr);
  s.c3 = get_number(j, "c3", 0.0, ptr);
  s.c1 = get_number(j, "c1", s.c2 + s.c3, ptr);
  s.R = get_number(j, "R", 0.0, ptr);
  s.C = get_number(j, "C", growth_coefficient(p, s.deltas, CoefficientMode::Widened), ptr);
  if (!(s.c2 > 0.0 && s.c3 > 0.0 && s.c1 >= s.c2 + s.c3)) {
    throw ConfigPathError(ptr, ptr + ": need c2, c3 > 0 and c1 >= c2 + c3");
  }
  if (!(s.R >= p.epsilon)) throw ConfigPathError(ptr + "/R", ptr + "/R: R must be >= epsilon");
  s.slope = s.c3 * s.deltas.delta2 / (s.c2 * s.deltas.delta1 * p.sigma * p.sigma) *
            std::pow(s.R / (1.0 + s.R), s.deltas.delta2 - s.deltas.delta1);
  return s;
}

Json slack_json(const SlackReport& r) {
  Json j;
  j["min_slack"] = r.min_slack;
  j["min_at"] = {r.min_r, r.min_y};
  j["violations"] = r.violations;
  j["n_points"] = r.n_points;
  return j;
}

int cmd_verify(const RunConfig& rc, const fs::path& out_dir, double c3_scale,
               std::ostream& out) {
  const Json& opts = section(rc.raw, "verify");
  static constexpr std::array<std::string_view, 10> keys{
      "condition", "mode", "n", "extent_factor", "lower_factor",
      "n_face",    "face_offset", "tolerance", "lyapunov", "a5"};
  require_keys(opts, keys, "/verify");
  const ModelParams& p = rc.model;

  Json report;
  report["config"] = resolved(rc);
  if (p.gamma <= 0.5) {
    report["status"] = "non-explosive regime";
    write_json(out_dir, "verify.json", report);
    out << "non-explosive regime: gamma <= 1/2 gives a globally Lipschitz volatility\n";
    return kExitUnsatisfied;
  }

  const std::string cond = opts.value("condition", std::string("II"));
  const std::string mode = opts.value("mode", std::string("standard"));
  if (cond != "I" && cond != "II") {
    throw ConfigPathError("/verify/condition", "/verify/condition: expected \"I\" or \"II\"");
  }
  if (mode != "standard" && mode != "widened") {
    throw ConfigPathError("/verify/mode", "/verify/mode: expected \"standard\" or \"widened\"");
  }
  VerifyGrid grid;
  grid.n = get_count(opts, "n", grid.n, "/verify");
  grid.extent_factor = get_number(opts, "extent_factor", grid.extent_factor, "/verify");
  grid.lower_factor = get_number(opts, "lower_factor", grid.lower_factor, "/verify");
  grid.n_face = get_count(opts, "n_face", grid.n_face, "/verify");
  grid.face_offset = get_number(opts, "face_offset", grid.face_offset, "/verify");
  grid.tolerance = get_number(opts, "tolerance", grid.tolerance, "/verify");
  if (!(grid.n >= 2 && grid.extent_factor > 1.0 && grid.lower_factor > 0.0 &&
        grid.lower_factor < 1.0 && grid.face_offset >= 0.0 && grid.tolerance >= 0.0)) {
    throw ConfigPathError("/verify", "/verify: invalid grid settings");
  }
  const bool run_a5 = opts.value("a5", true);

  LyapunovSpec spec;
  if (opts.contains("lyapunov")) {
    spec = spec_from_json(opts["lyapunov"], p);
  } else {
    ScanSpec scan;
    scan.mode = mode == "standard" ? CoefficientMode::Standard : CoefficientMode::Widened;
    const auto cr = check_condition(p, cond == "I" ? Condition::I : Condition::II, scan);
    report["condition"] = to_json(cr);
    if (!cr.satisfied) {
      report["status"] = "condition unsatisfied";
      write_json(out_dir, "verify.json", report);
      out << "condition " << cond << " is not satisfied (sup = " << format_double(cr.sup_value)
          << ")\n";
      return kExitUnsatisfied;
    }
    try {
      spec = build_lyapunov(p, cr);
    } catch (const InfeasibleWedge& e) {
      report["status"] = std::string("infeasible wedge: ") + e.what();
      write_json(out_dir, "verify.json", report);
      out << "no feasible (C2, C3) at the witness radius\n";
      return kExitUnsatisfied;
    }
  }
  if (c3_scale != 1.0) {
    spec.c3 *= c3_scale;
    spec.c1 = spec.c2 + spec.c3;
    spec.slope *= c3_scale;
  }

  const auto slack = verify_generator_inequality(spec, p, grid);
  const auto ks = kappas(spec.R, p, spec.deltas);
  const auto wedge = wedge_feasible_slopes(spec.R, p, spec.deltas);

  report["lyapunov"] = to_json(spec);
  report["c3_scale"] = c3_scale;
  report["K0"] = k0(spec);
  report["K1"] = spec.c1;
  report["K2"] = spec.k2();
  report["K3"] = spec.k3();
  report["kappa1"] = ks.kappa1;
  report["kappa2"] = ks.kappa2;
  Json w;
  w["kind"] = wedge.kind == Wedge::Kind::Region1   ? "region1"
              : wedge.kind == Wedge::Kind::Region2 ? "region2"
                                                   : "empty";
  if (wedge.region1) w["region1"] = {wedge.region1->lo, wedge.region1->hi};
  if (wedge.region2) w["region2"] = {wedge.region2->lo, wedge.region2->hi};
  report["wedge"] = w;
  report["generator_slack"] = slack_json(slack);
  report["corner_slack_bound"] = corner_slack_bound(spec, p);

  std::size_t violations = slack.violations;
  Json a5;
  if (!run_a5) {
    a5["status"] = "skipped";
  } else if (!(p.beta > 0.0)) {
    a5["status"] = "skipped: needs beta > 0";
  } else {
    const auto th = as_explosion_r0_threshold(spec.R, p);
    a5["log_r0_threshold"] = th.log_value;
    a5["overflow"] = th.overflow;
    if (th.overflow) {
      a5["status"] = "skipped: threshold overflows";
    } else {
      ModelParams pa = p;
      pa.lambda0 = std::max(p.lambda0, th.value);
      const auto rep = verify_a5_function(pa, spec.R, grid);
      a5["status"] = "evaluated";
      a5["r0"] = pa.lambda0;
      a5["max_value"] = rep.max_value;
      a5["max_at"] = {rep.max_r, rep.max_y};
      a5["violations"] = rep.violations;
      a5["n_points"] = rep.n_points;
      violations += rep.violations;
    }
  }
  report["a5"] = a5;
  report["violations"] = violations;
  report["status"] = violations == 0 ? "verified" : "violations";
  write_json(out_dir, "verify.json", report);
  out << "min slack " << format_double(slack.min_slack) << ", violations " << violations << '\n';
  return violations == 0 ? kExitOk : kExitUnsatisfied;
}

int cmd_ode(const RunConfig& rc, const fs::path& out_dir, std::ostream& out) {
  const Json& opts = section(rc.raw, "ode");
  static constexpr std::array<std::string_view, 6> keys{
      "horizon", "rel_tol", "abs_tol", "blowup_level", "check_level", "trace_points"};
  require_keys(opts, keys, "/ode");
  OdeOptions o;
  const double horizon = get_number(opts, "horizon", 100.0, "/ode");
  o.rel_tol = get_number(opts, "rel_tol", o.rel_tol, "/ode");
  o.abs_tol = get_number(opts, "abs_tol", o.abs_tol, "/ode");
  o.blowup_level = get_number(opts, "blowup_level", o.blowup_level, "/ode");
  o.check_level = get_number(opts, "check_level", o.check_level, "/ode");
  o.trace_points = get_count(opts, "trace_points", o.trace_points, "/ode");
  if (rc.model.gamma != 1.0) {
    throw ConfigPathError("/model/gamma",
                          "/model/gamma: the deterministic limit needs gamma = 1");
  }
  OdeResult res;
  validate_at("/ode", [&] { res = ode_integrate(rc.model, rc.curve, horizon, o); });
  {
    auto os = open_out(out_dir, "trace.csv");
    write_trace_csv(os, res.trace);
  }
  Json j;
  j["config"] = resolved(rc);
  j["exploded"] = res.exploded;
  j["t_exp"] = format_double(res.t_exp);
  if (std::isfinite(res.t_exp)) j["t_exp"] = res.t_exp;
  j["step_collapsed"] = res.step_collapsed;
  j["terminal"] = {{"r", res.terminal.r}, {"y", res.terminal.y}, {"t", res.terminal.t}};
  j["beta_critical"] = beta_critical(rc.model);
  if (rc.model.beta >= beta_critical(rc.model)) {
    j["fixed_point"] = {{"r", fixed_point_r(rc.model)}, {"y", fixed_point_y(rc.model)}};
  }
  write_json(out_dir, "ode.json", j);
  if (res.exploded) {
    out << "explodes at t_exp = " << format_double(res.t_exp) << '\n';
  } else {
    out << "finite up to t = " << format_double(horizon) << ", r = "
        << format_double(res.terminal.r) << '\n';
  }
  return kExitOk;
}

int cmd_price(const RunConfig& rc, const fs::path& out_dir, std::ostream& out) {
  const Json& opts = section(rc.raw, "price");
  static constexpr std::array<std::string_view, 3> keys{"maturities", "delta", "discount_T"};
  require_keys(opts, keys, "/price");
  const double delta = get_number(opts, "delta", 0.25, "/price");
  std::vector<double> defaults;
  for (double T = 1.0; T + delta <= rc.sim.horizon + 1e-12; T += 1.0) defaults.push_back(T);
  const auto maturities = number_list(opts, "maturities", "/price", defaults);
  const double discount_T = get_number(opts, "discount_T", rc.sim.horizon, "/price");

  std::vector<FuturesRow> rows;
  validate_at("/sim", [&] {
    rc.sim.validate(rc.model);
    for (const double T : maturities) {
      rows.push_back({T, delta, eurodollar_futures(rc.model, rc.curve, rc.sim, T, delta)});
    }
  });
  {
    auto os = open_out(out_dir, "futures.csv");
    write_futures_csv(os, rows);
  }
  McEstimate disc;
  validate_at("/price", [&] {
    disc = discount_consistency_check(rc.model, rc.curve, rc.sim, discount_T);
  });
  const DiscountCurve dc(rc.curve);
  {
    auto os = open_out(out_dir, "discount.csv");
    os << "T,estimate,std_error,curve_P0T,n_exploded\n";
    os << format_double(discount_T) << ',' << format_double(disc.mean) << ','
       << format_double(disc.std_error) << ',' << format_double(dc(discount_T)) << ','
       << disc.n_exploded << '\n';
  }
  std::size_t diverged = 0;
  for (const auto& r : rows) diverged += r.estimate.diverged ? 1 : 0;
  out << "priced " << rows.size() << " futures (" << diverged << " diverged); discount check "
      << format_double(disc.mean) << " vs " << format_double(dc(discount_T)) << '\n';
  return kExitOk;
}

std::string read_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config file " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quasi-Gaussian HJM model with eps-CEV volatility", "qghjm"};
  app.require_subcommand(1, 1);
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  double c3_scale = 1.0;

  for (const auto& [name, help] : std::vector<std::pair<std::string, std::string>>{
           {"simulate", "Monte Carlo paths and explosion statistics"},
           {"region", "beta_max(sigma) curves per gamma"},
           {"verify", "explosion condition and Lyapunov verification"},
           {"ode", "deterministic small-noise limit"},
           {"price", "Eurodollar futures and discount consistency"}}) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "JSON config file")->required();
    sub->add_option("--out", out_dir, "output directory")->required();
    sub->add_option("--seed", seed, "override sim.seed");
    sub->add_option("--threads", threads, "OpenMP threads (default: QGHJM_THREADS)");
    if (name == "verify") {
      sub->add_option("--c3-scale", c3_scale, "multiply C3 of the built spec (negative control)");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "qghjm: " << e.what() << '\n';
    return kExitConfig;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  if (!threads) {
    if (const char* env = std::getenv("QGHJM_THREADS")) {
      try {
        threads = std::stoi(env);
      } catch (const std::exception&) {
        err << "qghjm: ignoring invalid QGHJM_THREADS=" << env << '\n';
      }
    }
  }
  if (threads) set_thread_count(*threads);

  std::string text;
  try {
    text = read_file(config_path);
    RunConfig rc = load_config(text, command);
    if (seed) rc.sim.seed = *seed;
    if (command == "simulate") validate_at("/sim", [&] { rc.sim.validate(rc.model); });

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) {
      err << "qghjm: cannot create " << out_dir << ": " << ec.message() << '\n';
      return kExitFailure;
    }
    if (command == "simulate") return cmd_simulate(rc, out_dir, out);
    if (command == "region") return cmd_region(rc, out_dir, out);
    if (command == "verify") return cmd_verify(rc, out_dir, c3_scale, out);
    if (command == "ode") return cmd_ode(rc, out_dir, out);
    return cmd_price(rc, out_dir, out);
  } catch (const ConfigPathError& e) {
    const auto line = locate_line(text, e.pointer());
    err << config_path;
    if (line > 0) err << ':' << line;
    err << ": " << e.what() << '\n';
    return kExitConfig;
  } catch (const ConfigError& e) {
    err << config_path << ": " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "qghjm: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace qghjm
