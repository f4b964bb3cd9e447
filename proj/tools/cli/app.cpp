#include "app.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"

#include "config.hpp"
#include "insider_lab/analysis.hpp"
#include "insider_lab/brownian.hpp"
#include "insider_lab/donsker.hpp"
#include "insider_lab/errors.hpp"
#include "insider_lab/forward_sde.hpp"
#include "insider_lab/montecarlo.hpp"
#include "insider_lab/schedules.hpp"

namespace insider::cli {
namespace {

struct Outcome {
  Json json;
  std::string csv;
  std::string summary;
  bool verdict_failed = false;
};

struct Context {
  Json config;
  std::string digest;
  unsigned threads = 1;
  std::optional<std::string> dump_paths;
  std::optional<std::string> dump_wealth;
};

std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buffer[32];
  const auto res = std::to_chars(buffer, buffer + sizeof buffer, x);
  return std::string(buffer, res.ptr);
}

double elapsed_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

Json estimate_json(const McEstimate& mc) {
  return Json{{"mean", mc.mean},
              {"stderr", mc.std_error},
              {"ci95", Json::array({mc.ci95_low, mc.ci95_high})},
              {"n_paths", mc.n_paths}};
}

Json report_json(const ComparisonReport& r) {
  Json j = estimate_json(r.mc);
  j["delta"] = r.delta;
  j["theory"] = r.theory;
  j["z_score"] = r.z_score;
  j["abs_tol"] = r.abs_tol;
  j["verdict"] = to_string(r.verdict);
  return j;
}

Json base_json(const Context& ctx, std::string_view command) {
  return Json{{"command", command}, {"config_digest", ctx.digest}, {"config", ctx.config}};
}

std::ofstream open_output(const std::string& path) {
  std::ofstream file(path);
  if (!file) throw ValidationError("cannot write " + path);
  return file;
}

void write_dumps(const Context& ctx, const ExperimentConfig& cfg) {
  if (!ctx.dump_paths && !ctx.dump_wealth) return;
  const auto grid = experiment_grid(cfg);
  const BrownianPath path = experiment_path(cfg, grid, 0);
  if (ctx.dump_paths) {
    auto file = open_output(*ctx.dump_paths);
    write_path_csv(file, path);
  }
  if (ctx.dump_wealth) {
    auto file = open_output(*ctx.dump_wealth);
    WealthPlan(cfg.market, cfg.strategy, grid, cfg.delta, cfg.wealth).write_trace(file, path);
  }
}

Outcome cmd_viability(const Context& ctx) {
  const double horizon = ctx.config.at("T").get<double>();
  const EpsilonSchedule schedule = parse_schedule(ctx.config.at("schedule").get<std::string>(), horizon);
  const Regime reg = regime(schedule);
  const ViabilityReport report = classify_viability(schedule);

  Outcome o;
  o.json = base_json(ctx, "viability");
  o.json["schedule"] = schedule.literal();
  o.json["regime"] = to_string(reg);
  o.json["classification"] = to_string(report.classification);
  o.json["method"] = to_string(report.method);
  o.json["integral"] = report.integral_value ? Json(*report.integral_value) : Json(nullptr);
  Json trace = Json::array();
  for (const auto& p : report.truncation_trace) trace.push_back({{"delta", p.delta}, {"partial_integral", p.partial_integral}});
  o.json["truncation_trace"] = std::move(trace);

  const std::string integral = report.integral_value ? fmt(*report.integral_value) : "divergent";
  o.csv = "schedule,regime,classification,method,integral\n" + schedule.literal() + "," + to_string(reg) + "," +
          to_string(report.classification) + "," + to_string(report.method) + "," + integral + "\n";
  o.summary = to_string(report.classification) + "  schedule=" + schedule.literal() + " regime=" + to_string(reg) +
              " integral=" + integral;
  return o;
}

Outcome cmd_simulate(const Context& ctx) {
  const ExperimentConfig cfg = experiment_from(ctx.config, ctx.threads);
  const auto start = std::chrono::steady_clock::now();
  const McEstimate mc = estimate_log_utility(cfg);
  const double wall = elapsed_since(start);
  write_dumps(ctx, cfg);

  Outcome o;
  o.json = base_json(ctx, "simulate");
  o.json.update(estimate_json(mc));
  o.json["delta"] = cfg.delta;
  o.json["wall_time_s"] = wall;
  o.csv = "config_digest,mean,stderr,ci95_low,ci95_high,n_paths,wall_time_s\n" + ctx.digest + "," + fmt(mc.mean) +
          "," + fmt(mc.std_error) + "," + fmt(mc.ci95_low) + "," + fmt(mc.ci95_high) + "," +
          std::to_string(mc.n_paths) + "," + fmt(wall) + "\n";
  o.summary = "simulate " + cfg.strategy.name() + "  E[log X(T-delta)] = " + fmt(mc.mean) + " +- " +
              fmt(mc.std_error) + "  (" + std::to_string(mc.n_paths) + " paths, digest " + ctx.digest + ")";
  return o;
}

std::string reports_csv(std::span<const ComparisonReport> reports) {
  std::ostringstream csv;
  write_sweep_csv(csv, reports);
  return csv.str();
}

Outcome cmd_compare(const Context& ctx) {
  const ExperimentConfig cfg = experiment_from(ctx.config, ctx.threads);
  const auto start = std::chrono::steady_clock::now();
  const ComparisonReport report = compare(cfg, ctx.config.at("abs_tol").get<double>());
  const double wall = elapsed_since(start);
  write_dumps(ctx, cfg);

  Outcome o;
  o.json = base_json(ctx, "compare");
  o.json.update(report_json(report));
  o.json["wall_time_s"] = wall;
  o.csv = reports_csv(std::span(&report, 1));
  o.verdict_failed = report.verdict == Verdict::Fail;
  o.summary = to_string(report.verdict) + "  theory=" + fmt(report.theory) + " mc=" + fmt(report.mc.mean) + " +- " +
              fmt(report.mc.std_error) + " z=" + fmt(report.z_score) + " (digest " + ctx.digest + ")";
  return o;
}

Outcome cmd_sweep(const Context& ctx) {
  const ExperimentConfig cfg = experiment_from(ctx.config, ctx.threads);
  const auto deltas = ctx.config.at("deltas").get<std::vector<double>>();
  const auto start = std::chrono::steady_clock::now();
  const auto reports = truncation_sweep(cfg, deltas, ctx.config.at("abs_tol").get<double>());
  const double wall = elapsed_since(start);

  Outcome o;
  o.json = base_json(ctx, "sweep");
  Json rows = Json::array();
  std::size_t failures = 0;
  for (const auto& r : reports) {
    rows.push_back(report_json(r));
    if (r.verdict == Verdict::Fail) ++failures;
  }
  o.json["reports"] = std::move(rows);
  o.json["wall_time_s"] = wall;
  o.csv = reports_csv(reports);
  o.verdict_failed = failures > 0;
  o.summary = "sweep " + std::to_string(reports.size()) + " deltas, " + std::to_string(failures) + " Fail" +
              "  theory[last]=" + fmt(reports.back().theory) + " mc[last]=" + fmt(reports.back().mc.mean) +
              " (digest " + ctx.digest + ")";
  return o;
}

/// |estimate - expected| within three standard errors.
bool within_three_se(double estimate, double se, double expected) {
  return std::abs(estimate - expected) <= 3.0 * se;
}

Outcome cmd_duality(const Context& ctx) {
  static const std::map<std::string, DualityKind> kinds{{"constant", DualityKind::ConstantLookAhead},
                                                        {"terminal", DualityKind::TerminalValue},
                                                        {"adapted", DualityKind::Adapted}};
  const auto name = ctx.config.at("duality_kind").get<std::string>();
  const auto kind = kinds.find(name);
  if (kind == kinds.end()) {
    throw ValidationError("config key 'duality_kind' expects constant, terminal or adapted, got '" + name + "'");
  }
  DualityOptions options;
  options.eps = ctx.config.at("duality_eps").get<double>();
  options.antithetic = ctx.config.at("antithetic").get<bool>();
  options.threads = ctx.threads;
  const auto start = std::chrono::steady_clock::now();
  const DualityResult r =
      duality_check(kind->second, ctx.config.at("T").get<double>(), ctx.config.at("paths").get<std::size_t>(),
                    ctx.config.at("base_points").get<std::size_t>(), ctx.config.at("seed").get<std::uint64_t>(),
                    options);
  const double wall = elapsed_since(start);
  const bool pass = within_three_se(r.mc.mean, r.mc.std_error, r.analytic);

  Outcome o;
  o.json = base_json(ctx, "duality");
  o.json.update(estimate_json(r.mc));
  o.json["kind"] = name;
  o.json["analytic"] = r.analytic;
  o.json["verdict"] = pass ? "Pass" : "Fail";
  o.json["wall_time_s"] = wall;
  o.csv = "kind,mean,stderr,analytic,verdict\n" + name + "," + fmt(r.mc.mean) + "," + fmt(r.mc.std_error) + "," +
          fmt(r.analytic) + "," + (pass ? "Pass" : "Fail") + "\n";
  o.verdict_failed = !pass;
  o.summary = std::string(pass ? "Pass" : "Fail") + "  duality " + name + ": mc=" + fmt(r.mc.mean) + " +- " +
              fmt(r.mc.std_error) + " analytic=" + fmt(r.analytic) + " (digest " + ctx.digest + ")";
  return o;
}

Outcome cmd_drift_check(const Context& ctx) {
  const auto mode = ctx.config.at("drift_mode").get<std::string>();
  if (mode != "bridge" && mode != "martingale") {
    throw ValidationError("config key 'drift_mode' expects bridge or martingale, got '" + mode + "'");
  }
  const double t = ctx.config.at("drift_t").get<double>();
  const double eps = ctx.config.at("drift_eps").get<double>();
  const double h = ctx.config.at("drift_h").get<double>();
  const auto n = ctx.config.at("paths").get<std::size_t>();
  const auto seed = ctx.config.at("seed").get<std::uint64_t>();
  const RegressionResult r = mode == "bridge" ? bridge_drift_regression(t, eps, h, n, seed, ctx.threads)
                                              : martingale_gap_check(t, eps, h, n, seed, ctx.threads);
  const bool pass = r.slope == r.expected || within_three_se(r.slope, r.std_error, r.expected);

  Outcome o;
  o.json = base_json(ctx, "drift-check");
  o.json["mode"] = mode;
  o.json["slope"] = r.slope;
  o.json["stderr"] = r.std_error;
  o.json["expected"] = r.expected;
  o.json["n"] = r.n;
  o.json["verdict"] = pass ? "Pass" : "Fail";
  o.csv = "mode,slope,stderr,expected,n,verdict\n" + mode + "," + fmt(r.slope) + "," + fmt(r.std_error) + "," +
          fmt(r.expected) + "," + std::to_string(r.n) + "," + (pass ? "Pass" : "Fail") + "\n";
  o.verdict_failed = !pass;
  o.summary = std::string(pass ? "Pass" : "Fail") + "  " + mode + " slope=" + fmt(r.slope) + " +- " +
              fmt(r.std_error) + " expected=" + fmt(r.expected) + " (digest " + ctx.digest + ")";
  return o;
}

std::vector<double> axis(const Json& config, const std::string& prefix) {
  const double lo = config.at(prefix + "_min").get<double>();
  const double hi = config.at(prefix + "_max").get<double>();
  const auto steps = config.at(prefix + "_steps").get<std::size_t>();
  if (steps == 0) throw ValidationError("config key '" + prefix + "_steps' must be positive");
  if (steps > 1 && !(hi > lo)) throw ValidationError("config key '" + prefix + "_max' must exceed " + prefix + "_min");
  std::vector<double> values(steps);
  for (std::size_t i = 0; i < steps; ++i) {
    values[i] = steps == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(steps - 1);
  }
  return values;
}

Outcome cmd_donsker_table(const Context& ctx) {
  const DonskerParams p(ctx.config.at("donsker_b").get<double>(), ctx.config.at("donsker_eps1").get<double>(),
                        ctx.config.at("donsker_eps2").get<double>());
  const auto y1s = axis(ctx.config, "y1");
  const auto y2s = axis(ctx.config, "y2");

  Outcome o;
  o.json = base_json(ctx, "donsker-table");
  Json rows = Json::array();
  std::string csv = "y1,y2,density,derivative,ratio\n";
  for (double y1 : y1s) {
    for (double y2 : y2s) {
      const double density = cond_delta_2d(p, y1, y2);
      const double derivative = cond_delta_deriv_2d(p, y1, y2);
      // Past the underflow floor the quotient is undefined; report the closed form.
      const double ratio = density > 0.0 ? derivative / density : malliavin_ratio(p.b(), y1, p.eps1());
      rows.push_back({{"y1", y1}, {"y2", y2}, {"density", density}, {"derivative", derivative}, {"ratio", ratio}});
      csv += fmt(y1) + "," + fmt(y2) + "," + fmt(density) + "," + fmt(derivative) + "," + fmt(ratio) + "\n";
    }
  }
  o.json["rows"] = std::move(rows);
  o.csv = std::move(csv);
  o.summary = "donsker-table " + std::to_string(y1s.size() * y2s.size()) + " rows  b=" + fmt(p.b()) +
              " eps1=" + fmt(p.eps1()) + " eps2=" + fmt(p.eps2());
  return o;
}

/// A command-line flag that sets one config key.
struct Binding {
  const char* flag;
  const char* key;
  const char* help;
};

constexpr Binding kMarketFlags[] = {
    {"--T", "T", "horizon"},
    {"--alpha", "alpha", "drift"},
    {"--beta", "beta", "volatility"},
    {"--schedule", "schedule", "powerlaw:q=<q> | const:<v> | affine_below:c=<c> | table:@<csv>"},
};

constexpr Binding kExperimentFlags[] = {
    {"--strategy", "strategy", "merton | insider | table:@<csv>"},
    {"--paths", "paths", "number of paths"},
    {"--base-points", "base_points", "base grid points"},
    {"--delta", "delta", "truncation delta"},
    {"--abs-tol", "abs_tol", "verdict tolerance"},
    {"--pi-cap", "pi_cap", "clip |pi|"},
};

constexpr Binding kSweepFlags[] = {{"--deltas", "deltas", "comma-separated decreasing deltas"}};

constexpr Binding kDualityFlags[] = {
    {"--T", "T", "horizon"},
    {"--paths", "paths", "number of paths"},
    {"--base-points", "base_points", "base grid points"},
    {"--kind", "duality_kind", "constant | terminal | adapted"},
    {"--eps", "duality_eps", "constant look-ahead"},
};

constexpr Binding kDriftFlags[] = {
    {"--paths", "paths", "number of samples"},
    {"--mode", "drift_mode", "bridge | martingale"},
    {"--t", "drift_t", "time t"},
    {"--eps", "drift_eps", "look-ahead eps"},
    {"--increment", "drift_h", "increment h"},
};

constexpr Binding kDonskerFlags[] = {
    {"--b", "donsker_b", "B(t)"},
    {"--eps1", "donsker_eps1", "first look-ahead"},
    {"--eps2", "donsker_eps2", "second look-ahead"},
};

using Handler = std::function<Outcome(const Context&)>;

struct Command {
  CLI::App* app;
  Handler handler;
  /// flag -> (key, captured text)
  std::vector<std::pair<const char*, std::shared_ptr<std::string>>> bindings;
  std::vector<CLI::Option*> options;
};

void bind(Command& cmd, std::span<const Binding> flags) {
  for (const auto& b : flags) {
    auto text = std::make_shared<std::string>();
    cmd.options.push_back(cmd.app->add_option(b.flag, *text, b.help));
    cmd.bindings.emplace_back(b.key, text);
  }
}

Json flag_value(std::string_view key, std::string text) {
  // "--deltas 0.1,0.01" is a convenience spelling of [0.1,0.01].
  if (key == "deltas" && !text.empty() && text.front() != '[') text = "[" + text + "]";
  return parse_override_value(key, text);
}

void emit(const Outcome& o, const std::string& output, const std::string& format, std::ostream& out) {
  const std::string body = format == "csv" ? o.csv : o.json.dump(2) + "\n";
  if (output == "-") {
    out << body;
  } else if (!output.empty()) {
    auto file = open_output(output);
    file << body;
  }
  out << o.summary << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Insider trading laboratory: viability, simulation and theory checks", "insider_lab"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> sets;
  std::string dump_config;
  std::string output;
  std::string format = "json";
  std::string seed_text;
  unsigned threads_flag = 0;
  bool strict = false;
  bool no_antithetic = false;
  std::string dump_paths;
  std::string dump_wealth;

  app.add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--set", sets, "override a config key: key=value (repeatable)");
  app.add_option("--dump-config", dump_config, "write the resolved config as JSON");
  app.add_option("--output", output, "result file, or - for stdout");
  app.add_option("--format", format, "result format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--seed", seed_text, "master seed (default 42)");
  app.add_option("--threads", threads_flag, "worker threads (default INSIDER_LAB_THREADS or all cores)");
  app.add_flag("--strict", strict, "exit 3 when a verdict is Fail");
  app.add_flag("--no-antithetic", no_antithetic, "independent paths instead of antithetic pairs");
  app.add_option("--dump-paths", dump_paths, "CSV t,B of the first path");
  app.add_option("--dump-wealth", dump_wealth, "CSV t,pi,logX of the first path");

  std::vector<Command> commands;
  auto add = [&](const char* name, const char* help, Handler handler,
                 std::initializer_list<std::span<const Binding>> groups) {
    Command cmd{app.add_subcommand(name, help), std::move(handler), {}, {}};
    cmd.app->fallthrough();
    for (auto g : groups) bind(cmd, g);
    commands.push_back(std::move(cmd));
  };
  add("viability", "classify a look-ahead schedule", cmd_viability, {kMarketFlags});
  add("simulate", "Monte Carlo expected log-utility", cmd_simulate, {kMarketFlags, kExperimentFlags});
  add("compare", "Monte Carlo against the closed form", cmd_compare, {kMarketFlags, kExperimentFlags});
  add("sweep", "compare over decreasing truncations", cmd_sweep, {kMarketFlags, kExperimentFlags, kSweepFlags});
  add("duality", "forward-integral duality check", cmd_duality, {kDualityFlags});
  add("donsker-table", "conditional Donsker delta on a grid", cmd_donsker_table, {kDonskerFlags});
  add("drift-check", "Brownian bridge and martingale regressions", cmd_drift_check, {kDriftFlags});

  try {
    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& a : args) argv.push_back(a.c_str());
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kValidationFailure;
  }

  const Command* cmd = nullptr;
  for (const auto& c : commands) {
    if (c.app->parsed()) cmd = &c;
  }

  try {
    Context ctx;
    ctx.config = default_config();
    if (!config_path.empty()) merge_into(ctx.config, load_config_file(config_path));
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos || eq == 0) throw ValidationError("--set expects key=value, got '" + s + "'");
      const std::string key = s.substr(0, eq);
      ctx.config[key] = parse_override_value(key, s.substr(eq + 1));
    }
    for (std::size_t i = 0; i < cmd->bindings.size(); ++i) {
      if (cmd->options[i]->count() > 0) {
        ctx.config[cmd->bindings[i].first] = flag_value(cmd->bindings[i].first, *cmd->bindings[i].second);
      }
    }
    if (!seed_text.empty()) ctx.config["seed"] = parse_override_value("seed", seed_text);
    if (no_antithetic) ctx.config["antithetic"] = false;

    ctx.digest = digest_hex(config_digest(ctx.config));
    ctx.threads = threads_flag > 0 ? threads_flag : default_thread_count();
    if (!dump_paths.empty()) ctx.dump_paths = dump_paths;
    if (!dump_wealth.empty()) ctx.dump_wealth = dump_wealth;
    if (!dump_config.empty()) {
      auto file = open_output(dump_config);
      file << ctx.config.dump(2) << '\n';
    }

    const Outcome outcome = cmd->handler(ctx);
    emit(outcome, output, format, out);
    return strict && outcome.verdict_failed ? kVerdictFailure : kOk;
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kValidationFailure;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kValidationFailure;
  } catch (const Json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kValidationFailure;
  }
}

}  // namespace insider::cli
