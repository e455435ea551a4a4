#include "roughstat/cli/run.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "roughstat/density.hpp"
#include "roughstat/dsl/format.hpp"
#include "roughstat/dsl/parser.hpp"
#include "roughstat/parallel.hpp"
#include "roughstat/pointwise.hpp"
#include "roughstat/repair.hpp"
#include "roughstat/rough.hpp"

namespace roughstat::cli {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

namespace {

using json = nlohmann::ordered_json;

const std::vector<std::string> kProgramCommands = {"converge", "roughness", "cauchy", "repair",
                                                   "eval"};

bool is_program_command(const std::string& command) {
  return std::find(kProgramCommands.begin(), kProgramCommands.end(), command) !=
         kProgramCommands.end();
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) parts.push_back(item);
  return parts;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

double parse_real(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size() || !std::isfinite(v)) {
    throw UsageError("invalid " + what + " '" + text + "'");
  }
  return v;
}

Index parse_index(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  Index v = 0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size()) {
    throw UsageError("invalid " + what + " '" + text + "'");
  }
  return v;
}

std::vector<Index> parse_index_list(const std::string& text, const std::string& what) {
  std::vector<Index> out;
  for (const auto& part : split(text, ',')) out.push_back(parse_index(part, what));
  if (out.empty()) throw UsageError(what + " list is empty");
  return out;
}

json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

json checkpoints_json(const DensityReport& report) {
  json out = json::array();
  for (const auto& rec : report.checkpoints) {
    out.push_back({{"n", rec.n},
                   {"count", rec.count},
                   {"density", rec.density.to_string()},
                   {"density_decimal", rec.density.value()}});
  }
  return out;
}

json protocol_json(const AnalysisProtocol& p) {
  return {{"checkpoints", p.checkpoints()},
          {"zero_tol", p.zero_tol()},
          {"stability_window", p.stability_window()},
          {"positive_tol", p.positive_tol()}};
}

std::string csv_value(const json& v) {
  if (v.is_null()) return "";
  if (v.is_string()) return csv_field(v.get<std::string>());
  if (v.is_number_float()) return dsl::format_number(v.get<double>());
  return csv_field(v.dump());
}

void write_csv(std::ostream& os, const std::vector<std::string>& header,
               const std::vector<std::vector<json>>& rows) {
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << csv_field(header[i]);
  os << "\r\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_value(row[i]);
    os << "\r\n";
  }
}

struct Context {
  RunConfig cfg;
  AnalysisProtocol protocol;
  std::vector<double> grid;
  std::optional<dsl::SequenceProgram> program;
  std::optional<dsl::SequenceProgram> target;
  json config;
};

dsl::SequenceProgram load_program(const RunConfig& cfg) {
  const int sources = !cfg.builtin.empty() + !cfg.program_path.empty() + !cfg.expr.empty();
  if (sources != 1) {
    throw UsageError("give exactly one of --builtin, --program, --expr");
  }
  if (!cfg.builtin.empty()) return dsl::builtin_program(cfg.builtin);
  if (!cfg.program_path.empty()) return dsl::load_program_file(cfg.program_path);
  return dsl::parse_program(cfg.expr);
}

Context make_context(const RunConfig& cfg) {
  Context ctx{cfg,
              AnalysisProtocol(parse_index_list(cfg.checkpoints, "checkpoint"), cfg.zero_tol,
                               cfg.window, cfg.positive_tol),
              {},
              std::nullopt,
              std::nullopt,
              json::object()};
  if (ctx.protocol.max_checkpoint() > cfg.max_index) {
    throw ConfigError("checkpoint " + std::to_string(ctx.protocol.max_checkpoint()) +
                      " exceeds the prefix budget " + std::to_string(cfg.max_index));
  }
  json& c = ctx.config;
  if (is_program_command(cfg.command)) {
    ctx.program = load_program(cfg);
    if (!cfg.builtin.empty()) c["builtin"] = cfg.builtin;
    c["program"] = dsl::format(*ctx.program);
  }
  if (cfg.command == "eval") return ctx;
  if (cfg.command == "density") {
    c["set"] = cfg.set_expr;
  } else {
    ctx.target = dsl::parse_program(cfg.target);
    ctx.grid = expand_grid(cfg.grid);
    check_pointwise_inputs(*ctx.program, *ctx.target, ctx.grid);
    c["target"] = dsl::format(*ctx.target);
    json grid = json::array();
    for (const double x : ctx.grid) grid.push_back(x);
    c["grid"] = grid;
    if (cfg.command != "roughness") {
      c["r"] = cfg.r;
      c["eps"] = cfg.eps;
    }
    if (cfg.command == "roughness") c["tail_delta"] = cfg.delta;
    if (cfg.command == "cauchy" && !cfg.candidates.empty()) c["candidates"] = cfg.candidates;
    if (cfg.command == "repair") {
      c["m_max"] = cfg.m_max;
      c["eps_classical"] = cfg.eps_classical;
    }
  }
  c["protocol"] = protocol_json(ctx.protocol);
  return ctx;
}

double target_at(const Context& ctx, double x) {
  const auto t = ctx.target->evaluate(1, x);
  return t.ok() ? t.value() : std::numeric_limits<double>::quiet_NaN();
}

struct Report {
  json doc;
  std::vector<std::string> csv_header;
  std::vector<std::vector<json>> csv_rows;
};

Report run_density(const Context& ctx) {
  const auto program = dsl::parse_predicate(ctx.cfg.set_expr);
  const auto report = density_verdict(dsl::index_predicate(program), ctx.protocol);
  Report out;
  out.doc = {{"command", "density"},
             {"config", ctx.config},
             {"checkpoints", checkpoints_json(report)},
             {"overall", to_string(report.verdict.kind)}};
  out.csv_header = {"n", "count", "density", "density_decimal", "verdict"};
  for (const auto& rec : report.checkpoints) {
    out.csv_rows.push_back({rec.n, rec.count, rec.density.to_string(), rec.density.value(),
                            to_string(report.verdict.kind)});
  }
  return out;
}

Report run_converge(const Context& ctx) {
  const auto report = pointwise_report(*ctx.program, *ctx.target, ctx.grid, ctx.cfg.r,
                                       ctx.cfg.eps, ctx.protocol, ctx.cfg.jobs);
  Report out;
  json points = json::array();
  out.csv_header = {"x", "verdict", "n", "count", "density", "density_decimal"};
  for (const auto& p : report.points) {
    const auto verdict = to_string(p.report.verdict);
    points.push_back({{"x", p.x},
                      {"verdict", verdict},
                      {"checkpoints", checkpoints_json(p.report.density_report)},
                      {"witness_bad_indices", p.report.witness_bad_indices}});
    for (const auto& rec : p.report.density_report.checkpoints) {
      out.csv_rows.push_back(
          {p.x, verdict, rec.n, rec.count, rec.density.to_string(), rec.density.value()});
    }
  }
  out.doc = {{"command", "converge"},
             {"config", ctx.config},
             {"points", points},
             {"overall", to_string(report.overall)}};
  return out;
}

// Per-point analyses that may fail on their own premise record the failure
// in the point instead of aborting the run.
template <class Fn>
std::vector<json> per_point(const Context& ctx, Fn fn) {
  return parallel_map(ctx.grid.size(), ctx.cfg.jobs, [&](std::size_t i) -> json {
    const double x = ctx.grid[i];
    try {
      return fn(x);
    } catch (const EstimationError& e) {
      return {{"x", x}, {"verdict", "undecided"}, {"checkpoints", json::array()},
              {"witness_bad_indices", json::array()}, {"error", e.what()}};
    } catch (const CandidateError& e) {
      return {{"x", x}, {"verdict", "undecided"}, {"checkpoints", json::array()},
              {"witness_bad_indices", json::array()}, {"error", e.what()}};
    }
  });
}

std::string overall_of(const std::vector<json>& points) {
  std::vector<Verdict> verdicts;
  for (const auto& p : points) {
    const auto v = p["verdict"].get<std::string>();
    verdicts.push_back(v == "accept" ? Verdict::Accept
                       : v == "reject" ? Verdict::Reject
                                       : Verdict::Undecided);
  }
  return to_string(combine(verdicts));
}

Report run_roughness(const Context& ctx) {
  auto points = per_point(ctx, [&](double x) -> json {
    const auto est = minimal_roughness(ctx.program->at(x, ctx.cfg.max_index), target_at(ctx, x),
                                       ctx.protocol, ctx.cfg.delta);
    json cps = json::array();
    for (const auto& [n, q] : est.per_checkpoint) cps.push_back({{"n", n}, {"quantile", number(q)}});
    return {{"x", x},
            {"verdict", to_string(est.cross_check)},
            {"checkpoints", cps},
            {"witness_bad_indices", est.tail_indices},
            {"r_hat", number(est.r_hat)},
            {"bracket", {number(est.bracket.first), number(est.bracket.second)}},
            {"tail_delta", est.tail_delta}};
  });
  Report out;
  out.csv_header = {"x", "verdict", "n", "quantile", "r_hat"};
  for (const auto& p : points) {
    for (const auto& cp : p["checkpoints"]) {
      out.csv_rows.push_back({p["x"], p["verdict"], cp["n"], cp["quantile"],
                              p.contains("r_hat") ? p["r_hat"] : json()});
    }
  }
  const auto overall = overall_of(points);
  out.doc = {{"command", "roughness"},
             {"config", ctx.config},
             {"points", points},
             {"overall", overall}};
  return out;
}

Report run_cauchy(const Context& ctx) {
  std::vector<Index> candidates;
  if (!ctx.cfg.candidates.empty()) candidates = parse_index_list(ctx.cfg.candidates, "candidate");
  else candidates = default_candidates(ctx.protocol.max_checkpoint());

  auto points = per_point(ctx, [&](double x) -> json {
    const auto seq = ctx.program->at(x, ctx.cfg.max_index);
    const auto report = rough_cauchy_verdict(seq, ctx.cfg.r, ctx.cfg.eps, candidates, ctx.protocol);
    const auto& deciding = report.per_candidate.back();
    const auto scan = scan_density(bad_index_set(seq, {deciding.anchor_value, ctx.cfg.r, ctx.cfg.eps}),
                                   ctx.protocol, kWitnessLimit);
    json tried = json::array();
    for (const auto& c : report.per_candidate) {
      tried.push_back({{"N", c.n},
                       {"anchor_value", number(c.anchor_value)},
                       {"verdict", to_string(c.density_report.verdict.kind)},
                       {"final_density", c.density_report.final_record().density.to_string()}});
    }
    return {{"x", x},
            {"verdict", to_string(report.verdict)},
            {"checkpoints", checkpoints_json(scan.report)},
            {"witness_bad_indices", scan.first_members},
            {"witness_N", report.witness_n ? json(*report.witness_n) : json()},
            {"candidates", tried}};
  });
  Report out;
  out.csv_header = {"x", "verdict", "witness_N", "n", "count", "density", "density_decimal"};
  for (const auto& p : points) {
    for (const auto& cp : p["checkpoints"]) {
      out.csv_rows.push_back({p["x"], p["verdict"], p.value("witness_N", json()), cp["n"],
                              cp["count"], cp["density"], cp["density_decimal"]});
    }
  }
  const auto overall = overall_of(points);
  out.doc = {{"command", "cauchy"}, {"config", ctx.config}, {"points", points}, {"overall", overall}};
  return out;
}

json band_json(const Band& b) {
  return {{"lo", b.lo()}, {"hi", b.hi()}, {"center", b.center()}, {"halfwidth", b.halfwidth()}};
}

Report run_repair(const Context& ctx) {
  auto points = per_point(ctx, [&](double x) -> json {
    const auto seq = ctx.program->at(x, ctx.cfg.max_index).materialized(ctx.protocol.max_checkpoint());
    const auto premise = rough_cauchy_verdict(seq, ctx.cfg.r, ctx.cfg.eps, ctx.protocol);
    json point = {{"x", x},
                  {"verdict", to_string(premise.verdict)},
                  {"checkpoints", json::array()},
                  {"witness_bad_indices", json::array()},
                  {"premise", to_string(premise.verdict)}};
    if (premise.verdict != Verdict::Accept) return point;
    try {
      const auto chain =
          derive_thresholds(seq, build_band_chain(seq, ctx.cfg.m_max, ctx.protocol), ctx.protocol);
      const auto result = repair_sequence(seq, chain, ctx.protocol);
      const auto check = verify_repair(seq, result, ctx.protocol, ctx.cfg.eps_classical);
      const auto scan = scan_density(result.exceptional, ctx.protocol, kWitnessLimit);
      json stages = json::array();
      for (const auto& s : chain.stages) {
        json st = band_json(s.band);
        st["m"] = s.m;
        st["anchor_index"] = s.anchor_index;
        st["threshold"] = s.threshold;
        stages.push_back(st);
      }
      json seed = band_json(chain.seed);
      seed["anchor_index"] = chain.seed_anchor;
      point["verdict"] = check.passed() ? "accept" : "reject";
      point["checkpoints"] = checkpoints_json(result.modification_density);
      point["witness_bad_indices"] = scan.first_members;
      point["chain"] = {{"seed", seed},
                        {"stages", stages},
                        {"limit_estimate", chain.limit_estimate},
                        {"stop_reason", chain.stop_reason}};
      point["checks"] = {{"modification_zero", check.modification_zero},
                         {"classical_convergence", check.classical_convergence},
                         {"exception_count", check.exception_count},
                         {"rough_stat_accepts", check.rough_stat_accepts},
                         {"threshold_bound_holds", check.threshold_bound_holds}};
    } catch (const NotCauchyError& e) {
      point["verdict"] = "reject";
      point["error"] = e.what();
    } catch (const ThresholdError& e) {
      point["verdict"] = "reject";
      point["error"] = e.what();
    }
    return point;
  });
  Report out;
  out.csv_header = {"x", "verdict", "n", "modified_count", "density", "density_decimal"};
  for (const auto& p : points) {
    for (const auto& cp : p["checkpoints"]) {
      out.csv_rows.push_back(
          {p["x"], p["verdict"], cp["n"], cp["count"], cp["density"], cp["density_decimal"]});
    }
  }
  const auto overall = overall_of(points);
  out.doc = {{"command", "repair"}, {"config", ctx.config}, {"points", points}, {"overall", overall}};
  return out;
}

Report run_eval(const Context& ctx) {
  if (ctx.cfg.k < 1) throw UsageError("--k must be >= 1");
  const auto result = dsl::evaluate(*ctx.program, ctx.cfg.k, ctx.cfg.x);
  json point = {{"k", ctx.cfg.k}, {"x", ctx.cfg.x}};
  if (result.ok()) {
    point["value"] = number(result.value());
  } else {
    point["value"] = nullptr;
    point["error"] = dsl::to_string(result.error());
  }
  Report out;
  out.doc = {{"command", "eval"},
             {"config", ctx.config},
             {"points", json::array({point})},
             {"overall", result.ok() ? "ok" : "error"}};
  out.csv_header = {"k", "x", "value", "error"};
  out.csv_rows.push_back({point["k"], point["x"], point["value"], point.value("error", json())});
  return out;
}

void add_protocol_flags(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--checkpoints", cfg.checkpoints, "comma-separated prefix lengths");
  sub->add_option("--zero-tol", cfg.zero_tol, "density at or below this counts as zero");
  sub->add_option("--window", cfg.window, "number of final checkpoints that must agree");
  sub->add_option("--positive-tol", cfg.positive_tol, "max spread for a positive density");
  sub->add_option("--format", cfg.format, "report format")->check(CLI::IsMember({"json", "csv"}));
  sub->add_option("--out", cfg.out, "write the report to PATH instead of standard output");
  sub->add_option("--jobs", cfg.jobs, "worker threads")->check(CLI::PositiveNumber);
  sub->add_option("--max-index", cfg.max_index, "largest index a sequence may be read at")
      ->check(CLI::PositiveNumber);
}

void add_program_flags(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--builtin", cfg.builtin, "built-in program name (example21)");
  sub->add_option("--program", cfg.program_path, "path to a .seq program file");
  sub->add_option("--expr", cfg.expr, "program text");
}

void add_grid_flags(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--target", cfg.target, "limit function f(x), must not use k");
  sub->add_option("--grid", cfg.grid, "start:stop:step or comma list");
}

void require_finite(double v, const char* flag) {
  if (!std::isfinite(v)) throw UsageError(std::string(flag) + " must be finite");
}

}  // namespace

std::vector<double> expand_grid(const std::string& text) {
  std::vector<double> grid;
  const auto colon = split(text, ':');
  if (colon.size() == 3) {
    const double start = parse_real(colon[0], "grid start");
    const double stop = parse_real(colon[1], "grid stop");
    const double step = parse_real(colon[2], "grid step");
    if (!(step > 0.0)) throw UsageError("grid step must be > 0");
    if (stop < start) throw UsageError("grid stop must be >= start");
    const double span = std::floor((stop - start) / step + 1e-9);
    if (span > 1e7) throw UsageError("grid has too many points");
    const auto count = static_cast<std::size_t>(span) + 1;
    for (std::size_t i = 0; i < count; ++i) {
      grid.push_back(std::min(start + static_cast<double>(i) * step, stop));
    }
  } else if (colon.size() == 1) {
    for (const auto& part : split(text, ',')) grid.push_back(parse_real(part, "grid point"));
  } else {
    throw UsageError("grid must be start:stop:step or a comma list");
  }
  if (grid.empty()) throw UsageError("grid is empty");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw UsageError("grid must be strictly increasing");
  }
  return grid;
}

RunConfig parse_flags(const std::vector<std::string>& args, std::ostream& out) {
  RunConfig cfg;
  CLI::App app{"Rough statistical convergence analysis", "roughstat"};
  app.require_subcommand(1, 1);

  auto* density = app.add_subcommand("density", "natural density of an index set");
  density->add_option("--set", cfg.set_expr, "boolean expression over k")->required();
  add_protocol_flags(density, cfg);

  auto* converge = app.add_subcommand("converge", "pointwise rough statistical convergence");
  auto* roughness = app.add_subcommand("roughness", "minimal roughness degree per grid point");
  auto* cauchy = app.add_subcommand("cauchy", "rough statistical Cauchy test per grid point");
  auto* repair = app.add_subcommand("repair", "band construction and repaired sequence");
  for (auto* sub : {converge, roughness, cauchy, repair}) {
    add_program_flags(sub, cfg);
    add_grid_flags(sub, cfg);
    add_protocol_flags(sub, cfg);
  }
  for (auto* sub : {converge, cauchy, repair}) {
    sub->add_option("--r", cfg.r, "roughness degree");
    sub->add_option("--eps", cfg.eps, "epsilon");
  }
  roughness->add_option("--delta", cfg.delta, "tail fraction for the quantile");
  cauchy->add_option("--candidates", cfg.candidates, "comma-separated anchor indices");
  repair->add_option("--m-max", cfg.m_max, "number of band stages")->check(CLI::Range(1, 60));
  repair->add_option("--eps-classical", cfg.eps_classical, "tolerance for classical convergence");

  auto* eval = app.add_subcommand("eval", "evaluate a program at (k, x)");
  add_program_flags(eval, cfg);
  eval->add_option("--k", cfg.k, "index")->required();
  eval->add_option("--x", cfg.x, "point")->required();
  add_protocol_flags(eval, cfg);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    cfg.command.clear();
    return cfg;
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }
  for (auto* sub : app.get_subcommands()) cfg.command = sub->get_name();

  require_finite(cfg.r, "--r");
  require_finite(cfg.eps, "--eps");
  require_finite(cfg.zero_tol, "--zero-tol");
  require_finite(cfg.positive_tol, "--positive-tol");
  require_finite(cfg.delta, "--delta");
  require_finite(cfg.eps_classical, "--eps-classical");
  require_finite(cfg.x, "--x");
  if (cfg.r < 0.0) throw ConfigError("--r must be >= 0");
  if (!(cfg.eps > 0.0)) throw ConfigError("--eps must be > 0");
  if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) throw ConfigError("--delta must lie in (0, 1)");
  if (!(cfg.eps_classical > 0.0)) throw ConfigError("--eps-classical must be > 0");
  return cfg;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    const RunConfig cfg = parse_flags(args, out);
    if (cfg.command.empty()) return kOk;
    const Context ctx = make_context(cfg);

    Report report;
    if (cfg.command == "density") report = run_density(ctx);
    else if (cfg.command == "converge") report = run_converge(ctx);
    else if (cfg.command == "roughness") report = run_roughness(ctx);
    else if (cfg.command == "cauchy") report = run_cauchy(ctx);
    else if (cfg.command == "repair") report = run_repair(ctx);
    else report = run_eval(ctx);

    std::ofstream file;
    std::ostream* sink = &out;
    if (!cfg.out.empty()) {
      file.open(cfg.out, std::ios::binary);
      if (!file) throw UsageError("cannot open output file " + cfg.out);
      sink = &file;
    }
    if (cfg.format == "csv") {
      write_csv(*sink, report.csv_header, report.csv_rows);
    } else {
      *sink << report.doc.dump(2) << '\n';
    }
    return kOk;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const dsl::DslError& e) {
    err << "program error: " << e.what() << '\n';
    return kDsl;
  } catch (const dsl::ProgramError& e) {
    err << "program error: " << e.what() << '\n';
    return kDsl;
  } catch (const Error& e) {
    err << "configuration error: " << e.what() << '\n';
    return kConfig;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kInternal;
  }
}

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace roughstat::cli
