#include "sdof/acceptance.hpp"
#include "sdof/analysis.hpp"
#include "sdof/error.hpp"
#include "sdof/fm.hpp"
#include "sdof/io.hpp"
#include "sdof/regions.hpp"
#include "sdof/schemes.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

using namespace sdof;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitInvariant = 2;

struct SimulateConfig {
  std::string scheme;
  int seeds = 20;
  std::uint64_t first_seed = 0;
  std::vector<int> p_exp{20, 30, 40, 50, 60};
  std::string mode = "noiseless";
  std::string sub = "tjsp53";
  std::optional<int> multiplier;
  std::optional<int> batch;
  double tolerance = 0.05;
  std::string out = "-";
  std::string summary;
  std::string dump_trace;
  std::string dump_system;
};

struct RegionConfig {
  std::string theorem;
  std::vector<std::string> lambda;
  bool symmetric = false;
  std::string compare;
  std::string plot;
  std::string out = "-";
};

struct FmConfig {
  std::string input;
  bool outer_bound = false;
  std::vector<std::string> eliminate;
};

struct VerifyConfig {
  std::string sub = "tjsp53";
  std::string fault = "none";
  std::vector<int> only;
  int decode_seeds = 100;
  int slope_seeds = 20;
};

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw LabError(ErrorCode::ConfigError, "cannot read '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw LabError(ErrorCode::ConfigError, "'" + path + "' is not valid JSON: " + e.what());
  }
}

/// Rejects keys outside the allowed set.
void check_keys(const Json& j, const std::vector<std::string>& allowed) {
  if (!j.is_object()) throw LabError(ErrorCode::ConfigError, "config must be a JSON object");
  for (const auto& [k, v] : j.items())
    if (std::find(allowed.begin(), allowed.end(), k) == allowed.end())
      throw LabError(ErrorCode::ConfigError, "unknown config key '" + k + "'");
}

template <class T>
void take(const Json& j, const char* key, T& dst) {
  if (!j.contains(key)) return;
  try {
    dst = j.at(key).get<T>();
  } catch (const Json::exception&) {
    throw LabError(ErrorCode::ConfigError, std::string("bad type for '") + key + "'");
  }
}

template <class T>
void take(const Json& j, const char* key, std::optional<T>& dst) {
  if (!j.contains(key)) return;
  T v{};
  take(j, key, v);
  dst = v;
}

std::ostream& open_out(const std::string& path, std::ofstream& file) {
  if (path == "-" || path.empty()) return std::cout;
  file.open(path);
  if (!file) throw LabError(ErrorCode::ConfigError, "cannot write '" + path + "'");
  return file;
}

int thread_count() {
  if (const char* env = std::getenv("LAB_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

// ---------------------------------------------------------------------------
// simulate

struct ResultRow {
  std::string scheme_id;
  std::uint64_t seed = 0;
  double power = 0;
  int slots = 0;
  int symbols_rx1 = 0, symbols_rx2 = 0;
  double rate_rx1_bits = 0, rate_rx2_bits = 0, leakage_bits = 0, decode_residual_max = 0;
};

const char* kCsvHeader =
    "scheme_id,seed,power,slots,symbols_rx1,symbols_rx2,rate_rx1_bits,rate_rx2_bits,leakage_bits,"
    "decode_residual_max";

std::string csv_line(const ResultRow& r) {
  std::ostringstream s;
  s << r.scheme_id << ',' << r.seed << ',' << format_double(r.power) << ',' << r.slots << ',' << r.symbols_rx1 << ','
    << r.symbols_rx2 << ',' << format_double(r.rate_rx1_bits) << ',' << format_double(r.rate_rx2_bits) << ','
    << format_double(r.leakage_bits) << ',' << format_double(r.decode_residual_max);
  return s.str();
}

struct SeedOutcome {
  std::vector<ResultRow> rows;
  double slope_rx1 = 0, slope_rx2 = 0, slope_leak = 0;
  bool decode_failed = false;
  std::string error;  // hard invariant, e.g. a CSIT violation
};

int cmd_simulate(const SimulateConfig& cfg) {
  const SchemeId id = parse_scheme_id(cfg.scheme);
  if (cfg.seeds < 1) throw LabError(ErrorCode::ConfigError, "seeds must be at least 1");
  if (cfg.p_exp.size() < 2) throw LabError(ErrorCode::ConfigError, "p_exp needs at least two exponents");
  if (!std::is_sorted(cfg.p_exp.begin(), cfg.p_exp.end()) ||
      std::adjacent_find(cfg.p_exp.begin(), cfg.p_exp.end()) != cfg.p_exp.end())
    throw LabError(ErrorCode::ConfigError, "p_exp must be strictly increasing");
  if (cfg.mode != "noiseless" && cfg.mode != "noisy")
    throw LabError(ErrorCode::ConfigError, "mode must be noiseless or noisy");
  if (!(cfg.tolerance > 0)) throw LabError(ErrorCode::ConfigError, "tolerance must be positive");
  SchemeParams params;
  try {
    params.sub = parse_sub_protocol(cfg.sub);
  } catch (const LabError& e) {
    throw LabError(ErrorCode::ConfigError, e.what());
  }
  params.multiplier = cfg.multiplier;
  params.batch = cfg.batch;
  SchemeSpec spec;
  try {
    spec = build_scheme(id, params);
  } catch (const LabError& e) {
    throw LabError(ErrorCode::ConfigError, e.what());
  }
  const auto acc = accounting(spec);
  const auto grid = power_grid_from_exponents(cfg.p_exp);
  const RunMode mode = cfg.mode == "noisy" ? RunMode::Noisy : RunMode::Noiseless;
  const int sym1 = acc.symbols_per_receiver.count(Node::Rx1) ? acc.symbols_per_receiver.at(Node::Rx1) : 0;
  const int sym2 = acc.symbols_per_receiver.count(Node::Rx2) ? acc.symbols_per_receiver.at(Node::Rx2) : 0;
  const bool two = spec.topology.receivers > 1;

  std::vector<SeedOutcome> outcomes(static_cast<std::size_t>(cfg.seeds));
  std::atomic<int> next{0};
  const auto worker = [&] {
    for (int i = next++; i < cfg.seeds; i = next++) {
      auto& o = outcomes[static_cast<std::size_t>(i)];
      const std::uint64_t seed = cfg.first_seed + static_cast<std::uint64_t>(i);
      try {
        const auto real = sample_channel(spec.topology, std::max(spec.n_slots(), 1), seed);
        const auto sys = assemble_effective_system(run_scheme(spec, real, PowerBudget(1.0), mode, seed));
        const auto rate = [&](Node n, double p) { return two || n == Node::Rx1 ? achievable_rate(sys, n, PowerBudget(p)).bits : 0.0; };
        for (double p : grid) {
          const auto tr = run_scheme(spec, real, PowerBudget(p), mode, seed);
          const auto rep = decode(tr);
          if (mode == RunMode::Noiseless && !rep.success()) o.decode_failed = true;
          o.rows.push_back({to_string(id), seed, p, spec.n_slots(), sym1, sym2, rate(Node::Rx1, p),
                            rate(Node::Rx2, p), leakage_bits(spec, sys, PowerBudget(p)), rep.max_residual()});
        }
        o.slope_rx1 = estimate_slope([&](double p) { return rate(Node::Rx1, p); }, spec.n_slots(), grid).slope;
        o.slope_rx2 = estimate_slope([&](double p) { return rate(Node::Rx2, p); }, spec.n_slots(), grid).slope;
        o.slope_leak = estimate_slope([&](double p) { return leakage_bits(spec, sys, PowerBudget(p)); },
                                      spec.n_slots(), grid)
                           .slope;
      } catch (const LabError& e) {
        o.error = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  const int n_threads = std::min(thread_count(), cfg.seeds);
  for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  std::ofstream file;
  std::ostream& out = open_out(cfg.out, file);
  out << kCsvHeader << '\n';
  for (const auto& o : outcomes)
    for (const auto& r : o.rows) out << csv_line(r) << '\n';
  out.flush();

  double s1 = 0, s2 = 0, sl = 0;
  int failures = 0;
  std::vector<std::string> errors;
  for (const auto& o : outcomes) {
    s1 += o.slope_rx1;
    s2 += o.slope_rx2;
    sl += o.slope_leak;
    if (o.decode_failed) ++failures;
    if (!o.error.empty()) errors.push_back(o.error);
  }
  const double n = cfg.seeds;
  s1 /= n;
  s2 /= n;
  sl /= n;
  const double nom1 = acc.nominal_sdof.count(Node::Rx1) ? to_double(acc.nominal_sdof.at(Node::Rx1)) : 0.0;
  const double nom2 = acc.nominal_sdof.count(Node::Rx2) ? to_double(acc.nominal_sdof.at(Node::Rx2)) : 0.0;
  const bool secure = !spec.adversaries.empty();
  const bool pass1 = std::abs(s1 - nom1) <= cfg.tolerance;
  const bool pass2 = !two || std::abs(s2 - nom2) <= cfg.tolerance;
  const bool pass_leak = !secure || sl <= cfg.tolerance;

  Json summary{{"scheme", to_string(id)},
               {"sub", to_string(params.sub)},
               {"seeds", cfg.seeds},
               {"p_exp", cfg.p_exp},
               {"mode", cfg.mode},
               {"slots", spec.n_slots()},
               {"tolerance", cfg.tolerance},
               {"rate_slope", {{"rx1", s1}}},
               {"nominal_sdof", {{"rx1", to_json(acc.nominal_sdof.count(Node::Rx1) ? acc.nominal_sdof.at(Node::Rx1) : Rational(0))}}},
               {"leakage_slope", sl},
               {"secure", secure},
               {"decode_failures", failures},
               {"errors", errors}};
  if (two) {
    summary["rate_slope"]["rx2"] = s2;
    summary["nominal_sdof"]["rx2"] = to_json(acc.nominal_sdof.at(Node::Rx2));
  }
  summary["pass"] = pass1 && pass2 && pass_leak && failures == 0 && errors.empty();
  if (cfg.summary.empty()) {
    std::cerr << summary.dump(2) << '\n';
  } else {
    std::ofstream sf(cfg.summary);
    if (!sf) throw LabError(ErrorCode::ConfigError, "cannot write '" + cfg.summary + "'");
    sf << summary.dump(2) << '\n';
  }
  // Debug dumps: first seed, largest power.
  if (!cfg.dump_trace.empty() || !cfg.dump_system.empty()) {
    const auto real = sample_channel(spec.topology, std::max(spec.n_slots(), 1), cfg.first_seed);
    const auto tr = run_scheme(spec, real, PowerBudget(grid.back()), mode, cfg.first_seed);
    std::ofstream f;
    if (!cfg.dump_trace.empty()) open_out(cfg.dump_trace, f) << to_json(tr).dump(2) << '\n';
    std::ofstream g;
    if (!cfg.dump_system.empty())
      open_out(cfg.dump_system, g) << to_json(assemble_effective_system(tr)).dump(2) << '\n';
  }
  if (failures > 0 || !errors.empty()) {
    for (const auto& e : errors) std::cerr << "invariant violated: " << e << '\n';
    if (failures > 0) std::cerr << "invariant violated: noiseless decode failed on " << failures << " seed(s)\n";
    return kExitInvariant;
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// region

StateSchedule schedule_from_flags(const std::string& theorem, const std::vector<std::string>& lambda, bool symmetric) {
  if (lambda.empty()) return default_schedule(theorem);
  std::map<std::string, Rational> m;
  for (const auto& item : lambda) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw LabError(ErrorCode::ConfigError, "lambda entries look like pd=1/6, got '" + item + "'");
    std::string key = item.substr(0, eq);
    std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) { return std::toupper(c); });
    try {
      m[key] += parse_rational(item.substr(eq + 1));
    } catch (const LabError& e) {
      throw LabError(ErrorCode::ConfigError, e.what());
    }
  }
  try {
    return make_schedule(m, symmetric);
  } catch (const LabError& e) {
    throw LabError(ErrorCode::ConfigError, e.what());
  }
}

std::vector<std::string> split_commas(const std::vector<std::string>& in) {
  std::vector<std::string> out;
  for (const auto& s : in) {
    std::stringstream ss(s);
    std::string part;
    while (std::getline(ss, part, ','))
      if (!part.empty()) out.push_back(part);
  }
  return out;
}

void write_plot(const std::string& path, const std::vector<const RegionPolytope*>& regions) {
  std::ofstream f(path);
  if (!f) throw LabError(ErrorCode::ConfigError, "cannot write '" + path + "'");
  for (const auto* r : regions) {
    // Boundary in counter-clockwise order around the centroid, closed.
    auto v = r->vertices();
    double cx = 0, cy = 0;
    for (const auto& p : v) {
      cx += to_double(p.first);
      cy += to_double(p.second);
    }
    cx /= static_cast<double>(v.size());
    cy /= static_cast<double>(v.size());
    std::sort(v.begin(), v.end(), [&](const Point2& a, const Point2& b) {
      return std::atan2(to_double(a.second) - cy, to_double(a.first) - cx) <
             std::atan2(to_double(b.second) - cy, to_double(b.first) - cx);
    });
    f << "# " << r->theorem << "\n";
    for (const auto& p : v) f << format_double(to_double(p.first)) << ' ' << format_double(to_double(p.second)) << '\n';
    if (!v.empty())
      f << format_double(to_double(v.front().first)) << ' ' << format_double(to_double(v.front().second)) << '\n';
    f << "\n\n";
  }
}

int cmd_region(const RegionConfig& cfg) {
  const auto lambda = split_commas(cfg.lambda);
  RegionPolytope region = region_from_theorem(cfg.theorem, schedule_from_flags(cfg.theorem, lambda, cfg.symmetric));
  Json out = to_json(region);
  std::optional<RegionPolytope> other;
  if (!cfg.compare.empty()) {
    // Same schedule when the arities agree, else the other theorem's default.
    StateSchedule sched = default_schedule(cfg.compare);
    if (!lambda.empty()) {
      const auto mine = schedule_from_flags(cfg.theorem, lambda, cfg.symmetric);
      if (mine.arity() == sched.arity()) sched = mine;
    }
    other = region_from_theorem(cfg.compare, sched);
    Json gap;
    try {
      const auto g = bound_gap(region, *other);
      gap = {{"contained", true},
             {"inner_max_sum", to_json(g.inner_max_sum)},
             {"outer_max_sum", to_json(g.outer_max_sum)},
             {"inner_symmetric", to_json(g.inner_symmetric)},
             {"outer_symmetric", to_json(g.outer_symmetric)},
             {"symmetric_gap", to_json(g.symmetric_gap)}};
    } catch (const LabError& e) {
      if (e.code() != ErrorCode::InnerNotContained) throw;
      gap = {{"contained", false}, {"reason", e.what()}};
    }
    out = {{"region", to_json(region)}, {"compare", to_json(*other)}, {"bound_gap", gap}};
  }
  std::ofstream file;
  open_out(cfg.out, file) << out.dump(2) << '\n';
  if (!cfg.plot.empty()) {
    std::vector<const RegionPolytope*> rs{&region};
    if (other) rs.push_back(&*other);
    write_plot(cfg.plot, rs);
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// fm

int cmd_fm(const FmConfig& cfg) {
  BoundedTermSystem sys;
  std::vector<std::string> elim = split_commas(cfg.eliminate);
  if (cfg.outer_bound) {
    sys = mr_outer_bound_system();
    if (elim.empty()) elim = {"a", "b", "c", "e", "f"};
  } else {
    if (cfg.input.empty()) throw LabError(ErrorCode::ConfigError, "fm needs --input or --outer-bound");
    const Json j = read_json_file(cfg.input);
    sys = term_system_from_json(j);
    if (elim.empty() && j.contains("eliminate")) elim = j.at("eliminate").get<std::vector<std::string>>();
  }
  const auto proj = fm_eliminate_all(sys, elim);
  Json out = to_json(proj);
  out["eliminated"] = elim;
  Json lines = Json::array();
  for (const auto& c : proj.constraints()) lines.push_back(to_string(c));
  out["inequalities"] = lines;
  const auto& vars = proj.variables();
  if (vars.size() == 2 && vars[0] == "d1" && vars[1] == "d2") out["region"] = to_json(region_from_system(proj));
  std::cout << out.dump(2) << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------
// verify

int cmd_verify(const VerifyConfig& cfg) {
  AcceptanceOptions opt;
  if (cfg.sub != "tjsp53" && cfg.sub != "fallback32")
    throw LabError(ErrorCode::ConfigError, "unknown sub-protocol '" + cfg.sub + "'");
  opt.tjsp53_available = cfg.sub == "tjsp53";
  try {
    opt.fault = parse_fault(cfg.fault);
  } catch (const LabError& e) {
    throw LabError(ErrorCode::ConfigError, e.what());
  }
  opt.only = cfg.only;
  opt.decode_seeds = cfg.decode_seeds;
  opt.slope_seeds = cfg.slope_seeds;
  if (opt.decode_seeds < 1 || opt.slope_seeds < 1) throw LabError(ErrorCode::ConfigError, "seed counts must be positive");
  opt.on_result = [](const CriterionResult& r) { std::cout << format_result(r) << std::endl; };
  const auto results = run_acceptance(opt);
  const bool ok = all_passed(results);
  int passed = 0, skipped = 0;
  for (const auto& r : results) {
    passed += r.status == CriterionStatus::Pass;
    skipped += r.status == CriterionStatus::Skipped;
  }
  std::cout << passed << " passed, " << skipped << " skipped, " << (results.size() - passed - skipped) << " failed\n";
  return ok ? kExitOk : kExitInvariant;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Secure degrees-of-freedom laboratory"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "JSON config; flags override its values");

  SimulateConfig sim;
  auto* simulate = app.add_subcommand("simulate", "run a scheme over seeds and powers, write CSV rows");
  simulate->add_option("--scheme", sim.scheme, "scheme id, e.g. mr_ddp");
  simulate->add_option("--seeds", sim.seeds, "number of seeds");
  simulate->add_option("--first-seed", sim.first_seed, "first seed");
  simulate->add_option("--p-exp", sim.p_exp, "powers as exponents of two")->delimiter(',');
  simulate->add_option("--mode", sim.mode, "noiseless or noisy");
  simulate->add_option("--sub", sim.sub, "sub-protocol: tjsp53 or fallback32");
  auto* opt_mult = simulate->add_option("--multiplier", sim.multiplier, "phase-A blocks in the superframe");
  auto* opt_batch = simulate->add_option("--batch", sim.batch, "common pairs per multicast batch");
  simulate->add_option("--tolerance", sim.tolerance, "slope tolerance");
  simulate->add_option("--out", sim.out, "CSV path ('-' for stdout)");
  simulate->add_option("--summary", sim.summary, "summary JSON path (stderr if omitted)");
  simulate->add_option("--dump-trace", sim.dump_trace, "JSON trace of the first seed at the largest power");
  simulate->add_option("--dump-system", sim.dump_system, "JSON effective linear system of the same run");
  (void)opt_mult;
  (void)opt_batch;

  RegionConfig reg;
  auto* region = app.add_subcommand("region", "theorem region as exact vertices and inequalities");
  region->add_option("--theorem", reg.theorem, "thm1 .. thm8");
  region->add_option("--lambda", reg.lambda, "state fractions, e.g. pd=1/6,dp=5/6");
  region->add_flag("--symmetric", reg.symmetric, "enforce the paired-state symmetry");
  region->add_option("--compare", reg.compare, "outer theorem for containment");
  region->add_option("--plot", reg.plot, "write closed vertex loops as plot data");
  region->add_option("--out", reg.out, "JSON path ('-' for stdout)");

  VerifyConfig ver;
  auto* verify = app.add_subcommand("verify", "run the acceptance suite");
  verify->add_option("--sub", ver.sub, "tjsp53, or fallback32 to skip the gated checks");
  verify->add_option("--inject-fault", ver.fault, "none, axis-instead-of-null, drop-last-slot, skew-thm6");
  verify->add_option("--only", ver.only, "criterion ids")->delimiter(',');
  verify->add_option("--decode-seeds", ver.decode_seeds, "seeds per scheme for decodability");
  verify->add_option("--slope-seeds", ver.slope_seeds, "seeds per slope estimate");

  FmConfig fmc;
  auto* fm = app.add_subcommand("fm", "Fourier-Motzkin projection of a bounded-term system");
  fm->add_option("--input", fmc.input, "system JSON");
  fm->add_flag("--outer-bound", fmc.outer_bound, "use the built-in outer-bound system");
  fm->add_option("--eliminate", fmc.eliminate, "variables to eliminate, in order");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    Json file = Json::object();
    if (!config_path.empty()) file = read_json_file(config_path);
    if (simulate->parsed()) {
      SimulateConfig base;
      check_keys(file, {"scheme", "seeds", "first_seed", "p_exp", "mode", "sub", "multiplier", "batch", "tolerance",
                        "out", "summary", "dump_trace", "dump_system"});
      take(file, "scheme", base.scheme);
      take(file, "seeds", base.seeds);
      take(file, "first_seed", base.first_seed);
      take(file, "p_exp", base.p_exp);
      take(file, "mode", base.mode);
      take(file, "sub", base.sub);
      take(file, "multiplier", base.multiplier);
      take(file, "batch", base.batch);
      take(file, "tolerance", base.tolerance);
      take(file, "out", base.out);
      take(file, "summary", base.summary);
      take(file, "dump_trace", base.dump_trace);
      take(file, "dump_system", base.dump_system);
      // Flags given on the command line win.
      const auto given = [&](const char* flag) { return simulate->count(flag) > 0; };
      if (given("--scheme")) base.scheme = sim.scheme;
      if (given("--seeds")) base.seeds = sim.seeds;
      if (given("--first-seed")) base.first_seed = sim.first_seed;
      if (given("--p-exp")) base.p_exp = sim.p_exp;
      if (given("--mode")) base.mode = sim.mode;
      if (given("--sub")) base.sub = sim.sub;
      if (given("--multiplier")) base.multiplier = sim.multiplier;
      if (given("--batch")) base.batch = sim.batch;
      if (given("--tolerance")) base.tolerance = sim.tolerance;
      if (given("--out")) base.out = sim.out;
      if (given("--summary")) base.summary = sim.summary;
      if (given("--dump-trace")) base.dump_trace = sim.dump_trace;
      if (given("--dump-system")) base.dump_system = sim.dump_system;
      if (base.scheme.empty()) throw LabError(ErrorCode::ConfigError, "simulate needs --scheme");
      return cmd_simulate(base);
    }
    if (region->parsed()) {
      RegionConfig base;
      check_keys(file, {"theorem", "lambda", "symmetric", "compare", "plot", "out"});
      take(file, "theorem", base.theorem);
      if (file.contains("lambda")) {
        const Json& l = file.at("lambda");
        if (!l.is_object()) throw LabError(ErrorCode::ConfigError, "'lambda' must map states to fractions");
        for (const auto& [k, v] : l.items()) base.lambda.push_back(k + "=" + to_string(rational_from_json(v)));
      }
      take(file, "symmetric", base.symmetric);
      take(file, "compare", base.compare);
      take(file, "plot", base.plot);
      take(file, "out", base.out);
      if (region->count("--theorem")) base.theorem = reg.theorem;
      if (region->count("--lambda")) base.lambda = reg.lambda;
      if (region->count("--symmetric")) base.symmetric = reg.symmetric;
      if (region->count("--compare")) base.compare = reg.compare;
      if (region->count("--plot")) base.plot = reg.plot;
      if (region->count("--out")) base.out = reg.out;
      if (base.theorem.empty()) throw LabError(ErrorCode::ConfigError, "region needs --theorem");
      return cmd_region(base);
    }
    if (verify->parsed()) {
      check_keys(file, {"sub", "inject_fault", "only", "decode_seeds", "slope_seeds"});
      VerifyConfig base;
      take(file, "sub", base.sub);
      take(file, "inject_fault", base.fault);
      take(file, "only", base.only);
      take(file, "decode_seeds", base.decode_seeds);
      take(file, "slope_seeds", base.slope_seeds);
      if (verify->count("--sub")) base.sub = ver.sub;
      if (verify->count("--inject-fault")) base.fault = ver.fault;
      if (verify->count("--only")) base.only = ver.only;
      if (verify->count("--decode-seeds")) base.decode_seeds = ver.decode_seeds;
      if (verify->count("--slope-seeds")) base.slope_seeds = ver.slope_seeds;
      return cmd_verify(base);
    }
    if (fm->parsed()) {
      check_keys(file, {"input", "outer_bound", "eliminate"});
      FmConfig base;
      take(file, "input", base.input);
      take(file, "outer_bound", base.outer_bound);
      take(file, "eliminate", base.eliminate);
      if (fm->count("--input")) base.input = fmc.input;
      if (fm->count("--outer-bound")) base.outer_bound = fmc.outer_bound;
      if (fm->count("--eliminate")) base.eliminate = fmc.eliminate;
      return cmd_fm(base);
    }
  } catch (const LabError& e) {
    std::cerr << "error: " << e.what() << '\n';
    if (e.code() == ErrorCode::CsitViolation) return kExitInvariant;
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitConfig;
}
