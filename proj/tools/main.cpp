// steerkit command-line front end: classification, steering radii, region
// and linear-witness scans, and counting-statistics simulation.
//
// Exit codes: 0 success, 2 usage/input error, 3 solver failure.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "steerkit/criteria.hpp"
#include "steerkit/errors.hpp"
#include "steerkit/search.hpp"
#include "steerkit/states.hpp"
#include "steerkit/stats.hpp"

namespace {

using nlohmann::json;
using namespace steerkit;

constexpr const char* kVersion = "0.1.0";
constexpr double kPi = 3.14159265358979323846;
constexpr double kQuarterPi = 0.78539816339744830961;

std::string fmt9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

/// Everything any subcommand can ask for; each registers only what it uses.
struct Options {
  std::optional<double> p, theta;
  std::string state_file;
  std::string out;
  std::string format;  // resolved per command when empty
  std::string direction_word = "ab";
  int k = 3;
  std::uint64_t seed = 0;
  std::optional<double> tol;
  int restarts = 32;
  int threads = 0;
  int resamples = 100;
  double mean_counts = 1e6;
  std::string counts_out;
  std::optional<double> p_min, p_max, theta_min, theta_max;
  int p_steps = 50, theta_steps = 50;
  std::vector<int> n_list = {2, 3, 4, 6, 10};
  bool degrees = false;
  bool with_solver = false;
  bool dump_assemblage = false;
};

double to_radians(double theta, bool degrees) {
  return degrees ? theta * kPi / 180.0 : theta;
}

/// Forgives boundary inputs rounded to a few decimals (say --theta 0.7854)
/// by snapping tiny overshoots onto the valid range; the library itself
/// stays strict.
double snap_range(double v, double lo, double hi) {
  constexpr double kSlack = 1e-4;
  if (v < lo && v > lo - kSlack) return lo;
  if (v > hi && v < hi + kSlack) return hi;
  return v;
}

Direction parse_direction(const std::string& word) {
  if (word == "ab") return Direction::AliceToBob;
  if (word == "ba") return Direction::BobToAlice;
  throw ParamError("--direction must be ab or ba");
}

const char* direction_word(Direction d) {
  return d == Direction::AliceToBob ? "ab" : "ba";
}

TwoQubitState resolve_state(const Options& o) {
  if (!o.state_file.empty()) {
    if (o.p || o.theta)
      throw ParamError("give either --p/--theta or --state-file, not both");
    return load_state(o.state_file);
  }
  if (!o.p || !o.theta)
    throw ParamError("state required: --p and --theta, or --state-file");
  return make_family_state(snap_range(*o.p, 0.0, 1.0),
                           snap_range(to_radians(*o.theta, o.degrees), 0.0,
                                      kQuarterPi));
}

/// Writes through a temp file + rename so partial output is never visible.
void write_output(const std::string& path, const std::string& payload) {
  if (path.empty()) {
    std::cout << payload;
    return;
  }
  const std::string tmp = path + ".tmp";
  {
    std::ofstream file(tmp, std::ios::trunc | std::ios::binary);
    if (!file) throw Error("cannot open '" + tmp + "' for writing");
    file << payload;
    if (!file.good()) {
      std::remove(tmp.c_str());
      throw Error("failed while writing '" + tmp + "'");
    }
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw Error("cannot move temp file onto '" + path + "'");
  }
}

json settings_json(const std::vector<MeasurementSetting>& settings) {
  json out = json::array();
  for (const auto& s : settings)
    out.push_back({s.axis.x(), s.axis.y(), s.axis.z()});
  return out;
}

json matrix_json(const Matrix2c& m) {
  json rows = json::array();
  for (int i = 0; i < 2; ++i) {
    json row = json::array();
    for (int j = 0; j < 2; ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(row);
  }
  return rows;
}

json assemblage_json(const Assemblage& assemblage) {
  json out;
  out["settings"] = settings_json(assemblage.settings);
  out["reduced"] = matrix_json(assemblage.reduced);
  json members = json::array();
  for (const auto& member : assemblage.members) {
    const Eigen::Vector3d b = member.bloch_unnormalized();
    members.push_back({{"setting", member.setting_index},
                       {"outcome", member.outcome},
                       {"probability", member.probability()},
                       {"bloch_unnormalized", {b.x(), b.y(), b.z()}},
                       {"matrix", matrix_json(member.matrix)}});
  }
  out["members"] = members;
  return out;
}

/// Composite infinite-setting label: certified one-way when Alice steers
/// (p > 1/2) while the Bowles guarantee shields Bob-to-Alice; theta = 0 is
/// the separable line and never steerable.
RegionLabel classify_infinite(double p, double theta) {
  const bool shielded = unsteerable_b_to_a_infinite(p, theta);  // validates
  if (theta <= 0.0 || !steerable_a_to_b_infinite(p)) return RegionLabel::Unsteerable;
  return shielded ? RegionLabel::OneWayAtoB : RegionLabel::TwoWay;
}

// ---- classify ----

int run_classify(const Options& o, const std::string& invocation) {
  if (!o.p || !o.theta) throw ParamError("classify needs --p and --theta");
  const double p = snap_range(*o.p, 0.0, 1.0);
  const double theta =
      snap_range(to_radians(*o.theta, o.degrees), 0.0, kQuarterPi);

  const RegionLabel two = classify_two_settings(p, theta);
  const RegionLabel three = classify_three_settings(p, theta);
  const RegionLabel infinite = classify_infinite(p, theta);
  const bool bowles = unsteerable_b_to_a_infinite(p, theta);
  const bool a_to_b = steerable_a_to_b_infinite(p);

  const std::string format = o.format.empty() ? "text" : o.format;
  std::string payload;
  if (format == "json") {
    json out = {{"command", "classify"},
                {"version", kVersion},
                {"p", p},
                {"theta", theta},
                {"two_settings", to_string(two)},
                {"three_settings", to_string(three)},
                {"infinite_settings", to_string(infinite)},
                {"bowles_unsteerable_b_to_a", bowles},
                {"steerable_a_to_b_infinite", a_to_b}};
    payload = out.dump(2) + "\n";
  } else if (format == "text") {
    payload = "p = " + fmt9(p) + ", theta = " + fmt9(theta) + "\n";
    payload += "two_settings: " + std::string(to_string(two)) + "\n";
    payload += "three_settings: " + std::string(to_string(three)) + "\n";
    payload += "infinite_settings: " + std::string(to_string(infinite)) + "\n";
    payload += "bowles_unsteerable_b_to_a: " + std::string(bowles ? "true" : "false") + "\n";
    payload += "steerable_a_to_b_infinite: " + std::string(a_to_b ? "true" : "false") + "\n";
  } else {
    throw ParamError("classify supports --format text or json");
  }
  (void)invocation;
  write_output(o.out, payload);
  return 0;
}

// ---- radius ----

int run_radius(const Options& o, const std::string& invocation) {
  const TwoQubitState state = resolve_state(o);
  const Direction direction = parse_direction(o.direction_word);

  SearchConfig config;
  config.restarts = o.restarts;
  config.seed = o.seed;
  config.tol = o.tol.value_or(1e-4);

  const SteeringRadiusReport report = steering_radius(state, o.k, direction, config);

  json out = {{"command", "radius"},
              {"version", kVersion},
              {"invocation", invocation},
              {"k", report.k},
              {"direction", direction_word(report.direction)},
              {"R", report.R},
              {"steerable", report.R > 1.0},
              {"best_settings", settings_json(report.best_settings)},
              {"best_restart", report.best_restart},
              {"restart_values", report.restart_values},
              {"restarts", o.restarts},
              {"seed", o.seed},
              {"tol", config.tol}};
  if (o.p && o.theta) {
    out["p"] = *o.p;
    out["theta"] = to_radians(*o.theta, o.degrees);
  }
  if (o.dump_assemblage)
    out["assemblage"] =
        assemblage_json(build_assemblage(state, report.best_settings, direction));
  write_output(o.out, out.dump(2) + "\n");
  return 0;
}

// ---- scan-region ----

struct GridPoint {
  double p, theta;
};

int run_scan_region(const Options& o, const std::string& invocation) {
  const double p_lo = snap_range(o.p_min.value_or(0.0), 0.0, 1.0);
  const double p_hi = snap_range(o.p_max.value_or(1.0), 0.0, 1.0);
  const double th_lo = snap_range(
      o.theta_min ? to_radians(*o.theta_min, o.degrees) : 0.0, 0.0, kQuarterPi);
  const double th_hi = snap_range(
      o.theta_max ? to_radians(*o.theta_max, o.degrees) : kQuarterPi, 0.0,
      kQuarterPi);
  if (o.p_steps < 1 || o.theta_steps < 1) throw ParamError("steps must be >= 1");
  if (p_lo < 0.0 || p_hi > 1.0 || p_lo > p_hi)
    throw ParamError("p range must satisfy 0 <= min <= max <= 1");
  if (th_lo < 0.0 || th_hi > kQuarterPi + 1e-12 || th_lo > th_hi)
    throw ParamError("theta range must satisfy 0 <= min <= max <= pi/4");

  const auto grid_value = [](double lo, double hi, int steps, int i) {
    return steps == 1 ? lo : lo + (hi - lo) * i / static_cast<double>(steps - 1);
  };
  std::vector<GridPoint> points;
  points.reserve(static_cast<std::size_t>(o.p_steps) * o.theta_steps);
  for (int i = 0; i < o.p_steps; ++i)
    for (int j = 0; j < o.theta_steps; ++j)
      points.push_back({grid_value(p_lo, p_hi, o.p_steps, i),
                        std::min(grid_value(th_lo, th_hi, o.theta_steps, j), kQuarterPi)});

  const double solver_tol = o.tol.value_or(1e-5);
  std::vector<MeasurementSetting> canonical;
  if (o.with_solver) canonical = canonical_settings(o.k);

  struct Row {
    double p, theta;
    RegionLabel two, three;
    bool bowles;
    double r_ab = 0.0, r_ba = 0.0;
  };
  std::vector<Row> rows(points.size());

  int thread_count = o.threads > 0
                         ? o.threads
                         : static_cast<int>(std::thread::hardware_concurrency());
  if (thread_count < 1) thread_count = 1;
  thread_count = std::min<int>(thread_count, static_cast<int>(points.size()));

  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto worker = [&]() {
    std::optional<LhsmSolver> solver_ab, solver_ba;
    try {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= points.size()) break;
        const GridPoint& pt = points[i];
        Row& row = rows[i];
        row.p = pt.p;
        row.theta = pt.theta;
        row.two = classify_two_settings(pt.p, pt.theta);
        row.three = classify_three_settings(pt.p, pt.theta);
        row.bowles = unsteerable_b_to_a_infinite(pt.p, pt.theta);
        if (o.with_solver) {
          const TwoQubitState state = make_family_state(pt.p, pt.theta);
          const Assemblage ab =
              build_assemblage(state, canonical, Direction::AliceToBob);
          const Assemblage ba =
              build_assemblage(state, canonical, Direction::BobToAlice);
          if (!solver_ab) solver_ab.emplace(ab); else solver_ab->retarget(ab);
          if (!solver_ba) solver_ba.emplace(ba); else solver_ba->retarget(ba);
          row.r_ab = solver_ab->min_max_radius(solver_tol).r;
          row.r_ba = solver_ba->min_max_radius(solver_tol).r;
        }
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!first_error) first_error = std::current_exception();
      next.store(points.size());  // drain remaining work
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(thread_count));
  for (int t = 0; t < thread_count; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);

  const std::string format = o.format.empty() ? "csv" : o.format;
  std::string payload;
  if (format == "csv") {
    payload = "# steerkit " + std::string(kVersion) + " | " + invocation + "\n";
    payload += "p,theta,label2,label3,bowles_unsteerable";
    if (o.with_solver) payload += ",R_ab,R_ba";
    payload += "\n";
    for (const Row& row : rows) {
      payload += fmt9(row.p) + "," + fmt9(row.theta) + "," + to_string(row.two) +
                 "," + to_string(row.three) + "," +
                 (row.bowles ? "true" : "false");
      if (o.with_solver) payload += "," + fmt9(row.r_ab) + "," + fmt9(row.r_ba);
      payload += "\n";
    }
  } else {
    json grid = json::array();
    for (const Row& row : rows) {
      json entry = {{"p", row.p},
                    {"theta", row.theta},
                    {"label2", to_string(row.two)},
                    {"label3", to_string(row.three)},
                    {"bowles_unsteerable", row.bowles}};
      if (o.with_solver) {
        entry["R_ab"] = row.r_ab;
        entry["R_ba"] = row.r_ba;
      }
      grid.push_back(entry);
    }
    json out = {{"command", "scan-region"},
                {"version", kVersion},
                {"invocation", invocation},
                {"k", o.k},
                {"grid", grid}};
    payload = out.dump(2) + "\n";
  }
  write_output(o.out, payload);
  return 0;
}

// ---- scan-linear ----

int run_scan_linear(const Options& o, const std::string& invocation) {
  const TwoQubitState state = resolve_state(o);
  const Direction direction = parse_direction(o.direction_word);

  std::vector<int> ns = o.n_list;
  std::sort(ns.begin(), ns.end());
  ns.erase(std::unique(ns.begin(), ns.end()), ns.end());

  std::vector<LinearIneqResult> results;
  results.reserve(ns.size());
  for (int n : ns)
    results.push_back(evaluate_linear(state, canonical_settings(n), direction));

  const std::string format = o.format.empty() ? "csv" : o.format;
  std::string payload;
  if (format == "csv") {
    payload = "# steerkit " + std::string(kVersion) + " | " + invocation + "\n";
    payload += "n,S,C,S_minus_C\n";
    for (const auto& res : results)
      payload += std::to_string(res.n) + "," + fmt9(res.s) + "," + fmt9(res.c) +
                 "," + fmt9(res.violation) + "\n";
  } else {
    json rows = json::array();
    for (const auto& res : results)
      rows.push_back({{"n", res.n},
                      {"S", res.s},
                      {"C", res.c},
                      {"S_minus_C", res.violation}});
    json out = {{"command", "scan-linear"},
                {"version", kVersion},
                {"invocation", invocation},
                {"direction", direction_word(direction)},
                {"rows", rows}};
    payload = out.dump(2) + "\n";
  }
  write_output(o.out, payload);
  return 0;
}

// ---- simulate ----

int run_simulate(const Options& o, const std::string& invocation) {
  const TwoQubitState state = resolve_state(o);
  const Direction direction = parse_direction(o.direction_word);
  const std::vector<MeasurementSetting> settings = canonical_settings(o.k);

  const CountRecord record =
      simulate_counts(state, settings, direction, o.mean_counts, o.seed);
  if (!o.counts_out.empty()) save_counts(record, o.counts_out);

  const BootstrapSummary summary =
      bootstrap_radius(record, o.k, direction, o.resamples, o.seed);

  LhsmSolver solver(reconstruct_assemblage(record));
  const double point_r = solver.min_max_radius(1e-5).r;

  json out = {{"command", "simulate"},
              {"version", kVersion},
              {"invocation", invocation},
              {"k", o.k},
              {"direction", direction_word(direction)},
              {"mean_total_counts", o.mean_counts},
              {"total_counts", record.total()},
              {"resamples", summary.resamples},
              {"seed", summary.seed},
              {"mean_R", summary.mean_r},
              {"std_R", summary.std_r},
              {"point_R", point_r}};
  if (o.p && o.theta) {
    out["p"] = *o.p;
    out["theta"] = to_radians(*o.theta, o.degrees);
  }
  write_output(o.out, out.dump(2) + "\n");
  return 0;
}

// ---- error plumbing ----

std::string error_kind(const std::exception& e) {
  if (dynamic_cast<const SolverStall*>(&e)) return "SolverStall";
  if (dynamic_cast<const NormalizationError*>(&e)) return "NormalizationError";
  if (dynamic_cast<const TraceError*>(&e)) return "TraceError";
  if (dynamic_cast<const ParamError*>(&e)) return "ParamError";
  if (dynamic_cast<const ParseError*>(&e)) return "ParseError";
  if (dynamic_cast<const ValidationError*>(&e)) return "ValidationError";
  if (dynamic_cast<const DuplicateSettingError*>(&e)) return "DuplicateSettingError";
  if (dynamic_cast<const CapError*>(&e)) return "CapError";
  if (dynamic_cast<const InsufficientData*>(&e)) return "InsufficientData";
  return "Error";
}

void emit_error(bool json_errors, const std::exception& e, int exit_code) {
  if (json_errors) {
    json out = {{"error", error_kind(e)},
                {"message", e.what()},
                {"exit_code", exit_code}};
    std::cerr << out.dump() << "\n";
  } else {
    std::cerr << "steerkit: " << error_kind(e) << ": " << e.what() << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  std::string invocation;
  for (int i = 0; i < argc; ++i) {
    if (i) invocation += ' ';
    invocation += argv[i];
  }

  CLI::App app{"two-qubit steering toolkit: region classification, "
               "hidden-state radii, witness scans, counting statistics"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  bool json_errors = false;
  app.add_flag("--json-errors", json_errors,
               "emit machine-readable errors as JSON on stderr");

  Options o;

  const auto add_state = [&](CLI::App* sub) {
    sub->add_option("--p", o.p, "family mixing weight p in [0, 1]");
    sub->add_option("--theta", o.theta,
                    "family angle theta in [0, pi/4] radians");
    sub->add_flag("--degrees", o.degrees, "interpret angles as degrees");
    sub->add_option("--state-file", o.state_file,
                    "JSON density-matrix file instead of --p/--theta");
  };
  const auto add_output = [&](CLI::App* sub) {
    sub->add_option("--out", o.out, "output path (atomic rename); default stdout");
  };
  const auto add_format = [&](CLI::App* sub, const char* values) {
    sub->add_option("--format", o.format, values);
  };

  CLI::App* classify = app.add_subcommand(
      "classify", "region labels for the 2-, 3-, and infinite-setting scenarios");
  classify->add_option("--p", o.p, "family mixing weight p in [0, 1]")->required();
  classify->add_option("--theta", o.theta, "family angle theta in [0, pi/4] radians")
      ->required();
  classify->add_flag("--degrees", o.degrees, "interpret angles as degrees");
  add_output(classify);
  add_format(classify, "text (default) or json");

  CLI::App* radius = app.add_subcommand(
      "radius", "steering radius R by outer search over measurement axes");
  add_state(radius);
  radius->add_option("--k", o.k, "number of settings, 2 or 3 (default 3)");
  radius->add_option("--direction", o.direction_word, "ab (default) or ba");
  radius->add_option("--seed", o.seed, "search seed (default 0)");
  radius->add_option("--tol", o.tol, "search tolerance on r (default 1e-4)");
  radius->add_option("--restarts", o.restarts, "search restarts (default 32)");
  radius->add_flag("--dump-assemblage", o.dump_assemblage,
                   "include the assemblage at the best settings");
  add_output(radius);

  CLI::App* scan_region = app.add_subcommand(
      "scan-region", "grid of region labels over (p, theta)");
  scan_region->add_option("--p-min", o.p_min, "default 0");
  scan_region->add_option("--p-max", o.p_max, "default 1");
  scan_region->add_option("--p-steps", o.p_steps, "grid points in p (default 50)");
  scan_region->add_option("--theta-min", o.theta_min, "default 0");
  scan_region->add_option("--theta-max", o.theta_max, "default pi/4");
  scan_region->add_option("--theta-steps", o.theta_steps,
                          "grid points in theta (default 50)");
  scan_region->add_flag("--degrees", o.degrees, "interpret angles as degrees");
  scan_region->add_flag("--with-solver", o.with_solver,
                        "add R_ab/R_ba at canonical settings (slow)");
  scan_region->add_option("--k", o.k, "settings count for --with-solver (default 3)");
  scan_region->add_option("--tol", o.tol, "solver tolerance (default 1e-5)");
  scan_region->add_option("--threads", o.threads,
                          "worker threads (default: hardware parallelism)");
  add_output(scan_region);
  add_format(scan_region, "csv (default) or json");

  CLI::App* scan_linear = app.add_subcommand(
      "scan-linear", "linear witness S_n against the hidden-state bound C_n");
  add_state(scan_linear);
  scan_linear->add_option("--n", o.n_list, "setting counts from {2,3,4,6,10}")
      ->delimiter(',');
  scan_linear->add_option("--direction", o.direction_word, "ab (default) or ba");
  add_output(scan_linear);
  add_format(scan_linear, "csv (default) or json");

  CLI::App* simulate = app.add_subcommand(
      "simulate", "Poissonian counting statistics and bootstrap radius error");
  add_state(simulate);
  simulate->add_option("--k", o.k, "number of canonical settings (default 3)");
  simulate->add_option("--direction", o.direction_word, "ab (default) or ba");
  simulate->add_option("--counts", o.mean_counts,
                       "mean total coincidence counts (default 1e6)");
  simulate->add_option("--resamples", o.resamples,
                       "bootstrap resamples, >= 10 (default 100)");
  simulate->add_option("--seed", o.seed, "simulation/bootstrap seed (default 0)");
  simulate->add_option("--counts-out", o.counts_out,
                       "also write the simulated counts as CSV");
  add_output(simulate);

  // Let global flags (--json-errors) appear after the subcommand too.
  for (CLI::App* sub : {classify, radius, scan_region, scan_linear, simulate})
    sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(classify)) return run_classify(o, invocation);
    if (app.got_subcommand(radius)) return run_radius(o, invocation);
    if (app.got_subcommand(scan_region)) return run_scan_region(o, invocation);
    if (app.got_subcommand(scan_linear)) return run_scan_linear(o, invocation);
    if (app.got_subcommand(simulate)) return run_simulate(o, invocation);
  } catch (const SolverStall& e) {
    emit_error(json_errors, e, 3);
    return 3;
  } catch (const std::exception& e) {
    emit_error(json_errors, e, 2);
    return 2;
  }
  return 2;
}
