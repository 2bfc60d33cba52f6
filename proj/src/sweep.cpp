#include "sagnac/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <thread>

#include "sagnac/evolution.hpp"
#include "sagnac/parity.hpp"

namespace sagnac::sweep {

namespace {

std::string format_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

// Row-indexed parallel map; results land by index, so the table body is
// independent of the worker count and of scheduling.
template <typename Fn>
void parallel_rows(std::size_t n, int workers, Fn&& fn) {
  const int count = std::max(1, std::min<int>(workers, int(n)));
  if (count == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(count);
  std::vector<std::thread> pool;
  pool.reserve(count);
  for (int w = 0; w < count; ++w)
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = next++; i < n; i = next++) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
        next = n;
      }
    });
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

class StopWatch {
 public:
  double elapsed_ms() const {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_ =
      std::chrono::steady_clock::now();
};

std::vector<long> particle_grid(const AxisSpec& axis) {
  std::vector<long> ns;
  for (double v : axis.grid()) {
    const long n = std::lround(v);
    if (n >= 1 && (ns.empty() || ns.back() != n)) ns.push_back(n);
  }
  return ns;
}

const AxisSpec& single_axis(const SweepSpec& spec, const char* name) {
  if (spec.axes.size() != 1 || spec.axes[0].name != name)
    throw std::invalid_argument(std::string("expected a single '") + name +
                                "' axis");
  return spec.axes[0];
}

void add_common_meta(ResultTable& table, const char* subcommand,
                     const SweepSpec& spec) {
  table.add_meta("tool-version", kToolVersion);
  table.add_meta("subcommand", subcommand);
  for (const AxisSpec& axis : spec.axes)
    table.add_meta("grid", axis.to_string());
  table.add_meta("omega-s", spec.omega_s);
  for (double wp : spec.omega_p) table.add_meta("omega-p", wp);
  table.add_meta("n-particles", double(spec.n_particles));
  table.add_meta("engine", engine_select_name(spec.engine));
  table.add_meta("workers", double(spec.workers));
}

void append_slope_meta(ResultTable& table, const std::string& key,
                       const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 3) return;
  table.add_meta(key, scaling_exponent(points));
}

std::vector<std::pair<double, double>> column_points(
    const ResultTable& table, std::size_t n_col, std::size_t value_col,
    std::size_t begin, std::size_t end) {
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = begin; i < end; ++i) {
    const auto& row = table.rows[i];
    if (row[n_col] && row[value_col] && *row[value_col] > 0)
      pts.emplace_back(*row[n_col], *row[value_col]);
  }
  return pts;
}

}  // namespace

void AxisSpec::validate() const {
  if (name != "omega_s" && name != "omega_p" && name != "N")
    throw std::invalid_argument("axis name must be omega_s, omega_p or N");
  if (count < 2) throw std::invalid_argument("axis needs at least 2 points");
  if (log && !(min > 0 && max > 0))
    throw std::invalid_argument("log spacing requires positive bounds");
  if (!(max > min)) throw std::invalid_argument("axis needs max > min");
}

std::vector<double> AxisSpec::grid() const {
  validate();
  std::vector<double> values(count);
  if (log) {
    const double lo = std::log(min);
    const double hi = std::log(max);
    for (int i = 0; i < count; ++i)
      values[i] = std::exp(lo + (hi - lo) * i / (count - 1));
    values.front() = min;
    values.back() = max;
  } else {
    for (int i = 0; i < count; ++i)
      values[i] = min + (max - min) * i / (count - 1);
  }
  return values;
}

std::string AxisSpec::to_string() const {
  std::string text = format_value(min) + ":" + format_value(max) + ":" +
                     std::to_string(count);
  if (log) text += ":log";
  return text;
}

AxisSpec parse_axis(const std::string& name, const std::string& text) {
  AxisSpec axis;
  axis.name = name;
  std::stringstream ss(text);
  std::string token;
  std::vector<std::string> parts;
  while (std::getline(ss, token, ':')) parts.push_back(token);
  if (parts.size() < 3 || parts.size() > 4)
    throw std::invalid_argument("grid must be min:max:count[:log]");
  try {
    axis.min = std::stod(parts[0]);
    axis.max = std::stod(parts[1]);
    axis.count = std::stoi(parts[2]);
  } catch (const std::exception&) {
    throw std::invalid_argument("grid must be numeric min:max:count[:log]");
  }
  if (parts.size() == 4) {
    if (parts[3] != "log")
      throw std::invalid_argument("grid spacing must be 'log' when given");
    axis.log = true;
  }
  axis.validate();
  return axis;
}

std::optional<PrecisionResult> fringe_precision(
    const GhzModel<double>& model) {
  try {
    return PrecisionResult{model.n_particles, rotation_precision(model),
                           Engine::exact_branch};
  } catch (const insensitive_point_error&) {
    return std::nullopt;
  }
}

std::optional<PrecisionResult> fringe_precision_truncated(
    const GhzModel<double>& model) {
  try {
    return PrecisionResult{model.n_particles,
                           rotation_precision_truncated(model),
                           Engine::truncated_analytic};
  } catch (const insensitive_point_error&) {
    return std::nullopt;
  }
}

const char* engine_select_name(EngineSelect e) {
  switch (e) {
    case EngineSelect::exact: return "exact";
    case EngineSelect::truncated: return "truncated";
    default: return "both";
  }
}

EngineSelect parse_engine_select(const std::string& text) {
  if (text == "exact") return EngineSelect::exact;
  if (text == "truncated") return EngineSelect::truncated;
  if (text == "both") return EngineSelect::both;
  throw std::invalid_argument("engine must be exact, truncated or both");
}

void SweepSpec::validate() const {
  params.validate();
  std::size_t points = 1;
  for (const AxisSpec& axis : axes) {
    axis.validate();
    points *= std::size_t(axis.count);
  }
  if (points > 10'000'000)
    throw capacity_error("sweep grid exceeds 10M points");
  if (omega_p.empty())
    throw std::invalid_argument("omega_p list must not be empty");
  if (n_particles < 1)
    throw std::invalid_argument("n-particles must be >= 1");
  if (workers < 1) throw std::invalid_argument("workers must be >= 1");
  if (n_max < 0) throw std::invalid_argument("nmax must be >= 0");
}

void ResultTable::add_meta(const std::string& key, const std::string& value) {
  metadata.emplace_back(key, value);
}

void ResultTable::add_meta(const std::string& key, double value) {
  metadata.emplace_back(key, format_value(value));
}

const std::string* ResultTable::find_meta(const std::string& key) const {
  for (const auto& [k, v] : metadata)
    if (k == key) return &v;
  return nullptr;
}

std::string ResultTable::body_string() const {
  std::string out;
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (c) out += ",";
    out += columns[c];
  }
  out += "\n";
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ",";
      if (row[c]) out += format_value(*row[c]);
    }
    out += "\n";
  }
  return out;
}

std::string ResultTable::full_string() const {
  std::string out;
  for (const auto& [key, value] : metadata)
    out += "# " + key + "=" + value + "\n";
  return out + body_string();
}

void ResultTable::write_csv(const std::string& path) const {
  std::ofstream file(path);
  if (!file) throw std::runtime_error("cannot open output file: " + path);
  file << full_string();
}

ResultTable phase_diagram(const SweepSpec& spec) {
  StopWatch watch;
  spec.validate();
  SweepSpec resolved = spec;
  if (resolved.axes.empty())
    resolved.axes = {AxisSpec{"omega_s", 0, 1, 101, false},
                     AxisSpec{"omega_p", 0, 1, 101, false}};
  if (resolved.axes.size() != 2 || resolved.axes[0].name != "omega_s" ||
      resolved.axes[1].name != "omega_p")
    throw std::invalid_argument("phase diagram needs omega_s and omega_p axes");

  const std::vector<double> ws_grid = resolved.axes[0].grid();
  const std::vector<double> wp_grid = resolved.axes[1].grid();
  ResultTable table;
  table.columns = {"omega_s", "omega_p", "F0_up", "F0_down", "flag"};
  table.rows.resize(ws_grid.size() * wp_grid.size());

  parallel_rows(table.rows.size(), resolved.workers, [&](std::size_t i) {
    const double ws = ws_grid[i / wp_grid.size()];
    const double wp = wp_grid[i % wp_grid.size()];
    auto& row = table.rows[i];
    row = {ws, wp, std::nullopt, std::nullopt, kFlagOk};
    if (!(wp > 0)) {
      row[4] = kFlagSkipped;  // T diverges at omega_p = 0
      return;
    }
    const auto profile = DriveProfile<double>::constant(ws, wp);
    row[2] = ground_fidelity(
        branch_state(resolved.params, profile, SpinBranch::up));
    row[3] = ground_fidelity(
        branch_state(resolved.params, profile, SpinBranch::down));
  });

  add_common_meta(table, "phase-diagram", resolved);
  table.add_meta("wall-time-ms", watch.elapsed_ms());
  return table;
}

ResultTable fock_histogram(double omega_s, double omega_p, SpinBranch branch,
                           Index n_max) {
  StopWatch watch;
  const PhysicalParams<double> params{};
  const auto profile = DriveProfile<double>::constant(omega_s, omega_p);
  const auto probs =
      fock_distribution(branch_state(params, profile, branch), n_max);
  ResultTable table;
  table.columns = {"n", "F_n"};
  for (Index n = 0; n <= n_max; ++n)
    table.rows.push_back({double(n), probs[n]});
  table.add_meta("tool-version", kToolVersion);
  table.add_meta("subcommand", "fock-histogram");
  table.add_meta("omega-s", omega_s);
  table.add_meta("omega-p", omega_p);
  table.add_meta("branch", branch_name(branch));
  table.add_meta("nmax", double(n_max));
  table.add_meta("wall-time-ms", watch.elapsed_ms());
  return table;
}

ResultTable fock_histogram_both(double omega_s, double omega_p, Index n_max) {
  StopWatch watch;
  const PhysicalParams<double> params{};
  const auto profile = DriveProfile<double>::constant(omega_s, omega_p);
  const auto up =
      fock_distribution(branch_state(params, profile, SpinBranch::up), n_max);
  const auto down = fock_distribution(
      branch_state(params, profile, SpinBranch::down), n_max);
  ResultTable table;
  table.columns = {"n", "F_n_up", "F_n_down"};
  for (Index n = 0; n <= n_max; ++n)
    table.rows.push_back({double(n), up[n], down[n]});
  table.add_meta("tool-version", kToolVersion);
  table.add_meta("subcommand", "fock-histogram");
  table.add_meta("omega-s", omega_s);
  table.add_meta("omega-p", omega_p);
  table.add_meta("branch", "both");
  table.add_meta("nmax", double(n_max));
  table.add_meta("wall-time-ms", watch.elapsed_ms());
  return table;
}

ResultTable qfi_scaling(const SweepSpec& spec) {
  StopWatch watch;
  spec.validate();
  SweepSpec resolved = spec;
  if (resolved.axes.empty())
    resolved.axes = {AxisSpec{"N", 1, 20, 20, false}};
  const std::vector<long> ns = particle_grid(single_axis(resolved, "N"));
  for (double wp : resolved.omega_p)
    if (!(wp > 0)) throw std::invalid_argument("omega_p must be positive");

  const bool want_exact = resolved.engine != EngineSelect::truncated;
  const bool want_trunc = resolved.engine != EngineSelect::exact;
  ResultTable table;
  const bool multi_wp = resolved.omega_p.size() > 1;
  if (multi_wp) table.columns.push_back("omega_p");
  table.columns.insert(table.columns.end(), {"N", "F_Q_exact", "F_Q_truncated",
                                             "F_Q_coherent_spin", "flag"});
  table.rows.resize(resolved.omega_p.size() * ns.size());

  parallel_rows(table.rows.size(), resolved.workers, [&](std::size_t i) {
    const double wp = resolved.omega_p[i / ns.size()];
    const long n = ns[i % ns.size()];
    auto& row = table.rows[i];
    std::vector<std::optional<double>> cells;
    if (multi_wp) cells.push_back(wp);
    cells.insert(cells.end(), {double(n), std::nullopt, std::nullopt,
                               std::nullopt, kFlagOk});
    const std::size_t base = multi_wp ? 1 : 0;
    const GhzModel<double> model{
        resolved.params, DriveProfile<double>::constant(resolved.omega_s, wp),
        n};
    double flag = kFlagOk;
    try {
      if (want_exact) {
        cells[base + 1] = qfi_exact(model).value;
        cells[base + 3] = qfi_coherent_spin(model).value;
      }
      if (want_trunc) cells[base + 2] = qfi_truncated_analytic(model).value;
    } catch (const std::exception&) {
      flag = kFlagSkipped;
    }
    if (cells[base + 1] && cells[base + 2]) {
      const double rel = std::abs(*cells[base + 1] - *cells[base + 2]) /
                         std::max(*cells[base + 1], 1e-300);
      if (rel > 1e-6) flag = std::max(flag, kFlagEngineMismatch);
    }
    cells[base + 4] = flag;
    row = std::move(cells);
  });

  add_common_meta(table, "qfi-scaling", resolved);
  const std::size_t base = multi_wp ? 1 : 0;
  for (std::size_t w = 0; w < resolved.omega_p.size(); ++w) {
    const std::size_t begin = w * ns.size();
    const std::size_t end = begin + ns.size();
    const std::string suffix = "-omega-p-" + format_value(resolved.omega_p[w]);
    append_slope_meta(table, "slope-exact" + suffix,
                      column_points(table, base, base + 1, begin, end));
    append_slope_meta(table, "slope-truncated" + suffix,
                      column_points(table, base, base + 2, begin, end));
    append_slope_meta(table, "slope-coherent-spin" + suffix,
                      column_points(table, base, base + 3, begin, end));
  }
  table.add_meta("wall-time-ms", watch.elapsed_ms());
  return table;
}

ResultTable parity_scan(const SweepSpec& spec) {
  StopWatch watch;
  spec.validate();
  SweepSpec resolved = spec;
  if (resolved.axes.empty())
    resolved.axes = {AxisSpec{"omega_s", 0, 1, 201, false}};
  const std::vector<double> ws_grid = single_axis(resolved, "omega_s").grid();
  for (double wp : resolved.omega_p)
    if (!(wp > 0)) throw std::invalid_argument("omega_p must be positive");

  const bool want_exact = resolved.engine != EngineSelect::truncated;
  const bool want_trunc = resolved.engine != EngineSelect::exact;
  ResultTable table;
  const bool multi_wp = resolved.omega_p.size() > 1;
  if (multi_wp) table.columns.push_back("omega_p");
  table.columns.insert(table.columns.end(),
                       {"omega_s", "P_exact", "P_truncated",
                        "delta_omega_exact", "delta_omega_truncated", "flag"});
  table.rows.resize(resolved.omega_p.size() * ws_grid.size());

  parallel_rows(table.rows.size(), resolved.workers, [&](std::size_t i) {
    const double wp = resolved.omega_p[i / ws_grid.size()];
    const double ws = ws_grid[i % ws_grid.size()];
    auto& row = table.rows[i];
    std::vector<std::optional<double>> cells;
    if (multi_wp) cells.push_back(wp);
    cells.insert(cells.end(), {ws, std::nullopt, std::nullopt, std::nullopt,
                               std::nullopt, kFlagOk});
    const std::size_t base = multi_wp ? 1 : 0;
    const GhzModel<double> model{resolved.params,
                                 DriveProfile<double>::constant(ws, wp),
                                 resolved.n_particles};
    double flag = kFlagOk;
    if (want_exact) {
      cells[base + 1] = parity_expectation_exact(model);
      if (const auto record = fringe_precision(model))
        cells[base + 3] = record->value;
    }
    if (want_trunc) {
      try {
        cells[base + 2] = parity_moments_truncated(model).mean;
        if (const auto record = fringe_precision_truncated(model))
          cells[base + 4] = record->value;
      } catch (const std::exception&) {
        flag = kFlagSkipped;
      }
    }
    if (cells[base + 1] && cells[base + 2] &&
        std::abs(*cells[base + 1] - *cells[base + 2]) > 1e-9)
      flag = std::max(flag, kFlagEngineMismatch);
    cells[base + 5] = flag;
    row = std::move(cells);
  });

  add_common_meta(table, "parity-scan", resolved);
  table.add_meta("wall-time-ms", watch.elapsed_ms());
  return table;
}

double choose_operating_omega_s(const std::vector<long>& n_values,
                                double omega_p, double margin_rad) {
  if (n_values.empty()) throw std::invalid_argument("empty N list");
  const double pi = std::numbers::pi;
  // Per-particle fringe phase is omega_s times this rate (unit constants).
  const double rate = 2 * (pi - omega_p * std::sin(pi / omega_p));
  double best_ws = 0.001;
  double best_margin = -1;
  for (int k = 1; k <= 400; ++k) {
    const double ws = k * 0.001;
    double margin = pi;
    for (long n : n_values) {
      const double phase = std::fmod(std::abs(double(n) * rate * ws), pi);
      margin = std::min(margin, std::min(phase, pi - phase));
    }
    if (margin > best_margin + 1e-12) {
      best_margin = margin;
      best_ws = ws;
    }
  }
  (void)margin_rad;  // the scan maximizes the margin; callers record it
  return best_ws;
}

ResultTable precision_scaling(const SweepSpec& spec) {
  StopWatch watch;
  spec.validate();
  SweepSpec resolved = spec;
  if (resolved.axes.empty())
    resolved.axes = {AxisSpec{"N", 1, 16, 5, true}};
  const std::vector<long> ns = particle_grid(single_axis(resolved, "N"));
  const double wp = resolved.omega_p.front();
  if (!(wp > 0)) throw std::invalid_argument("omega_p must be positive");

  ResultTable table;
  table.columns = {"N", "delta_omega_ghz", "delta_omega_csstate", "qcrb_ghz",
                   "flag"};
  table.rows.resize(ns.size());

  parallel_rows(table.rows.size(), resolved.workers, [&](std::size_t i) {
    const long n = ns[i];
    auto& row = table.rows[i];
    row = {double(n), std::nullopt, std::nullopt, std::nullopt, kFlagOk};
    const GhzModel<double> model{
        resolved.params, DriveProfile<double>::constant(resolved.omega_s, wp),
        n};
    double flag = kFlagOk;
    try {
      row[3] = qcrb(qfi_exact(model));
      row[2] = qcrb(qfi_coherent_spin(model));
    } catch (const std::exception&) {
      flag = kFlagSkipped;
    }
    if (const auto record = fringe_precision(model))
      row[1] = record->value;
    row[4] = flag;
  });

  add_common_meta(table, "precision-scaling", resolved);
  {
    const double pi = std::numbers::pi;
    const double rate = 2 * (pi - wp * std::sin(pi / wp));
    double margin = pi;
    for (long n : ns) {
      const double phase =
          std::fmod(std::abs(double(n) * rate * resolved.omega_s), pi);
      margin = std::min(margin, std::min(phase, pi - phase));
    }
    table.add_meta("operating-omega-s", resolved.omega_s);
    table.add_meta("fringe-margin-rad", margin);
  }
  append_slope_meta(table, "slope-ghz",
                    column_points(table, 0, 1, 0, table.rows.size()));
  append_slope_meta(table, "slope-coherent-spin",
                    column_points(table, 0, 2, 0, table.rows.size()));
  append_slope_meta(table, "slope-qcrb",
                    column_points(table, 0, 3, 0, table.rows.size()));
  table.add_meta("wall-time-ms", watch.elapsed_ms());
  return table;
}

}  // namespace sagnac::sweep
