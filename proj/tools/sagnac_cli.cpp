// Command-line front end: reproduces the fidelity phase diagram, QFI scaling,
// parity fringes and precision scaling as deterministic CSV tables.

#include <CLI11.hpp>
#include <fstream>
#include <map>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "sagnac/errors.hpp"
#include "sagnac/selftest.hpp"
#include "sagnac/sweep.hpp"

namespace {

using sagnac::sweep::AxisSpec;
using sagnac::sweep::ResultTable;
using sagnac::sweep::SweepSpec;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNumeric = 2;
constexpr int kExitCapacity = 3;

struct CommonFlags {
  double omega_s = 0.1;
  std::vector<double> omega_p{0.5};
  long n_particles = 5;
  std::vector<std::string> grids;
  std::string engine = "both";
  std::string out;
  int workers = int(std::max(1u, std::thread::hardware_concurrency()));
  long n_max = 10;
  std::optional<double> dt;
  std::string config;
  CLI::Option* omega_s_option = nullptr;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
  flags.omega_s_option =
      cmd->add_option("--omega-s", flags.omega_s,
                      "Rotation frequency under estimation");
  cmd->add_option("--omega-p", flags.omega_p,
                  "Induced drive frequency (repeatable)");
  cmd->add_option("--n-particles", flags.n_particles, "Particle count")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--grid", flags.grids,
                  "Axis grid min:max:count[:log] (repeatable)");
  cmd->add_option("--engine", flags.engine, "exact, truncated or both")
      ->check(CLI::IsMember({"exact", "truncated", "both"}));
  cmd->add_option("--out", flags.out, "Output CSV path (default: stdout)");
  cmd->add_option("--workers", flags.workers, "Worker thread count")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--nmax", flags.n_max, "Basis cutoff / histogram depth")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--dt", flags.dt, "Integrator step size");
  cmd->add_option("--config", flags.config,
                  "Flat key=value config file; flags override it");
}

// Flat key=value config: keys mirror the long flag names without the dashes.
// Values apply only where no explicit flag was given, so the command line
// always wins.
void apply_config_file(CLI::App* cmd, const std::string& path) {
  std::ifstream file(path);
  if (!file) throw std::invalid_argument("cannot read config file: " + path);
  std::map<std::string, std::vector<std::string>> pairs;
  std::string line;
  int line_number = 0;
  while (std::getline(file, line)) {
    ++line_number;
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument(path + ":" + std::to_string(line_number) +
                                  ": expected key=value");
    pairs[line.substr(0, eq)].push_back(line.substr(eq + 1));
  }
  for (const auto& [key, values] : pairs) {
    CLI::Option* option = cmd->get_option_no_throw("--" + key);
    if (option == nullptr)
      throw std::invalid_argument(path + ": unknown key '" + key + "'");
    if (option->count() > 0) continue;
    for (const std::string& value : values) option->add_result(value);
    option->run_callback();
  }
}

SweepSpec to_spec(const CommonFlags& flags,
                  const std::vector<std::string>& axis_names) {
  SweepSpec spec;
  spec.omega_s = flags.omega_s;
  spec.omega_p = flags.omega_p;
  spec.n_particles = flags.n_particles;
  spec.engine = sagnac::sweep::parse_engine_select(flags.engine);
  spec.workers = flags.workers;
  spec.n_max = flags.n_max;
  if (flags.grids.size() > axis_names.size())
    throw std::invalid_argument("too many --grid values for this subcommand");
  for (std::size_t i = 0; i < flags.grids.size(); ++i)
    spec.axes.push_back(
        sagnac::sweep::parse_axis(axis_names[i], flags.grids[i]));
  // A single --grid on a two-axis sweep applies to both axes.
  if (axis_names.size() == 2 && flags.grids.size() == 1)
    spec.axes.push_back(
        sagnac::sweep::parse_axis(axis_names[1], flags.grids[0]));
  return spec;
}

void emit(const ResultTable& table, const std::string& out) {
  if (out.empty())
    std::cout << table.full_string();
  else
    table.write_csv(out);
}

int run_selftest(const CommonFlags& flags) {
  sagnac::selftest::Options options;
  options.n_max = flags.n_max > 0 ? flags.n_max : 40;
  options.dt = flags.dt;
  options.workers = flags.workers;
  const auto results = sagnac::selftest::run_all(options);
  std::size_t width = 0;
  for (const auto& r : results) width = std::max(width, r.name.size());
  for (const auto& r : results)
    std::printf("%s  %-*s  %s\n", r.pass ? "PASS" : "FAIL", int(width),
                r.name.c_str(), r.detail.c_str());
  if (!sagnac::selftest::all_passed(results)) {
    std::printf("selftest: FAILED\n");
    return kExitNumeric;
  }
  std::printf("selftest: all checks passed\n");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sagnac interferometer simulator and estimation toolkit"};
  app.require_subcommand(1);

  CommonFlags phase_flags, fock_flags, qfi_flags, parity_flags,
      precision_flags, selftest_flags;
  std::string fock_branch = "both";

  CLI::App* phase = app.add_subcommand(
      "phase-diagram", "Ground-state fidelity over omega_s x omega_p");
  add_common_flags(phase, phase_flags);

  CLI::App* fock = app.add_subcommand(
      "fock-histogram", "Occupation distribution at one operating point");
  add_common_flags(fock, fock_flags);
  fock->add_option("--branch", fock_branch, "up, down or both")
      ->check(CLI::IsMember({"up", "down", "both"}));

  CLI::App* qfi =
      app.add_subcommand("qfi-scaling", "QFI against particle number");
  add_common_flags(qfi, qfi_flags);

  CLI::App* parity = app.add_subcommand(
      "parity-scan", "Parity fringe and precision against omega_s");
  add_common_flags(parity, parity_flags);

  CLI::App* precision = app.add_subcommand(
      "precision-scaling", "Estimator precision against particle number");
  add_common_flags(precision, precision_flags);

  CLI::App* selftest = app.add_subcommand(
      "selftest", "Run the invariant suite and oracle battery");
  add_common_flags(selftest, selftest_flags);
  selftest_flags.n_max = 40;

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    for (auto [cmd, flags] :
         {std::pair{phase, &phase_flags}, {fock, &fock_flags},
          {qfi, &qfi_flags}, {parity, &parity_flags},
          {precision, &precision_flags}, {selftest, &selftest_flags}})
      if (cmd->parsed() && !flags->config.empty())
        apply_config_file(cmd, flags->config);

    if (phase->parsed()) {
      emit(sagnac::sweep::phase_diagram(
               to_spec(phase_flags, {"omega_s", "omega_p"})),
           phase_flags.out);
    } else if (fock->parsed()) {
      const double wp = fock_flags.omega_p.front();
      ResultTable table =
          fock_branch == "both"
              ? sagnac::sweep::fock_histogram_both(fock_flags.omega_s, wp,
                                                   fock_flags.n_max)
              : sagnac::sweep::fock_histogram(
                    fock_flags.omega_s, wp,
                    fock_branch == "up" ? sagnac::SpinBranch::up
                                        : sagnac::SpinBranch::down,
                    fock_flags.n_max);
      emit(table, fock_flags.out);
    } else if (qfi->parsed()) {
      emit(sagnac::sweep::qfi_scaling(to_spec(qfi_flags, {"N"})),
           qfi_flags.out);
    } else if (parity->parsed()) {
      emit(sagnac::sweep::parity_scan(to_spec(parity_flags, {"omega_s"})),
           parity_flags.out);
    } else if (precision->parsed()) {
      SweepSpec spec = to_spec(precision_flags, {"N"});
      if (precision_flags.omega_s_option->count() == 0) {
        // Fringe-safe default operating point for the requested N grid.
        if (spec.axes.empty())
          spec.axes = {AxisSpec{"N", 1, 16, 5, true}};
        std::vector<long> ns;
        for (double v : spec.axes[0].grid()) ns.push_back(std::lround(v));
        spec.omega_s = sagnac::sweep::choose_operating_omega_s(
            ns, spec.omega_p.front());
      }
      emit(sagnac::sweep::precision_scaling(spec), precision_flags.out);
    } else if (selftest->parsed()) {
      return run_selftest(selftest_flags);
    }
  } catch (const sagnac::capacity_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitCapacity;
  } catch (const sagnac::quadrature_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumeric;
  } catch (const sagnac::truncation_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumeric;
  } catch (const sagnac::step_size_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumeric;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumeric;
  }
  return kExitOk;
}
