#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sagnac/core.hpp"
#include "sagnac/metrology.hpp"

namespace sagnac::sweep {

inline constexpr const char* kToolVersion = "0.1.0";

/// One sweep axis: "min:max:count[:log]".
struct AxisSpec {
  std::string name;  // one of omega_s, omega_p, N
  double min = 0;
  double max = 1;
  int count = 2;
  bool log = false;

  void validate() const;
  std::vector<double> grid() const;
  std::string to_string() const;
};

AxisSpec parse_axis(const std::string& name, const std::string& text);

enum class EngineSelect { exact, truncated, both };

const char* engine_select_name(EngineSelect e);
EngineSelect parse_engine_select(const std::string& text);

/// Fully resolved sweep request. Axis parameters come from `axes`; everything
/// else is fixed for the whole table.
struct SweepSpec {
  std::vector<AxisSpec> axes;
  double omega_s = 0.1;
  std::vector<double> omega_p{0.5};
  long n_particles = 5;
  EngineSelect engine = EngineSelect::both;
  int workers = 1;
  Index n_max = 10;
  PhysicalParams<double> params{};

  void validate() const;
};

/// One (N, value) record with its engine provenance.
struct PrecisionResult {
  long n_particles;
  double value;
  Engine engine;
};

/// Error-propagation precision at the model's operating point, or nothing
/// when the point sits on a fringe extremum (the sweep sentinel).
std::optional<PrecisionResult> fringe_precision(const GhzModel<double>& model);
std::optional<PrecisionResult> fringe_precision_truncated(
    const GhzModel<double>& model);

/// Rectangular numeric table plus a key=value metadata block. Row order is
/// the row-major order of the grid regardless of worker count; empty cells
/// mark sentinel values (estimator undefined at that point).
struct ResultTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::optional<double>>> rows;
  std::vector<std::pair<std::string, std::string>> metadata;

  void add_meta(const std::string& key, const std::string& value);
  void add_meta(const std::string& key, double value);
  const std::string* find_meta(const std::string& key) const;

  /// Header row plus data rows, 12 significant digits, no metadata.
  std::string body_string() const;
  /// '#'-prefixed metadata block followed by the body.
  std::string full_string() const;
  void write_csv(const std::string& path) const;
};

/// Cell-level status flags shared by all tables:
/// 0 = ok, 1 = engines disagree beyond the declared tolerance,
/// 2 = point skipped (invalid or engine error).
inline constexpr double kFlagOk = 0;
inline constexpr double kFlagEngineMismatch = 1;
inline constexpr double kFlagSkipped = 2;

/// Ground-state fidelity of both branches over an omega_s x omega_p grid.
/// Columns: omega_s, omega_p, F0_up, F0_down, flag.
ResultTable phase_diagram(const SweepSpec& spec);

/// Occupation distribution of one branch at a single operating point.
/// Columns: n, F_n.
ResultTable fock_histogram(double omega_s, double omega_p, SpinBranch branch,
                           Index n_max);
/// Both branches side by side. Columns: n, F_n_up, F_n_down.
ResultTable fock_histogram_both(double omega_s, double omega_p, Index n_max);

/// QFI against particle number for each fixed omega_p.
/// Columns: [omega_p,] N, F_Q_exact, F_Q_truncated, F_Q_coherent_spin, flag.
/// Log-log slopes per engine land in the metadata.
ResultTable qfi_scaling(const SweepSpec& spec);

/// Parity fringe and precision against omega_s for each fixed omega_p.
/// Columns: [omega_p,] omega_s, P_exact, P_truncated, delta_omega_exact,
/// delta_omega_truncated, flag. Insensitive operating points leave the
/// delta cells empty.
ResultTable parity_scan(const SweepSpec& spec);

/// Precision scaling against N at a fringe-safe operating point.
/// Columns: N, delta_omega_ghz, delta_omega_csstate, qcrb_ghz, flag.
ResultTable precision_scaling(const SweepSpec& spec);

/// omega_s keeping the fringe phase of every N in the sweep at least
/// `margin_rad` away from an extremum; deterministic scan, largest margin
/// wins.
double choose_operating_omega_s(const std::vector<long>& n_values,
                                double omega_p, double margin_rad = 0.3);

}  // namespace sagnac::sweep
