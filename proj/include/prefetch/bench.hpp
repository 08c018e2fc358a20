#pragma once

#include "prefetch/simulator.hpp"
#include "prefetch/solver.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace prefetch {

inline constexpr const char* kToolName = "fetchsim";
inline constexpr const char* kToolVersion = "1.0.0";

/// Process exit codes shared by all subcommands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitSolver = 3;
inline constexpr int kExitCompare = 4;

/// Parses "lo:hi:log:n" or "lo:hi:lin:n" into n values spanning [lo, hi]
/// (inclusive endpoints, log or linear spacing). Throws
/// std::invalid_argument on malformed grids, hi < lo, lo < 1, or n < 1.
std::vector<double> parse_c_grid(const std::string& grid);

/// Scenario JSON schema (mirrors ScenarioConfig):
///   {
///     "name": "...",                                  // optional
///     "channel":   {"transition": [[..]], "attribute": [..]},
///     "processor": {"transition": [[..]], "attribute": [..]},
///     "initial_b1": 20, "initial_b2": 0,
///     "c_values": [..], "episodes": 5000, "base_seed": 12345,
///     "initial_jm": "stationary" | [j, m]             // optional
///   }
/// Throws std::invalid_argument on parse or schema errors.
ScenarioConfig scenario_from_json(const std::string& text);
std::string scenario_to_json(const ScenarioConfig& config);

/// Solve-command input: reduced form {"s": .., "mu": ..} or full form
/// {"channel": {..}, "processor": {..}}, plus "c" (default 1) and grid
/// sizes "B1max"/"B2max" (default 20/20).
struct SolveRequest {
  bool reduced = true;
  double s = 1.0;
  double mu = 1.0;
  std::optional<FsmcModel> channel;
  std::optional<FsmcModel> processor;
  double c = 1.0;
  int B1max = 20;
  int B2max = 20;
};
SolveRequest solve_request_from_json(const std::string& text);

/// Written alongside every output set; argv plus the resolved scenario make
/// a rerun bit-exact without consulting external files.
struct RunManifest {
  std::string command;
  std::vector<std::string> argv;
  std::string scenario_ref;    ///< preset name or config path
  std::string scenario_json;   ///< resolved scenario (empty for compare)
  std::vector<std::string> policies;
  std::vector<double> c_values;
  int episodes = 0;
  std::uint64_t base_seed = 0;
  std::string out_dir;
};
void write_manifest(const std::filesystem::path& path,
                    const RunManifest& manifest);

/// Tradeoff CSV, header `c,b2_ave,ci_b2,d_ave,ci_d,mean_cost,episodes`,
/// floats printed with %.17g so reading recovers the exact values.
void write_tradeoff_csv(const std::filesystem::path& path,
                        const std::vector<TradeoffPoint>& points);
std::vector<TradeoffPoint> read_tradeoff_csv(const std::filesystem::path& path);

/// Value/policy dump, columns b1,b2,j,m,value,action (reduced solutions use
/// j = m = 0), one row per grid state including the terminal one.
void write_values_csv(const std::filesystem::path& path,
                      const ReducedSolution& sol);
void write_values_csv(const std::filesystem::path& path,
                      const FullSolution& sol);

/// Per-column switchover data for a reduced solution: columns
/// b1,psi_star,psi_never,psi_always. psi_never/psi_always are the cone line
/// thresholds (the always-fetch line uses the fluid branch active at
/// (b1, max(psi_star, 0))); infinite thresholds print as inf/-inf.
void write_switchover_csv(const std::filesystem::path& path,
                          const ReducedSolution& sol,
                          const SwitchoverCurve& curve);

/// Relative comparison of the b2_ave and d_ave columns at matched c. Throws
/// std::invalid_argument when the c grids differ (size or values beyond
/// 1e-12). A row fails when |cand - base| / max(|base|, 1e-12) > tol.
struct CompareOutcome {
  bool pass = true;
  std::vector<std::string> failures;
};
CompareOutcome compare_tradeoffs(const std::vector<TradeoffPoint>& baseline,
                                 const std::vector<TradeoffPoint>& candidate,
                                 double tol);

/// Self-contained SVG scatter/line chart of the tradeoff curves: d_ave on
/// x, b2_ave on y, one labeled series per policy.
void write_tradeoff_svg(
    const std::filesystem::path& path, const std::string& title,
    const std::vector<std::pair<std::string, std::vector<TradeoffPoint>>>&
        series);

/// Subcommand drivers; each returns a process exit code and reports errors
/// on stderr. `argv` is echoed into the manifest.
struct SolveArgs {
  std::string config_path;
  std::string preset;
  std::string out_dir = "fetchsim_out";
  std::vector<std::string> argv;
};
int run_solve(const SolveArgs& args);

struct SweepArgs {
  std::string config_path;
  std::string preset;
  std::vector<std::string> policies;
  int episodes = 0;          ///< 0: keep scenario value
  long long seed = -1;       ///< <0: keep scenario value
  std::string c_grid;        ///< empty: keep scenario value
  std::string out_dir = "fetchsim_out";
  std::vector<std::string> argv;
};
int run_sweep(const SweepArgs& args);

struct CompareArgs {
  std::string baseline;
  std::string candidate;
  double tol = 0.0;
  std::vector<std::string> argv;
};
int run_compare(const CompareArgs& args);

}  // namespace prefetch
