#pragma once

// Command-line front end: `run` produces benchmark tables as CSV, `verify` runs the self-checks.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "igass/benchmarks.hpp"
#include "igass/verify.hpp"

namespace igass::cli {

inline constexpr const char* kCsvHeader =
    "benchmark,formulation,degree,n_elems,slenderness,distortion_deg,raw_deflection,normalized_deflection,wall_time_s";

struct RunConfig {
  BenchmarkKind benchmark = BenchmarkKind::StraightBeam;
  std::vector<Formulation> formulations;
  int degree = 2;
  std::vector<int> elems;           ///< empty: the benchmark's default mesh
  std::vector<double> slenderness;  ///< beams only; empty: 1e1, 1e2, 1e3, 1e4
  double distortion_deg = 0.0;
  int jobs = 1;
  bool deterministic = false;  ///< write 0 for wall time so the CSV is byte-stable
  std::optional<Precision> precision;
  Continuity continuity = Continuity::Maximal;
};

/// Mesh used when --elems is not given: the standard mesh of each benchmark.
int default_elems(BenchmarkKind kind);

/// Effective worker count: IGA_SS_JOBS when set and valid, otherwise `requested`.
int resolve_jobs(int requested);

/// Runs every (mesh, slenderness, formulation) combination; rows come back in that order
/// regardless of the number of workers.
std::vector<RunResult> run_sweep(const RunConfig& config);

void write_csv(std::ostream& out, const std::vector<RunResult>& rows, bool deterministic);

/// Prints one PASS/FAIL line per check; returns 0 iff every check passes.
int verify(const VerifyOptions& options, std::ostream& out);

/// Full command-line entry point; returns the process exit code.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace igass::cli
