#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

namespace igass::cli {

namespace {

std::string format17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct SweepItem {
  int n_elems;
  double slenderness;
  Formulation formulation;
};

bool is_beam(BenchmarkKind kind) {
  return kind == BenchmarkKind::StraightBeam || kind == BenchmarkKind::CurvedBeam;
}

}  // namespace

int default_elems(BenchmarkKind kind) {
  switch (kind) {
    case BenchmarkKind::StraightBeam:
      return 8;
    case BenchmarkKind::CurvedBeam:
      return 10;
    case BenchmarkKind::ScordelisLo:
    case BenchmarkKind::PinchedHemisphere:
      return 16;
    case BenchmarkKind::PinchedCylinder:
      return 32;
  }
  return 8;
}

int resolve_jobs(int requested) {
  if (const char* env = std::getenv("IGA_SS_JOBS")) {
    int value = 0;
    const char* end = env + std::char_traits<char>::length(env);
    const auto [ptr, ec] = std::from_chars(env, end, value);
    if (ec == std::errc() && ptr == end && value >= 1) return value;
  }
  return std::max(1, requested);
}

std::vector<RunResult> run_sweep(const RunConfig& config) {
  if (config.formulations.empty()) throw InvalidArgument("at least one formulation is required");
  std::vector<int> elems = config.elems;
  if (elems.empty()) elems.push_back(default_elems(config.benchmark));
  std::vector<double> slenderness = config.slenderness;
  if (!is_beam(config.benchmark) || slenderness.empty())
    slenderness = is_beam(config.benchmark) ? std::vector<double>{1e1, 1e2, 1e3, 1e4} : std::vector<double>{0.0};
  for (const int n : elems)
    if (n < 1) throw InvalidArgument("mesh sizes must be positive");

  std::vector<SweepItem> items;
  for (const int n : elems)
    for (const double s : slenderness)
      for (const Formulation f : config.formulations) items.push_back({n, s, f});

  std::vector<RunResult> rows(items.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (std::size_t i = next++; i < items.size() && !failed; i = next++) {
      try {
        const auto& it = items[i];
        const BenchmarkCase c = make_case(config.benchmark, it.n_elems, it.slenderness, config.distortion_deg);
        rows[i] = run(c, it.formulation, config.degree, RunOptions{config.precision, config.continuity});
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    }
  };
  const int jobs = std::min<int>(resolve_jobs(config.jobs), static_cast<int>(items.size()));
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return rows;
}

void write_csv(std::ostream& out, const std::vector<RunResult>& rows, bool deterministic) {
  out << kCsvHeader << '\n';
  for (const auto& r : rows) {
    out << r.benchmark << ',' << to_string(r.formulation) << ',' << r.degree << ',' << r.n_elems << ','
        << format17(r.slenderness) << ',' << format17(r.distortion_deg) << ',' << format17(r.raw_deflection) << ','
        << format17(r.normalized_deflection) << ',' << format17(deterministic ? 0.0 : r.wall_time_s) << '\n';
  }
}

int verify(const VerifyOptions& options, std::ostream& out) {
  bool all = true;
  for (const auto& check : run_verification(options)) {
    all = all && check.passed;
    out << (check.passed ? "PASS " : "FAIL ") << check.name << "  measured " << check.measured << " (tol "
        << check.tolerance << ")  " << check.detail << '\n';
  }
  out << (all ? "all checks passed" : "verification FAILED") << '\n';
  return all ? 0 : 1;
}

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Isogeometric solid-shell benchmarks"};
  app.require_subcommand(1);

  std::string benchmark, out_path, precision = "auto", continuity = "max";
  std::vector<std::string> formulations{"ss", "ss_ans", "std"};
  RunConfig config;
  auto* run_cmd = app.add_subcommand("run", "Run a benchmark sweep and write CSV");
  run_cmd->add_option("--benchmark,-b", benchmark, "straight, curved, scordelis, hemisphere or cylinder")->required();
  run_cmd->add_option("--formulations,-f", formulations, "Comma-separated list of std, curv, ss_ans, ss")
      ->delimiter(',');
  run_cmd->add_option("--degree,-p", config.degree, "Spline degree in every direction")->capture_default_str();
  run_cmd->add_option("--elems,-n", config.elems, "Elements per in-plane direction (comma-separated)")
      ->delimiter(',');
  run_cmd->add_option("--slenderness,-s", config.slenderness, "L/t or R/t values for the beams (comma-separated)")
      ->delimiter(',');
  run_cmd->add_option("--distortion", config.distortion_deg, "Straight beam in-plane distortion angle in degrees");
  run_cmd->add_option("--out,-o", out_path, "Output CSV path (default: stdout)");
  run_cmd->add_option("--jobs,-j", config.jobs, "Worker threads; IGA_SS_JOBS overrides")->capture_default_str();
  run_cmd->add_option("--precision", precision, "auto, double or extended")->capture_default_str();
  run_cmd->add_option("--continuity", continuity, "Inter-element continuity: max (C^{p-1}) or c0")
      ->capture_default_str();
  run_cmd->add_flag("--deterministic", config.deterministic, "Write 0 wall time so the output is byte-stable");

  auto* verify_cmd = app.add_subcommand("verify", "Run the projector, frame, rigid-mode and patch-test checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  if (verify_cmd->parsed()) return verify(VerifyOptions{}, out);

  try {
    config.benchmark = parse_benchmark(benchmark);
    config.formulations.clear();
    for (const auto& tag : formulations) config.formulations.push_back(parse_formulation(tag));
    if (config.formulations.empty()) throw InvalidArgument("--formulations needs at least one entry");
    if (precision == "double")
      config.precision = Precision::Double;
    else if (precision == "extended")
      config.precision = Precision::Extended;
    else if (precision != "auto")
      throw InvalidArgument("unknown precision '" + precision + "'");
    if (continuity == "c0")
      config.continuity = Continuity::C0;
    else if (continuity != "max")
      throw InvalidArgument("unknown continuity '" + continuity + "'");
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << '\n' << run_cmd->help();
    return 2;
  }

  try {
    const auto rows = run_sweep(config);
    if (out_path.empty()) {
      write_csv(out, rows, config.deterministic);
    } else {
      std::ofstream file(out_path);
      if (!file) {
        err << "cannot open " << out_path << " for writing\n";
        return 1;
      }
      write_csv(file, rows, config.deterministic);
    }
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace igass::cli
