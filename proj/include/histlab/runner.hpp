#pragma once

// Front-end operations behind the histlab command line.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>

#include "histlab/serialize.hpp"

namespace histlab {

enum ExitCode : int { kExitOk = 0, kExitInvalid = 1, kExitInternal = 2 };

struct Overrides {
  std::optional<double> tolerance;
  std::optional<std::uint64_t> seed;
};

struct Report {
  Json document;
  std::string text;
  int exit_code = kExitOk;
};

/// Runs the checks a scenario file requests, in declaration order. A check
/// that errors is reported in place and sets a nonzero exit code.
Report run_scenario(const ScenarioFile& file, const Overrides& overrides = {});
Report run_scenario(const std::filesystem::path& path, const Overrides& overrides = {});

/// Runs a search config. Witness scenarios are written to out_dir when given.
Report run_search(const SearchConfig& config, const Overrides& overrides = {},
                  const std::optional<std::filesystem::path>& out_dir = std::nullopt);
Report run_search(const std::filesystem::path& path, const Overrides& overrides = {},
                  const std::optional<std::filesystem::path>& out_dir = std::nullopt);

/// Forward and reverse Diósi verdicts for two scenario files.
Report run_compose(const std::filesystem::path& a, const std::filesystem::path& b, const Overrides& overrides = {});

struct AppendixOptions {
  int dim = 2;
  /// Random projector, evolution and pure state when set.
  std::optional<std::uint64_t> seed;
  /// Qubit defaults: P = |0⟩⟨0|, u12 = exp(−iθσ_x), ψ = (cos φ, sin φ).
  double theta = 0.6;
  double phi = 0.4;
  std::size_t sweep_steps = 8;
};

Report run_appendix(const AppendixOptions& options, const Overrides& overrides = {});

/// Maps exceptions onto exit codes and an error report.
Report guarded(const std::function<Report()>& body);

/// File-name-safe name of a Venn region.
std::string region_slug(std::string_view region);

}  // namespace histlab
