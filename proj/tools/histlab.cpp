// histlab: decoherent-histories laboratory.
//
//   histlab check <scenario>            classify and run the checks a scenario requests
//   histlab search <config>             seeded Venn / super-probability / LP witness search
//   histlab compose <a> <b>             forward and reverse Diósi verdicts for two subsystems
//   histlab appendix                    the two-time consistent-but-not-decoherent example

#include <iostream>

#include "CLI11.hpp"
#include "histlab/runner.hpp"

namespace {

int emit(const histlab::Report& r, const std::string& format, const std::optional<std::filesystem::path>& out,
         const std::string& report_name) {
  const std::string body = format == "structured" ? r.document.dump(2) + "\n" : r.text;
  (r.exit_code == histlab::kExitOk ? std::cout : std::cerr) << body;
  if (out) {
    std::filesystem::create_directories(*out);
    histlab::write_atomic(*out / report_name, r.document.dump(2) + "\n");
  }
  return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"histlab: decoherence functionals, probability-assignment conditions and Diósi tests"};
  app.require_subcommand(1);

  std::optional<double> tolerance;
  std::optional<std::uint64_t> seed;
  std::string format = "text";
  std::optional<std::filesystem::path> out;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--tolerance", tolerance, "Classification tolerance (absolute, max-norm)");
    sub->add_option("--seed", seed, "Override the configured seed");
    sub->add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "structured"}));
    sub->add_option("--out", out, "Directory for reports and witness files");
  };

  std::filesystem::path scenario_path, config_path, a_path, b_path;
  auto* check = app.add_subcommand("check", "Run a scenario file");
  check->add_option("scenario", scenario_path)->required()->check(CLI::ExistingFile);
  common(check);

  auto* search = app.add_subcommand("search", "Run a search config");
  search->add_option("config", config_path)->required()->check(CLI::ExistingFile);
  common(search);

  auto* compose = app.add_subcommand("compose", "Diósi verdicts for two scenario files");
  compose->add_option("a", a_path)->required()->check(CLI::ExistingFile);
  compose->add_option("b", b_path)->required()->check(CLI::ExistingFile);
  common(compose);

  histlab::AppendixOptions appendix_options;
  auto* appendix = app.add_subcommand("appendix", "Consistent-but-not-decoherent two-time example");
  appendix->add_option("--dim", appendix_options.dim, "Hilbert-space dimension (random instances)");
  appendix->add_option("--theta", appendix_options.theta, "Qubit evolution angle, u12 = exp(-i theta X)");
  appendix->add_option("--phi", appendix_options.phi, "Qubit state angle, psi = (cos phi, sin phi)");
  appendix->add_option("--sweep", appendix_options.sweep_steps, "Grid points of the phase sweep");
  common(appendix);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : histlab::kExitInvalid;
  }

  const histlab::Overrides overrides{tolerance, seed};
  if (check->parsed()) {
    return emit(histlab::guarded([&] { return histlab::run_scenario(scenario_path, overrides); }), format, out,
                scenario_path.stem().string() + ".report.json");
  }
  if (search->parsed()) {
    return emit(histlab::guarded([&] { return histlab::run_search(config_path, overrides, out); }), format, out,
                config_path.stem().string() + ".search.report.json");
  }
  if (compose->parsed()) {
    return emit(histlab::guarded([&] { return histlab::run_compose(a_path, b_path, overrides); }), format, out,
                "compose.report.json");
  }
  appendix_options.seed = seed;
  return emit(histlab::guarded([&] { return histlab::run_appendix(appendix_options, overrides); }), format, out,
              "appendix_runner.report.json");
}
