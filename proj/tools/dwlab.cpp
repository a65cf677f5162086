// Experiment runner: one pipeline per invocation, artifacts under --out.

#include "dwlab/config.hpp"
#include "dwlab/errors.hpp"
#include "dwlab/io.hpp"
#include "dwlab/runner.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>

int main(int argc, char** argv) {
  CLI::App app{"dwlab: damped wave decay and observability experiments"};
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> pipeline;
  app.add_option("--config", config_path, "JSON experiment configuration")->required();
  app.add_option("--out", out_dir, "output directory (default: the config's output key)");
  app.add_option("--seed", seed, "override the config seed");
  app.add_option("--pipeline", pipeline, "override the config pipeline")
      ->check(CLI::IsMember(dwlab::pipeline_names()));
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : dwlab::exit_validation;
  }

  std::filesystem::path out = out_dir;
  try {
    dwlab::ExperimentConfig config = dwlab::load_config(config_path);
    if (pipeline) config.pipeline = *pipeline;
    if (seed) config.seed = *seed;
    config.validate();
    if (out.empty()) out = config.out;
    const auto outcome = dwlab::run_pipeline(config, out);
    std::cout << config.pipeline << ": " << outcome.report["verdict"].get<std::string>() << " ("
              << (out / "report.json").string() << ")\n";
    return outcome.exit_code;
  } catch (const dwlab::Error& e) {
    const auto doc = dwlab::error_json(e);
    std::cerr << doc.dump() << "\n";
    if (out.empty()) out = "out";
    try {
      dwlab::io::write_text(out / "error.json", doc.dump(2) + "\n");
    } catch (const dwlab::Error&) {
    }
    return dwlab::exit_code_for(e);
  }
}
