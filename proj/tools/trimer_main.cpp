#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "trimer/io.hpp"

int main(int argc, char** argv) {
  CLI::App app{"three-well condensate: spectra, eigenstate atlas, beat dynamics"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("-c,--config", config_path, "key=value configuration file");

  std::string state, output;
  double tmax = -1.0;
  int samples = -1, index = -1;

  app.add_subcommand("diagonalize",
                     "build and solve the model; write the eigendata cache");
  app.add_subcommand("classify",
                     "label every eigenstate and tabulate ladder families");
  auto* sim = app.add_subcommand("simulate", "two-state occupation beat to CSV");
  sim->add_option("--state", state,
                  "superposition, e.g. \"C:0,3 + C:0,4\" or \"#216 + #239\"")
      ->required();
  sim->add_option("--tmax", tmax, "duration in units of 2*pi/delta");
  sim->add_option("--samples", samples, "number of time samples");
  sim->add_option("--output", output, "trajectory CSV path");
  auto* cmp = app.add_subcommand(
      "compare", "exact vs idealized occupation elements for a pair");
  cmp->add_option("--state", state, "two-term superposition")->required();
  auto* grd =
      app.add_subcommand("grid", "phase-space density of one eigenstate");
  grd->add_option("--index", index, "eigenstate index")->required();
  grd->add_option("--output", output, "chart CSV path");

  CLI11_PARSE(app, argc, argv);

  try {
    const trimer::RunConfig cfg = config_path.empty()
                                      ? trimer::RunConfig{}
                                      : trimer::load_config_file(config_path);
    const trimer::PipelineArgs args{state, tmax, samples, index, output};
    return trimer::run_pipeline(app.get_subcommands().front()->get_name(), cfg,
                                args);
  } catch (const trimer::UsageError& e) {
    std::cerr << "error [usage]: " << e.what() << "\n";
    return 2;
  } catch (const trimer::ConfigError& e) {
    std::cerr << "error [config]: " << e.what() << "\n";
    return 3;
  } catch (const trimer::CacheError& e) {
    std::cerr << "error [cache]: " << e.what() << "\n";
    return 4;
  } catch (const trimer::ResolveError& e) {
    std::cerr << "error [state]: " << e.what() << "\n";
    return 5;
  } catch (const trimer::ConvergenceError& e) {
    std::cerr << "error [solver]: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
