#include <cstdint>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "twinstream/experiment.hpp"

namespace {

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> arms;
  std::optional<std::uint64_t> users;

  void attach(CLI::App* cmd) {
    cmd->add_option("--seed", seed, "master seed");
    cmd->add_option("--out", out, "output directory");
    cmd->add_option("--arms", arms, "comma-separated controller list");
    cmd->add_option("--users", users, "number of generated users");
  }

  std::map<std::string, std::string> to_map() const {
    std::map<std::string, std::string> m;
    if (seed) m["seed"] = std::to_string(*seed);
    if (out) m["out_dir"] = *out;
    if (arms) m["arms"] = *arms;
    if (users) m["users"] = std::to_string(*users);
    return m;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"twinstream: digital-twin adaptive streaming simulator"};
  app.require_subcommand(1);

  std::string config;
  bool quiet = false;
  Overrides run_over;
  auto* run = app.add_subcommand("run", "run a configured experiment");
  run->add_option("--config", config, "experiment config file")->required();
  run->add_flag("--quiet", quiet, "suppress the summary tables");
  run_over.attach(run);

  std::string gen_config;
  std::string gen_out = "traces_out";
  Overrides gen_over;
  auto* gen = app.add_subcommand("gen-traces", "write the configured cohort and its traces as CSV");
  gen->add_option("--config", gen_config, "experiment config file")->required();
  gen_over.attach(gen);
  // --out names the destination here, not the report directory.
  gen->get_option("--out")->description("destination directory");

  twinstream::ValidateTargets targets;
  auto* val = app.add_subcommand("validate", "check config, trace, catalog or cohort files");
  val->add_option("--config", targets.config, "experiment config file");
  val->add_option("--trace", targets.trace, "network trace CSV");
  val->add_option("--catalog", targets.catalog, "rendition catalog CSV");
  val->add_option("--cohort", targets.cohort, "cohort CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return twinstream::kExitUsage;
  }

  if (run->parsed()) return twinstream::run_experiment(config, run_over.to_map(), quiet, std::cout, std::cerr);
  if (gen->parsed()) {
    auto over = gen_over.to_map();
    if (gen_over.out) {
      gen_out = *gen_over.out;
      over.erase("out_dir");
    }
    return twinstream::gen_traces(gen_config, over, gen_out, std::cout, std::cerr);
  }
  return twinstream::validate_files(targets, std::cout, std::cerr);
}
