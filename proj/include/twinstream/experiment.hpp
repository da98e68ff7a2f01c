#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "twinstream/abr.hpp"
#include "twinstream/simnet.hpp"
#include "twinstream/workload.hpp"

namespace twinstream {

/// Flat `key = value` settings. Every key has a default (see
/// default_config_values()); unknown keys are rejected.
struct ExperimentConfig {
  std::uint64_t master_seed = 1;
  std::vector<ControllerKind> arms;
  std::filesystem::path out_dir;
  std::optional<std::filesystem::path> catalog_path;
  std::optional<std::filesystem::path> cohort_file;
  std::optional<std::filesystem::path> trace_dir;
  std::optional<std::filesystem::path> trace_file;
  CohortSpec cohort;
  CohortSettings settings;

  // Effective key/value pairs, values exactly as given where a value was given.
  std::map<std::string, std::string> echo;
};

std::map<std::string, std::string> default_config_values();

/// Parses config text merged over the defaults, then `overrides` over that.
/// Relative paths resolve against base_dir. Throws Error on any bad key or value.
ExperimentConfig parse_experiment_config(const std::string& text, const std::map<std::string, std::string>& overrides,
                                         const std::filesystem::path& base_dir, const std::string& source);

ExperimentConfig load_experiment_config(const std::filesystem::path& path,
                                        const std::map<std::string, std::string>& overrides = {});

/// Cohort from the configured files, or generated from the cohort spec.
std::vector<CohortMember> build_cohort(const ExperimentConfig& config);

std::vector<Rendition> load_configured_catalog(const ExperimentConfig& config);

/// Worker count from TWINSTREAM_THREADS (0 or unset: hardware default).
std::size_t threads_from_env();

CohortResult run_configured_cohort(const ExperimentConfig& config, std::size_t threads);

/// Human-readable mean (SD) tables for quality, buffering and bandwidth (plus QoE).
std::string format_summary(const CohortReport& report);

enum ExitCode : int { kExitOk = 0, kExitRuntime = 1, kExitUsage = 2 };

/// `run`: load config, simulate every arm on the paired cohort, emit the report.
int run_experiment(const std::filesystem::path& config_path, const std::map<std::string, std::string>& overrides,
                   bool quiet, std::ostream& out, std::ostream& err);

/// `gen-traces`: write cohort.csv and traces/<user_id>.csv for the configured cohort.
int gen_traces(const std::filesystem::path& config_path, const std::map<std::string, std::string>& overrides,
               const std::filesystem::path& out_dir, std::ostream& out, std::ostream& err);

/// `validate`: check any of a config, trace, catalog or cohort file without running.
struct ValidateTargets {
  std::optional<std::filesystem::path> config;
  std::optional<std::filesystem::path> trace;
  std::optional<std::filesystem::path> catalog;
  std::optional<std::filesystem::path> cohort;
};
int validate_files(const ValidateTargets& targets, std::ostream& out, std::ostream& err);

}  // namespace twinstream
