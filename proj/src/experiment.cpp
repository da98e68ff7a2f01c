#include "twinstream/experiment.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <functional>
#include <ostream>
#include <set>
#include <sstream>

#include "csv.hpp"
#include "twinstream/error.hpp"

namespace twinstream {

namespace {

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* expected) {
  fail(ErrorKind::InvalidInput, "config key '" + key + "': expected " + expected + ", got '" + value + "'");
}

double as_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size() || !std::isfinite(out)) bad_value(key, v, "a number");
  return out;
}

std::uint64_t as_u64(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size()) bad_value(key, v, "a nonnegative integer");
  return out;
}

bool as_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  bad_value(key, v, "true or false");
}

std::vector<ControllerKind> as_arms(const std::string& key, const std::string& v) {
  std::vector<ControllerKind> arms;
  for (auto part : csv::split(v)) {
    const auto kind = parse_controller(trim(part));
    if (!kind) bad_value(key, v, "a comma-separated list of twin_driven, throughput_rule, buffer_rule, fixed_profile");
    arms.push_back(*kind);
  }
  if (arms.empty()) bad_value(key, v, "at least one arm");
  return arms;
}

std::optional<std::filesystem::path> as_path(const std::string& v, const std::filesystem::path& base) {
  if (v.empty()) return std::nullopt;
  const std::filesystem::path p(v);
  return p.is_absolute() ? p : base / p;
}

void print_table(std::ostream& out, const char* title, const CohortReport& report, Summary ArmReport::*field) {
  out << title << "\n";
  char line[160];
  std::snprintf(line, sizeof line, "  %-16s %12s %12s\n", "method", "mean", "sd");
  out << line;
  for (const auto& a : report.arms) {
    const Summary& s = a.*field;
    std::snprintf(line, sizeof line, "  %-16s %12.4f %12.4f\n", a.arm.c_str(), s.mean, s.sd);
    out << line;
  }
}

}  // namespace

std::map<std::string, std::string> default_config_values() {
  return {
      {"seed", "1"},
      {"users", "200"},
      {"arms", "twin_driven,throughput_rule,buffer_rule,fixed_profile"},
      {"out_dir", "out"},
      {"catalog", ""},
      {"cohort_file", ""},
      {"trace_dir", ""},
      {"trace_file", ""},
      {"session.segment_duration_s", "4"},
      {"session.max_buffer_s", "30"},
      {"session.startup_threshold_s", "8"},
      {"session.video_duration_s", "600"},
      {"session.initial_throughput_mbps", "1"},
      {"session.feedback_per_segment", "false"},
      {"twin.alpha", "0.2"},
      {"twin.history", "64"},
      {"obs.rebuffers_to_zero", "3"},
      {"obs.switches_to_zero", "10"},
      {"obs.startup_s_to_zero", "10"},
      {"device_mix.phone", "0.4"},
      {"device_mix.tablet", "0.2"},
      {"device_mix.desktop", "0.2"},
      {"device_mix.tv", "0.2"},
      {"trace.dwell_mean_s", "10"},
      {"trace.jitter", "0.2"},
      {"trace.min_mbps", "0.3"},
      {"trace.max_mbps", "15"},
      {"trace.latency_min_ms", "20"},
      {"trace.latency_max_ms", "80"},
      {"trace.duration_s", "1200"},
      {"trace.sample_period_s", "1"},
      {"ladder.budget_kbps", "20000"},
      {"ladder.max_size", "6"},
      {"ladder.floor_kbps", "800"},
      {"abr.throughput_safety", "0.9"},
      {"abr.buffer_low_fraction", "0.25"},
      {"abr.buffer_high_fraction", "0.75"},
      {"qoe.lambda", "1"},
      {"qoe.mu", "0.5"},
      {"net.samples", "256"},
      {"net.epochs", "1500"},
      {"net.learning_rate", "0.05"},
  };
}

ExperimentConfig parse_experiment_config(const std::string& text, const std::map<std::string, std::string>& overrides,
                                         const std::filesystem::path& base_dir, const std::string& source) {
  auto values = default_config_values();
  auto set = [&](const std::string& key, const std::string& value, const std::string& where) {
    if (!values.contains(key)) fail(ErrorKind::InvalidInput, where + ": unknown config key '" + key + "'");
    values[key] = value;
  };

  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  std::set<std::string> seen;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = source + ":" + std::to_string(line_no);
    if (eq == std::string_view::npos) fail(ErrorKind::Format, where + ": expected 'key = value'");
    std::string key(trim(line.substr(0, eq)));
    if (!seen.insert(key).second) fail(ErrorKind::InvalidInput, where + ": duplicate key '" + key + "'");
    set(key, std::string(trim(line.substr(eq + 1))), where);
  }
  for (const auto& [k, v] : overrides) set(k, v, "override");

  ExperimentConfig c;
  c.echo = values;
  c.echo.erase("out_dir");  // where results land is not part of the experiment
  const auto& v = values;
  auto num = [&](const char* key) { return as_double(key, v.at(key)); };
  auto u64 = [&](const char* key) { return as_u64(key, v.at(key)); };

  c.master_seed = u64("seed");
  c.arms = as_arms("arms", v.at("arms"));
  c.out_dir = *as_path(v.at("out_dir").empty() ? "out" : v.at("out_dir"), base_dir);
  c.catalog_path = as_path(v.at("catalog"), base_dir);
  c.cohort_file = as_path(v.at("cohort_file"), base_dir);
  c.trace_dir = as_path(v.at("trace_dir"), base_dir);
  c.trace_file = as_path(v.at("trace_file"), base_dir);

  auto& s = c.settings;
  s.master_seed = c.master_seed;
  s.session.segment_duration_s = num("session.segment_duration_s");
  s.session.max_buffer_s = num("session.max_buffer_s");
  s.session.startup_threshold_s = num("session.startup_threshold_s");
  s.session.video_duration_s = num("session.video_duration_s");
  s.session.initial_throughput_mbps = num("session.initial_throughput_mbps");
  s.session.feedback_per_segment = as_bool("session.feedback_per_segment", v.at("session.feedback_per_segment"));
  s.mapping = {num("obs.rebuffers_to_zero"), num("obs.switches_to_zero"), num("obs.startup_s_to_zero")};
  s.transcode.total_bitrate_budget_kbps = static_cast<std::int64_t>(u64("ladder.budget_kbps"));
  s.transcode.max_ladder_size = u64("ladder.max_size");
  s.transcode.floor_bitrate_kbps = static_cast<std::int64_t>(u64("ladder.floor_kbps"));
  s.baseline = {num("abr.throughput_safety"), num("abr.buffer_low_fraction"), num("abr.buffer_high_fraction")};
  s.qoe = {num("qoe.lambda"), num("qoe.mu")};
  s.quality_samples = u64("net.samples");
  s.quality_training.epochs = u64("net.epochs");
  s.quality_training.learning_rate = num("net.learning_rate");

  auto& co = c.cohort;
  co.n_users = u64("users");
  co.seed = c.master_seed;
  co.alpha = num("twin.alpha");
  co.history_capacity = u64("twin.history");
  co.device_mix = {num("device_mix.phone"), num("device_mix.tablet"), num("device_mix.desktop"), num("device_mix.tv")};
  co.trace.dwell_mean_s = num("trace.dwell_mean_s");
  co.trace.jitter = num("trace.jitter");
  co.trace.min_mbps = num("trace.min_mbps");
  co.trace.max_mbps = num("trace.max_mbps");
  co.trace.latency_min_ms = num("trace.latency_min_ms");
  co.trace.latency_max_ms = num("trace.latency_max_ms");
  co.trace.duration_s = num("trace.duration_s");
  co.trace.sample_period_s = num("trace.sample_period_s");

  // Range checks up front so a bad config is a config error, not a runtime one.
  validate(s.session);
  validate(s.transcode);
  validate(co);
  if (s.quality_samples == 0) fail(ErrorKind::InvalidInput, "net.samples must be >= 1");
  if (!(s.quality_training.learning_rate > 0.0)) fail(ErrorKind::InvalidInput, "net.learning_rate must be positive");
  if (!(s.qoe.rebuffer_penalty > 0.0) || !(s.qoe.switch_penalty >= 0.0))
    fail(ErrorKind::InvalidInput, "qoe.lambda must be positive and qoe.mu nonnegative");
  if (!(s.baseline.throughput_safety > 0.0 && s.baseline.throughput_safety <= 1.0))
    fail(ErrorKind::InvalidInput, "abr.throughput_safety must be in (0,1]");
  if (!(0.0 <= s.baseline.buffer_low_fraction && s.baseline.buffer_low_fraction < s.baseline.buffer_high_fraction &&
        s.baseline.buffer_high_fraction <= 1.0))
    fail(ErrorKind::InvalidInput, "need 0 <= abr.buffer_low_fraction < abr.buffer_high_fraction <= 1");
  if (!(s.mapping.rebuffers_to_zero > 0.0 && s.mapping.switches_to_zero > 0.0 && s.mapping.startup_s_to_zero > 0.0))
    fail(ErrorKind::InvalidInput, "obs.* constants must be positive");
  if (c.trace_dir && c.trace_file) fail(ErrorKind::InvalidInput, "set at most one of trace_dir and trace_file");
  if ((c.trace_dir || c.trace_file) && !c.cohort_file)
    fail(ErrorKind::InvalidInput, "trace_dir/trace_file need a cohort_file");
  for (const auto* p : {&c.catalog_path, &c.cohort_file, &c.trace_dir, &c.trace_file})
    if (*p && !std::filesystem::exists(**p)) fail(ErrorKind::Io, "path does not exist: " + (*p)->string());
  return c;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path,
                                        const std::map<std::string, std::string>& overrides) {
  const std::string text = csv::read_file(path);
  return parse_experiment_config(text, overrides, path.parent_path(), path.string());
}

std::vector<Rendition> load_configured_catalog(const ExperimentConfig& config) {
  return config.catalog_path ? load_catalog(*config.catalog_path) : default_catalog();
}

std::vector<CohortMember> build_cohort(const ExperimentConfig& config) {
  if (!config.cohort_file) return gen_cohort(config.cohort);

  const auto rows = load_cohort(*config.cohort_file, config.cohort.history_capacity);
  std::optional<NetworkTrace> shared;
  if (config.trace_file) shared = load_trace(*config.trace_file);
  std::vector<CohortMember> out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    NetworkTrace trace = shared                ? *shared
                         : config.trace_dir    ? load_trace(*config.trace_dir / (row.profile.user_id() + ".csv"))
                                               : gen_member(config.cohort, i).trace;
    out.push_back({row.profile, row.device, std::move(trace)});
  }
  if (out.empty()) fail(ErrorKind::InvalidInput, "cohort file has no users");
  return out;
}

std::size_t threads_from_env() {
  const char* v = std::getenv("TWINSTREAM_THREADS");
  if (!v || !*v) return 0;
  std::size_t n = 0;
  const auto [p, ec] = std::from_chars(v, v + std::strlen(v), n);
  if (ec != std::errc{} || *p != '\0') fail(ErrorKind::InvalidInput, "TWINSTREAM_THREADS must be a nonnegative integer");
  return n;
}

CohortResult run_configured_cohort(const ExperimentConfig& config, std::size_t threads) {
  CohortSettings settings = config.settings;
  settings.catalog = load_configured_catalog(config);
  settings.threads = threads;
  const auto cohort = build_cohort(config);
  CohortResult result = run_cohort(cohort, config.arms, settings);
  result.report.config = config.echo;
  return result;
}

std::string format_summary(const CohortReport& report) {
  std::ostringstream out;
  print_table(out, "Average video quality (Mbps)", report, &ArmReport::avg_quality_mbps);
  print_table(out, "Buffering events per hour", report, &ArmReport::rebuffer_events_per_hour);
  print_table(out, "Average bandwidth usage (Mbps)", report, &ArmReport::avg_bandwidth_mbps);
  print_table(out, "QoE proxy", report, &ArmReport::qoe);
  const auto n = report.arms.empty() ? 0 : report.arms.front().n_sessions;
  out << "sessions per arm: " << n << ", seed: " << report.master_seed << "\n";
  return out.str();
}

namespace {

// Config problems map to the usage exit code; anything later is a runtime failure.
std::optional<ExperimentConfig> load_or_report(const std::filesystem::path& path,
                                               const std::map<std::string, std::string>& overrides,
                                               std::ostream& err) {
  try {
    return load_experiment_config(path, overrides);
  } catch (const Error& e) {
    err << "twinstream: config error: " << e.what() << "\n";
  }
  return std::nullopt;
}

}  // namespace

int run_experiment(const std::filesystem::path& config_path, const std::map<std::string, std::string>& overrides,
                   bool quiet, std::ostream& out, std::ostream& err) {
  const auto config = load_or_report(config_path, overrides, err);
  if (!config) return kExitUsage;
  try {
    const auto result = run_configured_cohort(*config, threads_from_env());
    emit_report(result.report, config->out_dir);
    if (!quiet) {
      out << format_summary(result.report);
      out << "report written to " << config->out_dir.string() << "\n";
    }
  } catch (const std::exception& e) {
    err << "twinstream: run failed: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}

int gen_traces(const std::filesystem::path& config_path, const std::map<std::string, std::string>& overrides,
               const std::filesystem::path& out_dir, std::ostream& out, std::ostream& err) {
  const auto config = load_or_report(config_path, overrides, err);
  if (!config) return kExitUsage;
  try {
    const auto cohort = build_cohort(*config);
    std::filesystem::create_directories(out_dir / "traces");
    std::ofstream f(out_dir / "cohort.csv", std::ios::binary | std::ios::trunc);
    if (!f) fail(ErrorKind::Io, "cannot write " + (out_dir / "cohort.csv").string());
    f << format_cohort(cohort);
    for (const auto& m : cohort) write_trace(m.trace, out_dir / "traces" / (m.profile.user_id() + ".csv"));
    out << "wrote " << cohort.size() << " traces to " << (out_dir / "traces").string() << "\n";
  } catch (const std::exception& e) {
    err << "twinstream: gen-traces failed: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}

int validate_files(const ValidateTargets& t, std::ostream& out, std::ostream& err) {
  if (!t.config && !t.trace && !t.catalog && !t.cohort) {
    err << "twinstream: validate needs at least one of --config, --trace, --catalog, --cohort\n";
    return kExitUsage;
  }
  int code = kExitOk;
  auto check = [&](const char* what, const std::optional<std::filesystem::path>& path,
                   const std::function<std::string(const std::filesystem::path&)>& fn) {
    if (!path) return;
    try {
      out << "ok: " << what << " " << path->string() << " (" << fn(*path) << ")\n";
    } catch (const Error& e) {
      err << "invalid " << what << ": " << e.what() << "\n";
      code = kExitUsage;
    }
  };
  check("config", t.config, [](const auto& p) {
    const auto c = load_experiment_config(p);
    (void)load_configured_catalog(c);
    return std::to_string(c.arms.size()) + " arms";
  });
  check("trace", t.trace, [](const auto& p) { return std::to_string(load_trace(p).samples().size()) + " samples"; });
  check("catalog", t.catalog, [](const auto& p) { return std::to_string(load_catalog(p).size()) + " renditions"; });
  check("cohort", t.cohort, [](const auto& p) { return std::to_string(load_cohort(p).size()) + " users"; });
  return code;
}

}  // namespace twinstream
