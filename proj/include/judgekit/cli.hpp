#pragma once

#include <filesystem>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "judgekit/cache.hpp"
#include "judgekit/client.hpp"
#include "judgekit/config.hpp"
#include "judgekit/data_io.hpp"
#include "judgekit/judge_runner.hpp"
#include "judgekit/pipeline.hpp"
#include "judgekit/report.hpp"
#include "judgekit/simulate.hpp"

namespace judgekit::cli {

// Stable exit code contract for scripting.
constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitValidation = 2;
constexpr int kExitIo = 3;
constexpr int kExitEndpoint = 4;

inline int exit_code_for(errc code) {
  switch (code) {
    case errc::io_error:
      return kExitIo;
    case errc::endpoint_error:
    case errc::auth_error:
    case errc::rate_limit_exhausted:
    case errc::timeout:
    case errc::malformed_response:
      return kExitEndpoint;
    default:
      return kExitValidation;
  }
}

namespace detail {

inline bool wildcard_match(std::string_view pattern, std::string_view name) {
  if (pattern.empty()) return name.empty();
  if (pattern.front() == '*') {
    for (std::size_t skip = 0; skip <= name.size(); ++skip) {
      if (wildcard_match(pattern.substr(1), name.substr(skip))) return true;
    }
    return false;
  }
  if (name.empty() || pattern.front() != name.front()) return false;
  return wildcard_match(pattern.substr(1), name.substr(1));
}

// Expands '*' in the filename component of each pattern; literal paths pass
// through. Results are sorted for deterministic processing order.
inline std::vector<std::filesystem::path> expand_score_patterns(
    const std::vector<std::string>& patterns) {
  std::vector<std::filesystem::path> files;
  for (const std::string& pattern : patterns) {
    const std::filesystem::path p(pattern);
    if (pattern.find('*') == std::string::npos) {
      files.push_back(p);
      continue;
    }
    const std::filesystem::path dir = p.parent_path().empty() ? "." : p.parent_path();
    const std::string name_pattern = p.filename().string();
    std::error_code ec;
    std::filesystem::directory_iterator it(dir, ec);
    if (ec) {
      throw IoError("cannot read directory " + dir.string());
    }
    for (const auto& entry : it) {
      if (!entry.is_regular_file()) continue;
      if (wildcard_match(name_pattern, entry.path().filename().string())) {
        files.push_back(entry.path());
      }
    }
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    throw EmptyInputError("no score files match the given patterns");
  }
  return files;
}

inline std::set<ReportFormat> formats_from_string(const std::string& s) {
  if (s == "md") return {ReportFormat::markdown};
  if (s == "csv") return {ReportFormat::csv};
  if (s == "jsonl") return {ReportFormat::jsonl};
  if (s == "all") {
    return {ReportFormat::markdown, ReportFormat::csv, ReportFormat::jsonl};
  }
  throw ValidationError("", "unknown format '" + s + "' (expected md, csv, jsonl, or all)");
}

// Generic (r, z) extraction so sensitivity runs over fixture files and tier
// result files alike.
inline std::vector<JudgePoint> load_judge_points(const std::filesystem::path& path) {
  std::vector<JudgePoint> points;
  for (const auto& [line_no, j] : judgekit::detail::read_jsonl(path)) {
    try {
      points.push_back(JudgePoint{judgekit::detail::require_number(j, "r"),
                                  judgekit::detail::require_number(j, "z")});
    } catch (const ValidationError& e) {
      throw ParseError(line_no, e.what());
    }
  }
  return points;
}

struct CommonOptions {
  std::string config_path;
  double r_threshold = 0.0;
  double z_threshold = 0.0;
  bool strict_z_boundary = false;
  std::string weighting;
  std::string binning;

  CLI::Option* r_opt = nullptr;
  CLI::Option* z_opt = nullptr;
  CLI::Option* strict_opt = nullptr;
  CLI::Option* weighting_opt = nullptr;
  CLI::Option* binning_opt = nullptr;

  void attach(CLI::App& cmd, bool with_scoring = false) {
    cmd.add_option("--config", config_path, "TOML-style config file");
    r_opt = cmd.add_option("--r-threshold", r_threshold, "correlation gate threshold");
    z_opt = cmd.add_option("--z-threshold", z_threshold, "human-likeness z threshold");
    strict_opt = cmd.add_flag("--strict-z-boundary", strict_z_boundary,
                              "treat |z| == z-threshold as not human-like");
    weighting_opt =
        cmd.add_option("--weighting", weighting, "kappa weighting: unweighted, linear, quadratic");
    if (with_scoring) {
      binning_opt = cmd.add_option("--binning", binning, "accuracy binning: pool or nearest");
    }
  }

  // defaults <- config file <- explicit flags
  ToolConfig resolve() const {
    ToolConfig cfg;
    if (!config_path.empty()) {
      cfg = load_config(config_path);
    }
    if (r_opt && r_opt->count()) cfg.thresholds.r_threshold = r_threshold;
    if (z_opt && z_opt->count()) cfg.thresholds.z_threshold = z_threshold;
    if (strict_opt && strict_opt->count()) cfg.thresholds.strict_z_boundary = strict_z_boundary;
    if (weighting_opt && weighting_opt->count()) {
      const auto w = weighting_from_string(weighting);
      if (!w) throw ValidationError("", "unknown weighting '" + weighting + "'");
      cfg.weighting = *w;
    }
    if (binning_opt && binning_opt->count()) {
      const auto b = binning_from_string(binning);
      if (!b) throw ValidationError("", "unknown binning rule '" + binning + "'");
      cfg.binning = *b;
    }
    return cfg;
  }
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

inline int cmd_validate(const std::string& dataset_path, std::ostream& out) {
  const auto items = load_dataset(dataset_path);
  out << "OK: " << items.size() << " items in " << dataset_path << "\n";
  return kExitOk;
}

struct JudgeOptions {
  std::string dataset_path;
  std::string judge_id;
  std::string out_path;
  std::string cache_path;
  std::string prompt_forward;
  std::string prompt_reversed;
  std::string template_version;
  EndpointConfig endpoint;
  BinningRule binning = BinningRule::partial_pool;
  double max_failure_rate = 0.10;
};

inline int cmd_judge(const JudgeOptions& opts, std::ostream& log) {
  const auto items = load_dataset(opts.dataset_path);
  std::vector<JudgeTask> tasks;
  tasks.reserve(items.size());
  for (const auto& item : items) {
    tasks.push_back(
        JudgeTask{item.item_id, item.question, item.reference_answer, item.generated_answer});
  }

  PromptTemplates templates = PromptTemplates::builtin();
  if (!opts.prompt_forward.empty() || !opts.prompt_reversed.empty()) {
    if (opts.prompt_forward.empty() || opts.prompt_reversed.empty()) {
      throw ValidationError("", "both --prompt-forward and --prompt-reversed are required");
    }
    templates = PromptTemplates::load(
        opts.prompt_forward, opts.prompt_reversed,
        opts.template_version.empty() ? "custom" : opts.template_version);
  }

  EndpointConfig endpoint = endpoint_from_env(opts.endpoint);
  if (endpoint.model_id.empty()) endpoint.model_id = opts.judge_id;
  ChatClient client(endpoint);

  // side files must not end in .jsonl, or score-file globs would sweep them in
  const std::string cache_path =
      opts.cache_path.empty() ? opts.out_path + ".cache" : opts.cache_path;
  VerdictCache cache(cache_path);

  log << "judging " << tasks.size() << " items with " << endpoint.model_id << "\n";
  JudgePolicy policy;
  policy.binning = opts.binning;
  const auto outcomes = judge_dataset(tasks, client, &cache, templates, policy);

  std::vector<JudgeScoreRecord> records;
  std::vector<ojson> failures;
  for (const auto& outcome : outcomes) {
    if (outcome.ok()) {
      JudgeScoreRecord rec;
      rec.item_id = outcome.item_id;
      rec.judge_id = opts.judge_id;
      rec.accuracy = outcome.verdict->accuracy;
      rec.binned = outcome.verdict->binned;
      rec.template_version = templates.version;
      rec.fetched_at = outcome.fetched_at;
      records.push_back(std::move(rec));
    } else {
      ojson j;
      j["item_id"] = outcome.item_id;
      j["error"] = outcome.error;
      failures.push_back(std::move(j));
    }
  }
  store_results(records, opts.out_path);

  const std::size_t failed = failures.size();
  if (failed > 0) {
    const std::string manifest_path = opts.out_path + ".failures";
    std::ofstream manifest(manifest_path, std::ios::trunc);
    if (!manifest) throw IoError("cannot write " + manifest_path);
    for (const auto& j : failures) manifest << j.dump() << '\n';
    log << failed << "/" << outcomes.size() << " items failed; manifest in " << manifest_path
        << "\n";
  }
  log << "wrote " << records.size() << " score records to " << opts.out_path << "\n";

  const double failure_rate =
      outcomes.empty() ? 0.0 : double(failed) / double(outcomes.size());
  if (failure_rate > opts.max_failure_rate) {
    log << "failure rate " << failure_rate << " exceeds limit " << opts.max_failure_rate << "\n";
    return kExitEndpoint;
  }
  return kExitOk;
}

struct EvaluateOptions {
  std::string dataset_path;
  std::vector<std::string> score_patterns;
  std::string out_dir;
  std::set<ReportFormat> formats{ReportFormat::markdown, ReportFormat::csv, ReportFormat::jsonl};
  ToolConfig cfg;
};

inline int cmd_evaluate(const EvaluateOptions& opts, std::ostream& log) {
  const auto items = load_dataset(opts.dataset_path);
  const auto score_files = detail::expand_score_patterns(opts.score_patterns);

  std::vector<AlignedJudgeScores> judges;
  judges.reserve(score_files.size());
  for (const auto& file : score_files) {
    const auto records = load_judge_scores(file);
    judges.push_back(align_scores(items, records));
  }

  EvaluationConfig eval_cfg;
  eval_cfg.weighting = opts.cfg.weighting;
  eval_cfg.thresholds = opts.cfg.thresholds;
  const auto evaluations = run_full_evaluation(items, judges, eval_cfg);

  const ReportBundle bundle =
      build_report(evaluations, opts.cfg.thresholds, opts.cfg.sensitivity_thresholds);
  write_report(bundle, opts.out_dir, opts.formats);

  // Full-precision tier records alongside the display-rounded leaderboards.
  std::vector<TierResult> tier_records;
  for (const auto& eval : evaluations) {
    if (eval.tier) tier_records.push_back(*eval.tier);
  }
  store_results(tier_records, std::filesystem::path(opts.out_dir) / "tier_results.jsonl");

  // Per-judge group statistics: gate provenance, the full pairwise kappa
  // matrix, and the human mean/spread behind each z-score.
  {
    const auto stats_path = std::filesystem::path(opts.out_dir) / "group_stats.jsonl";
    std::ofstream stats_out(stats_path, std::ios::trunc);
    if (!stats_out) throw IoError("cannot write " + stats_path.string());
    for (const auto& eval : evaluations) {
      ojson j;
      j["judge_id"] = eval.judge_id;
      j["r"] = eval.r;
      j["gate_passed"] = eval.gate_passed;
      j["mu_human"] = eval.stats.mu_human;
      j["sigma_human"] = eval.stats.sigma_human;
      j["kappa_llm"] = eval.stats.kappa_llm;
      if (eval.stats.z) {
        j["z"] = *eval.stats.z;
      } else {
        j["z"] = nullptr;
        j["zero_human_variance"] = true;
      }
      ojson matrix = ojson::array();
      for (const auto& row : eval.stats.pairwise_kappa) {
        matrix.push_back(ojson(row));
      }
      j["pairwise_kappa"] = std::move(matrix);
      stats_out << j.dump() << '\n';
    }
    stats_out.flush();
    if (!stats_out) throw IoError("write failed for " + stats_path.string());
  }

  log << "evaluated " << bundle.journey.total << " judges: " << bundle.journey.gate_passed
      << " passed the correlation gate, " << bundle.journey.tier1_total << " reached tier 1 ("
      << bundle.journey.human_like << " human-like, " << bundle.journey.super_consistent
      << " super-consistent)\n";
  if (bundle.journey.zero_variance > 0) {
    log << bundle.journey.zero_variance
        << " judges had zero human variance; no z-score is defined for them\n";
  }
  return kExitOk;
}

struct SensitivityOptions {
  std::string input_path;
  std::vector<double> z_thresholds;
  double r_threshold = 0.80;
  std::string out_dir;
  std::set<ReportFormat> formats{ReportFormat::markdown, ReportFormat::csv, ReportFormat::jsonl};
};

inline int cmd_sensitivity(const SensitivityOptions& opts, std::ostream& out) {
  const auto points = detail::load_judge_points(opts.input_path);
  const auto rows = sensitivity_analysis(points, opts.z_thresholds, opts.r_threshold);
  for (const auto& row : rows) {
    out << "z_threshold " << judgekit::detail::fmt2(row.z_threshold) << ": tier1 "
        << row.tier1_total << " = " << row.human_like << " human-like + " << row.super_consistent
        << " super-consistent\n";
  }
  if (!opts.out_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(opts.out_dir, ec);
    if (ec) throw IoError("cannot create directory " + opts.out_dir);
    for (ReportFormat format : opts.formats) {
      write_sensitivity_table(rows, opts.out_dir, format);
    }
  }
  return kExitOk;
}

struct SimulateOptions {
  PanelProfile profile;
  std::uint64_t base_seed = 1;
  std::size_t n_seeds = 100;
  Weighting weighting = Weighting::quadratic;
  TierThresholds thresholds{};
  std::string out_dir;
};

inline int cmd_simulate(const SimulateOptions& opts, std::ostream& log) {
  validate_profile(opts.profile);
  std::error_code ec;
  std::filesystem::create_directories(opts.out_dir, ec);
  if (ec) throw IoError("cannot create directory " + opts.out_dir);

  std::size_t human_like = 0, super_consistent = 0, underperform = 0, zero_variance = 0;
  const std::filesystem::path runs_path = std::filesystem::path(opts.out_dir) / "runs.jsonl";
  std::ofstream runs(runs_path, std::ios::trunc);
  if (!runs) throw IoError("cannot write " + runs_path.string());

  for (std::size_t i = 0; i < opts.n_seeds; ++i) {
    const std::uint64_t seed = opts.base_seed + i;
    const RaterGroup group = simulate_panel(opts.profile, seed);
    const GroupStats stats = turing_test(group, opts.weighting);
    ojson j;
    j["seed"] = seed;
    j["mu_human"] = stats.mu_human;
    j["sigma_human"] = stats.sigma_human;
    j["kappa_llm"] = stats.kappa_llm;
    if (stats.z) {
      j["z"] = *stats.z;
      // no correlation gate in simulation; classify on the z bands alone
      const Tier tier = assign_tier(opts.thresholds.r_threshold, *stats.z, opts.thresholds);
      j["outcome"] = to_string(tier);
      switch (tier) {
        case Tier::human_like: ++human_like; break;
        case Tier::super_consistent: ++super_consistent; break;
        case Tier::underperform: ++underperform; break;
        case Tier::fail_correlation: break;  // unreachable: r equals the threshold
      }
    } else {
      j["outcome"] = "ZeroHumanVariance";
      ++zero_variance;
    }
    runs << j.dump() << '\n';
  }
  runs.flush();
  if (!runs) throw IoError("write failed for " + runs_path.string());

  const std::filesystem::path summary_path =
      std::filesystem::path(opts.out_dir) / "summary.jsonl";
  std::ofstream summary(summary_path, std::ios::trunc);
  if (!summary) throw IoError("cannot write " + summary_path.string());
  ojson s;
  s["seeds"] = opts.n_seeds;
  s["items_per_panel"] = opts.profile.n_items;
  s["human_like"] = human_like;
  s["super_consistent"] = super_consistent;
  s["underperform"] = underperform;
  s["zero_human_variance"] = zero_variance;
  summary << s.dump() << '\n';

  log << "simulated " << opts.n_seeds << " panels: " << human_like << " human-like, "
      << super_consistent << " super-consistent, " << underperform << " underperform, "
      << zero_variance << " zero-human-variance\n";
  return kExitOk;
}

struct FixtureReplayOptions {
  std::string fixture_path = "data/judge_performance_matrix.jsonl";
  std::string out_dir;
  std::set<ReportFormat> formats{ReportFormat::markdown, ReportFormat::csv, ReportFormat::jsonl};
  ToolConfig cfg;
};

inline int cmd_fixture_replay(const FixtureReplayOptions& opts, std::ostream& out) {
  const auto rows = load_fixture(opts.fixture_path);
  const std::size_t matches = count_fixture_tier_matches(rows, opts.cfg.thresholds);
  const ReportBundle bundle =
      build_report_from_fixture(rows, opts.cfg.thresholds, opts.cfg.sensitivity_thresholds);
  out << "tier labels reproduced: " << matches << "/" << rows.size() << "\n";
  out << "journey: " << bundle.journey.total << " judges, " << bundle.journey.gate_passed
      << " passed the gate, " << bundle.journey.tier1_total << " tier 1 ("
      << bundle.journey.human_like << " human-like + " << bundle.journey.super_consistent
      << " super-consistent), " << bundle.journey.underperform << " underperform\n";
  if (!opts.out_dir.empty()) {
    write_report(bundle, opts.out_dir, opts.formats);
  }
  if (matches != rows.size()) {
    out << "tier mismatch against the stored labels\n";
    return kExitValidation;
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// Dispatcher
// ---------------------------------------------------------------------------

/// Parses arguments (without the program name) and runs the selected
/// command. Returns the process exit code.
inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  CLI::App app{"LLM judge evaluation toolkit"};
  app.require_subcommand(1);

  // validate
  auto* validate = app.add_subcommand("validate", "check a dataset file");
  std::string validate_dataset;
  validate->add_option("--dataset", validate_dataset, "dataset JSONL file")->required();

  // judge
  auto* judge = app.add_subcommand("judge", "run the dual-prompt judge over a dataset");
  JudgeOptions judge_opts;
  detail::CommonOptions judge_common;
  judge->add_option("--dataset", judge_opts.dataset_path, "dataset JSONL file")->required();
  judge->add_option("--judge-id", judge_opts.judge_id, "judge label for the output records")
      ->required();
  judge->add_option("--out", judge_opts.out_path, "score records output file")->required();
  judge->add_option("--cache", judge_opts.cache_path, "verdict cache file");
  judge->add_option("--prompt-forward", judge_opts.prompt_forward, "forward template file");
  judge->add_option("--prompt-reversed", judge_opts.prompt_reversed, "reversed template file");
  judge->add_option("--template-version", judge_opts.template_version,
                    "version tag for custom templates");
  auto* judge_base_url = judge->add_option("--base-url", judge_opts.endpoint.base_url,
                                           "chat completion endpoint base URL");
  auto* judge_model = judge->add_option("--model", judge_opts.endpoint.model_id,
                                        "model id (defaults to --judge-id)");
  long long judge_timeout_ms = 0;
  auto* judge_timeout = judge->add_option("--timeout-ms", judge_timeout_ms, "request timeout");
  auto* judge_parallel =
      judge->add_option("--max-parallel", judge_opts.endpoint.max_parallel, "parallel requests");
  auto* judge_retries =
      judge->add_option("--max-retries", judge_opts.endpoint.max_retries, "transport retries");
  auto* judge_temperature =
      judge->add_option("--temperature", judge_opts.endpoint.temperature, "sampling temperature");
  auto* judge_failure_rate = judge->add_option("--max-failure-rate", judge_opts.max_failure_rate,
                                               "failed-item fraction tolerated before nonzero exit");
  judge_common.attach(*judge, /*with_scoring=*/true);

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "run the two-step evaluation over judge scores");
  EvaluateOptions eval_opts;
  detail::CommonOptions eval_common;
  std::string eval_format = "all";
  evaluate->add_option("--dataset", eval_opts.dataset_path, "dataset JSONL file")->required();
  evaluate->add_option("--scores", eval_opts.score_patterns,
                       "score files (repeatable; * matches in filenames)")
      ->required();
  evaluate->add_option("--out", eval_opts.out_dir, "report output directory")->required();
  evaluate->add_option("--format", eval_format, "md, csv, jsonl, or all");
  eval_common.attach(*evaluate);

  // sensitivity
  auto* sensitivity = app.add_subcommand("sensitivity", "tier counts across z thresholds");
  SensitivityOptions sens_opts;
  std::string sens_format = "all";
  std::string sens_config;
  sensitivity->add_option("--input", sens_opts.input_path, "rows with r and z (fixture or results)")
      ->required();
  auto* sens_thresholds =
      sensitivity->add_option("--z-threshold", sens_opts.z_thresholds, "threshold (repeatable)");
  auto* sens_r = sensitivity->add_option("--r-threshold", sens_opts.r_threshold,
                                         "correlation gate held constant");
  sensitivity->add_option("--out", sens_opts.out_dir, "output directory (optional)");
  sensitivity->add_option("--format", sens_format, "md, csv, jsonl, or all");
  sensitivity->add_option("--config", sens_config, "TOML-style config file");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "synthetic panels through the group analysis");
  SimulateOptions sim_opts;
  detail::CommonOptions sim_common;
  simulate->add_option("--items", sim_opts.profile.n_items, "items per panel");
  simulate->add_option("--human-noise", sim_opts.profile.human_noise, "human slip probability");
  simulate->add_option("--llm-noise", sim_opts.profile.llm_noise, "LLM slip probability");
  simulate->add_option("--llm-bias", sim_opts.profile.llm_bias, "LLM drift in [-1, 1]");
  simulate->add_option("--seed", sim_opts.base_seed, "base seed");
  simulate->add_option("--seeds", sim_opts.n_seeds, "number of seeds to run");
  simulate->add_option("--out", sim_opts.out_dir, "output directory")->required();
  sim_common.attach(*simulate);

  // fixture-replay
  auto* replay = app.add_subcommand("fixture-replay",
                                    "replay the bundled judge performance matrix");
  FixtureReplayOptions replay_opts;
  detail::CommonOptions replay_common;
  std::string replay_format = "all";
  replay->add_option("--fixture", replay_opts.fixture_path, "fixture JSONL file");
  replay->add_option("--out", replay_opts.out_dir, "report output directory (optional)");
  replay->add_option("--format", replay_format, "md, csv, jsonl, or all");
  replay_common.attach(*replay);

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("judgekit");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(int(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (validate->parsed()) {
      return cmd_validate(validate_dataset, out);
    }
    if (judge->parsed()) {
      const ToolConfig cfg = judge_common.resolve();
      judge_opts.binning = cfg.binning;
      EndpointConfig endpoint = cfg.endpoint;
      if (judge_base_url->count()) endpoint.base_url = judge_opts.endpoint.base_url;
      if (judge_model->count()) endpoint.model_id = judge_opts.endpoint.model_id;
      if (judge_timeout->count()) endpoint.timeout = std::chrono::milliseconds(judge_timeout_ms);
      if (judge_parallel->count()) endpoint.max_parallel = judge_opts.endpoint.max_parallel;
      if (judge_retries->count()) endpoint.max_retries = judge_opts.endpoint.max_retries;
      if (judge_temperature->count()) endpoint.temperature = judge_opts.endpoint.temperature;
      judge_opts.endpoint = endpoint;
      if (!judge_failure_rate->count()) judge_opts.max_failure_rate = cfg.max_failure_rate;
      return cmd_judge(judge_opts, err);
    }
    if (evaluate->parsed()) {
      eval_opts.cfg = eval_common.resolve();
      eval_opts.formats = detail::formats_from_string(eval_format);
      return cmd_evaluate(eval_opts, err);
    }
    if (sensitivity->parsed()) {
      ToolConfig cfg;
      if (!sens_config.empty()) cfg = load_config(sens_config);
      if (!sens_thresholds->count()) sens_opts.z_thresholds = cfg.sensitivity_thresholds;
      if (!sens_r->count()) sens_opts.r_threshold = cfg.thresholds.r_threshold;
      sens_opts.formats = detail::formats_from_string(sens_format);
      return cmd_sensitivity(sens_opts, out);
    }
    if (simulate->parsed()) {
      const ToolConfig cfg = sim_common.resolve();
      sim_opts.weighting = cfg.weighting;
      sim_opts.thresholds = cfg.thresholds;
      return cmd_simulate(sim_opts, err);
    }
    if (replay->parsed()) {
      replay_opts.cfg = replay_common.resolve();
      replay_opts.formats = detail::formats_from_string(replay_format);
      return cmd_fixture_replay(replay_opts, out);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  }
  return kExitUsage;
}

}  // namespace judgekit::cli
