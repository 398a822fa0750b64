// Copyright 2026 The Prosody Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "prosody/cli.h"

#include <algorithm>
#include <atomic>
#include <exception>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "prosody/error.h"
#include "prosody/eval.h"
#include "prosody/features.h"
#include "prosody/llm.h"
#include "prosody/mapping.h"
#include "prosody/modifier.h"
#include "prosody/prompting.h"
#include "text_util.h"

namespace prosody {
namespace {

struct StatsArgs {
  std::vector<std::string> files;
  std::string out;
  StatsOptions options;
};

struct PromptArgs {
  std::string mode = "neutral";
  std::string text;
  std::string style;
  std::string previous_line;
  std::string exemplars;
};

struct PlanArgs {
  PromptArgs prompt;
  std::string features;
  std::string stats;
  std::string out;
  std::string transcript;
  std::vector<std::string> utterances;
  std::string backend;
  std::uint64_t seed = 0;
  BackendConfig config;
  int max_attempts = RepairPolicy{}.max_attempts;
  MappingConfig mapping;
};

struct ApplyArgs {
  std::string features;
  std::string stats;
  std::string plan;
  std::string out;
};

struct EvalArgs {
  std::string file;
  double confidence = 0.95;
  std::vector<std::string> paired;
  std::string styles;
};

void AddPromptOptions(CLI::App* cmd, PromptArgs& a, bool text_required) {
  cmd->add_option("--mode", a.mode, "neutral, style or dialogue")
      ->check(CLI::IsMember({"neutral", "style", "dialogue"}))
      ->capture_default_str();
  auto* text = cmd->add_option("--text", a.text, "target text");
  if (text_required) text->required();
  cmd->add_option("--style", a.style, "speaking style (style mode)");
  cmd->add_option("--previous-line", a.previous_line,
                  "previous dialogue line (dialogue mode)");
  cmd->add_option("--exemplars", a.exemplars,
                  "exemplar file replacing the shipped examples");
}

// Mode plus context from the flags. Throws kInvalidSpec on a bad combination.
PromptMode ModeFromArgs(const PromptArgs& a) {
  const bool has_style = !a.style.empty();
  const bool has_previous = !a.previous_line.empty();
  if (a.mode == "neutral") {
    if (has_style || has_previous) {
      throw Error(ErrorCode::kInvalidSpec,
                  "neutral mode takes neither --style nor --previous-line");
    }
    return PromptMode::Neutral();
  }
  if (a.mode == "style") {
    if (!has_style || has_previous) {
      throw Error(ErrorCode::kInvalidSpec,
                  "style mode needs --style and no --previous-line");
    }
    return PromptMode::Style(a.style);
  }
  if (!has_previous || has_style) {
    throw Error(ErrorCode::kInvalidSpec,
                "dialogue mode needs --previous-line and no --style");
  }
  return PromptMode::Dialogue(a.previous_line);
}

PromptSpec SpecFromArgs(const PromptArgs& a, const std::string& text) {
  PromptSpec spec = DefaultPromptSpec(ModeFromArgs(a), text);
  if (!a.exemplars.empty()) spec.exemplars = ReadExemplarFile(a.exemplars);
  return spec;
}

void WriteOrPrint(const std::string& path, const std::string& contents,
                  std::ostream& out) {
  if (path.empty() || path == "-") {
    out << contents;
  } else {
    internal::WriteFile(path, contents);
  }
}

int RunStats(const StatsArgs& a, std::ostream& out) {
  std::vector<UtteranceFeatures> corpus;
  for (const std::string& file : a.files) {
    auto utterances = ReadFeatureFile(file);
    corpus.insert(corpus.end(), std::make_move_iterator(utterances.begin()),
                  std::make_move_iterator(utterances.end()));
  }
  WriteOrPrint(a.out, SerializeSpeakerStats(ComputeSpeakerStats(corpus, a.options)),
               out);
  return kExitOk;
}

int RunPrompt(const PromptArgs& a, std::ostream& out) {
  out << BuildPrompt(SpecFromArgs(a, a.text));
  return kExitOk;
}

int RunPlan(const PlanArgs& a, std::ostream& out, std::ostream& err) {
  const std::vector<UtteranceFeatures> all = ReadFeatureFile(a.features);
  const SpeakerStats stats = ReadStatsFile(a.stats);

  std::vector<const UtteranceFeatures*> selected;
  if (a.utterances.empty()) {
    for (const UtteranceFeatures& u : all) selected.push_back(&u);
  } else {
    for (const std::string& id : a.utterances) {
      const auto it = std::find_if(all.begin(), all.end(),
                                   [&](const UtteranceFeatures& u) { return u.id == id; });
      if (it == all.end()) {
        throw Error(ErrorCode::kInvalidInput, "no utterance '" + id + "' in " + a.features);
      }
      selected.push_back(&*it);
    }
  }
  if (selected.empty()) throw Error(ErrorCode::kEmptyInput, "no utterances to plan");
  if (!a.prompt.text.empty()) {
    if (selected.size() != 1) {
      throw Error(ErrorCode::kInvalidInput,
                  "--text applies to exactly one utterance; select it with --utterance");
    }
    std::vector<std::string> text_keys;
    for (const Word& w : TokenizeWords(a.prompt.text)) text_keys.push_back(w.key);
    std::vector<std::string> feature_keys;
    for (const Word& w : selected.front()->words) feature_keys.push_back(w.key);
    if (text_keys != feature_keys) {
      throw Error(ErrorCode::kWordMismatch,
                  "--text words differ from the words of utterance '" +
                      selected.front()->id + "'");
    }
  }

  std::vector<PromptSpec> specs;
  for (const UtteranceFeatures* u : selected) {
    specs.push_back(SpecFromArgs(a.prompt, a.prompt.text.empty() ? u->text : a.prompt.text));
  }

  std::unique_ptr<CompletionBackend> backend;
  if (a.backend == "mock") {
    backend = std::make_unique<MockBackend>(a.seed);
  } else {
    backend = std::make_unique<HttpBackend>(a.config);
  }
  RepairPolicy policy;
  policy.max_attempts = a.max_attempts;

  const std::size_t count = selected.size();
  std::vector<std::optional<SuggestResult>> results(count);
  std::vector<std::optional<Transcript>> failed_transcripts(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  const auto worker = [&]() {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        results[i] = SuggestWithRepair(specs[i], *backend, policy);
      } catch (const RepairExhaustedError& e) {
        failed_transcripts[i] = e.transcript();
        errors[i] = std::current_exception();
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads =
      std::min<std::size_t>(count, static_cast<std::size_t>(a.config.max_parallel));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();

  if (!a.transcript.empty()) {
    std::vector<std::pair<std::string, Transcript>> transcripts;
    for (std::size_t i = 0; i < count; ++i) {
      if (results[i]) {
        transcripts.emplace_back(selected[i]->id, results[i]->transcript);
      } else if (failed_transcripts[i]) {
        transcripts.emplace_back(selected[i]->id, *failed_transcripts[i]);
      }
    }
    internal::WriteFile(a.transcript, TranscriptsToJson(transcripts) + "\n");
  }
  for (std::size_t i = 0; i < count; ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
  }

  std::vector<ModificationPlan> plans;
  for (std::size_t i = 0; i < count; ++i) {
    PlanResult built = BuildPlan(results[i]->suggestion, *selected[i], stats, a.mapping);
    for (const ClampReport& c : built.clamps) {
      err << "warning: utterance '" << selected[i]->id << "': " << c.field << "="
          << internal::FormatShortest(c.original) << " clamped to "
          << internal::FormatShortest(c.clamped) << "\n";
    }
    plans.push_back(std::move(built.plan));
  }
  WriteOrPrint(a.out, SerializePlans(plans), out);
  return kExitOk;
}

int RunApply(const ApplyArgs& a) {
  std::vector<UtteranceFeatures> utterances = ReadFeatureFile(a.features);
  const SpeakerStats stats = ReadStatsFile(a.stats);
  const std::vector<ModificationPlan> plans = ReadPlanFile(a.plan);

  std::map<std::string, const ModificationPlan*> by_id;
  for (const ModificationPlan& plan : plans) {
    std::string id = plan.utterance_id;
    if (id.empty()) {
      if (plans.size() != 1 || utterances.size() != 1) {
        throw Error(ErrorCode::kInvalidInput,
                    "a plan without a PLAN line needs a single-utterance feature file");
      }
      id = utterances.front().id;
    }
    if (!by_id.emplace(id, &plan).second) {
      throw Error(ErrorCode::kInvalidInput, "two plans for utterance '" + id + "'");
    }
  }
  std::set<std::string> applied;
  for (UtteranceFeatures& u : utterances) {
    const auto it = by_id.find(u.id);
    if (it == by_id.end()) continue;
    u = ApplyPlan(u, stats, *it->second);
    applied.insert(u.id);
  }
  for (const auto& [id, plan] : by_id) {
    if (!applied.count(id)) {
      throw Error(ErrorCode::kInvalidInput, "plan for unknown utterance '" + id + "'");
    }
  }
  WriteFeatureFile(a.out, utterances);
  return kExitOk;
}

int ExitCodeFor(const Error& e) {
  if (e.code() == ErrorCode::kRepairExhausted) return kExitRepairExhausted;
  if (e.IsBackendError()) return kExitBackendError;
  return kExitDataError;
}

}  // namespace

int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Prompt-driven prosody modification for phone-level TTS features"};
  app.name("prosody");
  app.require_subcommand(1);

  StatsArgs stats_args;
  auto* stats = app.add_subcommand("stats", "Compute speaker statistics from raw feature files");
  stats->add_option("files", stats_args.files, "raw feature files")->required()->check(CLI::ExistingFile);
  stats->add_option("-o,--out", stats_args.out, "stats file (default: standard output)");
  stats->add_option("--min-duration", stats_args.options.min_duration_s,
                    "skip utterances shorter than this many seconds")
      ->capture_default_str();
  stats->add_option("--low-percentile", stats_args.options.low_percentile)->capture_default_str();
  stats->add_option("--high-percentile", stats_args.options.high_percentile)->capture_default_str();

  PromptArgs prompt_args;
  auto* prompt = app.add_subcommand("prompt", "Print the LLM prompt for a text");
  AddPromptOptions(prompt, prompt_args, /*text_required=*/true);

  PlanArgs plan_args;
  auto* plan = app.add_subcommand("plan", "Ask the LLM for a modification plan");
  AddPromptOptions(plan, plan_args.prompt, /*text_required=*/false);
  plan->add_option("--features", plan_args.features, "normalized feature file")
      ->required()->check(CLI::ExistingFile);
  plan->add_option("--stats", plan_args.stats, "speaker stats file")->required()->check(CLI::ExistingFile);
  plan->add_option("-o,--out", plan_args.out, "plan file (default: standard output)");
  plan->add_option("--transcript", plan_args.transcript, "write the attempt transcript (JSON)");
  plan->add_option("--utterance", plan_args.utterances, "utterance ids to plan (default: all)");
  plan->add_option("--backend", plan_args.backend, "mock or http")
      ->required()->check(CLI::IsMember({"mock", "http"}));
  plan->add_option("--seed", plan_args.seed, "mock backend seed")->capture_default_str();
  plan->add_option("--base-url", plan_args.config.base_url)->capture_default_str();
  plan->add_option("--model", plan_args.config.model_name)->capture_default_str();
  plan->add_option("--api-key-env", plan_args.config.api_key_env,
                   "environment variable holding the API key")
      ->capture_default_str();
  plan->add_option("--temperature", plan_args.config.temperature)->capture_default_str();
  plan->add_option("--timeout", plan_args.config.timeout_s, "request timeout in seconds")
      ->capture_default_str();
  plan->add_option("--max-retries", plan_args.config.max_retries)->capture_default_str();
  plan->add_option("--max-parallel", plan_args.config.max_parallel)->capture_default_str();
  plan->add_option("--max-attempts", plan_args.max_attempts, "LLM attempts per utterance")
      ->capture_default_str();
  plan->add_option("--local-pitch-cap", plan_args.mapping.local_pitch_cap_fraction,
                   "fraction of the upward pitch headroom one word can use")
      ->capture_default_str();

  ApplyArgs apply_args;
  auto* apply = app.add_subcommand("apply", "Apply plans to a normalized feature file");
  apply->add_option("--features", apply_args.features)->required()->check(CLI::ExistingFile);
  apply->add_option("--stats", apply_args.stats)->required()->check(CLI::ExistingFile);
  apply->add_option("--plan", apply_args.plan)->required()->check(CLI::ExistingFile);
  apply->add_option("-o,--out", apply_args.out)->required();

  EvalArgs eval_args;
  auto* eval = app.add_subcommand("eval", "Summarize listening-test results");
  eval->require_subcommand(1);
  auto* mos = eval->add_subcommand("mos", "MOS with t-based confidence intervals");
  mos->add_option("file", eval_args.file, "ratings file")->required()->check(CLI::ExistingFile);
  mos->add_option("--confidence", eval_args.confidence)->capture_default_str();
  mos->add_option("--paired", eval_args.paired, "paired t-test between two systems")
      ->expected(2);
  auto* pref = eval->add_subcommand("pref", "A/B/C preference percentages");
  pref->add_option("file", eval_args.file, "preferences file")->required()->check(CLI::ExistingFile);
  auto* styles = eval->add_subcommand("styles", "Preference percentages per style");
  styles->add_option("file", eval_args.file, "preferences file")->required()->check(CLI::ExistingFile);
  styles->add_option("--styles", eval_args.styles, "set_id<TAB>style file")
      ->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitDataError;
  }

  try {
    if (*stats) return RunStats(stats_args, out);
    if (*prompt) return RunPrompt(prompt_args, out);
    if (*plan) return RunPlan(plan_args, out, err);
    if (*apply) return RunApply(apply_args);
    if (*mos) {
      const auto records = ParseRatings(internal::ReadFile(eval_args.file));
      out << FormatMos(SummarizeMos(records, eval_args.confidence));
      if (!eval_args.paired.empty()) {
        out << FormatTTest(eval_args.paired[0], eval_args.paired[1],
                           PairedTTest(records, eval_args.paired[0], eval_args.paired[1]));
      }
      return kExitOk;
    }
    if (*pref) {
      const auto records = ParsePreferences(internal::ReadFile(eval_args.file));
      out << FormatPreferences(SummarizePreferences(records));
      return kExitOk;
    }
    if (*styles) {
      const auto records = ParsePreferences(internal::ReadFile(eval_args.file));
      const auto style_map = ParseStyleMap(internal::ReadFile(eval_args.styles));
      out << FormatStyleBreakdown(StyleBreakdown(records, style_map));
      return kExitOk;
    }
  } catch (const Error& e) {
    err << "error: " << ErrorCodeName(e.code()) << ": " << e.what() << "\n";
    return ExitCodeFor(e);
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitInternal;
}

}  // namespace prosody
