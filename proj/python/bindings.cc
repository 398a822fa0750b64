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

#include <pybind11/functional.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "prosody/cli.h"
#include "prosody/error.h"
#include "prosody/eval.h"
#include "prosody/features.h"
#include "prosody/llm.h"
#include "prosody/mapping.h"
#include "prosody/modifier.h"
#include "prosody/prompting.h"
#include "prosody/response.h"

namespace py = pybind11;

namespace prosody {
namespace {

// Lets a Python callable act as a completion backend.
class CallableBackend : public CompletionBackend {
 public:
  explicit CallableBackend(std::function<std::string(const std::string&)> fn)
      : fn_(std::move(fn)) {}
  std::string Complete(const std::string& prompt) override { return fn_(prompt); }

 private:
  std::function<std::string(const std::string&)> fn_;
};

py::dict TranscriptDict(const Transcript& transcript) {
  py::list attempts;
  for (const Attempt& a : transcript.attempts) {
    py::dict d;
    d["prompt"] = a.prompt;
    d["response"] = a.response;
    d["diagnostics"] = a.diagnostics;
    attempts.append(d);
  }
  py::dict out;
  out["attempts"] = attempts;
  return out;
}

}  // namespace
}  // namespace prosody

PYBIND11_MODULE(_core, m) {
  using namespace prosody;
  m.doc() = "Prompt-driven prosody modification";

  py::enum_<ErrorCode> error_code(m, "ErrorCode");
  for (int i = 0; i <= static_cast<int>(ErrorCode::kUnlabeledSet); ++i) {
    const auto code = static_cast<ErrorCode>(i);
    error_code.value(std::string(ErrorCodeName(code)).c_str(), code);
  }

  static py::exception<Error> error_type(m, "ProsodyError");
  static py::exception<RepairExhaustedError> repair_type(m, "RepairExhaustedError",
                                                        error_type.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const RepairExhaustedError& e) {
      py::object exc = py::handle(repair_type.ptr())(py::str(e.what()));
      exc.attr("code") = e.code();
      exc.attr("transcript") = TranscriptDict(e.transcript());
      PyErr_SetObject(repair_type.ptr(), exc.ptr());
    } catch (const Error& e) {
      py::object exc = py::handle(error_type.ptr())(py::str(e.what()));
      exc.attr("code") = e.code();
      PyErr_SetObject(error_type.ptr(), exc.ptr());
    }
  });

  // features
  py::enum_<FeatureScale>(m, "FeatureScale")
      .value("RAW", FeatureScale::kRaw)
      .value("NORMALIZED", FeatureScale::kNormalized);

  py::class_<PhoneFeature>(m, "PhoneFeature")
      .def(py::init<>())
      .def_readwrite("label", &PhoneFeature::label)
      .def_readwrite("word_index", &PhoneFeature::word_index)
      .def_readwrite("duration_s", &PhoneFeature::duration_s)
      .def_readwrite("f0", &PhoneFeature::f0)
      .def_readwrite("energy", &PhoneFeature::energy)
      .def_readwrite("voiced", &PhoneFeature::voiced)
      .def_readwrite("pause", &PhoneFeature::pause)
      .def(py::self == py::self);

  py::class_<Word>(m, "Word")
      .def(py::init<>())
      .def_readwrite("surface", &Word::surface)
      .def_readwrite("key", &Word::key)
      .def(py::self == py::self)
      .def("__repr__", [](const Word& w) { return "Word(" + w.surface + ", " + w.key + ")"; });

  py::class_<UtteranceFeatures>(m, "UtteranceFeatures")
      .def(py::init<>())
      .def_readwrite("id", &UtteranceFeatures::id)
      .def_readwrite("speaker_id", &UtteranceFeatures::speaker_id)
      .def_readwrite("scale", &UtteranceFeatures::scale)
      .def_readwrite("text", &UtteranceFeatures::text)
      .def_readwrite("words", &UtteranceFeatures::words)
      .def_readwrite("phones", &UtteranceFeatures::phones)
      .def("total_duration", &UtteranceFeatures::TotalDuration)
      .def(py::self == py::self);

  py::class_<SpeakerStats>(m, "SpeakerStats")
      .def(py::init<>())
      .def_readwrite("mu_logf0", &SpeakerStats::mu_logf0)
      .def_readwrite("sigma_logf0", &SpeakerStats::sigma_logf0)
      .def_readwrite("mu_loge", &SpeakerStats::mu_loge)
      .def_readwrite("sigma_loge", &SpeakerStats::sigma_loge)
      .def_readwrite("f0_min_hz", &SpeakerStats::f0_min_hz)
      .def_readwrite("f0_max_hz", &SpeakerStats::f0_max_hz)
      .def(py::self == py::self);

  m.def("tokenize_words", &TokenizeWords, py::arg("text"));
  m.def("parse_features", &ParseFeatures, py::arg("document"));
  m.def("serialize_features", &SerializeFeatures, py::arg("utterances"));
  m.def(
      "compute_speaker_stats",
      [](const std::vector<UtteranceFeatures>& utterances, double min_duration_s,
         double low_percentile, double high_percentile) {
        return ComputeSpeakerStats(utterances,
                                   StatsOptions{min_duration_s, low_percentile, high_percentile});
      },
      py::arg("utterances"), py::arg("min_duration_s") = 1.5, py::arg("low_percentile") = 5.0,
      py::arg("high_percentile") = 95.0);
  m.def("parse_speaker_stats", &ParseSpeakerStats, py::arg("document"));
  m.def("serialize_speaker_stats", &SerializeSpeakerStats, py::arg("stats"));

  // mapping
  py::class_<WordSuggestion>(m, "WordSuggestion")
      .def(py::init<>())
      .def_readwrite("index", &WordSuggestion::index)
      .def_readwrite("key", &WordSuggestion::key)
      .def_readwrite("duration", &WordSuggestion::duration)
      .def_readwrite("pitch", &WordSuggestion::pitch)
      .def_readwrite("energy", &WordSuggestion::energy)
      .def(py::self == py::self);

  py::class_<LlmScaleSuggestion>(m, "LlmScaleSuggestion")
      .def(py::init<>())
      .def_readwrite("reasoning", &LlmScaleSuggestion::reasoning)
      .def_readwrite("global_duration", &LlmScaleSuggestion::global_duration)
      .def_readwrite("global_pitch", &LlmScaleSuggestion::global_pitch)
      .def_readwrite("global_energy", &LlmScaleSuggestion::global_energy)
      .def_readwrite("words", &LlmScaleSuggestion::words)
      .def(py::self == py::self);

  py::class_<PitchBounds>(m, "PitchBounds")
      .def(py::init<>())
      .def(py::init<double, double>(), py::arg("p_min_hz"), py::arg("p_max_hz"))
      .def_readwrite("p_min_hz", &PitchBounds::p_min_hz)
      .def_readwrite("p_max_hz", &PitchBounds::p_max_hz);

  py::class_<WordCoefficients>(m, "WordCoefficients")
      .def(py::init<>())
      .def_readwrite("index", &WordCoefficients::index)
      .def_readwrite("surface", &WordCoefficients::surface)
      .def_readwrite("delta", &WordCoefficients::delta)
      .def_readwrite("pi_hz", &WordCoefficients::pi_hz)
      .def_readwrite("epsilon", &WordCoefficients::epsilon);

  py::class_<ModificationPlan>(m, "ModificationPlan")
      .def(py::init<>())
      .def_readwrite("utterance_id", &ModificationPlan::utterance_id)
      .def_readwrite("g_dur", &ModificationPlan::g_dur)
      .def_readwrite("g_pitch_hz", &ModificationPlan::g_pitch_hz)
      .def_readwrite("g_energy", &ModificationPlan::g_energy)
      .def_readwrite("words", &ModificationPlan::words)
      .def_readwrite("bounds", &ModificationPlan::bounds)
      .def(py::self == py::self);

  py::class_<ClampReport>(m, "ClampReport")
      .def_readonly("field", &ClampReport::field)
      .def_readonly("original", &ClampReport::original)
      .def_readonly("clamped", &ClampReport::clamped);

  m.def("identity_suggestion", &IdentitySuggestion, py::arg("words"));
  m.def("compute_pitch_bounds", &ComputePitchBounds, py::arg("utterance"), py::arg("stats"));
  m.def("map_global_scale", &MapGlobalScale, py::arg("value"));
  m.def("map_local_scale", &MapLocalScale, py::arg("value"));
  m.def(
      "map_pitch",
      [](double global_value, double local_value, const PitchBounds& bounds,
         double local_pitch_cap_fraction) {
        const PitchShift s =
            MapPitch(global_value, local_value, bounds, MappingConfig{local_pitch_cap_fraction});
        return py::make_tuple(s.global_hz, s.local_hz);
      },
      py::arg("global_value"), py::arg("local_value"), py::arg("bounds"),
      py::arg("local_pitch_cap_fraction") = 0.5);
  m.def(
      "build_plan",
      [](const LlmScaleSuggestion& suggestion, const UtteranceFeatures& utterance,
         const SpeakerStats& stats, double local_pitch_cap_fraction) {
        PlanResult r =
            BuildPlan(suggestion, utterance, stats, MappingConfig{local_pitch_cap_fraction});
        return py::make_tuple(r.plan, r.clamps);
      },
      py::arg("suggestion"), py::arg("utterance"), py::arg("stats"),
      py::arg("local_pitch_cap_fraction") = 0.5,
      "Returns (plan, clamp reports).");
  m.def("validate_plan", &ValidatePlan, py::arg("plan"));
  m.def("parse_plans", &ParsePlans, py::arg("document"));
  m.def("serialize_plans", &SerializePlans, py::arg("plans"));

  // modifier
  m.def("denorm_f0", &DenormF0, py::arg("f0_norm"), py::arg("stats"));
  m.def("renorm_f0", &RenormF0, py::arg("hz"), py::arg("stats"));
  m.def("denorm_energy", &DenormEnergy, py::arg("energy_norm"), py::arg("stats"));
  m.def("renorm_energy", &RenormEnergy, py::arg("linear"), py::arg("stats"));
  m.def("apply_plan", &ApplyPlan, py::arg("utterance"), py::arg("stats"), py::arg("plan"));

  // response
  py::enum_<DiagnosticKind>(m, "DiagnosticKind")
      .value("MISSING_GLOBAL", DiagnosticKind::kMissingGlobal)
      .value("WORD_COUNT_MISMATCH", DiagnosticKind::kWordCountMismatch)
      .value("WORD_IDENTITY_MISMATCH", DiagnosticKind::kWordIdentityMismatch)
      .value("VALUE_NOT_NUMERIC", DiagnosticKind::kValueNotNumeric)
      .value("VALUE_OUT_OF_RANGE", DiagnosticKind::kValueOutOfRange)
      .value("DUPLICATE_WORD_INDEX", DiagnosticKind::kDuplicateWordIndex)
      .value("UNPARSEABLE_LINE", DiagnosticKind::kUnparseableLine);

  py::class_<ParseDiagnostic>(m, "ParseDiagnostic")
      .def_readonly("kind", &ParseDiagnostic::kind)
      .def_readonly("line", &ParseDiagnostic::line)
      .def_readonly("detail", &ParseDiagnostic::detail)
      .def_readonly("clamped", &ParseDiagnostic::clamped)
      .def_property_readonly("fatal", &ParseDiagnostic::IsFatal)
      .def("__str__", &ParseDiagnostic::ToString)
      .def("__repr__", &ParseDiagnostic::ToString);

  py::class_<ParseOutcome>(m, "ParseOutcome")
      .def_readonly("suggestion", &ParseOutcome::suggestion)
      .def_readonly("diagnostics", &ParseOutcome::diagnostics)
      .def_property_readonly("ok", &ParseOutcome::ok);

  m.def("parse_response", &ParseResponse, py::arg("text"), py::arg("expected_words"));
  m.def("serialize_suggestion", &SerializeSuggestion, py::arg("suggestion"),
        py::arg("surface_words"));

  // prompting
  m.def(
      "build_prompt",
      [](const std::string& text, const std::string& mode, const std::string& context,
         const std::optional<std::string>& exemplar_document) {
        PromptMode prompt_mode;
        if (mode == "neutral") {
          prompt_mode = PromptMode::Neutral();
          prompt_mode.context = context;
        } else if (mode == "style") {
          prompt_mode = PromptMode::Style(context);
        } else if (mode == "dialogue") {
          prompt_mode = PromptMode::Dialogue(context);
        } else {
          throw Error(ErrorCode::kInvalidSpec, "unknown mode '" + mode + "'");
        }
        PromptSpec spec = DefaultPromptSpec(prompt_mode, text);
        if (exemplar_document) spec.exemplars = ParseExemplars(*exemplar_document);
        return BuildPrompt(spec);
      },
      py::arg("text"), py::arg("mode") = "neutral", py::arg("context") = "",
      py::arg("exemplars") = py::none(),
      "mode is 'neutral', 'style' (context = style) or 'dialogue' (context = previous line).");
  m.def("default_exemplars", [] { return SerializeExemplars(DefaultExemplars()); },
        "The shipped exemplars in the exemplar file format.");

  // llm
  m.def("mock_complete", &MockComplete, py::arg("prompt"), py::arg("seed"));
  m.def(
      "suggest_with_repair",
      [](const std::string& text, std::function<std::string(const std::string&)> complete,
         const std::string& mode, const std::string& context, int max_attempts) {
        PromptMode prompt_mode = mode == "style"      ? PromptMode::Style(context)
                                 : mode == "dialogue" ? PromptMode::Dialogue(context)
                                                      : PromptMode::Neutral();
        if (mode != "neutral" && mode != "style" && mode != "dialogue") {
          throw Error(ErrorCode::kInvalidSpec, "unknown mode '" + mode + "'");
        }
        CallableBackend backend(std::move(complete));
        RepairPolicy policy;
        policy.max_attempts = max_attempts;
        SuggestResult r = SuggestWithRepair(DefaultPromptSpec(prompt_mode, text), backend, policy);
        return py::make_tuple(r.suggestion, TranscriptDict(r.transcript));
      },
      py::arg("text"), py::arg("complete"), py::arg("mode") = "neutral",
      py::arg("context") = "", py::arg("max_attempts") = 3,
      "complete(prompt) -> response text. Returns (suggestion, transcript).");

  // eval
  py::class_<RatingRecord>(m, "RatingRecord")
      .def(py::init([](std::string stimulus, std::string system, std::string rater, int score) {
             return RatingRecord{std::move(stimulus), std::move(system), std::move(rater), score};
           }),
           py::arg("stimulus_id"), py::arg("system_id"), py::arg("rater_id"), py::arg("score"))
      .def_readwrite("stimulus_id", &RatingRecord::stimulus_id)
      .def_readwrite("system_id", &RatingRecord::system_id)
      .def_readwrite("rater_id", &RatingRecord::rater_id)
      .def_readwrite("score", &RatingRecord::score);

  py::class_<PreferenceRecord>(m, "PreferenceRecord")
      .def(py::init([](std::string set, std::string rater, std::string chosen,
                       std::vector<std::string> systems) {
             return PreferenceRecord{std::move(set), std::move(rater), std::move(chosen),
                                     std::move(systems)};
           }),
           py::arg("set_id"), py::arg("rater_id"), py::arg("chosen_system"),
           py::arg("systems_in_set"))
      .def_readwrite("set_id", &PreferenceRecord::set_id)
      .def_readwrite("rater_id", &PreferenceRecord::rater_id)
      .def_readwrite("chosen_system", &PreferenceRecord::chosen_system)
      .def_readwrite("systems_in_set", &PreferenceRecord::systems_in_set);

  py::class_<MosSummary>(m, "MosSummary")
      .def_readonly("system_id", &MosSummary::system_id)
      .def_readonly("n", &MosSummary::n)
      .def_readonly("mean", &MosSummary::mean)
      .def_readonly("sd", &MosSummary::sd)
      .def_readonly("ci_halfwidth", &MosSummary::ci_halfwidth)
      .def_readonly("confidence", &MosSummary::confidence)
      .def_readonly("mean_display", &MosSummary::mean_display)
      .def_readonly("ci_display", &MosSummary::ci_display);

  py::enum_<TTestFlag>(m, "TTestFlag")
      .value("NONE", TTestFlag::kNone)
      .value("ZERO_VARIANCE", TTestFlag::kZeroVariance)
      .value("ALL_ZERO_DIFFERENCES", TTestFlag::kAllZeroDifferences);

  py::class_<TTestResult>(m, "TTestResult")
      .def_readonly("t", &TTestResult::t)
      .def_readonly("p", &TTestResult::p)
      .def_readonly("df", &TTestResult::df)
      .def_readonly("pairs", &TTestResult::pairs)
      .def_readonly("mean_difference", &TTestResult::mean_difference)
      .def_readonly("flag", &TTestResult::flag);

  py::class_<SystemShare>(m, "SystemShare")
      .def_readonly("system_id", &SystemShare::system_id)
      .def_readonly("wins", &SystemShare::wins)
      .def_readonly("fraction", &SystemShare::fraction)
      .def_readonly("percent_display", &SystemShare::percent_display);

  py::class_<PreferenceSummary>(m, "PreferenceSummary")
      .def_readonly("total", &PreferenceSummary::total)
      .def_readonly("shares", &PreferenceSummary::shares);

  m.def(
      "mos_summary",
      [](const std::vector<RatingRecord>& records, double confidence) {
        return SummarizeMos(records, confidence);
      },
      py::arg("records"), py::arg("confidence") = 0.95);
  m.def(
      "paired_t_test",
      [](const std::vector<double>& a, const std::vector<double>& b) {
        return PairedTTest(std::span<const double>(a), std::span<const double>(b));
      },
      py::arg("a"), py::arg("b"));
  m.def(
      "paired_t_test_records",
      [](const std::vector<RatingRecord>& records, const std::string& system_a,
         const std::string& system_b) { return PairedTTest(records, system_a, system_b); },
      py::arg("records"), py::arg("system_a"), py::arg("system_b"));
  m.def(
      "preference_summary",
      [](const std::vector<PreferenceRecord>& records) { return SummarizePreferences(records); },
      py::arg("records"));
  m.def(
      "style_breakdown",
      [](const std::vector<PreferenceRecord>& records,
         const std::map<std::string, std::string>& style_of_set) {
        return StyleBreakdown(records, style_of_set);
      },
      py::arg("records"), py::arg("style_of_set"));
  m.def("round_half_up_1", &RoundHalfUp1, py::arg("value"));
  m.def("parse_ratings", &ParseRatings, py::arg("document"));
  m.def("parse_preferences", &ParsePreferences, py::arg("document"));
  m.def("parse_style_map", &ParseStyleMap, py::arg("document"));

  // cli
  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::vector<const char*> argv = {"prosody"};
        for (const std::string& a : args) argv.push_back(a.c_str());
        std::ostringstream out, err;
        const int code = RunCli(static_cast<int>(argv.size()), argv.data(), out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs the command line in-process. Returns (exit code, stdout, stderr).");
}
