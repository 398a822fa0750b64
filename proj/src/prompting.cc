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

#include "prosody/prompting.h"

#include <cctype>

#include "default_exemplars_data.h"
#include "prosody/error.h"
#include "prosody/features.h"
#include "prosody/response.h"
#include "text_util.h"

namespace prosody {
namespace {

using internal::StartsWith;
using internal::Trim;

[[noreturn]] void FailSpec(const std::string& why) {
  throw Error(ErrorCode::kInvalidSpec, why);
}

// Prompt lines are single-line; embedded newlines and tabs become spaces.
std::string OneLine(std::string_view text) {
  std::string out;
  bool pending_space = false;
  for (char c : Trim(text)) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = true;
      continue;
    }
    if (pending_space && !out.empty()) out += ' ';
    pending_space = false;
    out += c;
  }
  return out;
}

void AppendContext(std::string& out, const PromptMode& mode) {
  switch (mode.kind) {
    case PromptModeKind::kNeutral:
      break;
    case PromptModeKind::kStyle:
      out += "Speaking style: " + OneLine(mode.context) + "\n";
      break;
    case PromptModeKind::kDialogue:
      out += "Previous line: " + OneLine(mode.context) + "\n";
      break;
  }
}

void AppendTarget(std::string& out, std::string_view text) {
  out += "Text: " + OneLine(text) + "\n";
  out += kWordListHeader;
  out += '\n';
  const std::vector<Word> words = TokenizeWords(text);
  for (std::size_t j = 0; j < words.size(); ++j) {
    out += std::to_string(j) + " " + words[j].surface + "\n";
  }
}

std::string TaskDescription(const PromptMode& mode) {
  std::string out =
      "You are an expert in speech prosody. A text-to-speech voice has already "
      "produced a default rendition of a text. Your job is to suggest how the "
      "duration, pitch and energy of that rendition should change so that it "
      "sounds ";
  switch (mode.kind) {
    case PromptModeKind::kNeutral:
      out +=
          "like natural, neutral read speech. Only emphasise the words that "
          "carry the most important information, using word values; keep all "
          "global values at 0.\n";
      break;
    case PromptModeKind::kStyle:
      out += "appropriate for the given speaking style.\n";
      break;
    case PromptModeKind::kDialogue:
      out +=
          "appropriate as the reply to the previous line of a dialogue. Work "
          "out from the previous line how the reply should be spoken.\n";
      break;
  }
  return out;
}

}  // namespace

std::string_view PromptModeName(PromptModeKind kind) {
  switch (kind) {
    case PromptModeKind::kNeutral: return "neutral";
    case PromptModeKind::kStyle: return "style";
    case PromptModeKind::kDialogue: return "dialogue";
  }
  return "neutral";
}

const std::vector<Exemplar>& DefaultExemplars() {
  static const std::vector<Exemplar> exemplars =
      ParseExemplars(internal::kDefaultExemplarsText);
  return exemplars;
}

std::vector<std::string> DefaultRules() {
  return {
      "Predict the parameters independently of the target voice: describe how "
      "the text should be spoken, not how a particular speaker sounds.",
      "Reason step by step first, then give the values.",
      "Give exactly one WORD line for every word in the word list, in the same "
      "order and with the same index. Copy each word exactly as listed. Do not "
      "skip, merge, split or add words.",
      "Global values must be between -5 and 5. Word values must be between 0 "
      "and 5.",
      "Use whole numbers.",
      "Use 0 whenever there is no reason to change something.",
  };
}

std::string DefaultFormatInstructions() {
  return "Answer with exactly the following lines and nothing else:\n"
         "REASONING: <your step-by-step reasoning>\n"
         "GLOBAL: duration=<value> pitch=<value> energy=<value>\n"
         "WORD <index> <word>: duration=<value> pitch=<value> energy=<value>\n"
         "There must be one WORD line per word of the word list, in order.\n";
}

std::string DefaultScaleExplanations() {
  return "Global values apply to the whole utterance and range from -5 to 5. "
         "0 means no change.\n"
         "- duration: negative values make the speech faster, positive values "
         "make it slower.\n"
         "- pitch: negative values make the voice lower, positive values make "
         "it higher.\n"
         "- energy: negative values make the voice quieter, positive values "
         "make it louder.\n"
         "Word values apply to one word and range from 0 to 5. 0 means no "
         "change; they are used for emphasis.\n"
         "- duration: higher values lengthen the word.\n"
         "- pitch: higher values raise the pitch of the word.\n"
         "- energy: higher values make the word louder.\n";
}

PromptSpec DefaultPromptSpec(PromptMode mode, std::string target_text) {
  PromptSpec spec;
  spec.mode = std::move(mode);
  spec.target_text = std::move(target_text);
  spec.exemplars = DefaultExemplars();
  spec.rules = DefaultRules();
  spec.format_instructions = DefaultFormatInstructions();
  spec.scale_explanations = DefaultScaleExplanations();
  return spec;
}

std::vector<Exemplar> ParseExemplars(std::string_view document) {
  std::vector<Exemplar> exemplars;
  const auto lines = internal::SplitLines(document);
  std::size_t n = 0;
  while (n < lines.size()) {
    while (n < lines.size() && Trim(lines[n]).empty()) ++n;
    if (n >= lines.size()) break;
    const std::size_t record_line = n + 1;
    const std::string where = "exemplar at line " + std::to_string(record_line);
    Exemplar exemplar;

    std::string_view line = Trim(lines[n]);
    if (StartsWith(line, "CONTEXT:")) {
      const std::string_view rest = Trim(line.substr(8));
      const std::size_t colon = rest.find(':');
      const std::string_view kind = colon == std::string_view::npos
                                        ? rest
                                        : Trim(rest.substr(0, colon));
      const std::string_view context =
          colon == std::string_view::npos ? "" : Trim(rest.substr(colon + 1));
      if (kind == "style") {
        exemplar.mode = PromptMode::Style(std::string(context));
      } else if (kind == "dialogue") {
        exemplar.mode = PromptMode::Dialogue(std::string(context));
      } else {
        FailSpec(where + ": CONTEXT must be 'style: ...' or 'dialogue: ...'");
      }
      if (context.empty()) FailSpec(where + ": empty CONTEXT");
      ++n;
      while (n < lines.size() && Trim(lines[n]).empty()) ++n;
      line = n < lines.size() ? Trim(lines[n]) : std::string_view();
    }
    if (!StartsWith(line, "TEXT:")) FailSpec(where + ": expected a TEXT: line");
    exemplar.target_text = std::string(Trim(line.substr(5)));
    ++n;

    std::string response;
    const std::size_t response_first_line = n + 1;
    while (n < lines.size() && Trim(lines[n]) != "---") {
      response += lines[n];
      response += '\n';
      ++n;
    }
    if (n < lines.size()) ++n;  // separator

    const std::vector<Word> words = TokenizeWords(exemplar.target_text);
    if (words.empty()) FailSpec(where + ": TEXT has no words");
    ParseOutcome outcome = ParseResponse(response, words);
    if (!outcome.diagnostics.empty()) {
      const ParseDiagnostic& d = outcome.diagnostics.front();
      FailSpec(where + ": line " +
               std::to_string(response_first_line + d.line - 1) + ": " +
               std::string(DiagnosticKindName(d.kind)) + ": " + d.detail);
    }
    exemplar.suggestion = std::move(*outcome.suggestion);
    exemplars.push_back(std::move(exemplar));
  }
  if (exemplars.empty()) FailSpec("no exemplars");
  return exemplars;
}

std::string SerializeExemplars(const std::vector<Exemplar>& exemplars) {
  std::string out;
  for (std::size_t i = 0; i < exemplars.size(); ++i) {
    const Exemplar& e = exemplars[i];
    if (i > 0) out += "---\n";
    if (e.mode.kind != PromptModeKind::kNeutral) {
      out += "CONTEXT: " + std::string(PromptModeName(e.mode.kind)) + ": " +
             OneLine(e.mode.context) + "\n";
    }
    out += "TEXT: " + e.target_text + "\n";
    out += SerializeSuggestion(e.suggestion, TokenizeWords(e.target_text));
  }
  return out;
}

std::vector<Exemplar> ReadExemplarFile(const std::string& path) {
  try {
    return ParseExemplars(internal::ReadFile(path));
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

void ValidatePromptSpec(const PromptSpec& spec) {
  if (TokenizeWords(spec.target_text).empty()) {
    FailSpec("target text has no words");
  }
  if (spec.target_text.find_first_of("\r\n") != std::string::npos ||
      spec.mode.context.find_first_of("\r\n") != std::string::npos) {
    FailSpec("target text and context must be single lines");
  }
  if (spec.mode.kind == PromptModeKind::kNeutral) {
    if (!Trim(spec.mode.context).empty()) {
      FailSpec("neutral mode takes no style or dialogue context");
    }
  } else if (Trim(spec.mode.context).empty()) {
    FailSpec(std::string(PromptModeName(spec.mode.kind)) +
             " mode needs a non-empty context");
  }
  if (spec.exemplars.empty()) FailSpec("at least one exemplar is required");
  for (std::size_t i = 0; i < spec.exemplars.size(); ++i) {
    const Exemplar& e = spec.exemplars[i];
    const std::vector<Word> words = TokenizeWords(e.target_text);
    const std::string where = "exemplar " + std::to_string(i + 1);
    if (words.empty()) FailSpec(where + ": text has no words");
    std::string response;
    try {
      response = SerializeSuggestion(e.suggestion, words);
    } catch (const Error& err) {
      FailSpec(where + ": " + err.what());
    }
    const ParseOutcome outcome = ParseResponse(response, words);
    if (!outcome.diagnostics.empty()) {
      FailSpec(where + " is not a valid response: " +
               outcome.diagnostics.front().ToString());
    }
  }
}

std::string BuildPrompt(const PromptSpec& spec) {
  ValidatePromptSpec(spec);
  std::string out;
  out += "## Task\n";
  out += TaskDescription(spec.mode);
  out += "\n## Values\n";
  out += spec.scale_explanations;
  if (!out.empty() && out.back() != '\n') out += '\n';

  out += "\n## Rules\n";
  for (std::size_t i = 0; i < spec.rules.size(); ++i) {
    out += std::to_string(i + 1) + ". " + OneLine(spec.rules[i]) + "\n";
  }

  out += "\n## Examples\n";
  for (std::size_t i = 0; i < spec.exemplars.size(); ++i) {
    const Exemplar& e = spec.exemplars[i];
    out += "\n### Example " + std::to_string(i + 1) + "\n";
    AppendContext(out, e.mode);
    AppendTarget(out, e.target_text);
    out += "Response:\n";
    out += SerializeSuggestion(e.suggestion, TokenizeWords(e.target_text));
  }

  out += "\n## Response format\n";
  out += spec.format_instructions;
  if (out.back() != '\n') out += '\n';

  out += "\n## Target\n";
  AppendContext(out, spec.mode);
  AppendTarget(out, spec.target_text);
  out += "Response:\n";
  return out;
}

}  // namespace prosody
