#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "zeus/types.hpp"

namespace zeus {

// Canonical answer for raw model text, or kUnparseable.
//
//   numeric          last number, commas/currency stripped, canonical decimal
//                    ("1,234.50" -> "1234.5", "+7" -> "7", "-0" -> "0")
//   yes_no           last "yes"/"no" token
//   multiple_choice  option letter, lowercased; "(b)", a bare capital letter,
//                    or the text of one of `choices`
//   label_set        last label occurring as a whole word
//
// The result is a fixed point: normalizing it again returns it unchanged.
std::string normalize_answer(std::string_view raw, const TaskKind& kind,
                             std::span<const std::string> choices = {});

// Canonical decimal form of a plain number string, or nullopt if `s` is not a
// single number.
std::optional<std::string> canonical_decimal(std::string_view s);

// Equality of two normalized answers. Numbers compare by canonical decimal
// value, everything else case-insensitively. kUnparseable equals only itself.
bool answers_equal(std::string_view a, std::string_view b, const TaskKind& kind);

struct ExtractedAnswer {
    std::string raw;
    std::string normalized;
};

// Pulls the final answer out of a rationale: the text after the last
// "answer is"/"answer:" cue if that parses, else the whole text.
ExtractedAnswer extract_answer(std::string_view text, const TaskKind& kind,
                               std::span<const std::string> choices = {});

// Answer cue used by the answer-extraction stage and by the bare zero-shot
// prompt, e.g. "The answer (arabic numerals) is".
std::string answer_cue(const TaskKind& kind);

// Second-stage Zero-Shot-CoT cue, e.g. "Therefore, the answer (arabic numerals) is".
std::string extraction_cue(const TaskKind& kind);

// Whitespace-delimited token count.
std::size_t word_count(std::string_view text);

// Number of sentences, counted by terminal punctuation (. ! ?) followed by
// whitespace or end of text. Non-empty text without terminal punctuation
// counts as one sentence.
std::size_t sentence_count(std::string_view text);

std::string to_lower(std::string_view s);
std::string_view trim(std::string_view s);

}  // namespace zeus
