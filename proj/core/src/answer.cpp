#include "zeus/answer.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "zeus/error.hpp"

namespace zeus {

namespace {

bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }
bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }
bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

struct Candidate {
    std::size_t pos = 0;
    std::size_t len = 0;
    std::string value;
};

bool covered_by_longer(const Candidate& c, const std::vector<Candidate>& cands) {
    return std::any_of(cands.begin(), cands.end(), [&](const Candidate& o) {
        return o.len > c.len && o.pos <= c.pos && c.pos + c.len <= o.pos + o.len;
    });
}

// Picks the winning candidate under `policy`. Matches nested inside a longer
// match ("entailment" inside "not entailment") never win; at equal positions
// the longer match wins.
const Candidate* pick(const std::vector<Candidate>& cands, MatchPolicy policy) {
    const Candidate* best = nullptr;
    for (const auto& c : cands) {
        if (covered_by_longer(c, cands)) {
            continue;
        }
        if (best == nullptr) {
            best = &c;
            continue;
        }
        const bool later = c.pos > best->pos;
        const bool same = c.pos == best->pos;
        if (same ? c.len > best->len : (policy == MatchPolicy::last ? later : !later)) {
            best = &c;
        }
    }
    return best;
}

std::string canonicalize_parts(bool negative, std::string_view int_part, std::string_view frac_part) {
    std::size_t lead = 0;
    while (lead + 1 < int_part.size() && int_part[lead] == '0') {
        ++lead;
    }
    std::string ip(int_part.substr(lead));
    if (ip.empty()) {
        ip = "0";
    }
    std::string fp(frac_part);
    while (!fp.empty() && fp.back() == '0') {
        fp.pop_back();
    }
    std::string out = ip;
    if (!fp.empty()) {
        out += '.';
        out += fp;
    }
    if (negative && out != "0") {
        out.insert(out.begin(), '-');
    }
    return out;
}

std::vector<Candidate> scan_numbers(std::string_view text) {
    std::vector<Candidate> out;
    const std::size_t n = text.size();
    std::size_t i = 0;
    while (i < n) {
        const bool starts_digit = is_digit(text[i]);
        const bool starts_dot = text[i] == '.' && i + 1 < n && is_digit(text[i + 1]) &&
                                (i == 0 || !is_digit(text[i - 1]));
        if (!starts_digit && !starts_dot) {
            ++i;
            continue;
        }
        const std::size_t start = i;
        std::string int_part;
        std::size_t j = i;
        while (j < n && is_digit(text[j])) {
            int_part.push_back(text[j++]);
        }
        // Thousands separators: only after a 1-3 digit head, exactly 3 digits per group.
        if (!int_part.empty() && int_part.size() <= 3) {
            while (j + 3 < n && text[j] == ',' && is_digit(text[j + 1]) && is_digit(text[j + 2]) &&
                   is_digit(text[j + 3]) && (j + 4 >= n || !is_digit(text[j + 4]))) {
                int_part.append(text.substr(j + 1, 3));
                j += 4;
            }
        }
        std::string frac_part;
        if (j + 1 < n && text[j] == '.' && is_digit(text[j + 1])) {
            ++j;
            while (j < n && is_digit(text[j])) {
                frac_part.push_back(text[j++]);
            }
        }
        // A minus sign counts when it is not glued to a preceding word or number.
        std::size_t sign_at = start;
        if (sign_at > 0 && text[sign_at - 1] == '$') {
            --sign_at;
        }
        bool negative = false;
        if (sign_at > 0 && text[sign_at - 1] == '-' && (sign_at == 1 || !is_alnum(text[sign_at - 2]))) {
            negative = true;
        }
        out.push_back({start, j - start, canonicalize_parts(negative, int_part, frac_part)});
        i = j;
    }
    return out;
}

std::vector<std::pair<std::size_t, std::string>> word_tokens(std::string_view text) {
    std::vector<std::pair<std::size_t, std::string>> out;
    std::size_t i = 0;
    while (i < text.size()) {
        if (!is_alnum(text[i])) {
            ++i;
            continue;
        }
        const std::size_t start = i;
        while (i < text.size() && is_alnum(text[i])) {
            ++i;
        }
        out.emplace_back(start, std::string(text.substr(start, i - start)));
    }
    return out;
}

// Whole-word, case-insensitive occurrences of `needle` in `lowered`.
void find_phrase(std::string_view lowered, std::string_view needle, const std::string& value,
                 std::vector<Candidate>& out) {
    if (needle.empty()) {
        return;
    }
    std::size_t from = 0;
    while (true) {
        const std::size_t at = lowered.find(needle, from);
        if (at == std::string_view::npos) {
            return;
        }
        const std::size_t end = at + needle.size();
        const bool left_ok = at == 0 || !is_alnum(lowered[at - 1]) || !is_alnum(needle.front());
        const bool right_ok = end >= lowered.size() || !is_alnum(lowered[end]) || !is_alnum(needle.back());
        if (left_ok && right_ok) {
            out.push_back({at, needle.size(), value});
        }
        from = at + 1;
    }
}

std::string normalize_yes_no(std::string_view text, MatchPolicy policy) {
    std::vector<Candidate> cands;
    for (auto& [pos, tok] : word_tokens(text)) {
        const std::string low = to_lower(tok);
        if (low == "yes" || low == "no") {
            cands.push_back({pos, tok.size(), low});
        }
    }
    const Candidate* c = pick(cands, policy);
    return c ? c->value : std::string(kUnparseable);
}

std::string normalize_choice(std::string_view text, std::span<const std::string> choices, MatchPolicy policy) {
    const std::size_t n_letters = choices.empty() ? 5 : std::min<std::size_t>(choices.size(), 26);
    auto valid = [&](char c) {
        const char low = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        return low >= 'a' && static_cast<std::size_t>(low - 'a') < n_letters;
    };
    auto letter = [](char c) {
        return std::string(1, static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    };

    std::string_view whole = trim(text);
    while (!whole.empty() && (whole.back() == '.' || whole.back() == '!' || whole.back() == ')')) {
        whole.remove_suffix(1);
    }
    while (!whole.empty() && whole.front() == '(') {
        whole.remove_prefix(1);
    }
    if (whole.size() == 1 && std::isalpha(static_cast<unsigned char>(whole[0])) && valid(whole[0])) {
        return letter(whole[0]);
    }

    std::vector<Candidate> cands;
    for (std::size_t i = 0; i + 2 < text.size(); ++i) {
        if (text[i] == '(' && text[i + 2] == ')' && std::isalpha(static_cast<unsigned char>(text[i + 1])) &&
            valid(text[i + 1])) {
            cands.push_back({i, 3, letter(text[i + 1])});
        }
    }
    for (auto& [pos, tok] : word_tokens(text)) {
        if (tok.size() == 1 && std::isupper(static_cast<unsigned char>(tok[0])) && valid(tok[0])) {
            const bool parenthesized = pos > 0 && text[pos - 1] == '(';
            if (!parenthesized) {
                cands.push_back({pos, 1, letter(tok[0])});
            }
        }
    }
    const std::string lowered = to_lower(text);
    for (std::size_t i = 0; i < choices.size() && i < 26; ++i) {
        const std::string needle = to_lower(trim(choices[i]));
        find_phrase(lowered, needle, std::string(1, static_cast<char>('a' + i)), cands);
    }
    const Candidate* c = pick(cands, policy);
    return c ? c->value : std::string(kUnparseable);
}

std::string normalize_label(std::string_view text, const std::vector<std::string>& labels, MatchPolicy policy) {
    const std::string lowered = to_lower(text);
    std::vector<Candidate> cands;
    for (const auto& label : labels) {
        find_phrase(lowered, label, label, cands);
    }
    const Candidate* c = pick(cands, policy);
    return c ? c->value : std::string(kUnparseable);
}

}  // namespace

std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && is_space(s.front())) {
        s.remove_prefix(1);
    }
    while (!s.empty() && is_space(s.back())) {
        s.remove_suffix(1);
    }
    return s;
}

TaskKind TaskKind::numeric() { return TaskKind(AnswerKind::numeric, {}); }
TaskKind TaskKind::yes_no() { return TaskKind(AnswerKind::yes_no, {}); }
TaskKind TaskKind::multiple_choice() { return TaskKind(AnswerKind::multiple_choice, {}); }

TaskKind TaskKind::label_set(std::vector<std::string> labels) {
    if (labels.empty()) {
        throw ValidationError("label_set task needs at least one label");
    }
    std::set<std::string> seen;
    for (auto& label : labels) {
        label = to_lower(trim(label));
        if (label.empty()) {
            throw ValidationError("label_set labels must be non-empty");
        }
        if (!seen.insert(label).second) {
            throw ValidationError("duplicate label '" + label + "' in label_set");
        }
    }
    return TaskKind(AnswerKind::label_set, std::move(labels));
}

TaskKind TaskKind::parse(std::string_view spec) {
    const std::string s = to_lower(trim(spec));
    if (s == "numeric") return numeric();
    if (s == "yes_no" || s == "yesno") return yes_no();
    if (s == "multiple_choice") return multiple_choice();
    if (s.starts_with("label_set:")) {
        std::vector<std::string> labels;
        std::string_view rest = std::string_view(s).substr(10);
        while (true) {
            const auto bar = rest.find('|');
            labels.emplace_back(rest.substr(0, bar));
            if (bar == std::string_view::npos) break;
            rest.remove_prefix(bar + 1);
        }
        return label_set(std::move(labels));
    }
    throw ValidationError("unknown task kind '" + std::string(spec) +
                          "' (expected numeric, yes_no, multiple_choice or label_set:a|b)");
}

TaskKind TaskKind::with_policy(MatchPolicy p) const {
    TaskKind copy = *this;
    copy.policy_ = p;
    return copy;
}

std::string TaskKind::name() const {
    switch (kind_) {
        case AnswerKind::numeric: return "numeric";
        case AnswerKind::yes_no: return "yes_no";
        case AnswerKind::multiple_choice: return "multiple_choice";
        case AnswerKind::label_set: {
            std::string out = "label_set:";
            for (std::size_t i = 0; i < labels_.size(); ++i) {
                if (i) out += '|';
                out += labels_[i];
            }
            return out;
        }
    }
    return "numeric";
}

std::string PromptVariant::label() const {
    return kind == VariantKind::original ? "original" : "rephrased[" + std::to_string(rephrase_index) + "]";
}

std::weak_ordering canonical_order(const GenerationRecord& a, const GenerationRecord& b) {
    const auto& va = a.variant;
    const auto& vb = b.variant;
    if (auto c = static_cast<int>(va.kind) <=> static_cast<int>(vb.kind); c != 0) return c;
    if (auto c = va.rephrase_index <=> vb.rephrase_index; c != 0) return c;
    if (auto c = va.trigger <=> vb.trigger; c != 0) return c;
    if (va.temperature < vb.temperature) return std::weak_ordering::less;
    if (va.temperature > vb.temperature) return std::weak_ordering::greater;
    return a.sample_index <=> b.sample_index;
}

std::string normalize_answer(std::string_view raw, const TaskKind& kind, std::span<const std::string> choices) {
    if (trim(raw) == kUnparseable) {
        return std::string(kUnparseable);
    }
    switch (kind.kind()) {
        case AnswerKind::numeric: {
            const auto nums = scan_numbers(raw);
            const Candidate* c = pick(nums, kind.policy());
            return c ? c->value : std::string(kUnparseable);
        }
        case AnswerKind::yes_no:
            return normalize_yes_no(raw, kind.policy());
        case AnswerKind::multiple_choice:
            return normalize_choice(raw, choices, kind.policy());
        case AnswerKind::label_set:
            return normalize_label(raw, kind.labels(), kind.policy());
    }
    return std::string(kUnparseable);
}

std::optional<std::string> canonical_decimal(std::string_view s) {
    s = trim(s);
    const auto nums = scan_numbers(s);
    if (nums.size() != 1) {
        return std::nullopt;
    }
    // The number must cover the whole string, allowing a leading sign/currency.
    std::size_t head = nums[0].pos;
    std::string_view prefix = s.substr(0, head);
    if (!prefix.empty() && prefix.back() == '$') prefix.remove_suffix(1);
    if (!prefix.empty() && (prefix.back() == '-' || prefix.back() == '+')) prefix.remove_suffix(1);
    if (!prefix.empty() || head + nums[0].len != s.size()) {
        return std::nullopt;
    }
    return nums[0].value;
}

bool answers_equal(std::string_view a, std::string_view b, const TaskKind& kind) {
    const bool a_bad = a == kUnparseable;
    const bool b_bad = b == kUnparseable;
    if (a_bad || b_bad) {
        return a_bad && b_bad;
    }
    if (kind.kind() == AnswerKind::numeric) {
        const auto ca = canonical_decimal(a);
        const auto cb = canonical_decimal(b);
        if (ca && cb) {
            return *ca == *cb;
        }
    }
    return to_lower(trim(a)) == to_lower(trim(b));
}

ExtractedAnswer extract_answer(std::string_view text, const TaskKind& kind, std::span<const std::string> choices) {
    const std::string lowered = to_lower(text);
    std::size_t cue_end = std::string::npos;
    for (std::string_view cue : {"answer is", "answer:"}) {
        const auto at = lowered.rfind(cue);
        if (at != std::string::npos && (cue_end == std::string::npos || at + cue.size() > cue_end)) {
            cue_end = at + cue.size();
        }
    }
    if (cue_end != std::string::npos) {
        std::string_view span = text.substr(cue_end);
        span = span.substr(0, span.find('\n'));
        std::string normalized = normalize_answer(span, kind, choices);
        if (normalized != kUnparseable) {
            return {std::string(trim(span)), std::move(normalized)};
        }
    }
    return {std::string(trim(text)), normalize_answer(text, kind, choices)};
}

std::string answer_cue(const TaskKind& kind) {
    switch (kind.kind()) {
        case AnswerKind::numeric: return "The answer (arabic numerals) is";
        case AnswerKind::yes_no: return "The answer (Yes or No) is";
        case AnswerKind::multiple_choice: return "Among A through E, the answer is";
        case AnswerKind::label_set: return "The answer is";
    }
    return "The answer is";
}

std::string extraction_cue(const TaskKind& kind) {
    std::string cue = answer_cue(kind);
    if (kind.kind() != AnswerKind::multiple_choice) {
        cue[0] = 't';
    }
    return "Therefore, " + cue;
}

std::size_t word_count(std::string_view text) {
    std::size_t count = 0;
    bool in_word = false;
    for (char c : text) {
        if (is_space(c)) {
            in_word = false;
        } else if (!in_word) {
            in_word = true;
            ++count;
        }
    }
    return count;
}

std::size_t sentence_count(std::string_view text) {
    text = trim(text);
    if (text.empty()) {
        return 0;
    }
    std::size_t count = 0;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if ((c == '.' || c == '!' || c == '?') && (i + 1 == text.size() || is_space(text[i + 1]))) {
            ++count;
        }
    }
    const char last = text.back();
    if (last != '.' && last != '!' && last != '?') {
        ++count;
    }
    return count;
}

}  // namespace zeus
