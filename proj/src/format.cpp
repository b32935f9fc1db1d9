#include "sea/format.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "sea/text.hpp"

namespace sea {

std::string_view aspect_label(int value) {
    switch (value) {
        case 1: return "poor";
        case 2: return "fair";
        case 3: return "good";
        case 4: return "excellent";
        default: return "";
    }
}

std::string_view rating_label(int value) {
    switch (value) {
        case 1: return "strong reject";
        case 2: return "reject, significant issues present";
        case 3: return "reject, not good enough";
        case 4: return "possibly reject, but has redeeming facets";
        case 5: return "marginally below the acceptance threshold";
        case 6: return "marginally above the acceptance threshold";
        case 7: return "accept, but needs minor improvements";
        case 8: return "accept, good paper";
        case 9: return "strong accept, excellent work";
        case 10: return "strong accept, should be highlighted at the conference";
        default: return "";
    }
}

namespace {

constexpr int kSummary = 0;
constexpr int kStrengths = 1;
constexpr int kWeaknesses = 2;
constexpr int kQuestions = 3;
constexpr int kSoundness = 4;
constexpr int kPresentation = 5;
constexpr int kContribution = 6;
constexpr int kRating = 7;
constexpr int kPaperDecision = 8;

std::vector<std::string> split_lines(std::string_view text) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string line(text.substr(start, end - start));
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(std::move(line));
        if (end == text.size()) break;
        start = end + 1;
    }
    return lines;
}

// Leading integer of a score slot. The digits must be followed by
// whitespace or the end of the line, so "3.5" does not read as 3.
std::optional<int> leading_integer(std::string_view s, std::string_view* rest) {
    std::size_t i = 0;
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t start = i;
    if (i < s.size() && s[i] == '-') ++i;
    const std::size_t digits = i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
    if (i == digits) return std::nullopt;
    if (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) return std::nullopt;
    const int value = std::stoi(std::string(s.substr(start, i - start)));
    if (rest != nullptr) *rest = s.substr(i);
    return value;
}

struct Extraction {
    FormatReport report;
    // Per section: content lines (same-line remainder first if non-empty).
    std::array<std::vector<std::string>, 9> content;
    std::array<bool, 9> found{};
    // Parsed score values and raw labels for the four score sections.
    std::array<std::optional<int>, 9> score;
    std::array<std::string, 9> raw_label;
    std::optional<Decision> decision;
    std::optional<std::string> reasons;
};

const char* score_key(int i) {
    switch (i) {
        case kSoundness: return "soundness";
        case kPresentation: return "presentation";
        case kContribution: return "contribution";
        default: return "rating";
    }
}

Extraction extract(std::string_view text) {
    Extraction ex;
    ex.report.raw_text = std::string(text);
    const std::vector<std::string> lines = split_lines(text);

    // Locate the nine headers at line starts, enforcing their order.
    std::array<std::size_t, 9> start_line{};
    std::size_t pos = 0;
    for (int i = 0; i < 9; ++i) {
        bool found = false;
        for (std::size_t ln = pos; ln < lines.size(); ++ln) {
            if (std::string_view(lines[ln]).substr(0, kReviewHeaders[i].size()) ==
                kReviewHeaders[i]) {
                start_line[i] = ln;
                pos = ln + 1;
                found = true;
                break;
            }
        }
        ex.found[i] = found;
        if (!found) ex.report.missing_sections.emplace_back(kReviewSectionNames[i]);
    }

    // Slice content: from each header to the next found header.
    for (int i = 0; i < 9; ++i) {
        if (!ex.found[i]) continue;
        std::size_t end = lines.size();
        for (int j = 0; j < 9; ++j)
            if (ex.found[j] && start_line[j] > start_line[i]) end = std::min(end, start_line[j]);
        std::string first = trim(lines[start_line[i]].substr(kReviewHeaders[i].size()));
        if (!first.empty()) ex.content[i].push_back(std::move(first));
        for (std::size_t ln = start_line[i] + 1; ln < end; ++ln) ex.content[i].push_back(lines[ln]);
    }

    // Score sections: integer in range plus optional free-text label.
    for (int i = kSoundness; i <= kRating; ++i) {
        if (!ex.found[i]) continue;
        std::string slot;
        for (const std::string& line : ex.content[i]) {
            if (!trim(line).empty()) {
                slot = trim(line);
                break;
            }
        }
        std::string_view rest;
        const auto value = leading_integer(slot, &rest);
        const int hi = i == kRating ? 10 : 4;
        if (!value || *value < 1 || *value > hi) {
            ex.report.malformed_scores.emplace_back(score_key(i));
            continue;
        }
        ex.score[i] = *value;
        ex.raw_label[i] = trim(rest);
    }

    // Paper Decision block: "- Decision: Accept|Reject" and "- Reasons: ...".
    if (ex.found[kPaperDecision]) {
        const auto& block = ex.content[kPaperDecision];
        bool saw_decision = false;
        bool saw_reasons = false;
        for (std::size_t ln = 0; ln < block.size(); ++ln) {
            const std::string line = trim(block[ln]);
            if (!saw_decision && line.rfind("- Decision:", 0) == 0) {
                saw_decision = true;
                const std::string value = trim(line.substr(std::string("- Decision:").size()));
                ex.decision = decision_from_string(value);
                if (!ex.decision) ex.report.malformed_scores.emplace_back("decision");
            } else if (!saw_reasons && line.rfind("- Reasons:", 0) == 0) {
                saw_reasons = true;
                std::string reasons = trim(block[ln].substr(block[ln].find("- Reasons:") +
                                                            std::string("- Reasons:").size()));
                for (std::size_t k = ln + 1; k < block.size(); ++k) {
                    reasons += "\n";
                    reasons += block[k];
                }
                ex.reasons = trim(reasons);
            }
        }
        if (!saw_decision) ex.report.missing_sections.emplace_back("Decision");
        if (!saw_reasons) ex.report.missing_sections.emplace_back("Reasons");
    }

    ex.report.is_valid =
        ex.report.missing_sections.empty() && ex.report.malformed_scores.empty();
    return ex;
}

std::vector<std::string> split_bullets(const std::vector<std::string>& lines) {
    std::vector<std::string> bullets;
    for (const std::string& raw : lines) {
        const std::string line = trim(raw);
        if (line.empty()) continue;
        if (line[0] == '-') {
            bullets.push_back(trim(line.substr(1)));
        } else if (!bullets.empty()) {
            bullets.back() += " ";
            bullets.back() += line;
        } else {
            bullets.push_back(line);
        }
    }
    return bullets;
}

std::string join_lines(const std::vector<std::string>& lines) {
    std::string joined;
    for (const std::string& line : lines) {
        if (!joined.empty()) joined += "\n";
        joined += line;
    }
    return trim(joined);
}

ScoreEntry make_score(const Extraction& ex, int i) {
    ScoreEntry entry;
    entry.value = *ex.score[i];
    const std::string_view canonical =
        i == kRating ? rating_label(entry.value) : aspect_label(entry.value);
    entry.label = std::string(canonical);
    const std::string raw = to_lower(ex.raw_label[i]);
    entry.label_conflict = !raw.empty() && raw != to_lower(canonical);
    return entry;
}

}  // namespace

FormatReport validate(std::string_view text) { return extract(text).report; }

StructuredReview parse(std::string_view text) {
    Extraction ex = extract(text);
    if (!ex.report.is_valid)
        throw FormatError("parse called on text that fails format validation", ex.report);

    StructuredReview review;
    review.summary = join_lines(ex.content[kSummary]);
    review.strengths = split_bullets(ex.content[kStrengths]);
    review.weaknesses = split_bullets(ex.content[kWeaknesses]);
    review.questions = split_bullets(ex.content[kQuestions]);
    review.soundness = make_score(ex, kSoundness);
    review.presentation = make_score(ex, kPresentation);
    review.contribution = make_score(ex, kContribution);
    review.rating = make_score(ex, kRating);
    review.decision = *ex.decision;
    review.reasons = *ex.reasons;
    return review;
}

namespace {

void write_bullets(std::ostringstream& out, const std::vector<std::string>& bullets) {
    for (const std::string& b : bullets) out << "- " << b << "\n";
}

}  // namespace

std::string serialize(const StructuredReview& review) {
    std::ostringstream out;
    out << "**Summary:**\n" << review.summary << "\n\n";
    out << "**Strengths:**\n";
    write_bullets(out, review.strengths);
    out << "\n**Weaknesses:**\n";
    write_bullets(out, review.weaknesses);
    out << "\n**Questions:**\n";
    write_bullets(out, review.questions);
    out << "\n**Soundness:** " << review.soundness.value << " " << review.soundness.label << "\n";
    out << "**Presentation:** " << review.presentation.value << " " << review.presentation.label
        << "\n";
    out << "**Contribution:** " << review.contribution.value << " " << review.contribution.label
        << "\n";
    out << "**Rating:** " << review.rating.value << " " << review.rating.label << "\n\n";
    out << "**Paper Decision:**\n";
    out << "- Decision: " << to_string(review.decision) << "\n";
    out << "- Reasons: " << review.reasons << "\n";
    return out.str();
}

double compliance_rate(std::span<const std::string> texts) {
    if (texts.empty()) throw InputError("compliance_rate: empty text list");
    std::size_t valid = 0;
    for (const std::string& t : texts)
        if (validate(t).is_valid) ++valid;
    return static_cast<double>(valid) / static_cast<double>(texts.size());
}

std::string concat_sections(const StructuredReview& review) {
    std::ostringstream out;
    out << review.summary << "\n";
    for (const std::string& b : review.strengths) out << b << "\n";
    for (const std::string& b : review.weaknesses) out << b << "\n";
    for (const std::string& b : review.questions) out << b << "\n";
    out << review.reasons << "\n";
    return out.str();
}

}  // namespace sea
