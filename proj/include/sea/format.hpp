#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sea/corpus.hpp"
#include "sea/errors.hpp"

namespace sea {

// The nine bold section headers, in the order the review template fixes.
inline constexpr std::array<std::string_view, 9> kReviewHeaders = {
    "**Summary:**",   "**Strengths:**",    "**Weaknesses:**",
    "**Questions:**", "**Soundness:**",    "**Presentation:**",
    "**Contribution:**", "**Rating:**",    "**Paper Decision:**"};

inline constexpr std::array<std::string_view, 9> kReviewSectionNames = {
    "Summary", "Strengths", "Weaknesses", "Questions", "Soundness",
    "Presentation", "Contribution", "Rating", "Paper Decision"};

// Canonical criterion label for an aspect score (Soundness/Presentation/
// Contribution), value in [1, 4].
std::string_view aspect_label(int value);
// Canonical criterion label for a Rating, value in [1, 10].
std::string_view rating_label(int value);

struct ScoreEntry {
    int value = 0;
    std::string label;          // canonical, derived from the integer
    bool label_conflict = false;  // free-text label disagreed with the integer

    bool operator==(const ScoreEntry&) const = default;
};

struct StructuredReview {
    std::string summary;
    std::vector<std::string> strengths;
    std::vector<std::string> weaknesses;
    std::vector<std::string> questions;
    ScoreEntry soundness;      // [1, 4]
    ScoreEntry presentation;   // [1, 4]
    ScoreEntry contribution;   // [1, 4]
    ScoreEntry rating;         // [1, 10]
    Decision decision = Decision::Reject;
    std::string reasons;

    bool operator==(const StructuredReview&) const = default;
};

struct FormatReport {
    bool is_valid = false;
    std::vector<std::string> missing_sections;
    std::vector<std::string> malformed_scores;
    std::string raw_text;
};

struct FormatError : Error {
    FormatError(std::string message, FormatReport report_)
        : Error(std::move(message)), report(std::move(report_)) {}
    FormatReport report;
};

// Checks the nine headers (presence and order), integer scores in range,
// and the Paper Decision block. Never throws; failures land in the report.
FormatReport validate(std::string_view text);

// Extracts the structured review. Requires validate(text).is_valid; throws
// FormatError carrying the report otherwise. When a free-text score label
// disagrees with the integer, the integer wins and the conflict is flagged.
StructuredReview parse(std::string_view text);

// Canonical text rendering; serialize(parse(t)) revalidates for any valid t.
std::string serialize(const StructuredReview& review);

// Fraction of texts that validate.
double compliance_rate(std::span<const std::string> texts);

// Textual content of the review without headers or scores, used as the
// unit of comparison for content-overlap analysis.
std::string concat_sections(const StructuredReview& review);

}  // namespace sea
