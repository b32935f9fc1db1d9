#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "sea/corpus.hpp"
#include "sea/format.hpp"

namespace sea {

enum class TemplateId { Standardize, Evaluate, SelfCorrect };

// The instruction templates and prompt renderers. Bodies default to the
// built-in templates; a directory of plain-text files (standardize.txt,
// evaluate.txt, self_correct.txt) with {{placeholder}} markers can replace
// them.
class PromptKit {
public:
    PromptKit();
    static PromptKit from_directory(const std::string& dir);

    const std::string& template_body(TemplateId id) const;

    // inst_s followed by the numbered review block.
    std::string render_standardize(const std::vector<RawReview>& reviews) const;

    // inst_e with the paper body substituted. Bodies beyond the context
    // budget are truncated head-first and marked.
    std::string render_evaluate(std::string_view paper_body, bool* truncated = nullptr) const;

    // Evaluate prompt plus the correction paragraph carrying the previous
    // trial's mismatch score (two decimals, signed).
    std::string render_self_correct(std::string_view paper_body, double prev_score) const;

    // inst_e without the paper slot, for the instruction field of SFT triplets.
    std::string evaluate_instruction() const;

    std::size_t context_budget() const { return context_budget_; }
    void set_context_budget(std::size_t tokens) { context_budget_ = tokens; }

    static constexpr std::string_view kTruncationMarker = "[truncated]";

private:
    std::string standardize_;
    std::string evaluate_;
    std::string self_correct_;
    std::size_t context_budget_ = 24000;
};

// "Reviewer k:" blocks with section-name-prefixed paragraphs and scores,
// in input order.
std::string serialize_reviews_block(const std::vector<RawReview>& reviews);
std::string serialize_review_sections(const RawReview& review);

struct SftTriplet {
    std::string instruction;
    std::string input;
    std::string output;

    bool operator==(const SftTriplet&) const = default;
};

struct SftRejection {
    std::string item_id;
    FormatReport report;
};

struct SftBuildResult {
    std::vector<SftTriplet> triplets;
    std::vector<SftRejection> rejections;
};

struct StandardizeSftItem {
    std::string item_id;
    std::vector<RawReview> reviews;
    std::string teacher_output;
};

struct EvaluateSftItem {
    std::string item_id;
    std::string paper_body;
    std::string standardized_review;
};

// One triplet per item whose output passes format validation; invalid
// outputs land in the rejection list. |triplets| + |rejections| = |items|.
SftBuildResult build_standardize_sft(const std::vector<StandardizeSftItem>& items,
                                     const PromptKit& kit);
SftBuildResult build_evaluate_sft(const std::vector<EvaluateSftItem>& items, const PromptKit& kit);

// ceil(fraction * |ids|) ids drawn with a seeded shuffle, returned in input
// order.
std::vector<std::string> sample_for_distillation(const std::vector<std::string>& ids,
                                                 double fraction, std::uint64_t seed);

// Line-delimited {instruction, input, output} files.
void write_sft(const std::string& path, const std::vector<SftTriplet>& triplets);
std::vector<SftTriplet> read_sft(const std::string& path);
void write_rejections(const std::string& path, const std::vector<SftRejection>& rejections);

}  // namespace sea
