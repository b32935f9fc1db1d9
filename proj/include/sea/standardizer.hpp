#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sea/corpus.hpp"
#include "sea/format.hpp"
#include "sea/gateway.hpp"
#include "sea/prompts.hpp"

namespace sea {

struct StandardizationError : Error {
    StandardizationError(std::string message, FormatReport last_report_, int attempts_)
        : Error(std::move(message)), last_report(std::move(last_report_)), attempts(attempts_) {}
    FormatReport last_report;
    int attempts;
};

struct StandardizeOutcome {
    StructuredReview review;
    std::string raw_text;
    int attempts = 0;
};

// Renders the standardize instruction over the reviews, calls the gateway,
// validates, and retries invalid outputs up to max_attempts.
StandardizeOutcome standardize_one(const std::vector<RawReview>& reviews, Gateway& gateway,
                                   const EndpointProfile& profile, const GenerationConfig& config,
                                   const PromptKit& kit, int max_attempts);

struct CorpusStandardization {
    std::map<std::string, StandardizeOutcome> outputs;  // keyed by paper_id
    struct Failure {
        std::string paper_id;
        std::string error;
        std::optional<FormatReport> report;
    };
    std::vector<Failure> failures;  // sorted by paper_id
};

// One standardized review per training record, fanned out under the
// gateway's bound, collated in paper_id order regardless of completion
// order. Failures are isolated per paper.
CorpusStandardization standardize_corpus(const std::vector<PaperRecord>& train, Gateway& gateway,
                                         const EndpointProfile& profile,
                                         const GenerationConfig& config, const PromptKit& kit,
                                         int max_attempts, int parallelism);

// Line-delimited {paper_id, review_text, attempts} and the failure report
// {paper_id, missing_sections, malformed_scores}.
void write_standardized(const std::string& path, const CorpusStandardization& result);
std::map<std::string, std::string> read_standardized(const std::string& path);
void write_standardization_failures(const std::string& path, const CorpusStandardization& result);

// Content-overlap decomposition per ROUGE variant: the shares of combined
// content that overlap, that only the reference carries, and that only the
// candidate carries. The three values sum to 1 for non-empty inputs.
struct OverlapPart {
    double overlap = 0.0;
    double reference_exclusive = 0.0;
    double candidate_exclusive = 0.0;
};

struct OverlapDecomposition {
    OverlapPart rouge1;
    OverlapPart rouge2;
    OverlapPart rougeL;
};

OverlapDecomposition content_overlap(const StructuredReview& reference,
                                     const StructuredReview& candidate);

}  // namespace sea
