#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sea/corpus.hpp"
#include "sea/format.hpp"
#include "sea/gateway.hpp"
#include "sea/prompts.hpp"

namespace sea {

// Raised when every generation attempt failed format validation.
struct GenerationError : Error {
    GenerationError(std::string message, FormatReport last_report_, int attempts_)
        : Error(std::move(message)), last_report(std::move(last_report_)), attempts(attempts_) {}
    FormatReport last_report;
    int attempts;
};

struct GeneratedReview {
    StructuredReview review;
    std::string raw_text;
    int attempts = 0;
    std::size_t token_count = 0;
};

// Calls the gateway with the given prompt, validating and retrying up to
// max_attempts; the parsed review plus the raw text and its token count
// come back on success.
GeneratedReview generate_with_prompt(Gateway& gateway, const EndpointProfile& profile,
                                     const GenerationConfig& config, const std::string& prompt,
                                     int max_attempts,
                                     const TokenCounter& tokens = whitespace_token_count);

// Renders the evaluate instruction for the paper body and generates.
GeneratedReview generate_review(Gateway& gateway, const EndpointProfile& profile,
                                const GenerationConfig& config, const PromptKit& kit,
                                const std::string& paper_body, int max_attempts,
                                const TokenCounter& tokens = whitespace_token_count);

struct ReviewBatchEntry {
    std::string paper_id;
    std::string model_tag;
    std::optional<GeneratedReview> result;
    std::string error;  // set when result is absent
    std::optional<FormatReport> failure_report;
};

// Generates one review per record, fanning out up to `parallelism` workers
// under the gateway's in-flight bound. Entries come back sorted by
// paper_id; failures are isolated per paper.
std::vector<ReviewBatchEntry> generate_corpus(const std::vector<PaperRecord>& records,
                                              Gateway& gateway, const EndpointProfile& profile,
                                              const GenerationConfig& config, const PromptKit& kit,
                                              int max_attempts, int parallelism,
                                              const TokenCounter& tokens = whitespace_token_count);

// Line-delimited {paper_id, model_tag, review_text, attempts, token_count};
// failed entries carry an error field instead of review_text.
void write_generation_batch(const std::string& path,
                            const std::vector<ReviewBatchEntry>& entries);

struct GenerationRow {
    std::string paper_id;
    std::string model_tag;
    std::optional<std::string> review_text;
    int attempts = 0;
    std::size_t token_count = 0;
};
std::vector<GenerationRow> read_generation_batch(const std::string& path);

}  // namespace sea
