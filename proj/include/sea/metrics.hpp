#pragma once

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sea/corpus.hpp"
#include "sea/format.hpp"

namespace sea {

struct RougeScore {
    double recall = 0.0;
    double precision = 0.0;
    double f1 = 0.0;
};

struct TextScore {
    double bleu = 0.0;
    RougeScore rouge1;
    RougeScore rouge2;
    RougeScore rougeL;
    std::size_t token_count = 0;
};

// N-gram overlap with clipped multiset intersection. Tokenization is
// lowercased with punctuation treated as separators. Empty sides score 0.
RougeScore rouge_n(std::string_view candidate, std::string_view reference, int n);
RougeScore rouge_l(std::string_view candidate, std::string_view reference);

// Sentence-level BLEU-4 with a single reference: geometric mean of clipped
// n-gram precisions (add-one smoothing when a count is zero) times the
// brevity penalty min(1, exp(1 - |ref|/|cand|)).
double bleu(std::string_view candidate, std::string_view reference);

// Token-level entry points, reused by the oracles in tests.
RougeScore rouge_n_tokens(const std::vector<std::string>& candidate,
                          const std::vector<std::string>& reference, int n);
RougeScore rouge_l_tokens(const std::vector<std::string>& candidate,
                          const std::vector<std::string>& reference);
double bleu_tokens(const std::vector<std::string>& candidate,
                   const std::vector<std::string>& reference);

// All ground-truth reviews of a paper joined into one reference text.
std::string concat_reference(const std::vector<RawReview>& reviews);

TextScore score_texts(std::string_view candidate, std::string_view reference,
                      const TokenCounter& tokens = whitespace_token_count);

struct ScoredPair {
    std::string candidate;
    std::string reference;
};

// Per-pair scoring over a corpus. The OpenMP path and the serial reference
// produce identical results; the serial one is kept for testing and the
// benchmark. The token counter must be thread-safe.
std::vector<TextScore> score_corpus(std::span<const ScoredPair> pairs,
                                    const TokenCounter& tokens = whitespace_token_count);
std::vector<TextScore> score_corpus_serial(std::span<const ScoredPair> pairs,
                                           const TokenCounter& tokens = whitespace_token_count);

// Confidence-weighted reference scores per aspect; reviews lacking an
// aspect are skipped for it.
struct AspectScores {
    std::optional<double> soundness;
    std::optional<double> presentation;
    std::optional<double> contribution;
    std::optional<double> rating;
};
AspectScores weighted_reference_scores(const std::vector<RawReview>& reviews);

struct AspectMse {
    std::optional<double> mse;   // absent when no generation produced a valid score
    double valid_fraction = 0.0;
};

struct ScoreMseReport {
    AspectMse soundness;
    AspectMse presentation;
    AspectMse contribution;
    AspectMse rating;
};

// MSE of generated scores against the weighted references, over the items
// whose generation parsed; a failed generation counts against
// valid_fraction for every aspect.
ScoreMseReport score_mse(const std::vector<std::optional<StructuredReview>>& generated,
                         const std::vector<AspectScores>& references);

using PairSimilarity = std::function<double(const std::string&, const std::string&)>;

struct DecisionReport {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    // Mean document-embedding cosine between reasons and meta-reviews.
    // A substitute for BERTScore; labeled as such in every rendering.
    std::optional<double> semantic_similarity;
    std::size_t counted = 0;  // items with both labels present
};

// Confusion-matrix metrics with Accept as the positive class, over items
// where both labels exist. `similarity` may be empty; it is applied to
// (reasons, meta_review) pairs where the meta-review is present.
DecisionReport decision_metrics(const std::vector<std::optional<Decision>>& predicted,
                                const std::vector<std::optional<Decision>>& actual,
                                const std::vector<std::string>& reasons,
                                const std::vector<std::optional<std::string>>& meta_reviews,
                                const PairSimilarity& similarity = nullptr);

struct MetricsReport {
    std::string dataset;
    std::string model_tag;
    std::size_t paper_count = 0;
    TextScore mean_text;  // dataset means; bleu/rouge in [0,1], tokens as a mean count
    ScoreMseReport scores;
    DecisionReport decisions;
};

MetricsReport build_report(const std::string& dataset, const std::string& model_tag,
                           const std::vector<TextScore>& per_paper, const ScoreMseReport& scores,
                           const DecisionReport& decisions);

// Machine-readable rows {dataset, model_tag, metric, value} and the
// aligned-text table (percent, two decimals).
std::vector<std::pair<std::string, double>> report_rows(const MetricsReport& report);
void write_report_rows(const std::string& path, const MetricsReport& report);
std::map<std::string, double> read_report_rows(const std::string& path);
std::string render_report_table(const MetricsReport& report);

}  // namespace sea
