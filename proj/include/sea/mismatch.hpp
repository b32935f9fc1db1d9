#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sea/gateway.hpp"
#include "sea/prompts.hpp"

namespace sea {

// Bilinear mismatch regressor: score = w * (<W_q p, W_k r> + <W_q r, W_k p>) + b.
// Matrices are row-major proj_dim x embed_dim.
struct MismatchModel {
    std::size_t embed_dim = 0;
    std::size_t proj_dim = 0;
    std::vector<double> W_q;
    std::vector<double> W_k;
    double w = 1.0;
    double b = 0.0;
};

struct TrainConfig {
    double learning_rate = 0.01;
    int steps = 1000;
    std::size_t proj_dim = 64;
    std::uint64_t seed = 0;
    double init_scale = 0.01;  // std-dev of the Gaussian matrix init
};

struct MismatchSample {
    EmbeddingVector paper_embedding;
    EmbeddingVector review_embedding;
    double target = 0.0;
};

// Signed deviation of one review's rating from the confidence-weighted mean
// rating of its paper.
double true_mismatch(std::span<const double> ratings, std::span<const double> confidences,
                     std::size_t index);

double predict(const MismatchModel& model, const EmbeddingVector& paper,
               const EmbeddingVector& review);

// Per-sample predictions. The OpenMP path and the serial reference agree
// exactly; the serial one is kept for testing and the benchmark.
std::vector<double> batch_predict(const MismatchModel& model,
                                  std::span<const MismatchSample> samples);
std::vector<double> batch_predict_serial(const MismatchModel& model,
                                         std::span<const MismatchSample> samples);

struct Gradients {
    std::vector<double> W_q;
    std::vector<double> W_k;
    double w = 0.0;
    double b = 0.0;
    double loss = 0.0;  // mean squared error at the evaluated parameters
};

// Analytic MSE gradients. The OpenMP path accumulates over a fixed stripe
// layout, so its floating-point result is independent of the thread count;
// the serial reference sums samples left to right and is kept for testing.
Gradients loss_and_gradients(const MismatchModel& model, std::span<const MismatchSample> samples);
Gradients loss_and_gradients_serial(const MismatchModel& model,
                                    std::span<const MismatchSample> samples);

struct TrainResult {
    MismatchModel model;
    // loss_trace[t] is the MSE before update t; the final entry is the MSE
    // after the last update, so the trace has steps + 1 entries.
    std::vector<double> loss_trace;
};

struct TrainDivergedError : Error {
    TrainDivergedError(std::string message, int step_) : Error(std::move(message)), step(step_) {}
    int step;
};

// Full-batch gradient descent from a seeded init (Gaussian * init_scale
// matrices, w = 1, b = 0).
TrainResult train(const std::vector<MismatchSample>& samples, const TrainConfig& config);

// theta = mean |predicted score| over the validation pairs.
double compute_threshold(const MismatchModel& model, std::span<const MismatchSample> validation);

// Callbacks wired to the reviewer and the gateway. The generator returns
// the raw review text, or nullopt when the trial failed.
using ReviewGenerator = std::function<std::optional<std::string>(const std::string& prompt)>;
using TextEmbedder = std::function<EmbeddingVector(const std::string& text)>;

struct TrialRecord {
    int trial = 0;        // 1-based
    double score = 0.0;   // signed prediction; meaningless when failed
    bool failed = false;
    bool accepted = false;  // |score| <= theta
};

struct SelfCorrectResult {
    std::string review_text;
    double score = 0.0;  // signed score of the selected trial
    int trial = 0;       // which trial was selected
    std::vector<TrialRecord> log;
};

// Trial 1 uses the plain evaluate prompt; each later trial injects the
// previous trial's signed score into the prompt. Returns at the first trial
// with |score| <= theta, otherwise the minimum-|score| trial after the
// budget is spent. Failed trials are skipped, not retried.
SelfCorrectResult self_correct(const PromptKit& kit, const std::string& paper_body,
                               const EmbeddingVector& paper_embedding,
                               const ReviewGenerator& generator, const TextEmbedder& embedder,
                               const MismatchModel& model, double theta, int max_trials = 10);

struct NegativePairResult {
    double matched_mean = 0.0;   // mean |score| over matched paper-review pairs
    double shuffled_mean = 0.0;  // mean |score| under a seeded derangement
};

// Reassigns reviews across papers with a seeded derangement (no review
// stays with its own paper) and compares mean absolute scores.
NegativePairResult negative_pair_eval(const MismatchModel& model,
                                      std::span<const MismatchSample> pairs, std::uint64_t seed);

using BatchEmbedder = std::function<std::vector<EmbeddingVector>(const std::vector<std::string>&)>;

// One sample per (paper, original review): embeddings of the truncated
// paper body and the serialized review, with the review's signed rating
// deviation as target. Sample order follows the record order.
std::vector<MismatchSample> build_mismatch_samples(const std::vector<PaperRecord>& records,
                                                   const BatchEmbedder& embedder,
                                                   std::size_t embed_budget_tokens = 8192);

// Seeded unstratified split into (train, validation).
std::pair<std::vector<MismatchSample>, std::vector<MismatchSample>> validation_split(
    const std::vector<MismatchSample>& samples, double validation_fraction, std::uint64_t seed);

// Checkpoint: binary header {embed_dim, proj_dim, w, b} + row-major matrix
// payloads, plus a plain-text sidecar of the train config at <path>.cfg.
void save_model(const std::string& path, const MismatchModel& model,
                const std::optional<TrainConfig>& config = std::nullopt);
MismatchModel load_model(const std::string& path);

}  // namespace sea
