#include "sea/mismatch.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "sea/rng.hpp"

namespace sea {

double true_mismatch(std::span<const double> ratings, std::span<const double> confidences,
                     std::size_t index) {
    if (ratings.empty() || ratings.size() != confidences.size())
        throw InputError("true_mismatch: ratings and confidences must be equal-length and non-empty");
    if (index >= ratings.size()) throw InputError("true_mismatch: index out of range");
    double weighted = 0.0;
    double total = 0.0;
    for (std::size_t j = 0; j < ratings.size(); ++j) {
        if (confidences[j] < 0.0) throw InputError("true_mismatch: negative confidence");
        weighted += confidences[j] * ratings[j];
        total += confidences[j];
    }
    if (total == 0.0) throw InputError("true_mismatch: confidence weights sum to zero");
    return ratings[index] - weighted / total;
}

namespace {

// y = W x for a row-major (rows x cols) matrix.
void matvec(const std::vector<double>& W, std::size_t rows, std::size_t cols,
            const std::vector<double>& x, double* y) {
    for (std::size_t r = 0; r < rows; ++r) {
        double acc = 0.0;
        const double* row = W.data() + r * cols;
        for (std::size_t c = 0; c < cols; ++c) acc += row[c] * x[c];
        y[r] = acc;
    }
}

double dot(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

void check_dims(const MismatchModel& model, const EmbeddingVector& paper,
                const EmbeddingVector& review) {
    if (paper.dim() != model.embed_dim || review.dim() != model.embed_dim)
        throw InputError("mismatch model expects embeddings of dimension " +
                         std::to_string(model.embed_dim));
}

// Scratch for one sample's projections.
struct Projections {
    std::vector<double> q_p, k_p, q_r, k_r;

    void resize(std::size_t proj) {
        q_p.resize(proj);
        k_p.resize(proj);
        q_r.resize(proj);
        k_r.resize(proj);
    }
};

double bilinear_term(const MismatchModel& m, const EmbeddingVector& paper,
                     const EmbeddingVector& review, Projections& s) {
    s.resize(m.proj_dim);
    matvec(m.W_q, m.proj_dim, m.embed_dim, paper.values, s.q_p.data());
    matvec(m.W_k, m.proj_dim, m.embed_dim, paper.values, s.k_p.data());
    matvec(m.W_q, m.proj_dim, m.embed_dim, review.values, s.q_r.data());
    matvec(m.W_k, m.proj_dim, m.embed_dim, review.values, s.k_r.data());
    return dot(s.q_p.data(), s.k_r.data(), m.proj_dim) +
           dot(s.q_r.data(), s.k_p.data(), m.proj_dim);
}

// Raw (unscaled) accumulator for the gradient sums.
struct GradAccum {
    std::vector<double> W_q, W_k;  // sum over samples of e * (outer products)
    double eu = 0.0;               // sum e * u
    double e = 0.0;                // sum e
    double e2 = 0.0;               // sum e^2

    void init(std::size_t size) {
        W_q.assign(size, 0.0);
        W_k.assign(size, 0.0);
    }

    void add(const GradAccum& other) {
        for (std::size_t i = 0; i < W_q.size(); ++i) W_q[i] += other.W_q[i];
        for (std::size_t i = 0; i < W_k.size(); ++i) W_k[i] += other.W_k[i];
        eu += other.eu;
        e += other.e;
        e2 += other.e2;
    }
};

void accumulate_sample(const MismatchModel& m, const MismatchSample& sample, Projections& s,
                       GradAccum& acc) {
    const double u = bilinear_term(m, sample.paper_embedding, sample.review_embedding, s);
    const double err = m.w * u + m.b - sample.target;
    acc.e2 += err * err;
    acc.e += err;
    acc.eu += err * u;
    // d u / d W_q = k_r h_p^T + k_p h_r^T ; d u / d W_k = q_p h_r^T + q_r h_p^T
    const std::vector<double>& hp = sample.paper_embedding.values;
    const std::vector<double>& hr = sample.review_embedding.values;
    for (std::size_t r = 0; r < m.proj_dim; ++r) {
        double* gq = acc.W_q.data() + r * m.embed_dim;
        double* gk = acc.W_k.data() + r * m.embed_dim;
        const double ekr = err * s.k_r[r];
        const double ekp = err * s.k_p[r];
        const double eqp = err * s.q_p[r];
        const double eqr = err * s.q_r[r];
        for (std::size_t c = 0; c < m.embed_dim; ++c) {
            gq[c] += ekr * hp[c] + ekp * hr[c];
            gk[c] += eqp * hr[c] + eqr * hp[c];
        }
    }
}

Gradients finalize(const MismatchModel& m, GradAccum& acc, std::size_t n) {
    Gradients g;
    const double inv_n = 1.0 / static_cast<double>(n);
    const double scale = 2.0 * inv_n;
    g.W_q = std::move(acc.W_q);
    g.W_k = std::move(acc.W_k);
    for (double& x : g.W_q) x *= scale * m.w;
    for (double& x : g.W_k) x *= scale * m.w;
    g.w = scale * acc.eu;
    g.b = scale * acc.e;
    g.loss = acc.e2 * inv_n;
    return g;
}

void check_samples(const MismatchModel& model, std::span<const MismatchSample> samples) {
    if (samples.empty()) throw InputError("mismatch: empty sample list");
    for (const MismatchSample& s : samples) check_dims(model, s.paper_embedding, s.review_embedding);
}

// Fixed stripe layout: stripe s covers samples s, s + kStripes, ... so the
// accumulation order does not depend on the number of threads.
constexpr std::size_t kGradStripes = 16;

}  // namespace

double predict(const MismatchModel& model, const EmbeddingVector& paper,
               const EmbeddingVector& review) {
    check_dims(model, paper, review);
    Projections scratch;
    return model.w * bilinear_term(model, paper, review, scratch) + model.b;
}

std::vector<double> batch_predict(const MismatchModel& model,
                                  std::span<const MismatchSample> samples) {
    check_samples(model, samples);
    std::vector<double> out(samples.size());
#pragma omp parallel
    {
        Projections scratch;
#pragma omp for schedule(static)
        for (std::int64_t i = 0; i < static_cast<std::int64_t>(samples.size()); ++i)
            out[i] = model.w * bilinear_term(model, samples[i].paper_embedding,
                                             samples[i].review_embedding, scratch) +
                     model.b;
    }
    return out;
}

std::vector<double> batch_predict_serial(const MismatchModel& model,
                                         std::span<const MismatchSample> samples) {
    check_samples(model, samples);
    std::vector<double> out(samples.size());
    Projections scratch;
    for (std::size_t i = 0; i < samples.size(); ++i)
        out[i] = model.w * bilinear_term(model, samples[i].paper_embedding,
                                         samples[i].review_embedding, scratch) +
                 model.b;
    return out;
}

Gradients loss_and_gradients(const MismatchModel& model, std::span<const MismatchSample> samples) {
    check_samples(model, samples);
    const std::size_t size = model.proj_dim * model.embed_dim;
    const std::size_t stripes = std::min(kGradStripes, samples.size());
    std::vector<GradAccum> partial(stripes);

#pragma omp parallel for schedule(dynamic)
    for (std::int64_t s = 0; s < static_cast<std::int64_t>(stripes); ++s) {
        partial[s].init(size);
        Projections scratch;
        for (std::size_t i = static_cast<std::size_t>(s); i < samples.size(); i += stripes)
            accumulate_sample(model, samples[i], scratch, partial[s]);
    }

    GradAccum total;
    total.init(size);
    for (GradAccum& p : partial) total.add(p);
    return finalize(model, total, samples.size());
}

Gradients loss_and_gradients_serial(const MismatchModel& model,
                                    std::span<const MismatchSample> samples) {
    check_samples(model, samples);
    GradAccum acc;
    acc.init(model.proj_dim * model.embed_dim);
    Projections scratch;
    for (const MismatchSample& sample : samples) accumulate_sample(model, sample, scratch, acc);
    return finalize(model, acc, samples.size());
}

TrainResult train(const std::vector<MismatchSample>& samples, const TrainConfig& config) {
    if (samples.empty()) throw InputError("train: empty sample list");
    if (config.steps < 1) throw InputError("train: steps must be >= 1");
    if (config.learning_rate <= 0.0) throw InputError("train: learning rate must be positive");
    if (config.proj_dim < 1) throw InputError("train: proj_dim must be >= 1");
    const std::size_t embed_dim = samples.front().paper_embedding.dim();
    for (const MismatchSample& s : samples) {
        if (s.paper_embedding.dim() != embed_dim || s.review_embedding.dim() != embed_dim)
            throw InputError("train: samples carry inconsistent embedding dimensions");
        if (!std::isfinite(s.target)) throw InputError("train: non-finite target");
    }

    MismatchModel model;
    model.embed_dim = embed_dim;
    model.proj_dim = config.proj_dim;
    const std::size_t size = model.proj_dim * model.embed_dim;
    model.W_q.resize(size);
    model.W_k.resize(size);
    Rng rng(config.seed);
    for (double& x : model.W_q) x = rng.gaussian() * config.init_scale;
    for (double& x : model.W_k) x = rng.gaussian() * config.init_scale;
    model.w = 1.0;
    model.b = 0.0;

    TrainResult result;
    result.loss_trace.reserve(static_cast<std::size_t>(config.steps) + 1);
    for (int step = 0; step < config.steps; ++step) {
        Gradients g = loss_and_gradients(model, samples);
        if (!std::isfinite(g.loss))
            throw TrainDivergedError("train: loss diverged at step " + std::to_string(step), step);
        result.loss_trace.push_back(g.loss);
        const double lr = config.learning_rate;
        for (std::size_t i = 0; i < size; ++i) {
            model.W_q[i] -= lr * g.W_q[i];
            model.W_k[i] -= lr * g.W_k[i];
        }
        model.w -= lr * g.w;
        model.b -= lr * g.b;
    }
    // Final loss after the last update.
    double final_loss = 0.0;
    const std::vector<double> preds = batch_predict(model, samples);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double e = preds[i] - samples[i].target;
        final_loss += e * e;
    }
    final_loss /= static_cast<double>(samples.size());
    if (!std::isfinite(final_loss))
        throw TrainDivergedError("train: loss diverged at step " + std::to_string(config.steps),
                                 config.steps);
    result.loss_trace.push_back(final_loss);
    result.model = std::move(model);
    return result;
}

double compute_threshold(const MismatchModel& model, std::span<const MismatchSample> validation) {
    if (validation.empty()) throw InputError("compute_threshold: empty validation set");
    const std::vector<double> preds = batch_predict(model, validation);
    double sum = 0.0;
    for (const double p : preds) sum += std::fabs(p);
    return sum / static_cast<double>(preds.size());
}

SelfCorrectResult self_correct(const PromptKit& kit, const std::string& paper_body,
                               const EmbeddingVector& paper_embedding,
                               const ReviewGenerator& generator, const TextEmbedder& embedder,
                               const MismatchModel& model, double theta, int max_trials) {
    if (max_trials < 1) throw InputError("self_correct: max_trials must be >= 1");
    if (!(theta >= 0.0)) throw InputError("self_correct: theta must be >= 0");

    SelfCorrectResult result;
    std::optional<double> last_score;
    std::optional<std::size_t> best;  // index into result.log
    std::string best_text;

    for (int trial = 1; trial <= max_trials; ++trial) {
        const std::string prompt = last_score
                                       ? kit.render_self_correct(paper_body, *last_score)
                                       : kit.render_evaluate(paper_body);
        std::optional<std::string> text = generator(prompt);
        TrialRecord record;
        record.trial = trial;
        if (!text) {
            record.failed = true;
            result.log.push_back(record);
            continue;
        }
        const EmbeddingVector review_embedding = embedder(*text);
        record.score = predict(model, paper_embedding, review_embedding);
        record.accepted = std::fabs(record.score) <= theta;
        result.log.push_back(record);
        last_score = record.score;
        if (!best || std::fabs(record.score) < std::fabs(result.log[*best].score)) {
            best = result.log.size() - 1;
            best_text = std::move(*text);
        }
        if (record.accepted) break;
    }

    if (!best) throw Error("self_correct: every trial failed");
    result.review_text = std::move(best_text);
    result.score = result.log[*best].score;
    result.trial = result.log[*best].trial;
    return result;
}

NegativePairResult negative_pair_eval(const MismatchModel& model,
                                      std::span<const MismatchSample> pairs, std::uint64_t seed) {
    if (pairs.size() < 2) throw InputError("negative_pair_eval: needs at least 2 pairs");
    check_samples(model, pairs);

    std::vector<std::size_t> perm(pairs.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    Rng rng(seed);
    rng.sattolo(perm);  // a single cycle: no review keeps its own paper

    NegativePairResult result;
    const std::vector<double> matched = batch_predict(model, pairs);
    for (const double s : matched) result.matched_mean += std::fabs(s);
    result.matched_mean /= static_cast<double>(pairs.size());

    std::vector<MismatchSample> shuffled(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        shuffled[i].paper_embedding = pairs[i].paper_embedding;
        shuffled[i].review_embedding = pairs[perm[i]].review_embedding;
    }
    const std::vector<double> negative = batch_predict(model, shuffled);
    for (const double s : negative) result.shuffled_mean += std::fabs(s);
    result.shuffled_mean /= static_cast<double>(pairs.size());
    return result;
}

std::vector<MismatchSample> build_mismatch_samples(const std::vector<PaperRecord>& records,
                                                   const BatchEmbedder& embedder,
                                                   std::size_t embed_budget_tokens) {
    // Embed papers first, then reviews, in record order, batched.
    std::vector<std::string> texts;
    for (const PaperRecord& r : records) {
        if (r.reviews.empty())
            throw InputError("build_mismatch_samples: record '" + r.paper_id + "' has no reviews");
        texts.push_back(truncate_tokens(r.body, embed_budget_tokens, nullptr));
        for (const RawReview& review : r.reviews)
            texts.push_back(truncate_tokens(serialize_review_sections(review),
                                            embed_budget_tokens, nullptr));
    }

    constexpr std::size_t kBatch = 16;
    std::vector<EmbeddingVector> vectors;
    vectors.reserve(texts.size());
    for (std::size_t start = 0; start < texts.size(); start += kBatch) {
        const std::size_t end = std::min(start + kBatch, texts.size());
        std::vector<std::string> chunk(texts.begin() + static_cast<std::ptrdiff_t>(start),
                                       texts.begin() + static_cast<std::ptrdiff_t>(end));
        std::vector<EmbeddingVector> embedded = embedder(chunk);
        if (embedded.size() != chunk.size())
            throw ProtocolError("build_mismatch_samples: embedder returned wrong batch size");
        for (EmbeddingVector& v : embedded) vectors.push_back(std::move(v));
    }

    std::vector<MismatchSample> samples;
    std::size_t cursor = 0;
    for (const PaperRecord& r : records) {
        const EmbeddingVector& paper = vectors[cursor++];
        std::vector<double> ratings, confidences;
        for (const RawReview& review : r.reviews) {
            ratings.push_back(static_cast<double>(review.rating));
            confidences.push_back(static_cast<double>(review.confidence));
        }
        for (std::size_t i = 0; i < r.reviews.size(); ++i) {
            MismatchSample s;
            s.paper_embedding = paper;
            s.review_embedding = vectors[cursor++];
            s.target = true_mismatch(ratings, confidences, i);
            samples.push_back(std::move(s));
        }
    }
    return samples;
}

std::pair<std::vector<MismatchSample>, std::vector<MismatchSample>> validation_split(
    const std::vector<MismatchSample>& samples, double validation_fraction, std::uint64_t seed) {
    if (!(validation_fraction >= 0.0 && validation_fraction < 1.0))
        throw InputError("validation_split: fraction must be in [0, 1)");
    std::vector<std::size_t> order(samples.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng rng(seed);
    rng.shuffle(order);
    const std::size_t n_val = static_cast<std::size_t>(
        std::llround(validation_fraction * static_cast<double>(samples.size())));
    std::vector<char> in_val(samples.size(), 0);
    for (std::size_t i = 0; i < n_val; ++i) in_val[order[i]] = 1;
    std::pair<std::vector<MismatchSample>, std::vector<MismatchSample>> out;
    for (std::size_t i = 0; i < samples.size(); ++i)
        (in_val[i] ? out.second : out.first).push_back(samples[i]);
    return out;
}

namespace {

constexpr char kModelMagic[8] = {'S', 'E', 'A', 'M', 'O', 'D', 'L', '1'};

}  // namespace

void save_model(const std::string& path, const MismatchModel& model,
                const std::optional<TrainConfig>& config) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write model checkpoint: " + path);
    out.write(kModelMagic, sizeof(kModelMagic));
    const std::uint64_t embed_dim = model.embed_dim;
    const std::uint64_t proj_dim = model.proj_dim;
    out.write(reinterpret_cast<const char*>(&embed_dim), sizeof(embed_dim));
    out.write(reinterpret_cast<const char*>(&proj_dim), sizeof(proj_dim));
    out.write(reinterpret_cast<const char*>(&model.w), sizeof(model.w));
    out.write(reinterpret_cast<const char*>(&model.b), sizeof(model.b));
    out.write(reinterpret_cast<const char*>(model.W_q.data()),
              static_cast<std::streamsize>(model.W_q.size() * sizeof(double)));
    out.write(reinterpret_cast<const char*>(model.W_k.data()),
              static_cast<std::streamsize>(model.W_k.size() * sizeof(double)));
    if (!out) throw InputError("failed writing model checkpoint: " + path);

    if (config) {
        std::ofstream sidecar(path + ".cfg");
        if (!sidecar) throw InputError("cannot write checkpoint sidecar: " + path + ".cfg");
        sidecar << "learning_rate=" << config->learning_rate << "\n"
                << "steps=" << config->steps << "\n"
                << "proj_dim=" << config->proj_dim << "\n"
                << "seed=" << config->seed << "\n"
                << "init_scale=" << config->init_scale << "\n";
    }
}

MismatchModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open model checkpoint: " + path);
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kModelMagic, sizeof(magic)) != 0)
        throw InputError("not a mismatch model checkpoint: " + path);
    std::uint64_t embed_dim = 0;
    std::uint64_t proj_dim = 0;
    MismatchModel model;
    in.read(reinterpret_cast<char*>(&embed_dim), sizeof(embed_dim));
    in.read(reinterpret_cast<char*>(&proj_dim), sizeof(proj_dim));
    in.read(reinterpret_cast<char*>(&model.w), sizeof(model.w));
    in.read(reinterpret_cast<char*>(&model.b), sizeof(model.b));
    if (!in) throw InputError("truncated model checkpoint: " + path);
    model.embed_dim = embed_dim;
    model.proj_dim = proj_dim;
    const std::size_t size = model.embed_dim * model.proj_dim;
    model.W_q.resize(size);
    model.W_k.resize(size);
    in.read(reinterpret_cast<char*>(model.W_q.data()),
            static_cast<std::streamsize>(size * sizeof(double)));
    in.read(reinterpret_cast<char*>(model.W_k.data()),
            static_cast<std::streamsize>(size * sizeof(double)));
    if (!in) throw InputError("truncated model checkpoint: " + path);
    return model;
}

}  // namespace sea
