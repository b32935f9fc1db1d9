#include "sea/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "sea/errors.hpp"
#include "sea/prompts.hpp"

namespace sea {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

double f1_of(double recall, double precision) {
    const double denom = recall + precision;
    return denom == 0.0 ? 0.0 : 2.0 * recall * precision / denom;
}

using NgramCounts = std::unordered_map<std::string, std::size_t>;

NgramCounts count_ngrams(const std::vector<std::string>& tokens, int n) {
    NgramCounts counts;
    if (n <= 0 || tokens.size() < static_cast<std::size_t>(n)) return counts;
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
        std::string key = tokens[i];
        for (int j = 1; j < n; ++j) {
            key += '\x1f';
            key += tokens[i + j];
        }
        ++counts[key];
    }
    return counts;
}

std::size_t clipped_matches(const NgramCounts& cand, const NgramCounts& ref) {
    std::size_t matches = 0;
    for (const auto& [gram, count] : cand) {
        auto it = ref.find(gram);
        if (it != ref.end()) matches += std::min(count, it->second);
    }
    return matches;
}

std::size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    if (a.empty() || b.empty()) return 0;
    std::vector<std::size_t> prev(b.size() + 1, 0);
    std::vector<std::size_t> curr(b.size() + 1, 0);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j) {
            if (a[i - 1] == b[j - 1])
                curr[j] = prev[j - 1] + 1;
            else
                curr[j] = std::max(prev[j], curr[j - 1]);
        }
        std::swap(prev, curr);
    }
    return prev[b.size()];
}

}  // namespace

RougeScore rouge_n_tokens(const std::vector<std::string>& candidate,
                          const std::vector<std::string>& reference, int n) {
    if (n < 1) throw InputError("rouge_n: n must be >= 1");
    RougeScore score;
    const std::size_t cand_total =
        candidate.size() >= static_cast<std::size_t>(n) ? candidate.size() - n + 1 : 0;
    const std::size_t ref_total =
        reference.size() >= static_cast<std::size_t>(n) ? reference.size() - n + 1 : 0;
    if (cand_total == 0 || ref_total == 0) return score;
    const std::size_t matches =
        clipped_matches(count_ngrams(candidate, n), count_ngrams(reference, n));
    score.recall = static_cast<double>(matches) / static_cast<double>(ref_total);
    score.precision = static_cast<double>(matches) / static_cast<double>(cand_total);
    score.f1 = f1_of(score.recall, score.precision);
    return score;
}

RougeScore rouge_l_tokens(const std::vector<std::string>& candidate,
                          const std::vector<std::string>& reference) {
    RougeScore score;
    if (candidate.empty() || reference.empty()) return score;
    const std::size_t lcs = lcs_length(candidate, reference);
    score.recall = static_cast<double>(lcs) / static_cast<double>(reference.size());
    score.precision = static_cast<double>(lcs) / static_cast<double>(candidate.size());
    score.f1 = f1_of(score.recall, score.precision);
    return score;
}

double bleu_tokens(const std::vector<std::string>& candidate,
                   const std::vector<std::string>& reference) {
    if (candidate.empty() || reference.empty()) return 0.0;
    double log_sum = 0.0;
    for (int n = 1; n <= 4; ++n) {
        const std::size_t total =
            candidate.size() >= static_cast<std::size_t>(n) ? candidate.size() - n + 1 : 0;
        const std::size_t matches =
            total == 0 ? 0 : clipped_matches(count_ngrams(candidate, n), count_ngrams(reference, n));
        // Add-one smoothing whenever the clipped count is zero.
        const double p = matches > 0
                             ? static_cast<double>(matches) / static_cast<double>(total)
                             : 1.0 / static_cast<double>(total + 1);
        log_sum += 0.25 * std::log(p);
    }
    const double brevity =
        std::min(1.0, std::exp(1.0 - static_cast<double>(reference.size()) /
                                         static_cast<double>(candidate.size())));
    return brevity * std::exp(log_sum);
}

RougeScore rouge_n(std::string_view candidate, std::string_view reference, int n) {
    return rouge_n_tokens(metric_tokens(candidate), metric_tokens(reference), n);
}

RougeScore rouge_l(std::string_view candidate, std::string_view reference) {
    return rouge_l_tokens(metric_tokens(candidate), metric_tokens(reference));
}

double bleu(std::string_view candidate, std::string_view reference) {
    return bleu_tokens(metric_tokens(candidate), metric_tokens(reference));
}

std::string concat_reference(const std::vector<RawReview>& reviews) {
    if (reviews.empty()) throw InputError("concat_reference: empty review list");
    std::string out;
    for (const RawReview& r : reviews) {
        if (!out.empty()) out += "\n";
        out += serialize_review_sections(r);
    }
    return out;
}

TextScore score_texts(std::string_view candidate, std::string_view reference,
                      const TokenCounter& tokens) {
    TextScore score;
    const std::vector<std::string> cand = metric_tokens(candidate);
    const std::vector<std::string> ref = metric_tokens(reference);
    score.bleu = bleu_tokens(cand, ref);
    score.rouge1 = rouge_n_tokens(cand, ref, 1);
    score.rouge2 = rouge_n_tokens(cand, ref, 2);
    score.rougeL = rouge_l_tokens(cand, ref);
    score.token_count = tokens(candidate);
    return score;
}

std::vector<TextScore> score_corpus(std::span<const ScoredPair> pairs, const TokenCounter& tokens) {
    std::vector<TextScore> out(pairs.size());
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(pairs.size()); ++i)
        out[i] = score_texts(pairs[i].candidate, pairs[i].reference, tokens);
    return out;
}

std::vector<TextScore> score_corpus_serial(std::span<const ScoredPair> pairs,
                                           const TokenCounter& tokens) {
    std::vector<TextScore> out(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i)
        out[i] = score_texts(pairs[i].candidate, pairs[i].reference, tokens);
    return out;
}

AspectScores weighted_reference_scores(const std::vector<RawReview>& reviews) {
    if (reviews.empty()) throw InputError("weighted_reference_scores: empty review list");
    auto weighted = [&](auto getter) -> std::optional<double> {
        double num = 0.0;
        double denom = 0.0;
        for (const RawReview& r : reviews) {
            const std::optional<int> value = getter(r);
            if (!value) continue;
            if (r.confidence <= 0)
                throw InputError("weighted_reference_scores: non-positive confidence");
            num += static_cast<double>(r.confidence) * static_cast<double>(*value);
            denom += static_cast<double>(r.confidence);
        }
        if (denom == 0.0) return std::nullopt;
        return num / denom;
    };
    AspectScores out;
    out.soundness = weighted([](const RawReview& r) { return r.soundness; });
    out.presentation = weighted([](const RawReview& r) { return r.presentation; });
    out.contribution = weighted([](const RawReview& r) { return r.contribution; });
    out.rating = weighted([](const RawReview& r) { return std::optional<int>(r.rating); });
    return out;
}

ScoreMseReport score_mse(const std::vector<std::optional<StructuredReview>>& generated,
                         const std::vector<AspectScores>& references) {
    if (generated.size() != references.size())
        throw InputError("score_mse: generated and reference lists differ in length");
    const std::size_t total = generated.size();

    auto aspect = [&](auto gen_score, auto ref_score) {
        AspectMse out;
        if (total == 0) return out;
        double sum = 0.0;
        std::size_t used = 0;
        std::size_t valid = 0;
        for (std::size_t i = 0; i < total; ++i) {
            if (!generated[i]) continue;
            ++valid;
            const std::optional<double> ref = ref_score(references[i]);
            if (!ref) continue;
            const double diff = static_cast<double>(gen_score(*generated[i])) - *ref;
            sum += diff * diff;
            ++used;
        }
        out.valid_fraction = static_cast<double>(valid) / static_cast<double>(total);
        if (used > 0) out.mse = sum / static_cast<double>(used);
        return out;
    };

    ScoreMseReport report;
    report.soundness = aspect([](const StructuredReview& r) { return r.soundness.value; },
                              [](const AspectScores& a) { return a.soundness; });
    report.presentation = aspect([](const StructuredReview& r) { return r.presentation.value; },
                                 [](const AspectScores& a) { return a.presentation; });
    report.contribution = aspect([](const StructuredReview& r) { return r.contribution.value; },
                                 [](const AspectScores& a) { return a.contribution; });
    report.rating = aspect([](const StructuredReview& r) { return r.rating.value; },
                           [](const AspectScores& a) { return a.rating; });
    return report;
}

DecisionReport decision_metrics(const std::vector<std::optional<Decision>>& predicted,
                                const std::vector<std::optional<Decision>>& actual,
                                const std::vector<std::string>& reasons,
                                const std::vector<std::optional<std::string>>& meta_reviews,
                                const PairSimilarity& similarity) {
    if (predicted.size() != actual.size())
        throw InputError("decision_metrics: predicted and actual lists differ in length");
    std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        if (!predicted[i] || !actual[i]) continue;
        const bool pred_accept = *predicted[i] == Decision::Accept;
        const bool is_accept = *actual[i] == Decision::Accept;
        if (pred_accept && is_accept) ++tp;
        else if (pred_accept && !is_accept) ++fp;
        else if (!pred_accept && is_accept) ++fn;
        else ++tn;
    }
    DecisionReport report;
    report.counted = tp + fp + fn + tn;
    if (report.counted > 0) {
        report.accuracy = static_cast<double>(tp + tn) / static_cast<double>(report.counted);
        report.precision = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
        report.recall = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
        report.f1 = f1_of(report.recall, report.precision);
    }
    if (similarity) {
        double sum = 0.0;
        std::size_t n = 0;
        for (std::size_t i = 0; i < predicted.size(); ++i) {
            if (i >= meta_reviews.size() || !meta_reviews[i]) continue;
            if (i >= reasons.size() || reasons[i].empty()) continue;
            sum += similarity(reasons[i], *meta_reviews[i]);
            ++n;
        }
        if (n > 0) report.semantic_similarity = sum / static_cast<double>(n);
    }
    return report;
}

MetricsReport build_report(const std::string& dataset, const std::string& model_tag,
                           const std::vector<TextScore>& per_paper, const ScoreMseReport& scores,
                           const DecisionReport& decisions) {
    if (per_paper.empty()) throw InputError("build_report: no per-paper scores");
    MetricsReport report;
    report.dataset = dataset;
    report.model_tag = model_tag;
    report.paper_count = per_paper.size();
    report.scores = scores;
    report.decisions = decisions;

    const double n = static_cast<double>(per_paper.size());
    double tokens = 0.0;
    auto& mean = report.mean_text;
    for (const TextScore& s : per_paper) {
        mean.bleu += s.bleu / n;
        mean.rouge1.recall += s.rouge1.recall / n;
        mean.rouge1.precision += s.rouge1.precision / n;
        mean.rouge1.f1 += s.rouge1.f1 / n;
        mean.rouge2.recall += s.rouge2.recall / n;
        mean.rouge2.precision += s.rouge2.precision / n;
        mean.rouge2.f1 += s.rouge2.f1 / n;
        mean.rougeL.recall += s.rougeL.recall / n;
        mean.rougeL.precision += s.rougeL.precision / n;
        mean.rougeL.f1 += s.rougeL.f1 / n;
        tokens += static_cast<double>(s.token_count) / n;
    }
    mean.token_count = static_cast<std::size_t>(std::llround(tokens));
    return report;
}

std::vector<std::pair<std::string, double>> report_rows(const MetricsReport& report) {
    std::vector<std::pair<std::string, double>> rows;
    const TextScore& m = report.mean_text;
    rows.emplace_back("bleu", m.bleu);
    rows.emplace_back("rouge1_recall", m.rouge1.recall);
    rows.emplace_back("rouge2_recall", m.rouge2.recall);
    rows.emplace_back("rougeL_recall", m.rougeL.recall);
    rows.emplace_back("rouge1_f1", m.rouge1.f1);
    rows.emplace_back("rouge2_f1", m.rouge2.f1);
    rows.emplace_back("rougeL_f1", m.rougeL.f1);
    rows.emplace_back("tokens", static_cast<double>(m.token_count));
    auto aspect_rows = [&](const char* name, const AspectMse& a) {
        if (a.mse) rows.emplace_back(std::string("mse_") + name, *a.mse);
        rows.emplace_back(std::string("valid_") + name, a.valid_fraction);
    };
    aspect_rows("soundness", report.scores.soundness);
    aspect_rows("presentation", report.scores.presentation);
    aspect_rows("contribution", report.scores.contribution);
    aspect_rows("rating", report.scores.rating);
    if (report.decisions.counted > 0) {
        rows.emplace_back("decision_accuracy", report.decisions.accuracy);
        rows.emplace_back("decision_precision", report.decisions.precision);
        rows.emplace_back("decision_recall", report.decisions.recall);
        rows.emplace_back("decision_f1", report.decisions.f1);
    }
    if (report.decisions.semantic_similarity)
        rows.emplace_back("semantic_similarity_substitute", *report.decisions.semantic_similarity);
    return rows;
}

void write_report_rows(const std::string& path, const MetricsReport& report) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write report file: " + path);
    for (const auto& [metric, value] : report_rows(report)) {
        ordered_json doc;
        doc["dataset"] = report.dataset;
        doc["model_tag"] = report.model_tag;
        doc["metric"] = metric;
        doc["value"] = value;
        out << doc.dump() << '\n';
    }
}

std::map<std::string, double> read_report_rows(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open report file: " + path);
    std::map<std::string, double> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        const json doc = json::parse(line);
        rows[doc.at("metric").get<std::string>()] = doc.at("value").get<double>();
    }
    return rows;
}

namespace {

std::string pct(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", value * 100.0);
    return buf;
}

std::string fixed2(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", value);
    return buf;
}

}  // namespace

std::string render_report_table(const MetricsReport& report) {
    std::ostringstream out;
    const TextScore& m = report.mean_text;
    out << "dataset: " << report.dataset << "  model: " << report.model_tag
        << "  papers: " << report.paper_count << "\n";
    out << "  BLEU    R-1(r)  R-2(r)  R-L(r)  R-1(f)  R-2(f)  R-L(f)  Similarity  Tokens\n";
    char row[256];
    std::snprintf(row, sizeof(row), "  %-7s %-7s %-7s %-7s %-7s %-7s %-7s %-11s %zu\n",
                  pct(m.bleu).c_str(), pct(m.rouge1.recall).c_str(), pct(m.rouge2.recall).c_str(),
                  pct(m.rougeL.recall).c_str(), pct(m.rouge1.f1).c_str(), pct(m.rouge2.f1).c_str(),
                  pct(m.rougeL.f1).c_str(),
                  report.decisions.semantic_similarity
                      ? (pct(*report.decisions.semantic_similarity) + "*").c_str()
                      : "-",
                  m.token_count);
    out << row;

    auto mse_cell = [](const AspectMse& a) {
        if (!a.mse) return std::string("N/A (") + pct(a.valid_fraction) + "%)";
        return fixed2(*a.mse) + " (" + pct(a.valid_fraction) + "%)";
    };
    out << "  scores (MSE, valid%): soundness " << mse_cell(report.scores.soundness)
        << " | presentation " << mse_cell(report.scores.presentation) << " | contribution "
        << mse_cell(report.scores.contribution) << " | rating " << mse_cell(report.scores.rating)
        << "\n";
    if (report.decisions.counted > 0) {
        out << "  decisions: accuracy " << pct(report.decisions.accuracy) << "  precision "
            << pct(report.decisions.precision) << "  recall " << pct(report.decisions.recall)
            << "  f1 " << pct(report.decisions.f1) << "  (n=" << report.decisions.counted << ")\n";
    }
    if (report.decisions.semantic_similarity)
        out << "  * document-embedding cosine, substitute for BERTScore\n";
    return out.str();
}

}  // namespace sea
