#include "sea/standardizer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "sea/batch.hpp"
#include "sea/metrics.hpp"

namespace sea {

using nlohmann::json;
using nlohmann::ordered_json;

StandardizeOutcome standardize_one(const std::vector<RawReview>& reviews, Gateway& gateway,
                                   const EndpointProfile& profile, const GenerationConfig& config,
                                   const PromptKit& kit, int max_attempts) {
    if (max_attempts < 1) throw InputError("standardize_one: max_attempts must be >= 1");
    const std::string prompt = kit.render_standardize(reviews);
    FormatReport last;
    for (int attempt = 1; attempt <= max_attempts; ++attempt) {
        std::string text = gateway.complete(profile, config, prompt);
        last = validate(text);
        if (last.is_valid) {
            StandardizeOutcome outcome;
            outcome.review = parse(text);
            outcome.raw_text = std::move(text);
            outcome.attempts = attempt;
            return outcome;
        }
    }
    throw StandardizationError("standardization failed format validation after " +
                                   std::to_string(max_attempts) + " attempts",
                               std::move(last), max_attempts);
}

CorpusStandardization standardize_corpus(const std::vector<PaperRecord>& train, Gateway& gateway,
                                         const EndpointProfile& profile,
                                         const GenerationConfig& config, const PromptKit& kit,
                                         int max_attempts, int parallelism) {
    struct Slot {
        std::optional<StandardizeOutcome> outcome;
        std::string error;
        std::optional<FormatReport> report;
    };
    std::vector<Slot> slots(train.size());
    detail::parallel_for_indexed(train.size(), parallelism, [&](std::size_t i) {
        try {
            slots[i].outcome =
                standardize_one(train[i].reviews, gateway, profile, config, kit, max_attempts);
        } catch (const StandardizationError& e) {
            slots[i].error = e.what();
            slots[i].report = e.last_report;
        } catch (const Error& e) {
            slots[i].error = e.what();
        }
    });

    CorpusStandardization result;
    for (std::size_t i = 0; i < train.size(); ++i) {
        if (slots[i].outcome) {
            result.outputs.emplace(train[i].paper_id, std::move(*slots[i].outcome));
        } else {
            result.failures.push_back(
                {train[i].paper_id, std::move(slots[i].error), std::move(slots[i].report)});
        }
    }
    std::sort(result.failures.begin(), result.failures.end(),
              [](const auto& a, const auto& b) { return a.paper_id < b.paper_id; });
    return result;
}

void write_standardized(const std::string& path, const CorpusStandardization& result) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write standardized output: " + path);
    for (const auto& [paper_id, outcome] : result.outputs) {
        ordered_json doc;
        doc["paper_id"] = paper_id;
        doc["review_text"] = outcome.raw_text;
        doc["attempts"] = outcome.attempts;
        out << doc.dump() << '\n';
    }
}

std::map<std::string, std::string> read_standardized(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open standardized output: " + path);
    std::map<std::string, std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        const json doc = json::parse(line);
        out[doc.at("paper_id").get<std::string>()] = doc.at("review_text").get<std::string>();
    }
    return out;
}

void write_standardization_failures(const std::string& path,
                                    const CorpusStandardization& result) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write failure report: " + path);
    for (const auto& failure : result.failures) {
        ordered_json doc;
        doc["paper_id"] = failure.paper_id;
        doc["missing_sections"] =
            failure.report ? failure.report->missing_sections : std::vector<std::string>{};
        doc["malformed_scores"] =
            failure.report ? failure.report->malformed_scores : std::vector<std::string>{};
        if (!failure.error.empty()) doc["error"] = failure.error;
        out << doc.dump() << '\n';
    }
}

namespace {

// Shares of the combined n-gram mass: overlap m/(R+C-m), reference-only
// (R-m)/(R+C-m), candidate-only (C-m)/(R+C-m).
OverlapPart decompose(std::size_t matches, std::size_t ref_total, std::size_t cand_total) {
    OverlapPart part;
    const double denom = static_cast<double>(ref_total + cand_total - matches);
    if (denom <= 0.0) return part;
    part.overlap = static_cast<double>(matches) / denom;
    part.reference_exclusive = static_cast<double>(ref_total - matches) / denom;
    part.candidate_exclusive = static_cast<double>(cand_total - matches) / denom;
    return part;
}

std::size_t ngram_total(std::size_t tokens, int n) {
    return tokens >= static_cast<std::size_t>(n) ? tokens - n + 1 : 0;
}

}  // namespace

OverlapDecomposition content_overlap(const StructuredReview& reference,
                                     const StructuredReview& candidate) {
    const std::vector<std::string> ref = metric_tokens(concat_sections(reference));
    const std::vector<std::string> cand = metric_tokens(concat_sections(candidate));

    OverlapDecomposition out;
    for (int n = 1; n <= 2; ++n) {
        const RougeScore score = rouge_n_tokens(cand, ref, n);
        const std::size_t ref_total = ngram_total(ref.size(), n);
        const std::size_t cand_total = ngram_total(cand.size(), n);
        const std::size_t matches =
            static_cast<std::size_t>(std::llround(score.recall * static_cast<double>(ref_total)));
        (n == 1 ? out.rouge1 : out.rouge2) = decompose(matches, ref_total, cand_total);
    }
    const RougeScore l = rouge_l_tokens(cand, ref);
    const std::size_t lcs =
        static_cast<std::size_t>(std::llround(l.recall * static_cast<double>(ref.size())));
    out.rougeL = decompose(lcs, ref.size(), cand.size());
    return out;
}

}  // namespace sea
