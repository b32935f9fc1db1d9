#include "sea/reviewer.hpp"

#include <algorithm>
#include <fstream>

#include <nlohmann/json.hpp>

#include "sea/batch.hpp"

namespace sea {

using nlohmann::json;
using nlohmann::ordered_json;

GeneratedReview generate_with_prompt(Gateway& gateway, const EndpointProfile& profile,
                                     const GenerationConfig& config, const std::string& prompt,
                                     int max_attempts, const TokenCounter& tokens) {
    if (prompt.empty()) throw InputError("generate_with_prompt: empty prompt");
    if (max_attempts < 1) throw InputError("generate_with_prompt: max_attempts must be >= 1");
    FormatReport last;
    for (int attempt = 1; attempt <= max_attempts; ++attempt) {
        std::string text = gateway.complete(profile, config, prompt);
        last = validate(text);
        if (last.is_valid) {
            GeneratedReview out;
            out.review = parse(text);
            out.token_count = tokens(text);
            out.raw_text = std::move(text);
            out.attempts = attempt;
            return out;
        }
    }
    throw GenerationError("generation failed format validation after " +
                              std::to_string(max_attempts) + " attempts",
                          std::move(last), max_attempts);
}

GeneratedReview generate_review(Gateway& gateway, const EndpointProfile& profile,
                                const GenerationConfig& config, const PromptKit& kit,
                                const std::string& paper_body, int max_attempts,
                                const TokenCounter& tokens) {
    if (paper_body.empty()) throw InputError("generate_review: empty paper body");
    return generate_with_prompt(gateway, profile, config, kit.render_evaluate(paper_body),
                                max_attempts, tokens);
}

std::vector<ReviewBatchEntry> generate_corpus(const std::vector<PaperRecord>& records,
                                              Gateway& gateway, const EndpointProfile& profile,
                                              const GenerationConfig& config, const PromptKit& kit,
                                              int max_attempts, int parallelism,
                                              const TokenCounter& tokens) {
    std::vector<ReviewBatchEntry> entries(records.size());
    detail::parallel_for_indexed(records.size(), parallelism, [&](std::size_t i) {
        ReviewBatchEntry& entry = entries[i];
        entry.paper_id = records[i].paper_id;
        entry.model_tag = profile.name;
        try {
            entry.result = generate_review(gateway, profile, config, kit, records[i].body,
                                           max_attempts, tokens);
        } catch (const GenerationError& e) {
            entry.error = e.what();
            entry.failure_report = e.last_report;
        } catch (const Error& e) {
            entry.error = e.what();
        }
    });
    std::sort(entries.begin(), entries.end(),
              [](const ReviewBatchEntry& a, const ReviewBatchEntry& b) {
                  return a.paper_id < b.paper_id;
              });
    return entries;
}

void write_generation_batch(const std::string& path,
                            const std::vector<ReviewBatchEntry>& entries) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write generation batch: " + path);
    for (const ReviewBatchEntry& e : entries) {
        ordered_json doc;
        doc["paper_id"] = e.paper_id;
        doc["model_tag"] = e.model_tag;
        if (e.result) {
            doc["review_text"] = e.result->raw_text;
            doc["attempts"] = e.result->attempts;
            doc["token_count"] = e.result->token_count;
        } else {
            doc["error"] = e.error;
            if (e.failure_report) {
                doc["missing_sections"] = e.failure_report->missing_sections;
                doc["malformed_scores"] = e.failure_report->malformed_scores;
            }
        }
        out << doc.dump() << '\n';
    }
}

std::vector<GenerationRow> read_generation_batch(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open generation batch: " + path);
    std::vector<GenerationRow> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        json doc;
        try {
            doc = json::parse(line);
        } catch (const json::exception& e) {
            throw InputError("line " + std::to_string(line_no) + ": invalid JSON: " + e.what());
        }
        GenerationRow row;
        row.paper_id = doc.value("paper_id", std::string{});
        row.model_tag = doc.value("model_tag", std::string{});
        if (doc.contains("review_text")) row.review_text = doc["review_text"].get<std::string>();
        row.attempts = doc.value("attempts", 0);
        row.token_count = doc.value("token_count", 0ull);
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace sea
