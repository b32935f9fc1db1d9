#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sea/text.hpp"

namespace sea {

enum class Decision { Accept, Reject };

std::string to_string(Decision d);
std::optional<Decision> decision_from_string(std::string_view s);

// One reviewer's contribution to a paper. Section names are normalized to
// the canonical set {summary, strengths, weaknesses, questions, other}.
struct RawReview {
    std::string reviewer_id;
    std::map<std::string, std::string> sections;
    int rating = 0;      // [1, 10]
    int confidence = 0;  // [1, 5]
    std::optional<int> soundness;      // [1, 4]
    std::optional<int> presentation;   // [1, 4]
    std::optional<int> contribution;   // [1, 4]

    bool operator==(const RawReview&) const = default;
};

struct PaperRecord {
    std::string paper_id;
    std::string venue;
    int year = 0;
    std::string title;
    std::string body;  // parsed paper text, LaTeX math preserved
    std::optional<Decision> decision;
    std::optional<std::string> meta_review;
    std::vector<RawReview> reviews;

    bool operator==(const PaperRecord&) const = default;
};

struct CorpusStats {
    std::size_t paper_count = 0;
    std::size_t review_count = 0;
    double mean_tokens_per_paper = 0.0;
    double mean_tokens_per_review = 0.0;
    // Fraction of accepted papers among those carrying a decision.
    double accept_fraction = 0.0;
    std::size_t decided_count = 0;
};

struct DatasetSplit {
    std::vector<std::string> train_ids;
    std::vector<std::string> test_ids;
    std::uint64_t seed = 0;
    double ratio = 0.0;

    bool operator==(const DatasetSplit&) const = default;
};

// Maps venue-specific section titles onto the canonical section names.
// Unknown titles land in "other".
class VenueProfiles {
public:
    // Profiles for the venues shipped with the toolkit.
    static VenueProfiles builtin();
    static VenueProfiles load(const std::string& path);

    // Canonical name for a raw section title under the given venue profile.
    std::string normalize(const std::string& venue, const std::string& raw_name) const;

    bool has_profile(const std::string& venue) const;

private:
    // venue -> (normalized raw title -> canonical name)
    std::map<std::string, std::map<std::string, std::string>> profiles_;
};

struct IngestResult {
    std::vector<PaperRecord> records;
    std::size_t skipped = 0;  // records dropped over missing/invalid review scores
};

// Reads a line-delimited corpus dump and normalizes it. Throws InputError
// naming the line number on a malformed line. Records whose reviews lack a
// usable rating/confidence are skipped and counted.
IngestResult ingest(const std::string& path, const std::string& venue_profile,
                    const VenueProfiles& profiles = VenueProfiles::builtin());

CorpusStats stats(const std::vector<PaperRecord>& records,
                  const TokenCounter& tokens = whitespace_token_count);

// Rating-stratified split. Records are bucketed by the rounded mean rating
// of their reviews; each bucket contributes round(ratio * size) records to
// train via a seeded shuffle. A bucket of size 1 goes to train.
DatasetSplit stratified_split(const std::vector<PaperRecord>& records, double ratio,
                              std::uint64_t seed);

// Serialization of the documented file formats.
std::string record_to_json_line(const PaperRecord& record);
void write_corpus(const std::string& path, const std::vector<PaperRecord>& records);
void write_split(const std::string& path, const DatasetSplit& split);
DatasetSplit read_split(const std::string& path);
void write_stats(const std::string& path, const CorpusStats& stats);

// Helpers over splits.
std::vector<PaperRecord> select_records(const std::vector<PaperRecord>& records,
                                        const std::vector<std::string>& ids);

}  // namespace sea
