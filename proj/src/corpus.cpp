#include "sea/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "sea/errors.hpp"
#include "sea/rng.hpp"

namespace sea {

using nlohmann::json;
using nlohmann::ordered_json;

std::string to_string(Decision d) { return d == Decision::Accept ? "Accept" : "Reject"; }

std::optional<Decision> decision_from_string(std::string_view s) {
    if (s == "Accept") return Decision::Accept;
    if (s == "Reject") return Decision::Reject;
    return std::nullopt;
}

namespace {

const char* const kCanonicalSections[] = {"summary", "strengths", "weaknesses",
                                          "questions", "other"};

bool is_canonical(const std::string& name) {
    for (const char* c : kCanonicalSections)
        if (name == c) return true;
    return false;
}

// Raw section titles are matched after lowercasing and underscoring spaces.
std::string normalize_title(const std::string& raw) {
    std::string out = to_lower(trim(raw));
    std::replace(out.begin(), out.end(), ' ', '_');
    return out;
}

std::map<std::string, std::string> default_aliases() {
    return {
        {"summary", "summary"},
        {"strengths", "strengths"},
        {"strength", "strengths"},
        {"weaknesses", "weaknesses"},
        {"weakness", "weaknesses"},
        {"questions", "questions"},
        {"question", "questions"},
        {"other", "other"},
    };
}

}  // namespace

VenueProfiles VenueProfiles::builtin() {
    VenueProfiles p;
    p.profiles_["default"] = default_aliases();

    // PeerRead-style dumps: one comments blob plus aspect fields.
    std::map<std::string, std::string> peerread = default_aliases();
    peerread["comments"] = "other";
    peerread["general_comments"] = "other";
    p.profiles_["CONLL-16"] = peerread;
    p.profiles_["ACL-17"] = peerread;

    // NLPeer-style dumps.
    std::map<std::string, std::string> nlpeer = default_aliases();
    nlpeer["paper_summary"] = "summary";
    nlpeer["summary_of_strengths"] = "strengths";
    nlpeer["summary_of_weaknesses"] = "weaknesses";
    nlpeer["comments,_suggestions_and_typos"] = "other";
    nlpeer["reasons_to_accept"] = "strengths";
    nlpeer["reasons_to_reject"] = "weaknesses";
    nlpeer["questions_for_the_authors"] = "questions";
    p.profiles_["COLING-20"] = nlpeer;
    p.profiles_["ARR-22"] = nlpeer;

    // OpenReview venues.
    std::map<std::string, std::string> neurips = default_aliases();
    neurips["limitations"] = "other";
    neurips["main_review"] = "other";
    p.profiles_["NeurIPS-16-22"] = neurips;
    p.profiles_["NeurIPS-23"] = neurips;

    std::map<std::string, std::string> iclr = default_aliases();
    iclr["summary_of_the_paper"] = "summary";
    iclr["summary_of_the_review"] = "other";
    iclr["strength_and_weaknesses"] = "other";
    iclr["clarity,_quality,_novelty_and_reproducibility"] = "other";
    iclr["main_review"] = "other";
    p.profiles_["ICLR-17-23"] = iclr;
    p.profiles_["ICLR-24"] = iclr;
    return p;
}

VenueProfiles VenueProfiles::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open venue profile file: " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw InputError("invalid venue profile file " + path + ": " + e.what());
    }
    VenueProfiles p = builtin();
    for (const auto& [venue, table] : doc.items()) {
        auto& profile = p.profiles_[venue];
        if (profile.empty()) profile = default_aliases();
        for (const auto& [raw, canonical] : table.items()) {
            if (!is_canonical(canonical.get<std::string>()))
                throw InputError("venue profile " + venue + " maps '" + raw +
                                 "' to unknown section '" + canonical.get<std::string>() + "'");
            profile[normalize_title(raw)] = canonical.get<std::string>();
        }
    }
    return p;
}

bool VenueProfiles::has_profile(const std::string& venue) const {
    return profiles_.count(venue) > 0;
}

std::string VenueProfiles::normalize(const std::string& venue, const std::string& raw_name) const {
    const std::string key = normalize_title(raw_name);
    auto it = profiles_.find(venue);
    if (it != profiles_.end()) {
        auto hit = it->second.find(key);
        if (hit != it->second.end()) return hit->second;
    }
    auto def = profiles_.find("default");
    if (def != profiles_.end()) {
        auto hit = def->second.find(key);
        if (hit != def->second.end()) return hit->second;
    }
    return "other";
}

namespace {

// Pulls an integer score out of a JSON value, accepting "7" as well as 7.
std::optional<int> read_score(const json& v) {
    if (v.is_number_integer()) return v.get<int>();
    if (v.is_string()) {
        try {
            std::size_t pos = 0;
            const int n = std::stoi(v.get<std::string>(), &pos);
            if (pos == v.get<std::string>().size()) return n;
        } catch (...) {
        }
    }
    return std::nullopt;
}

struct ReviewParse {
    RawReview review;
    bool usable = false;  // rating and confidence present and in range
};

ReviewParse parse_review(const json& jr, const std::string& venue,
                         const VenueProfiles& profiles) {
    ReviewParse out;
    if (!jr.is_object()) return out;
    RawReview& r = out.review;
    r.reviewer_id = jr.value("reviewer_id", std::string{});
    if (jr.contains("sections") && jr["sections"].is_object()) {
        for (const auto& [raw, text] : jr["sections"].items()) {
            if (!text.is_string()) continue;
            const std::string canonical = profiles.normalize(venue, raw);
            std::string& slot = r.sections[canonical];
            if (!slot.empty()) slot += "\n\n";
            slot += text.get<std::string>();
        }
    }
    std::optional<int> rating;
    if (jr.contains("rating")) rating = read_score(jr["rating"]);
    std::optional<int> confidence;
    if (jr.contains("confidence")) confidence = read_score(jr["confidence"]);
    if (!rating || *rating < 1 || *rating > 10) return out;
    if (!confidence || *confidence < 1 || *confidence > 5) return out;
    r.rating = *rating;
    r.confidence = *confidence;
    for (const char* aspect : {"soundness", "presentation", "contribution"}) {
        if (!jr.contains(aspect)) continue;
        const auto score = read_score(jr[aspect]);
        if (!score || *score < 1 || *score > 4) return out;
        if (std::string_view(aspect) == "soundness") r.soundness = *score;
        if (std::string_view(aspect) == "presentation") r.presentation = *score;
        if (std::string_view(aspect) == "contribution") r.contribution = *score;
    }
    out.usable = true;
    return out;
}

}  // namespace

IngestResult ingest(const std::string& path, const std::string& venue_profile,
                    const VenueProfiles& profiles) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open corpus file: " + path);

    IngestResult result;
    std::unordered_set<std::string> seen_ids;
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
        if (!doc.is_object() || !doc.contains("paper_id") || !doc["paper_id"].is_string())
            throw InputError("line " + std::to_string(line_no) + ": missing paper_id");
        if (!doc.contains("body") || !doc["body"].is_string() ||
            doc["body"].get<std::string>().empty())
            throw InputError("line " + std::to_string(line_no) + ": missing or empty body");
        if (!doc.contains("reviews") || !doc["reviews"].is_array())
            throw InputError("line " + std::to_string(line_no) + ": missing reviews array");

        PaperRecord record;
        record.paper_id = doc["paper_id"].get<std::string>();
        if (!seen_ids.insert(record.paper_id).second)
            throw InputError("line " + std::to_string(line_no) + ": duplicate paper_id '" +
                             record.paper_id + "'");
        record.venue = doc.value("venue", venue_profile);
        record.year = doc.value("year", 0);
        record.title = doc.value("title", std::string{});
        record.body = doc["body"].get<std::string>();
        if (doc.contains("decision") && !doc["decision"].is_null()) {
            if (!doc["decision"].is_string())
                throw InputError("line " + std::to_string(line_no) + ": decision must be a string");
            const auto d = decision_from_string(doc["decision"].get<std::string>());
            if (!d)
                throw InputError("line " + std::to_string(line_no) + ": decision must be Accept or Reject");
            record.decision = d;
        }
        if (doc.contains("meta_review") && doc["meta_review"].is_string())
            record.meta_review = doc["meta_review"].get<std::string>();

        bool all_usable = true;
        for (const json& jr : doc["reviews"]) {
            ReviewParse parsed = parse_review(jr, venue_profile, profiles);
            if (!parsed.usable) {
                all_usable = false;
                break;
            }
            record.reviews.push_back(std::move(parsed.review));
        }
        if (!all_usable) {
            ++result.skipped;
            continue;
        }
        result.records.push_back(std::move(record));
    }
    return result;
}

CorpusStats stats(const std::vector<PaperRecord>& records, const TokenCounter& tokens) {
    if (records.empty()) throw InputError("stats: empty record list");
    CorpusStats s;
    s.paper_count = records.size();
    std::size_t paper_tokens = 0;
    std::size_t review_tokens = 0;
    std::size_t accepted = 0;
    for (const PaperRecord& r : records) {
        paper_tokens += tokens(r.body);
        s.review_count += r.reviews.size();
        for (const RawReview& review : r.reviews)
            for (const auto& [name, text] : review.sections) review_tokens += tokens(text);
        if (r.decision) {
            ++s.decided_count;
            if (*r.decision == Decision::Accept) ++accepted;
        }
    }
    s.mean_tokens_per_paper = static_cast<double>(paper_tokens) / static_cast<double>(s.paper_count);
    s.mean_tokens_per_review =
        s.review_count == 0 ? 0.0
                            : static_cast<double>(review_tokens) / static_cast<double>(s.review_count);
    s.accept_fraction =
        s.decided_count == 0 ? 0.0 : static_cast<double>(accepted) / static_cast<double>(s.decided_count);
    return s;
}

DatasetSplit stratified_split(const std::vector<PaperRecord>& records, double ratio,
                              std::uint64_t seed) {
    if (!(ratio > 0.0 && ratio < 1.0)) throw InputError("split ratio must be in (0, 1)");
    for (const PaperRecord& r : records)
        if (r.reviews.empty())
            throw InputError("record '" + r.paper_id + "' has no reviews to stratify on");

    // Bucket indices by the rounded mean rating.
    std::map<long, std::vector<std::size_t>> buckets;
    for (std::size_t i = 0; i < records.size(); ++i) {
        double sum = 0.0;
        for (const RawReview& review : records[i].reviews) sum += review.rating;
        const long key = std::lround(sum / static_cast<double>(records[i].reviews.size()));
        buckets[key].push_back(i);
    }

    Rng rng(seed);
    std::vector<char> in_train(records.size(), 0);
    for (auto& [key, indices] : buckets) {
        rng.shuffle(indices);
        std::size_t n_train =
            indices.size() == 1
                ? 1
                : static_cast<std::size_t>(std::llround(ratio * static_cast<double>(indices.size())));
        for (std::size_t i = 0; i < n_train && i < indices.size(); ++i) in_train[indices[i]] = 1;
    }

    DatasetSplit split;
    split.seed = seed;
    split.ratio = ratio;
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (in_train[i])
            split.train_ids.push_back(records[i].paper_id);
        else
            split.test_ids.push_back(records[i].paper_id);
    }
    return split;
}

namespace {

ordered_json review_to_json(const RawReview& r) {
    ordered_json jr;
    jr["reviewer_id"] = r.reviewer_id;
    ordered_json sections = ordered_json::object();
    for (const char* name : kCanonicalSections) {
        auto it = r.sections.find(name);
        if (it != r.sections.end()) sections[name] = it->second;
    }
    jr["sections"] = std::move(sections);
    jr["rating"] = r.rating;
    jr["confidence"] = r.confidence;
    if (r.soundness) jr["soundness"] = *r.soundness;
    if (r.presentation) jr["presentation"] = *r.presentation;
    if (r.contribution) jr["contribution"] = *r.contribution;
    return jr;
}

}  // namespace

std::string record_to_json_line(const PaperRecord& record) {
    ordered_json doc;
    doc["paper_id"] = record.paper_id;
    doc["venue"] = record.venue;
    doc["year"] = record.year;
    doc["title"] = record.title;
    doc["body"] = record.body;
    if (record.decision) doc["decision"] = to_string(*record.decision);
    if (record.meta_review) doc["meta_review"] = *record.meta_review;
    ordered_json reviews = ordered_json::array();
    for (const RawReview& r : record.reviews) reviews.push_back(review_to_json(r));
    doc["reviews"] = std::move(reviews);
    return doc.dump();
}

void write_corpus(const std::string& path, const std::vector<PaperRecord>& records) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write corpus file: " + path);
    for (const PaperRecord& r : records) out << record_to_json_line(r) << '\n';
}

void write_split(const std::string& path, const DatasetSplit& split) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write split file: " + path);
    ordered_json doc;
    doc["seed"] = split.seed;
    doc["ratio"] = split.ratio;
    doc["train_ids"] = split.train_ids;
    doc["test_ids"] = split.test_ids;
    out << doc.dump(2) << '\n';
}

DatasetSplit read_split(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open split file: " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw InputError("invalid split file " + path + ": " + e.what());
    }
    DatasetSplit split;
    split.seed = doc.value("seed", 0ull);
    split.ratio = doc.value("ratio", 0.0);
    split.train_ids = doc.value("train_ids", std::vector<std::string>{});
    split.test_ids = doc.value("test_ids", std::vector<std::string>{});
    return split;
}

void write_stats(const std::string& path, const CorpusStats& stats) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write stats file: " + path);
    ordered_json doc;
    doc["paper_count"] = stats.paper_count;
    doc["review_count"] = stats.review_count;
    doc["mean_tokens_per_paper"] = stats.mean_tokens_per_paper;
    doc["mean_tokens_per_review"] = stats.mean_tokens_per_review;
    doc["accept_fraction"] = stats.accept_fraction;
    doc["decided_count"] = stats.decided_count;
    out << doc.dump(2) << '\n';
}

std::vector<PaperRecord> select_records(const std::vector<PaperRecord>& records,
                                        const std::vector<std::string>& ids) {
    std::map<std::string, const PaperRecord*> by_id;
    for (const PaperRecord& r : records) by_id[r.paper_id] = &r;
    std::vector<PaperRecord> out;
    out.reserve(ids.size());
    for (const std::string& id : ids) {
        auto it = by_id.find(id);
        if (it == by_id.end()) throw InputError("split references unknown paper_id '" + id + "'");
        out.push_back(*it->second);
    }
    return out;
}

}  // namespace sea
