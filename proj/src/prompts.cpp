#include "sea/prompts.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "sea/errors.hpp"
#include "sea/rng.hpp"

namespace sea {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

const char* const kStandardizeTemplate =
    R"(As an experienced academic paper reviewer, you are presented with different review contents for the same paper. Please analyze these contents carefully and consolidate them into a single review. The review should be organized into nine sections: Summary, Strengths, Weaknesses, Questions, Soundness, Presentation, Contribution, Rating and Paper Decision.
Below is a description of each section:
1. Summary: Combine the 'Summary' sections from all reviews into a cohesive summary, aiming for a length of about 100-150 words.
2. Strengths/Weaknesses/Questions: Combine the Strengths/Weaknesses/Questions sections from all reviews into a unified, cohesive bullet-point list that avoids redundancy while preserving the specific details and depth of each point.
3. Soundness/Presentation/Contribution: Aggregate the Contribution/Soundness/Presentation score from each review to determine a suitable overall score (the score must be an **integer**), then, match this integer score to the corresponding criterion from the list below and provide the result. For example, if the score is 3, the result should be '3 good'. The possible scores and their criteria are:
1 poor
2 fair
3 good
4 excellent
4. Rating: Aggregate the 'Rating' from each review to determine a suitable overall Rating (the Rating must be an **integer**), then, match this integer Rating to the corresponding criterion from the list below and provide the result. For example, if the Rating is 1, the result should be '1 strong reject'. The possible Ratings and their criteria are:
1 strong reject
2 reject, significant issues present
3 reject, not good enough
4 possibly reject, but has redeeming facets
5 marginally below the acceptance threshold
6 marginally above the acceptance threshold
7 accept, but needs minor improvements
8 accept, good paper
9 strong accept, excellent work
10 strong accept, should be highlighted at the conference
5. Paper Decision: It must include the Decision itself (Accept or Reject) and the reasons for this decision which is based on Meta-review, the criteria of originality, methodological soundness, significance of results, and clarity and logic of presentation, etc. Please ensure your Decision (Accept/Reject) matches the value of the 'Decision' key in the JSON, if present.

Here is the template for a review format, you must follow this format to output your review result:
**Summary:**
<Summary content>

**Strengths:**
<Strengths result>
**Weaknesses:**
<Weaknesses result>
**Questions:**
<Questions result>

**Soundness:**
<Soundness result>
**Presentation:**
<Presentation result>
**Contribution:**
<Contribution result>
**Rating:**
<Rating result>

**Paper Decision:**
- Decision: Accept/Reject
- Reasons: reasons content
)";

const char* const kEvaluateTemplate =
    R"(You are a highly experienced, conscientious, and fair academic reviewer. Please help me review this paper. The review should be organized into nine sections:
1. Summary: A summary of the paper in 100-150 words.
2. Strengths/Weaknesses/Questions: The Strengths/Weaknesses/Questions of paper, which should be listed in bullet points, with each point supported by specific examples from the article where possible.
3. Soundness/Contribution/Presentation: Rate the paper's Soundness/Contribution/Presentation, and match this score to the corresponding criterion from the list below and provide the result. The possible scores and their criteria are:
1 poor
2 fair
3 good
4 excellent
4. Rating: Give this paper an appropriate rating, match this rating to the corresponding criterion from the list below and provide the result. The possible Ratings and their criteria are:
1 strong reject
2 reject, significant issues present
3 reject, not good enough
4 possibly reject, but has redeeming facets
5 marginally below the acceptance threshold
6 marginally above the acceptance threshold
7 accept, but needs minor improvements
8 accept, good paper
9 strong accept, excellent work
10 strong accept, should be highlighted at the conference
5. Paper Decision: It must include the Decision itself (Accept or Reject) and the reasons for this decision which is based on the criteria of originality, methodological soundness, significance of results, and clarity and logic of presentation.

Here is the template for a review format, you must follow this format to output your review result:
**Summary:**
<Summary content>

**Strengths:**
<Strengths result>
**Weaknesses:**
<Weaknesses result>
**Questions:**
<Questions result>

**Soundness:**
<Soundness result>
**Presentation:**
<Presentation result>
**Contribution:**
<Contribution result>
**Rating:**
<Rating result>

**Paper Decision:**
- Decision: Accept/Reject
- Reasons: reasons content

Please ensure your feedback is objective and constructive. The paper is as follows: {{paper}}
)";

const char* const kSelfCorrectTemplate =
    R"(Note: a previous review generated for this paper received a mismatch score of {{score}}. The mismatch score measures how far the review's overall assessment deviates from the paper's content; a score close to zero means the review and the paper are consistent. Please re-read the paper carefully and generate a new review that is more consistent with the paper, in the same required format.
)";

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open template file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string rstrip(std::string s) {
    while (!s.empty() && (s.back() == '\n' || s.back() == '\r' || s.back() == ' ')) s.pop_back();
    return s;
}

}  // namespace

PromptKit::PromptKit()
    : standardize_(kStandardizeTemplate),
      evaluate_(kEvaluateTemplate),
      self_correct_(kSelfCorrectTemplate) {}

PromptKit PromptKit::from_directory(const std::string& dir) {
    PromptKit kit;
    kit.standardize_ = read_file(dir + "/standardize.txt");
    kit.evaluate_ = read_file(dir + "/evaluate.txt");
    kit.self_correct_ = read_file(dir + "/self_correct.txt");
    return kit;
}

const std::string& PromptKit::template_body(TemplateId id) const {
    switch (id) {
        case TemplateId::Standardize: return standardize_;
        case TemplateId::Evaluate: return evaluate_;
        default: return self_correct_;
    }
}

std::string serialize_review_sections(const RawReview& review) {
    static const std::pair<const char*, const char*> kOrder[] = {
        {"summary", "Summary"},       {"strengths", "Strengths"},
        {"weaknesses", "Weaknesses"}, {"questions", "Questions"},
        {"other", "Other"},
    };
    std::ostringstream out;
    for (const auto& [key, title] : kOrder) {
        auto it = review.sections.find(key);
        if (it == review.sections.end()) continue;
        out << title << ": " << it->second << "\n";
    }
    return out.str();
}

std::string serialize_reviews_block(const std::vector<RawReview>& reviews) {
    std::ostringstream out;
    for (std::size_t i = 0; i < reviews.size(); ++i) {
        const RawReview& r = reviews[i];
        if (i > 0) out << "\n";
        out << "Reviewer " << (i + 1) << ":\n";
        out << serialize_review_sections(r);
        if (r.soundness) out << "Soundness: " << *r.soundness << "\n";
        if (r.presentation) out << "Presentation: " << *r.presentation << "\n";
        if (r.contribution) out << "Contribution: " << *r.contribution << "\n";
        out << "Rating: " << r.rating << "\n";
        out << "Confidence: " << r.confidence << "\n";
    }
    return out.str();
}

std::string PromptKit::render_standardize(const std::vector<RawReview>& reviews) const {
    if (reviews.empty()) throw InputError("render_standardize: empty review list");
    return standardize_ + "\n" + serialize_reviews_block(reviews);
}

std::string PromptKit::render_evaluate(std::string_view paper_body, bool* truncated) const {
    if (paper_body.empty()) throw InputError("render_evaluate: empty paper body");
    bool was_truncated = false;
    std::string body = truncate_tokens(paper_body, context_budget_, &was_truncated);
    if (was_truncated) {
        body += "\n";
        body += kTruncationMarker;
    }
    if (truncated != nullptr) *truncated = was_truncated;
    return render_placeholder(evaluate_, "paper", body);
}

std::string PromptKit::render_self_correct(std::string_view paper_body, double prev_score) const {
    if (!std::isfinite(prev_score))
        throw InputError("render_self_correct: mismatch score is not finite");
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", prev_score);
    return render_evaluate(paper_body) + "\n" +
           render_placeholder(self_correct_, "score", buf);
}

std::string PromptKit::evaluate_instruction() const {
    return rstrip(render_placeholder(evaluate_, "paper", ""));
}

SftBuildResult build_standardize_sft(const std::vector<StandardizeSftItem>& items,
                                     const PromptKit& kit) {
    SftBuildResult result;
    for (const StandardizeSftItem& item : items) {
        FormatReport report = validate(item.teacher_output);
        if (!report.is_valid) {
            result.rejections.push_back({item.item_id, std::move(report)});
            continue;
        }
        result.triplets.push_back({kit.template_body(TemplateId::Standardize),
                                   serialize_reviews_block(item.reviews), item.teacher_output});
    }
    return result;
}

SftBuildResult build_evaluate_sft(const std::vector<EvaluateSftItem>& items, const PromptKit& kit) {
    SftBuildResult result;
    for (const EvaluateSftItem& item : items) {
        FormatReport report = validate(item.standardized_review);
        if (!report.is_valid) {
            result.rejections.push_back({item.item_id, std::move(report)});
            continue;
        }
        result.triplets.push_back(
            {kit.evaluate_instruction(), item.paper_body, item.standardized_review});
    }
    return result;
}

std::vector<std::string> sample_for_distillation(const std::vector<std::string>& ids,
                                                 double fraction, std::uint64_t seed) {
    if (!(fraction > 0.0 && fraction <= 1.0))
        throw InputError("distillation fraction must be in (0, 1]");
    const std::size_t k =
        static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(ids.size())));
    std::vector<std::size_t> order(ids.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng rng(seed);
    rng.shuffle(order);
    std::vector<char> chosen(ids.size(), 0);
    for (std::size_t i = 0; i < k && i < order.size(); ++i) chosen[order[i]] = 1;
    std::vector<std::string> out;
    out.reserve(k);
    for (std::size_t i = 0; i < ids.size(); ++i)
        if (chosen[i]) out.push_back(ids[i]);
    return out;
}

void write_sft(const std::string& path, const std::vector<SftTriplet>& triplets) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write SFT file: " + path);
    for (const SftTriplet& t : triplets) {
        ordered_json doc;
        doc["instruction"] = t.instruction;
        doc["input"] = t.input;
        doc["output"] = t.output;
        out << doc.dump() << '\n';
    }
}

std::vector<SftTriplet> read_sft(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open SFT file: " + path);
    std::vector<SftTriplet> out;
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
        out.push_back({doc.value("instruction", std::string{}), doc.value("input", std::string{}),
                       doc.value("output", std::string{})});
    }
    return out;
}

void write_rejections(const std::string& path, const std::vector<SftRejection>& rejections) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write rejection report: " + path);
    for (const SftRejection& r : rejections) {
        ordered_json doc;
        doc["item_id"] = r.item_id;
        doc["missing_sections"] = r.report.missing_sections;
        doc["malformed_scores"] = r.report.malformed_scores;
        out << doc.dump() << '\n';
    }
}

}  // namespace sea
