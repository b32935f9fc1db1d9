#include "sea/mock.hpp"

#include <chrono>
#include <cmath>
#include <sstream>
#include <thread>

#include "sea/format.hpp"
#include "sea/rng.hpp"

namespace sea {

EmbeddingVector hash_embedding(std::string_view text, std::size_t dim, std::uint64_t seed) {
    Rng rng(fnv1a64(text) ^ (seed * 0x9e3779b97f4a7c15ull + 0x2545f4914f6cdd1dull));
    EmbeddingVector v;
    v.values.resize(dim);
    double norm = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
        v.values[i] = rng.gaussian();
        norm += v.values[i] * v.values[i];
    }
    norm = std::sqrt(norm);
    if (norm == 0.0) {
        v.values[0] = 1.0;
        return v;
    }
    for (double& x : v.values) x /= norm;
    return v;
}

std::string ScriptedBackend::complete(const EndpointProfile&, const GenerationConfig&,
                                      const std::string&) {
    InstrumentedBackend::Entry entry(*this);
    Entry::Kind kind;
    std::string text;
    {
        std::lock_guard lock(mutex_);
        if (next_ >= script_.size())
            throw Error("scripted backend: script exhausted after " +
                        std::to_string(script_.size()) + " calls");
        kind = script_[next_].kind;
        text = script_[next_].text;
        ++next_;
    }
    switch (kind) {
        case Entry::Kind::TransportFailure: throw TransportError("scripted transport failure");
        case Entry::Kind::Empty: return "";
        default: return text;
    }
}

std::vector<EmbeddingVector> ScriptedBackend::embed(const EndpointProfile&,
                                                    const std::vector<std::string>& texts) {
    InstrumentedBackend::Entry entry(*this);
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (const std::string& t : texts) out.push_back(hash_embedding(t, embed_dim_, embed_seed_));
    return out;
}

namespace {

const char* const kTopics[] = {"representation learning", "graph optimization",
                               "sequence modeling",       "sparse retrieval",
                               "robust estimation",       "curriculum sampling",
                               "posterior calibration",   "structured decoding"};

const char* const kArtifacts[] = {"benchmark", "ablation", "proof sketch", "dataset",
                                  "training recipe", "error analysis"};

std::string pick(const char* const* table, std::size_t size, std::uint64_t h, int shift) {
    return table[(h >> shift) % size];
}

}  // namespace

std::string TemplateFillerBackend::filled_review(std::uint64_t h) {
    const int soundness = 1 + static_cast<int>((h >> 2) % 4);
    const int presentation = 1 + static_cast<int>((h >> 10) % 4);
    const int contribution = 1 + static_cast<int>((h >> 18) % 4);
    const int rating = 1 + static_cast<int>((h >> 26) % 10);
    const bool accept = rating >= 6;
    const std::string topic = pick(kTopics, 8, h, 34);
    const std::string artifact = pick(kArtifacts, 6, h, 40);
    const int extra_bullets = static_cast<int>((h >> 46) % 3);

    std::ostringstream out;
    out << "**Summary:**\n";
    out << "The paper studies " << topic << " and proposes a method built around a new "
        << artifact << ". The authors motivate the problem, describe the approach in detail, "
        << "and report experiments against several baselines. The writing follows a standard "
        << "structure and the claims are scoped to the presented setting.\n\n";
    out << "**Strengths:**\n";
    out << "- The treatment of " << topic << " is systematic and easy to follow.\n";
    out << "- The included " << artifact << " supports the main claims.\n";
    for (int i = 0; i < extra_bullets; ++i)
        out << "- Additional experiments in section " << (3 + i) << " strengthen the empirical case.\n";
    out << "\n**Weaknesses:**\n";
    out << "- The comparison to prior work on " << topic << " is incomplete.\n";
    out << "- Some design choices around the " << artifact << " are not justified.\n";
    out << "\n**Questions:**\n";
    out << "- How does the method behave when the " << artifact << " is unavailable?\n";
    out << "- Could the approach extend beyond " << topic << "?\n";
    out << "\n**Soundness:** " << soundness << " " << aspect_label(soundness) << "\n";
    out << "**Presentation:** " << presentation << " " << aspect_label(presentation) << "\n";
    out << "**Contribution:** " << contribution << " " << aspect_label(contribution) << "\n";
    out << "**Rating:** " << rating << " " << rating_label(rating) << "\n";
    out << "\n**Paper Decision:**\n";
    out << "- Decision: " << (accept ? "Accept" : "Reject") << "\n";
    out << "- Reasons: The rating of " << rating << " reflects the balance between the "
        << "paper's contribution to " << topic << " and the concerns raised about the "
        << artifact << (accept ? "; the strengths outweigh the weaknesses." : "; the weaknesses dominate.")
        << "\n";
    return out.str();
}

std::string TemplateFillerBackend::complete(const EndpointProfile&, const GenerationConfig&,
                                            const std::string& prompt) {
    InstrumentedBackend::Entry entry(*this);
    if (delay_ms_ > 0) std::this_thread::sleep_for(std::chrono::milliseconds(delay_ms_));
    return filled_review(fnv1a64(prompt) ^ (seed_ * 0x9e3779b97f4a7c15ull));
}

std::vector<EmbeddingVector> TemplateFillerBackend::embed(const EndpointProfile&,
                                                          const std::vector<std::string>& texts) {
    InstrumentedBackend::Entry entry(*this);
    if (delay_ms_ > 0) std::this_thread::sleep_for(std::chrono::milliseconds(delay_ms_));
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (const std::string& t : texts) out.push_back(hash_embedding(t, embed_dim_, seed_));
    return out;
}

}  // namespace sea
