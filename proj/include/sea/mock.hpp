#pragma once

#include <atomic>
#include <cstdint>
#include <mutex>
#include <string>
#include <vector>

#include "sea/gateway.hpp"

namespace sea {

// Deterministic unit vector derived from the text alone: a seeded
// pseudo-random projection, so equal texts embed identically and the
// geometry is reproducible with no network.
EmbeddingVector hash_embedding(std::string_view text, std::size_t dim, std::uint64_t seed);

// Mixin recording concurrency so tests can assert the gateway's in-flight
// bound.
class InstrumentedBackend : public Backend {
public:
    int max_concurrency_seen() const { return max_seen_.load(); }
    int call_count() const { return calls_.load(); }

protected:
    struct Entry {
        explicit Entry(InstrumentedBackend& b) : backend(b) {
            const int now = ++backend.in_flight_;
            int seen = backend.max_seen_.load();
            while (now > seen && !backend.max_seen_.compare_exchange_weak(seen, now)) {
            }
            ++backend.calls_;
        }
        ~Entry() { --backend.in_flight_; }
        InstrumentedBackend& backend;
    };

private:
    std::atomic<int> in_flight_{0};
    std::atomic<int> max_seen_{0};
    std::atomic<int> calls_{0};
};

// Scripted mock: consumes a fixed reply sequence, one entry per call, for
// sequential tests of retry and failure handling. Embeddings fall through
// to the hash embedder.
class ScriptedBackend : public InstrumentedBackend {
public:
    struct Entry {
        enum class Kind { Reply, TransportFailure, Empty };
        Kind kind = Kind::Reply;
        std::string text;

        static Entry reply(std::string t) { return {Kind::Reply, std::move(t)}; }
        static Entry failure() { return {Kind::TransportFailure, {}}; }
        static Entry empty() { return {Kind::Empty, {}}; }
    };

    ScriptedBackend(std::vector<Entry> script, std::size_t embed_dim = 16,
                    std::uint64_t embed_seed = 0)
        : script_(std::move(script)), embed_dim_(embed_dim), embed_seed_(embed_seed) {}

    std::string complete(const EndpointProfile&, const GenerationConfig&,
                         const std::string& prompt) override;
    std::vector<EmbeddingVector> embed(const EndpointProfile&,
                                       const std::vector<std::string>& texts) override;

private:
    std::vector<Entry> script_;
    std::size_t next_ = 0;
    std::mutex mutex_;
    std::size_t embed_dim_;
    std::uint64_t embed_seed_;
};

// Template-filler mock: emits a syntactically valid nine-section review
// whose scores and filler content derive from the prompt hash alone, so
// concurrent pipeline runs stay byte-reproducible at any parallelism.
class TemplateFillerBackend : public InstrumentedBackend {
public:
    explicit TemplateFillerBackend(std::size_t embed_dim = 64, std::uint64_t seed = 0,
                                   int delay_ms = 0)
        : embed_dim_(embed_dim), seed_(seed), delay_ms_(delay_ms) {}

    std::string complete(const EndpointProfile&, const GenerationConfig&,
                         const std::string& prompt) override;
    std::vector<EmbeddingVector> embed(const EndpointProfile&,
                                       const std::vector<std::string>& texts) override;

    // The review text emitted for a given prompt hash.
    static std::string filled_review(std::uint64_t prompt_hash);

private:
    std::size_t embed_dim_;
    std::uint64_t seed_;
    int delay_ms_;
};

}  // namespace sea
