#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sea/errors.hpp"

namespace sea {

struct EndpointProfile {
    std::string name = "default";  // tag used in outputs and for the key env var
    std::string base_url;          // scheme://host[:port]
    std::string model_name;
    std::string api_key_env;       // env var holding the key; never logged
    int max_in_flight = 4;
    int retry_limit = 3;
    double timeout_seconds = 120.0;
    int backoff_ms = 250;  // base delay for exponential backoff
};

struct GenerationConfig {
    double temperature = 0.0;
    int max_new_tokens = 2048;
    std::optional<std::uint64_t> seed;
};

struct EmbeddingVector {
    std::vector<double> values;

    std::size_t dim() const { return values.size(); }

    bool operator==(const EmbeddingVector&) const = default;
};

double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b);

// Transport behind the gateway. Implementations throw TransportError on
// transient failures so the gateway's retry policy can engage.
class Backend {
public:
    virtual ~Backend() = default;
    virtual std::string complete(const EndpointProfile& profile, const GenerationConfig& config,
                                 const std::string& prompt) = 0;
    virtual std::vector<EmbeddingVector> embed(const EndpointProfile& profile,
                                               const std::vector<std::string>& texts) = 0;
};

// The single boundary to external models: applies the retry policy and the
// in-flight bound around whatever backend it wraps. Shareable across
// threads.
class Gateway {
public:
    Gateway(std::shared_ptr<Backend> backend, int max_in_flight);

    std::string complete(const EndpointProfile& profile, const GenerationConfig& config,
                         const std::string& prompt);
    std::vector<EmbeddingVector> embed(const EndpointProfile& profile,
                                       const std::vector<std::string>& texts);

    int max_in_flight() const { return max_in_flight_; }

private:
    class Slot;
    std::shared_ptr<Backend> backend_;
    int max_in_flight_;
    struct State;
    std::shared_ptr<State> state_;
};

// POST {base_url}/v1/chat/completions and {base_url}/v1/embeddings with the
// de-facto open JSON shapes. The API key is read from profile.api_key_env.
std::shared_ptr<Backend> make_http_backend();

// Token counter backed by a llama.cpp-style POST {base_url}/tokenize
// endpoint returning {"tokens": [...]}.
std::size_t endpoint_token_count(const EndpointProfile& profile, std::string_view text);

}  // namespace sea
