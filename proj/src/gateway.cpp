#include "sea/gateway.hpp"

#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstdlib>
#include <mutex>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace sea {

using nlohmann::json;

double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b) {
    if (a.dim() != b.dim() || a.dim() == 0)
        throw InputError("cosine_similarity: dimension mismatch");
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) {
        dot += a.values[i] * b.values[i];
        na += a.values[i] * a.values[i];
        nb += b.values[i] * b.values[i];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

struct Gateway::State {
    std::mutex mutex;
    std::condition_variable cv;
    int in_flight = 0;
};

// RAII guard for the in-flight bound.
class Gateway::Slot {
public:
    Slot(State& state, int bound) : state_(state) {
        std::unique_lock lock(state_.mutex);
        state_.cv.wait(lock, [&] { return state_.in_flight < bound; });
        ++state_.in_flight;
    }
    ~Slot() {
        {
            std::lock_guard lock(state_.mutex);
            --state_.in_flight;
        }
        state_.cv.notify_one();
    }

private:
    State& state_;
};

Gateway::Gateway(std::shared_ptr<Backend> backend, int max_in_flight)
    : backend_(std::move(backend)),
      max_in_flight_(max_in_flight < 1 ? 1 : max_in_flight),
      state_(std::make_shared<State>()) {}

std::string Gateway::complete(const EndpointProfile& profile, const GenerationConfig& config,
                              const std::string& prompt) {
    if (prompt.empty()) throw InputError("complete: empty prompt");
    Slot slot(*state_, max_in_flight_);
    for (int attempt = 0;; ++attempt) {
        try {
            std::string text = backend_->complete(profile, config, prompt);
            if (text.empty())
                throw EmptyResponseError("endpoint '" + profile.name + "' returned an empty completion");
            return text;
        } catch (const TransportError&) {
            if (attempt >= profile.retry_limit) throw;
            if (profile.backoff_ms > 0)
                std::this_thread::sleep_for(
                    std::chrono::milliseconds(profile.backoff_ms << attempt));
        }
    }
}

std::vector<EmbeddingVector> Gateway::embed(const EndpointProfile& profile,
                                            const std::vector<std::string>& texts) {
    if (texts.empty()) throw InputError("embed: empty text list");
    for (const std::string& t : texts)
        if (t.empty()) throw InputError("embed: empty text in batch");
    Slot slot(*state_, max_in_flight_);
    for (int attempt = 0;; ++attempt) {
        try {
            std::vector<EmbeddingVector> vectors = backend_->embed(profile, texts);
            if (vectors.size() != texts.size())
                throw ProtocolError("embed: endpoint returned " + std::to_string(vectors.size()) +
                                    " vectors for " + std::to_string(texts.size()) + " texts");
            for (const EmbeddingVector& v : vectors) {
                if (v.dim() == 0 || v.dim() != vectors.front().dim())
                    throw ProtocolError("embed: inconsistent embedding dimensions in batch");
                for (const double x : v.values)
                    if (!std::isfinite(x)) throw ProtocolError("embed: non-finite embedding value");
            }
            return vectors;
        } catch (const TransportError&) {
            if (attempt >= profile.retry_limit) throw;
            if (profile.backoff_ms > 0)
                std::this_thread::sleep_for(
                    std::chrono::milliseconds(profile.backoff_ms << attempt));
        }
    }
}

namespace {

class HttpBackend : public Backend {
public:
    std::string complete(const EndpointProfile& profile, const GenerationConfig& config,
                         const std::string& prompt) override {
        json body;
        body["model"] = profile.model_name;
        body["messages"] = json::array({{{"role", "user"}, {"content", prompt}}});
        body["temperature"] = config.temperature;
        body["max_tokens"] = config.max_new_tokens;
        if (config.seed) body["seed"] = *config.seed;

        const json reply = post(profile, "/v1/chat/completions", body);
        try {
            const json& choices = reply.at("choices");
            if (!choices.is_array() || choices.empty())
                throw ProtocolError("chat completion carried no choices");
            return choices[0].at("message").at("content").get<std::string>();
        } catch (const json::exception& e) {
            throw ProtocolError(std::string("malformed chat completion response: ") + e.what());
        }
    }

    std::vector<EmbeddingVector> embed(const EndpointProfile& profile,
                                       const std::vector<std::string>& texts) override {
        json body;
        body["model"] = profile.model_name;
        body["input"] = texts;

        const json reply = post(profile, "/v1/embeddings", body);
        std::vector<EmbeddingVector> out(texts.size());
        try {
            const json& data = reply.at("data");
            if (!data.is_array() || data.size() != texts.size())
                throw ProtocolError("embeddings response size mismatch");
            for (std::size_t i = 0; i < data.size(); ++i) {
                const json& item = data[i];
                const std::size_t index = item.contains("index") ? item["index"].get<std::size_t>() : i;
                if (index >= out.size()) throw ProtocolError("embeddings response index out of range");
                out[index].values = item.at("embedding").get<std::vector<double>>();
            }
        } catch (const json::exception& e) {
            throw ProtocolError(std::string("malformed embeddings response: ") + e.what());
        }
        return out;
    }

private:
    json post(const EndpointProfile& profile, const std::string& path, const json& body) {
        httplib::Client client(profile.base_url);
        client.set_connection_timeout(std::chrono::duration<double>(profile.timeout_seconds));
        client.set_read_timeout(std::chrono::duration<double>(profile.timeout_seconds));
        client.set_write_timeout(std::chrono::duration<double>(profile.timeout_seconds));
        httplib::Headers headers;
        if (!profile.api_key_env.empty()) {
            const char* key = std::getenv(profile.api_key_env.c_str());
            if (key != nullptr && key[0] != '\0')
                headers.emplace("Authorization", std::string("Bearer ") + key);
        }
        auto result = client.Post(path, headers, body.dump(), "application/json");
        if (!result)
            throw TransportError("request to " + profile.base_url + path + " failed: " +
                                 httplib::to_string(result.error()));
        if (result->status == 429 || result->status >= 500)
            throw TransportError("endpoint " + profile.base_url + path + " answered HTTP " +
                                 std::to_string(result->status));
        if (result->status != 200)
            throw ProtocolError("endpoint " + profile.base_url + path + " answered HTTP " +
                                std::to_string(result->status));
        try {
            return json::parse(result->body);
        } catch (const json::exception& e) {
            throw ProtocolError(std::string("endpoint returned invalid JSON: ") + e.what());
        }
    }
};

}  // namespace

std::shared_ptr<Backend> make_http_backend() { return std::make_shared<HttpBackend>(); }

std::size_t endpoint_token_count(const EndpointProfile& profile, std::string_view text) {
    httplib::Client client(profile.base_url);
    client.set_read_timeout(std::chrono::duration<double>(profile.timeout_seconds));
    json body;
    body["content"] = std::string(text);
    auto result = client.Post("/tokenize", body.dump(), "application/json");
    if (!result)
        throw TransportError("tokenize request to " + profile.base_url + " failed: " +
                             httplib::to_string(result.error()));
    if (result->status != 200)
        throw ProtocolError("tokenize endpoint answered HTTP " + std::to_string(result->status));
    try {
        return json::parse(result->body).at("tokens").size();
    } catch (const json::exception& e) {
        throw ProtocolError(std::string("malformed tokenize response: ") + e.what());
    }
}

}  // namespace sea
