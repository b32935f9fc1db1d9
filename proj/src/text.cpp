#include "sea/text.hpp"

#include <algorithm>
#include <cctype>

namespace sea {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_punct(char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; }

}  // namespace

std::vector<std::string> whitespace_tokens(std::string_view text) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && is_space(text[i])) ++i;
        const std::size_t start = i;
        while (i < text.size() && !is_space(text[i])) ++i;
        if (i > start) out.emplace_back(text.substr(start, i - start));
    }
    return out;
}

std::size_t whitespace_token_count(std::string_view text) {
    std::size_t count = 0;
    bool in_token = false;
    for (const char c : text) {
        if (is_space(c)) {
            in_token = false;
        } else if (!in_token) {
            in_token = true;
            ++count;
        }
    }
    return count;
}

std::string truncate_tokens(std::string_view text, std::size_t budget, bool* truncated) {
    if (truncated != nullptr) *truncated = false;
    std::size_t count = 0;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && is_space(text[i])) ++i;
        if (i >= text.size()) break;
        if (count == budget) {
            if (truncated != nullptr) *truncated = true;
            // Trim trailing whitespace off the kept prefix.
            std::string_view kept = text.substr(0, i);
            while (!kept.empty() && is_space(kept.back())) kept.remove_suffix(1);
            return std::string(kept);
        }
        while (i < text.size() && !is_space(text[i])) ++i;
        ++count;
    }
    return std::string(text);
}

std::vector<std::string> metric_tokens(std::string_view text) {
    std::vector<std::string> out;
    std::string current;
    for (const char c : text) {
        if (is_space(c) || is_punct(c)) {
            if (!current.empty()) {
                out.push_back(current);
                current.clear();
            }
        } else {
            current.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        }
    }
    if (!current.empty()) out.push_back(current);
    return out;
}

std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && is_space(s[b])) ++b;
    while (e > b && is_space(s[e - 1])) --e;
    return std::string(s.substr(b, e - b));
}

std::string render_placeholder(std::string_view body, std::string_view key,
                               std::string_view value) {
    const std::string marker = "{{" + std::string(key) + "}}";
    std::string out;
    out.reserve(body.size() + value.size());
    std::size_t pos = 0;
    while (true) {
        const std::size_t hit = body.find(marker, pos);
        if (hit == std::string_view::npos) {
            out.append(body.substr(pos));
            return out;
        }
        out.append(body.substr(pos, hit - pos));
        out.append(value);
        pos = hit + marker.size();
    }
}

}  // namespace sea
