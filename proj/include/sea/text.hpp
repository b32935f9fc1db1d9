#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace sea {

// Counts tokens in a text. The default implementation is whitespace
// splitting; an endpoint-backed counter can be plugged in instead.
using TokenCounter = std::function<std::size_t(std::string_view)>;

// Splits on runs of whitespace.
std::vector<std::string> whitespace_tokens(std::string_view text);
std::size_t whitespace_token_count(std::string_view text);

// Keeps the first `budget` whitespace tokens of `text`. Sets *truncated
// when anything was dropped.
std::string truncate_tokens(std::string_view text, std::size_t budget, bool* truncated);

// Metric tokenization: lowercase, punctuation treated as a separator,
// split on whitespace.
std::vector<std::string> metric_tokens(std::string_view text);

std::string to_lower(std::string_view s);
std::string trim(std::string_view s);

// Replaces every occurrence of "{{key}}" in the template body.
std::string render_placeholder(std::string_view body, std::string_view key,
                               std::string_view value);

}  // namespace sea
