#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace gamesmith {

// Lowercase alphanumeric token set; every non-alphanumeric byte acts as a
// separator. This is the one tokenizer shared by mechanic similarity,
// memory retrieval, and archive queries.
std::set<std::string> tokenize(std::string_view text);

// |a ∩ b| / |a ∪ b|; 1.0 when both sets are empty.
double jaccard(const std::set<std::string>& a, const std::set<std::string>& b);

std::string to_lower(std::string_view text);
std::string trim(std::string_view text);
std::vector<std::string> split(std::string_view text, char sep);

std::uint64_t fnv1a64(std::string_view data);
std::string hex64(std::uint64_t value);

// 16-hex-char content digest used in traces and generated ids.
std::string digest(std::string_view data);

// UTC wall-clock time as "YYYY-MM-DDTHH:MM:SSZ".
std::string now_iso8601();

double clamp01(double v);

} // namespace gamesmith
