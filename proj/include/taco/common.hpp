#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace taco {

// All recoverable failures (bad input files, invariant violations, ...)
// surface as taco::Error with a message naming the offending record.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

std::string to_lower(std::string_view s);

// Whitespace split, original token text preserved.
std::vector<std::string> split_whitespace(std::string_view text);

// Lowercase + strip leading/trailing punctuation. Interior characters
// (hyphens, apostrophes) are kept. Returns "" for pure-punctuation tokens.
std::string normalize_token(std::string_view token);

// Matching tokenization: lowercase, strip punctuation, split on whitespace,
// drop tokens that were pure punctuation.
std::vector<std::string> match_tokens(std::string_view text);

// Model tokenization: lowercase, whitespace split, then punctuation
// characters split off as standalone tokens so unit segmentation can see them.
std::vector<std::string> model_tokens(std::string_view text);

std::string join(const std::vector<std::string>& tokens, std::string_view sep);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

uint64_t fnv1a64(std::string_view data);
std::string hex64(uint64_t v);

// Fixed-precision decimal formatting (locale-independent, deterministic).
std::string format_fixed(double v, int digits);

// TACO_DETERMINISTIC env toggle; unset or "1" means deterministic mode.
bool deterministic_mode();

}  // namespace taco
