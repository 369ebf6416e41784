#include "taco/common.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace taco {

namespace {

bool is_punct_char(char c) {
    return std::ispunct(static_cast<unsigned char>(c)) != 0;
}

}  // namespace

std::string to_lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::vector<std::string> split_whitespace(std::string_view text) {
    std::vector<std::string> out;
    size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        size_t start = i;
        while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        if (i > start) out.emplace_back(text.substr(start, i - start));
    }
    return out;
}

std::string normalize_token(std::string_view token) {
    size_t b = 0, e = token.size();
    while (b < e && is_punct_char(token[b])) ++b;
    while (e > b && is_punct_char(token[e - 1])) --e;
    return to_lower(token.substr(b, e - b));
}

std::vector<std::string> match_tokens(std::string_view text) {
    std::vector<std::string> out;
    for (const auto& raw : split_whitespace(text)) {
        std::string norm = normalize_token(raw);
        if (!norm.empty()) out.push_back(std::move(norm));
    }
    return out;
}

std::vector<std::string> model_tokens(std::string_view text) {
    static const std::string kSplit = ".;:,?!()[]\"";
    std::vector<std::string> out;
    for (const auto& raw : split_whitespace(text)) {
        std::string word = to_lower(raw);
        std::string cur;
        for (char c : word) {
            if (kSplit.find(c) != std::string::npos) {
                if (!cur.empty()) out.push_back(cur), cur.clear();
                out.push_back(std::string(1, c));
            } else {
                cur.push_back(c);
            }
        }
        if (!cur.empty()) out.push_back(cur);
    }
    return out;
}

std::string join(const std::vector<std::string>& tokens, std::string_view sep) {
    std::string out;
    for (size_t i = 0; i < tokens.size(); ++i) {
        if (i) out += sep;
        out += tokens[i];
    }
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open file for reading: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open file for writing: " + path);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error("write failed: " + path);
}

uint64_t fnv1a64(std::string_view data) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex64(uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return std::string(buf);
}

std::string format_fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
    return std::string(buf);
}

bool deterministic_mode() {
    const char* v = std::getenv("TACO_DETERMINISTIC");
    if (v == nullptr) return true;
    return std::string(v) != "0";
}

}  // namespace taco
