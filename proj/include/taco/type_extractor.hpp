#pragma once

#include <array>
#include <string>
#include <vector>

#include "taco/dataset.hpp"

namespace taco {

// Per-type keyword phrases plus the maximum window size. Phrases are stored
// lowercase and whitespace-tokenized; no phrase is longer than `window`.
struct KeywordBase {
    std::array<std::vector<std::vector<std::string>>, kNumTypes> phrases;
    int window = 5;

    void add(int type, const std::string& phrase);
    void validate() const;

    static KeywordBase builtin();
    static KeywordBase load(const std::string& path);
    std::string serialize() const;
    void save(const std::string& path) const;
};

// One pass of the sliding-window scan, recorded for --trace output and the
// window-monotonicity tests.
struct WindowPass {
    int window = 0;
    std::array<int, kNumTypes> counts{};
    bool decided = false;
    int winner = -1;
};

struct ExtractTrace {
    std::vector<WindowPass> passes;
    int result = -1;
    bool fallback = false;
};

// Sliding-window keyword extraction. Scans window sizes from base.window
// down to 1; at each size counts exact phrase matches per type over every
// offset, and stops at the first size with a strictly unique positive
// maximum. Falls back to type 16 ("Others") when no size decides.
int extract_type(const std::string& question, const KeywordBase& base, ExtractTrace* trace = nullptr);

// Sets rtype on every example. Idempotent; errors carry the example id.
Dataset label_dataset(const Dataset& d, const KeywordBase& base);

}  // namespace taco
