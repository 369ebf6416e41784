#pragma once

#include <string>
#include <vector>

#include "taco/config.hpp"
#include "taco/encoder.hpp"
#include "taco/params.hpp"

namespace taco {

// Self-describing archive: JSON header (config, vocab, tensor directory)
// followed by raw little-endian doubles. Doubles are stored bit-exactly, so
// a reloaded model reproduces inference losses bitwise.
struct Checkpoint {
    TrainConfig config;
    std::vector<std::string> vocab_words;
    ParamStore params;

    void save(const std::string& path) const;
    static Checkpoint load(const std::string& path);
};

}  // namespace taco
