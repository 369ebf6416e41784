#pragma once

#include <string>
#include <vector>

namespace taco {

struct TypeEntry {
    int index = 0;
    std::string name;
    std::string description;
};

// The 17 reasoning types: index, display name, and the natural-language
// description used both as documentation and as the source text for the
// fixed type embeddings.
struct TypeCatalog {
    std::vector<TypeEntry> entries;

    const TypeEntry& at(int index) const;
    void validate() const;

    static TypeCatalog builtin();
    static TypeCatalog load(const std::string& path);
    std::string serialize() const;
    void save(const std::string& path) const;
};

}  // namespace taco
