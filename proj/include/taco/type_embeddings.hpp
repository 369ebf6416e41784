#pragma once

#include <string>

#include "taco/catalog.hpp"
#include "taco/tensor.hpp"

namespace taco {

// Fixed [17 x dim] description embeddings. Frozen during training; the
// provenance string records which embedder produced the rows.
struct TypeEmbeddings {
    Mat rows;  // 17 x dim
    std::string provenance;

    int dim() const { return rows.cols; }
    void validate() const;

    // Deterministic stand-in rows: each row is seeded by a hash of the type
    // description, drawn pseudo-randomly, and unit-normalized. Used by all
    // tests; real runs can import sentence-embedder output instead.
    static TypeEmbeddings fixture(const TypeCatalog& catalog, int dim);

    // Import raw vectors produced by an external sentence embedder
    // (JSON: {"provenance": ..., "rows": [[...] x 17]}).
    static TypeEmbeddings import_raw(const std::string& json_text, const std::string& provenance_hint);

    static TypeEmbeddings load(const std::string& path);
    std::string serialize() const;
    void save(const std::string& path) const;
};

}  // namespace taco
