#include "taco/type_embeddings.hpp"

#include <cmath>

#include <json.hpp>

#include "taco/common.hpp"
#include "taco/dataset.hpp"
#include "taco/rng.hpp"

namespace taco {

using nlohmann::json;

void TypeEmbeddings::validate() const {
    if (rows.rows != kNumTypes)
        throw Error("type embeddings: expected 17 rows, got " + std::to_string(rows.rows));
    if (rows.cols < 1) throw Error("type embeddings: empty rows");
    for (double v : rows.data)
        if (!std::isfinite(v)) throw Error("type embeddings: non-finite entry");
}

TypeEmbeddings TypeEmbeddings::fixture(const TypeCatalog& catalog, int dim) {
    catalog.validate();
    TypeEmbeddings e;
    e.provenance = "fixture-hash-v1 dim=" + std::to_string(dim);
    e.rows = Mat(kNumTypes, dim);
    for (int t = 0; t < kNumTypes; ++t) {
        Rng rng(fnv1a64(catalog.at(t).description));
        double norm_sq = 0.0;
        for (int c = 0; c < dim; ++c) {
            double v = rng.normal();
            e.rows.at(t, c) = v;
            norm_sq += v * v;
        }
        double inv = 1.0 / std::sqrt(norm_sq);
        for (int c = 0; c < dim; ++c) e.rows.at(t, c) *= inv;
    }
    return e;
}

TypeEmbeddings TypeEmbeddings::import_raw(const std::string& json_text,
                                          const std::string& provenance_hint) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::exception& ex) {
        throw Error(std::string("type embeddings: invalid JSON: ") + ex.what());
    }
    TypeEmbeddings e;
    e.provenance = root.value("provenance", provenance_hint);
    const json& rows = root.at("rows");
    if (rows.size() != kNumTypes) throw Error("type embeddings: expected 17 rows");
    int dim = static_cast<int>(rows[0].size());
    e.rows = Mat(kNumTypes, dim);
    for (int t = 0; t < kNumTypes; ++t) {
        if (static_cast<int>(rows[static_cast<size_t>(t)].size()) != dim)
            throw Error("type embeddings: ragged rows");
        for (int c = 0; c < dim; ++c)
            e.rows.at(t, c) = rows[static_cast<size_t>(t)][static_cast<size_t>(c)].get<double>();
    }
    e.validate();
    return e;
}

TypeEmbeddings TypeEmbeddings::load(const std::string& path) {
    return import_raw(read_file(path), "file:" + path);
}

std::string TypeEmbeddings::serialize() const {
    std::string out = "{\"provenance\":" + json(provenance).dump() + ",\"rows\":[\n";
    for (int t = 0; t < rows.rows; ++t) {
        json row = json::array();
        for (int c = 0; c < rows.cols; ++c) row.push_back(rows.at(t, c));
        out += row.dump();
        out += t + 1 < rows.rows ? ",\n" : "\n";
    }
    out += "]}\n";
    return out;
}

void TypeEmbeddings::save(const std::string& path) const {
    write_file(path, serialize());
}

}  // namespace taco
