#include "taco/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include <json.hpp>

#include "taco/common.hpp"

namespace taco {

using nlohmann::json;

namespace {
constexpr char kMagic[8] = {'T', 'A', 'C', 'O', 'C', 'K', 'P', '1'};
}

void Checkpoint::save(const std::string& path) const {
    json header;
    header["config"] = json::parse(config.serialize());
    header["config_hash"] = config.hash();
    header["vocab"] = vocab_words;
    json tensors = json::array();
    for (const auto& [name, m] : params.all()) {
        json t;
        t["name"] = name;
        t["rows"] = m.rows;
        t["cols"] = m.cols;
        tensors.push_back(t);
    }
    header["tensors"] = tensors;
    std::string header_text = header.dump();

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("checkpoint: cannot write " + path);
    out.write(kMagic, 8);
    uint64_t hlen = header_text.size();
    out.write(reinterpret_cast<const char*>(&hlen), 8);
    out.write(header_text.data(), static_cast<std::streamsize>(header_text.size()));
    for (const auto& [name, m] : params.all())
        out.write(reinterpret_cast<const char*>(m.data.data()),
                  static_cast<std::streamsize>(m.data.size() * sizeof(double)));
    if (!out) throw Error("checkpoint: write failed for " + path);
}

Checkpoint Checkpoint::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("checkpoint: cannot open " + path);
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, kMagic, 8) != 0)
        throw Error("checkpoint: bad magic in " + path);
    uint64_t hlen = 0;
    in.read(reinterpret_cast<char*>(&hlen), 8);
    std::string header_text(hlen, '\0');
    in.read(header_text.data(), static_cast<std::streamsize>(hlen));
    if (!in) throw Error("checkpoint: truncated header in " + path);

    json header;
    try {
        header = json::parse(header_text);
    } catch (const json::exception& ex) {
        throw Error("checkpoint: invalid header JSON: " + std::string(ex.what()));
    }
    Checkpoint ck;
    ck.config = TrainConfig::from_json_text(header.at("config").dump());
    ck.vocab_words = header.at("vocab").get<std::vector<std::string>>();
    for (const auto& t : header.at("tensors")) {
        std::string name = t.at("name").get<std::string>();
        Mat& m = ck.params.create(name, t.at("rows").get<int>(), t.at("cols").get<int>());
        in.read(reinterpret_cast<char*>(m.data.data()),
                static_cast<std::streamsize>(m.data.size() * sizeof(double)));
        if (!in) throw Error("checkpoint: truncated tensor " + name + " in " + path);
    }
    return ck;
}

}  // namespace taco
