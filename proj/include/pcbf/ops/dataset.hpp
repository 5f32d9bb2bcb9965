#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "pcbf/ops/atomic_write.hpp"
#include "pcbf/ops/canonical.hpp"
#include "pcbf/pipeline/rollout.hpp"

namespace pcbf {

inline constexpr const char* kDatasetFormat = "pcbf-episodes";
inline constexpr int kDatasetVersion = 1;
inline constexpr int kDefaultChunkLength = 16;

// Episode datasets are JSON lines: a header line followed by one episode
// record per line. The header pins the action bound and the truncated-BPTT
// chunk length the episodes were collected for.
struct DatasetHeader {
    double v_max = 5.0;
    int chunk_length = kDefaultChunkLength;

    json to_json() const {
        return json{{"format", kDatasetFormat},
                    {"version", kDatasetVersion},
                    {"v_max", v_max},
                    {"chunk_length", chunk_length}};
    }
};

inline DatasetHeader dataset_header_from_json(const json& j, const std::string& locus) {
    if (!j.is_object()) throw MalformedDataset(locus + ": header must be an object");
    for (const char* key : {"format", "version", "v_max", "chunk_length"}) {
        if (!j.contains(key)) throw MalformedDataset(locus + ": header missing key \"" + key + "\"");
    }
    if (!j.at("format").is_string() || j.at("format").get<std::string>() != kDatasetFormat) {
        throw MalformedDataset(locus + ": header format must be \"" + std::string(kDatasetFormat) + "\"");
    }
    if (!j.at("version").is_number_integer() || j.at("version").get<int>() != kDatasetVersion) {
        throw MalformedDataset(locus + ": unsupported dataset version");
    }
    DatasetHeader h;
    if (!j.at("v_max").is_number()) throw MalformedDataset(locus + ": v_max must be a number");
    h.v_max = j.at("v_max").get<double>();
    if (!(h.v_max > 0.0) || !std::isfinite(h.v_max)) {
        throw MalformedDataset(locus + ": v_max must be positive and finite");
    }
    if (!j.at("chunk_length").is_number_integer()) {
        throw MalformedDataset(locus + ": chunk_length must be an integer");
    }
    h.chunk_length = j.at("chunk_length").get<int>();
    if (h.chunk_length < 1) throw MalformedDataset(locus + ": chunk_length must be >= 1");
    return h;
}

struct Dataset {
    DatasetHeader header;
    std::vector<RolloutRecord> episodes;
};

// Accumulates episodes in memory and lands the whole file atomically, so a
// dataset path never holds a half-written file.
class DatasetWriter {
  public:
    explicit DatasetWriter(DatasetHeader header) : header_(header) {
        if (header_.chunk_length < 1) throw InvalidConfig("DatasetWriter: chunk_length must be >= 1");
        if (!(header_.v_max > 0.0)) throw InvalidConfig("DatasetWriter: v_max must be positive");
    }

    void add(const RolloutRecord& r) { episodes_.push_back(r); }
    std::size_t size() const { return episodes_.size(); }
    const DatasetHeader& header() const { return header_; }

    std::string serialize() const {
        std::string out = canonical_json(header_.to_json());
        out.push_back('\n');
        for (const RolloutRecord& r : episodes_) {
            out += canonical_json(rollout_record_to_json(r));
            out.push_back('\n');
        }
        return out;
    }

    void write(const std::string& path) const { atomic_write(path, serialize()); }

  private:
    DatasetHeader header_;
    std::vector<RolloutRecord> episodes_;
};

inline Dataset parse_dataset(const std::string& text, const std::string& path) {
    Dataset ds;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    bool have_header = false;
    while (pos < text.size()) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string::npos) nl = text.size();
        const std::string line = text.substr(pos, nl - pos);
        pos = nl + 1;
        ++line_no;
        if (line.empty()) {
            if (pos >= text.size()) break;  // single trailing blank line
            throw MalformedDataset(path + ":" + std::to_string(line_no) + ": blank line");
        }
        const std::string locus = path + ":" + std::to_string(line_no);
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw MalformedDataset(locus + ": invalid JSON: " + e.what());
        }
        if (!have_header) {
            ds.header = dataset_header_from_json(j, locus);
            have_header = true;
        } else {
            ds.episodes.push_back(rollout_record_from_json(j, locus));
        }
    }
    if (!have_header) throw MalformedDataset(path + ": empty dataset, header line required");
    return ds;
}

inline Dataset read_dataset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoFailure("cannot open dataset: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_dataset(text, path);
}

}  // namespace pcbf
