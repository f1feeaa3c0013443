#pragma once

#include <cstring>
#include <fstream>
#include <vector>

#include "nrssb/detect.hpp"

namespace nrssb::bench {

// record flags
inline constexpr uint8_t kFlagLabeled = 0x01;
inline constexpr uint8_t kFlagCrcVerified = 0x02;

/// Self-describing dataset container:
/// header (magic "NRDS", version, feature count, lmax, source, snr_db) followed
/// by fixed-width records of 288 float32 features + label byte + flags byte.
/// Record count is implied by the file size, so files are append-friendly.
struct DatasetHeader {
    uint32_t version = 1;
    uint32_t feature_count = detect::kFeatureCount;
    uint32_t lmax = 8;
    uint8_t source = 0; // 0 sim, 1 capture
    float snr_db = 0.0f;
};

namespace detail {
inline constexpr char kDatasetMagic[4] = {'N', 'R', 'D', 'S'};
inline constexpr size_t kRecordBytes = detect::kFeatureCount * sizeof(float) + 2;
} // namespace detail

inline void dataset_write(const std::string& path, const DatasetHeader& header,
                          const std::vector<detect::DmrsFeatureVector>& vectors) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw data_error("cannot open dataset for writing: " + path);
    os.write(detail::kDatasetMagic, 4);
    os.write(reinterpret_cast<const char*>(&header.version), 4);
    os.write(reinterpret_cast<const char*>(&header.feature_count), 4);
    os.write(reinterpret_cast<const char*>(&header.lmax), 4);
    os.write(reinterpret_cast<const char*>(&header.source), 1);
    os.write(reinterpret_cast<const char*>(&header.snr_db), 4);
    for (const auto& vec : vectors) {
        if (vec.x.size() != header.feature_count) throw data_error("dataset: bad feature count");
        for (double v : vec.x) {
            const float f = static_cast<float>(v);
            os.write(reinterpret_cast<const char*>(&f), 4);
        }
        const uint8_t label = vec.label ? static_cast<uint8_t>(*vec.label) : 0;
        uint8_t flags = vec.label ? kFlagLabeled : 0;
        if (vec.source == detect::FeatureSource::capture && vec.label) flags |= kFlagCrcVerified;
        os.write(reinterpret_cast<const char*>(&label), 1);
        os.write(reinterpret_cast<const char*>(&flags), 1);
    }
    if (!os) throw data_error("dataset write failed: " + path);
}

inline std::vector<detect::DmrsFeatureVector> dataset_read(const std::string& path,
                                                           DatasetHeader* header_out = nullptr) {
    std::ifstream is(path, std::ios::binary | std::ios::ate);
    if (!is) throw data_error("cannot open dataset: " + path);
    const auto file_size = static_cast<size_t>(is.tellg());
    is.seekg(0);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, detail::kDatasetMagic, 4) != 0)
        throw data_error("not a dataset file: " + path);
    DatasetHeader header;
    is.read(reinterpret_cast<char*>(&header.version), 4);
    is.read(reinterpret_cast<char*>(&header.feature_count), 4);
    is.read(reinterpret_cast<char*>(&header.lmax), 4);
    is.read(reinterpret_cast<char*>(&header.source), 1);
    is.read(reinterpret_cast<char*>(&header.snr_db), 4);
    if (!is) throw data_error("dataset header truncated: " + path);
    if (header.version != 1) throw data_error("unsupported dataset version: " + path);
    if (header.feature_count != detect::kFeatureCount)
        throw data_error("unexpected feature count in: " + path);
    const size_t header_bytes = 4 + 4 + 4 + 4 + 1 + 4;
    const size_t body = file_size - header_bytes;
    if (body % detail::kRecordBytes != 0) throw data_error("dataset truncated: " + path);
    const size_t count = body / detail::kRecordBytes;

    std::vector<detect::DmrsFeatureVector> vectors(count);
    for (auto& vec : vectors) {
        vec.x.resize(detect::kFeatureCount);
        for (auto& v : vec.x) {
            float f;
            is.read(reinterpret_cast<char*>(&f), 4);
            v = f;
        }
        uint8_t label, flags;
        is.read(reinterpret_cast<char*>(&label), 1);
        is.read(reinterpret_cast<char*>(&flags), 1);
        if (flags & kFlagLabeled) vec.label = label;
        vec.source = header.source == 0 ? detect::FeatureSource::sim : detect::FeatureSource::capture;
        vec.snr_db = header.snr_db;
    }
    if (!is) throw data_error("dataset truncated: " + path);
    if (header_out) *header_out = header;
    return vectors;
}

} // namespace nrssb::bench
