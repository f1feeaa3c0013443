#pragma once

#include <filesystem>
#include <fstream>

#include "nrssb/bench/config.hpp"
#include "nrssb/phy.hpp"

namespace nrssb::bench {

/// Raw SDR capture: interleaved complex float32 little-endian samples with a
/// key-value sidecar at <path>.meta (sample_rate, center_frequency, notes).
inline void write_iq(const std::string& path, const phy::IqBuffer& buf,
                     double center_frequency_hz = 0.0, const std::string& notes = "") {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw data_error("cannot open IQ file for writing: " + path);
    for (const auto& s : buf.samples) {
        const float re = static_cast<float>(s.real());
        const float im = static_cast<float>(s.imag());
        os.write(reinterpret_cast<const char*>(&re), 4);
        os.write(reinterpret_cast<const char*>(&im), 4);
    }
    if (!os) throw data_error("IQ write failed: " + path);

    KvConfig meta;
    meta.set("sample_rate", std::to_string(buf.sample_rate));
    meta.set("center_frequency", std::to_string(center_frequency_hz));
    if (!notes.empty()) meta.set("notes", notes);
    meta.write(path + ".meta");
}

/// Loads an IQ capture. Sidecar metadata may be overridden (or replaced
/// entirely, when the sidecar is missing) by the overrides config.
inline phy::IqBuffer ingest_iq(const std::string& path, const KvConfig& overrides = {}) {
    std::ifstream is(path, std::ios::binary | std::ios::ate);
    if (!is) throw data_error("cannot open IQ file: " + path);
    const auto size = static_cast<size_t>(is.tellg());
    if (size % 8 != 0) throw data_error("IQ file length not a multiple of 8 bytes: " + path);
    is.seekg(0);

    double sample_rate = overrides.num("sample_rate", 0.0);
    const std::string meta_path = path + ".meta";
    if (std::filesystem::exists(meta_path)) {
        const auto meta = KvConfig::from_file(meta_path);
        if (!overrides.has("sample_rate")) sample_rate = meta.num("sample_rate", 0.0);
    }
    if (sample_rate <= 0.0)
        throw data_error("IQ ingest: no sample_rate in sidecar or overrides for " + path);

    phy::IqBuffer buf;
    buf.sample_rate = sample_rate;
    buf.origin = phy::IqBuffer::Origin::file;
    buf.samples.resize(size / 8);
    for (auto& s : buf.samples) {
        float re, im;
        is.read(reinterpret_cast<char*>(&re), 4);
        is.read(reinterpret_cast<char*>(&im), 4);
        s = cplx(re, im);
    }
    if (!is) throw data_error("IQ file truncated: " + path);
    return buf;
}

} // namespace nrssb::bench
