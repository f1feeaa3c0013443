#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace nrssb {

inline constexpr uint32_t kCrc24Poly = 0x1864CFB; // CRC-24 transport-block polynomial

/// CRC-24 over a bit sequence (MSB-first shift register, zero initial state).
inline uint32_t crc24(std::span<const uint8_t> bits) {
    uint32_t reg = 0;
    for (uint8_t bit : bits) {
        const uint32_t top = (reg >> 23) & 1u;
        reg = (reg << 1) & 0xFFFFFFu;
        if (top ^ (bit & 1u)) reg ^= kCrc24Poly & 0xFFFFFFu;
    }
    return reg;
}

/// Appends the 24 CRC bits (MSB first) to a copy of the payload.
inline std::vector<uint8_t> crc24_attach(std::span<const uint8_t> payload) {
    std::vector<uint8_t> out(payload.begin(), payload.end());
    const uint32_t crc = crc24(payload);
    for (int i = 23; i >= 0; --i) out.push_back(static_cast<uint8_t>((crc >> i) & 1u));
    return out;
}

/// True iff the trailing 24 bits are the CRC of the leading bits.
inline bool crc24_check(std::span<const uint8_t> bits_with_crc) {
    if (bits_with_crc.size() < 24) return false;
    const size_t n = bits_with_crc.size() - 24;
    uint32_t crc = crc24(bits_with_crc.subspan(0, n));
    for (size_t i = 0; i < 24; ++i) {
        if (((crc >> (23 - i)) & 1u) != (bits_with_crc[n + i] & 1u)) return false;
    }
    return true;
}

} // namespace nrssb
