#pragma once

#include <array>
#include <cstdint>
#include <numbers>
#include <vector>

#include "nrssb/common.hpp"

namespace nrssb::seq {

inline constexpr int kGoldBurnIn = 1600;     // N_c
inline constexpr int kDmrsLength = 144;      // DMRS symbols per SSB
inline constexpr int kSyncLength = 127;      // PSS/SSS sequence length

/// Physical cell identity: N_cell = nid2 + 3 * nid1, range 0..1007.
struct CellIdentity {
    int nid1 = 0;
    int nid2 = 0;

    int nid_cell() const { return nid2 + 3 * nid1; }
    int v() const { return nid_cell() % 4; } // DMRS subcarrier shift
};

inline CellIdentity pci_compose(int nid1, int nid2) {
    if (nid1 < 0 || nid1 > 335) throw std::out_of_range("pci_compose: nid1 must be in [0,335]");
    if (nid2 < 0 || nid2 > 2) throw std::out_of_range("pci_compose: nid2 must be in [0,2]");
    return CellIdentity{nid1, nid2};
}

inline CellIdentity pci_split(int nid_cell) {
    if (nid_cell < 0 || nid_cell > 1007)
        throw std::out_of_range("pci_split: nid_cell must be in [0,1007]");
    return CellIdentity{nid_cell / 3, nid_cell % 3};
}

/// Length-31 gold sequence c[n] = (x1(n+Nc) + x2(n+Nc)) mod 2.
/// x1 runs from the fixed seed 1, x2's 31 low bits are c_init.
/// Registers are packed words; bit k of the word holds x(n+k).
inline std::vector<uint8_t> gold_c(uint32_t c_init, size_t length) {
    if (length < 1) throw std::invalid_argument("gold_c: length must be >= 1");
    uint32_t x1 = 1;
    uint32_t x2 = c_init & 0x7FFFFFFFu;
    auto step = [](uint32_t& x, uint32_t taps) {
        const uint32_t fb = static_cast<uint32_t>(__builtin_popcount(x & taps)) & 1u;
        x = (x >> 1) | (fb << 30);
    };
    // x1(n+31) = x1(n+3) + x1(n); x2(n+31) = x2(n+3) + x2(n+2) + x2(n+1) + x2(n)
    const uint32_t taps1 = (1u << 3) | 1u;
    const uint32_t taps2 = (1u << 3) | (1u << 2) | (1u << 1) | 1u;
    for (int n = 0; n < kGoldBurnIn; ++n) {
        step(x1, taps1);
        step(x2, taps2);
    }
    std::vector<uint8_t> c(length);
    for (size_t n = 0; n < length; ++n) {
        c[n] = static_cast<uint8_t>((x1 ^ x2) & 1u);
        step(x1, taps1);
        step(x2, taps2);
    }
    return c;
}

/// c_init for the PBCH DMRS, parameterized by the SSB index and cell id.
/// For lmax > 8 only the low 3 bits of issb enter the packing.
inline uint32_t dmrs_cinit(int issb, int nid_cell, int lmax = 8) {
    if (issb < 0 || nid_cell < 0 || lmax < 1)
        throw std::out_of_range("dmrs_cinit: negative input");
    if (issb >= lmax) throw std::out_of_range("dmrs_cinit: issb must be < lmax");
    const uint32_t i3 = static_cast<uint32_t>(issb) & 0x7u;
    const uint32_t q = static_cast<uint32_t>(nid_cell) / 4u;
    const uint32_t r = static_cast<uint32_t>(nid_cell) % 4u;
    return (1u << 11) * (i3 + 1u) * (q + 1u) + (1u << 6) * (i3 + 1u) + r;
}

/// 144 QPSK DMRS symbols: rs[m] = ((1-2c[2m]) + j(1-2c[2m+1])) / sqrt(2).
struct DmrsSequence {
    std::array<cplx, kDmrsLength> symbols{};
    int issb = 0;
    CellIdentity cell;
};

inline DmrsSequence dmrs_sequence(int issb, const CellIdentity& cell, int lmax = 8) {
    DmrsSequence rs;
    rs.issb = issb;
    rs.cell = cell;
    const auto c = gold_c(dmrs_cinit(issb, cell.nid_cell(), lmax), 2 * kDmrsLength);
    const double amp = 1.0 / std::numbers::sqrt2;
    for (int m = 0; m < kDmrsLength; ++m) {
        rs.symbols[m] = cplx(amp * (1.0 - 2.0 * c[2 * m]), amp * (1.0 - 2.0 * c[2 * m + 1]));
    }
    return rs;
}

namespace detail {

// Order-7 m-sequence x(i+7) = (x(i+4) + x(i)) mod 2 from the PSS seed 1110110.
inline std::array<uint8_t, kSyncLength> pss_mseq() {
    std::array<uint8_t, kSyncLength> x{};
    uint8_t reg[7] = {0, 1, 1, 0, 1, 1, 1}; // x(0)..x(6)
    for (int i = 0; i < kSyncLength; ++i) {
        x[i] = reg[0];
        const uint8_t fb = static_cast<uint8_t>((reg[4] + reg[0]) & 1);
        for (int k = 0; k < 6; ++k) reg[k] = reg[k + 1];
        reg[6] = fb;
    }
    return x;
}

// SSS component m-sequences, both seeded 0000001.
inline std::array<uint8_t, kSyncLength> sss_mseq(bool second) {
    std::array<uint8_t, kSyncLength> x{};
    uint8_t reg[7] = {1, 0, 0, 0, 0, 0, 0};
    for (int i = 0; i < kSyncLength; ++i) {
        x[i] = reg[0];
        const uint8_t fb = second ? static_cast<uint8_t>((reg[1] + reg[0]) & 1)
                                  : static_cast<uint8_t>((reg[4] + reg[0]) & 1);
        for (int k = 0; k < 6; ++k) reg[k] = reg[k + 1];
        reg[6] = fb;
    }
    return x;
}

} // namespace detail

/// PSS: d(n) = 1 - 2 x((n + 43 nid2) mod 127), values in {+1,-1}.
inline std::array<double, kSyncLength> pss_sequence(int nid2) {
    if (nid2 < 0 || nid2 > 2) throw std::out_of_range("pss_sequence: nid2 must be in [0,2]");
    static const auto x = detail::pss_mseq();
    std::array<double, kSyncLength> d{};
    for (int n = 0; n < kSyncLength; ++n) {
        d[n] = 1.0 - 2.0 * x[(n + 43 * nid2) % kSyncLength];
    }
    return d;
}

/// SSS: product of the two component m-sequences at shifts
/// m0 = 15 floor(nid1/112) + 5 nid2, m1 = nid1 mod 112.
inline std::array<double, kSyncLength> sss_sequence(int nid1, int nid2) {
    if (nid1 < 0 || nid1 > 335) throw std::out_of_range("sss_sequence: nid1 must be in [0,335]");
    if (nid2 < 0 || nid2 > 2) throw std::out_of_range("sss_sequence: nid2 must be in [0,2]");
    static const auto x0 = detail::sss_mseq(false);
    static const auto x1 = detail::sss_mseq(true);
    const int m0 = 15 * (nid1 / 112) + 5 * nid2;
    const int m1 = nid1 % 112;
    std::array<double, kSyncLength> d{};
    for (int n = 0; n < kSyncLength; ++n) {
        d[n] = (1.0 - 2.0 * x0[(n + m0) % kSyncLength]) *
               (1.0 - 2.0 * x1[(n + m1) % kSyncLength]);
    }
    return d;
}

} // namespace nrssb::seq
