#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <numbers>
#include <utility>
#include <vector>

#include "nrssb/common.hpp"
#include "nrssb/crc.hpp"
#include "nrssb/fft.hpp"
#include "nrssb/rng.hpp"
#include "nrssb/seq.hpp"

namespace nrssb::phy {

inline constexpr int kSsbSubcarriers = 240;
inline constexpr int kSsbSymbols = 4;
inline constexpr int kSyncFirstSc = 56; // PSS/SSS occupy 56..182
inline constexpr int kPbchDataRes = 432;
inline constexpr int kPayloadBits = 168;
inline constexpr int kCodedBits = 432; // 192 payload+CRC bits, repeated and truncated

/// OFDM frame numerology and SSB burst schedule.
struct FrameConfig {
    double sample_rate = 30'720'000.0;
    double scs = 30'000.0;
    int fft_size = 1024;
    int cp_len = 72;
    int lmax = 8;
    double ssb_period_ms = 20.0;
    std::vector<int> burst_positions = {4, 8, 16, 20, 32, 36, 44, 48}; // case B symbol offsets
    double buffer_duration = 0.02; // T_bu seconds

    int symbol_len() const { return cp_len + fft_size; }
    size_t buffer_samples() const { return static_cast<size_t>(sample_rate * buffer_duration + 0.5); }
    size_t period_samples() const { return static_cast<size_t>(sample_rate * ssb_period_ms / 1000.0 + 0.5); }

    void validate() const {
        if (sample_rate <= 0 || scs <= 0) throw config_error("frame: rates must be positive");
        if (static_cast<double>(fft_size) * scs != sample_rate)
            throw config_error("frame: fft_size must equal sample_rate / scs exactly");
        if (cp_len < 0) throw config_error("frame: negative cp_len");
        if (static_cast<int>(burst_positions.size()) != lmax)
            throw config_error("frame: burst_positions must have lmax entries");
        for (size_t i = 1; i < burst_positions.size(); ++i) {
            if (burst_positions[i] - burst_positions[i - 1] < kSsbSymbols)
                throw config_error("frame: burst positions overlap");
        }
        if (buffer_samples() < period_samples())
            throw config_error("frame: buffer must cover one SSB period");
    }

    /// Small numerology for fast simulation runs; identical structure, 256-point FFT.
    static FrameConfig desk(double period_ms = 2.0) {
        FrameConfig cfg;
        cfg.sample_rate = 7'680'000.0;
        cfg.fft_size = 256;
        cfg.cp_len = 18;
        cfg.ssb_period_ms = period_ms;
        cfg.buffer_duration = period_ms / 1000.0;
        return cfg;
    }
};

struct IqBuffer {
    enum class Origin { simulated, file };
    cvec samples;
    double sample_rate = 0.0;
    Origin origin = Origin::simulated;
};

/// 168 payload bits + CRC-24; the receive side records the CRC verdict.
struct PbchPayload {
    std::vector<uint8_t> bits; // 192 = payload + CRC
    bool crc_ok = false;
};

inline PbchPayload pbch_random_payload(Rng& rng) {
    std::vector<uint8_t> payload(kPayloadBits);
    for (auto& b : payload) b = static_cast<uint8_t>(rng.next_u64() & 1u);
    PbchPayload p;
    p.bits = crc24_attach(payload);
    p.crc_ok = true;
    return p;
}

using RePos = std::pair<int, int>; // (symbol, subcarrier)

/// DMRS resource elements in extraction order:
/// symbol 1 (60), symbol 2 (24), symbol 3 (60); stride 4, offset v.
inline std::vector<RePos> dmrs_positions(int v) {
    std::vector<RePos> pos;
    pos.reserve(seq::kDmrsLength);
    for (int m = 0; m < 60; ++m) pos.emplace_back(1, v + 4 * m);
    for (int m = 0; m < 12; ++m) pos.emplace_back(2, v + 4 * m);
    for (int m = 0; m < 12; ++m) pos.emplace_back(2, 192 + v + 4 * m);
    for (int m = 0; m < 60; ++m) pos.emplace_back(3, v + 4 * m);
    return pos;
}

/// PBCH data resource elements in scan order (symbol-major, ascending subcarrier),
/// skipping the DMRS positions. Exactly 432 entries.
inline std::vector<RePos> pbch_data_positions(int v) {
    std::vector<RePos> pos;
    pos.reserve(kPbchDataRes);
    auto is_dmrs = [v](int sc) { return sc % 4 == v; };
    for (int sc = 0; sc < kSsbSubcarriers; ++sc)
        if (!is_dmrs(sc)) pos.emplace_back(1, sc);
    for (int sc = 0; sc < 48; ++sc)
        if (!is_dmrs(sc)) pos.emplace_back(2, sc);
    for (int sc = 192; sc < kSsbSubcarriers; ++sc)
        if (!is_dmrs(sc)) pos.emplace_back(2, sc);
    for (int sc = 0; sc < kSsbSubcarriers; ++sc)
        if (!is_dmrs(sc)) pos.emplace_back(3, sc);
    return pos;
}

/// One SSB: 4 symbols x 240 subcarriers, symbol-major.
struct SsbGrid {
    std::array<std::array<cplx, kSsbSubcarriers>, kSsbSymbols> re{};
    int issb = 0;
    seq::CellIdentity cell;

    cplx& at(int sym, int sc) { return re[sym][sc]; }
    const cplx& at(int sym, int sc) const { return re[sym][sc]; }
};

namespace detail {

// coded bit stream: the 192 payload+CRC bits repeated to 432
inline std::vector<uint8_t> pbch_bit_stream(const PbchPayload& payload) {
    if (payload.bits.size() != kPayloadBits + 24)
        throw std::invalid_argument("pbch: payload must be 192 bits");
    std::vector<uint8_t> s(kCodedBits);
    for (int i = 0; i < kCodedBits; ++i) s[i] = payload.bits[i % (kPayloadBits + 24)];
    return s;
}

inline cplx qpsk(uint8_t b0, uint8_t b1) {
    const double amp = 1.0 / std::numbers::sqrt2;
    return {amp * (1.0 - 2.0 * b0), amp * (1.0 - 2.0 * b1)};
}

} // namespace detail

/// Builds the SSB grid per the standard multiplexing table: PSS/SSS on the
/// center 127 subcarriers of symbols 0/2, PBCH data + DMRS elsewhere.
/// Each coded QPSK symbol is placed on two consecutive data REs.
inline SsbGrid grid_assemble(int issb, const seq::CellIdentity& cell, const PbchPayload& payload,
                             int lmax = 8) {
    SsbGrid grid;
    grid.issb = issb;
    grid.cell = cell;

    const auto pss = seq::pss_sequence(cell.nid2);
    const auto sss = seq::sss_sequence(cell.nid1, cell.nid2);
    for (int n = 0; n < seq::kSyncLength; ++n) {
        grid.at(0, kSyncFirstSc + n) = pss[n];
        grid.at(2, kSyncFirstSc + n) = sss[n];
    }

    const int v = cell.v();
    const auto rs = seq::dmrs_sequence(issb, cell, lmax);
    const auto dmrs_pos = dmrs_positions(v);
    for (int m = 0; m < seq::kDmrsLength; ++m) {
        grid.at(dmrs_pos[m].first, dmrs_pos[m].second) = rs.symbols[m];
    }

    const auto stream = detail::pbch_bit_stream(payload);
    const auto data_pos = pbch_data_positions(v);
    for (int r = 0; r < kPbchDataRes; ++r) {
        const int k = r / 2; // QPSK symbol index, repeated on two REs
        grid.at(data_pos[r].first, data_pos[r].second) = detail::qpsk(stream[2 * k], stream[2 * k + 1]);
    }
    return grid;
}

/// IFFT + cyclic prefix for a list of SSBs at symbol-offset burst positions.
/// Subcarrier 0 of the grid maps to FFT bin -120 relative to DC.
/// Modulator IFFT is unscaled; the demodulator divides by fft_size, so a
/// unit-amplitude RE round-trips to unit amplitude.
inline IqBuffer ofdm_modulate(const std::vector<std::pair<SsbGrid, int>>& grids,
                              const FrameConfig& cfg) {
    cfg.validate();
    IqBuffer buf;
    buf.sample_rate = cfg.sample_rate;
    buf.samples.assign(cfg.buffer_samples(), cplx{});

    const int n = cfg.fft_size;
    const int sym_len = cfg.symbol_len();
    std::vector<char> used(buf.samples.size(), 0);

    for (const auto& [grid, pos] : grids) {
        const size_t start = static_cast<size_t>(pos) * sym_len;
        const size_t end = start + static_cast<size_t>(kSsbSymbols) * sym_len;
        if (end > buf.samples.size())
            throw std::out_of_range("ofdm_modulate: SSB does not fit in buffer");
        for (size_t i = start; i < end; ++i) {
            if (used[i]) throw std::invalid_argument("ofdm_modulate: overlapping SSBs");
            used[i] = 1;
        }
        for (int s = 0; s < kSsbSymbols; ++s) {
            cvec bins(n, cplx{});
            for (int sc = 0; sc < kSsbSubcarriers; ++sc) {
                const int bin = ((sc - kSsbSubcarriers / 2) + n) % n;
                bins[bin] = grid.at(s, sc);
            }
            fft_inplace(bins, true); // unscaled inverse transform
            cplx* dst = buf.samples.data() + start + static_cast<size_t>(s) * sym_len;
            for (int i = 0; i < cfg.cp_len; ++i) dst[i] = bins[n - cfg.cp_len + i];
            std::copy(bins.begin(), bins.end(), dst + cfg.cp_len);
        }
    }
    return buf;
}

/// FFT extraction of the three PBCH-bearing symbols after n_ssb (SSB symbols
/// 1..3), cropped to the 240 SSB subcarriers. n_ssb marks the first sample of
/// the SSB (start of the PSS symbol's cyclic prefix).
inline std::array<cvec, 3> ofdm_demodulate(const IqBuffer& buf, size_t n_ssb,
                                           const FrameConfig& cfg) {
    const int n = cfg.fft_size;
    const int sym_len = cfg.symbol_len();
    if (n_ssb + static_cast<size_t>(kSsbSymbols) * sym_len > buf.samples.size())
        throw std::out_of_range("ofdm_demodulate: n_ssb out of range");

    std::array<cvec, 3> out;
    for (int i = 1; i <= 3; ++i) {
        const size_t start = n_ssb + cfg.cp_len + static_cast<size_t>(sym_len) * i;
        cvec bins(buf.samples.begin() + start, buf.samples.begin() + start + n);
        fft_inplace(bins, false);
        cvec& sym = out[i - 1];
        sym.resize(kSsbSubcarriers);
        for (int sc = 0; sc < kSsbSubcarriers; ++sc) {
            const int bin = ((sc - kSsbSubcarriers / 2) + n) % n;
            sym[sc] = bins[bin] / static_cast<double>(n);
        }
    }
    return out;
}

/// Zero-forcing estimate H[m] = conj(X_p[m]) * Y_p[m] (exact for unit-modulus pilots).
inline cvec channel_estimate(const cvec& rx_dmrs, const seq::DmrsSequence& ref) {
    if (rx_dmrs.size() != seq::kDmrsLength)
        throw std::invalid_argument("channel_estimate: need 144 received DMRS symbols");
    cvec h(seq::kDmrsLength);
    for (int m = 0; m < seq::kDmrsLength; ++m) h[m] = std::conj(ref.symbols[m]) * rx_dmrs[m];
    return h;
}

/// One-tap equalization: yd * conj(h) / |h|^2.
inline cplx equalize(cplx yd, cplx h) {
    const double p = std::norm(h);
    if (p < 1e-30) throw std::domain_error("equalize: channel magnitude too small");
    return yd * std::conj(h) / p;
}

/// DMRS-based channel estimation, nearest-neighbor interpolation in frequency,
/// one-tap equalization, hard QPSK slicing with repetition combining, CRC-24 check.
inline PbchPayload pbch_recover(const std::array<cvec, 3>& rf, int issb,
                                const seq::CellIdentity& cell, int lmax = 8) {
    const int v = cell.v();
    const auto ref = seq::dmrs_sequence(issb, cell, lmax);
    const auto dmrs_pos = dmrs_positions(v);

    cvec rx_dmrs(seq::kDmrsLength);
    for (int m = 0; m < seq::kDmrsLength; ++m)
        rx_dmrs[m] = rf[dmrs_pos[m].first - 1][dmrs_pos[m].second];
    const cvec h = channel_estimate(rx_dmrs, ref);

    // per-symbol sorted DMRS subcarrier lists for nearest-neighbor lookup
    std::array<std::vector<std::pair<int, int>>, 3> by_sym; // (sc, index into h)
    for (int m = 0; m < seq::kDmrsLength; ++m)
        by_sym[dmrs_pos[m].first - 1].emplace_back(dmrs_pos[m].second, m);
    for (auto& list : by_sym) std::sort(list.begin(), list.end());

    auto nearest_h = [&](int sym, int sc) -> cplx {
        const auto& list = by_sym[sym - 1];
        auto it = std::lower_bound(list.begin(), list.end(), std::make_pair(sc, -1));
        if (it == list.end()) return h[list.back().second];
        if (it == list.begin()) return h[it->second];
        auto prev = std::prev(it);
        return (sc - prev->first <= it->first - sc) ? h[prev->second] : h[it->second];
    };

    const auto data_pos = pbch_data_positions(v);
    std::vector<double> soft(kCodedBits, 0.0); // positive = bit 0
    bool eq_failed = false;
    for (int r = 0; r < kPbchDataRes; ++r) {
        const auto [sym, sc] = data_pos[r];
        const int k = r / 2;
        cplx x;
        try {
            x = equalize(rf[sym - 1][sc], nearest_h(sym, sc));
        } catch (const std::domain_error&) {
            eq_failed = true;
            break;
        }
        soft[2 * k] += x.real();
        soft[2 * k + 1] += x.imag();
    }

    PbchPayload out;
    out.bits.assign(kPayloadBits + 24, 0);
    if (!eq_failed) {
        // fold the truncated repetition back onto the 192 payload+CRC bits
        std::vector<double> acc(kPayloadBits + 24, 0.0);
        for (int i = 0; i < kCodedBits; ++i) acc[i % (kPayloadBits + 24)] += soft[i];
        for (int i = 0; i < kPayloadBits + 24; ++i) out.bits[i] = acc[i] < 0.0 ? 1 : 0;
        out.crc_ok = crc24_check(out.bits);
    }
    return out;
}

} // namespace nrssb::phy
