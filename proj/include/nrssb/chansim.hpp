#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <vector>

#include "nrssb/common.hpp"
#include "nrssb/phy.hpp"
#include "nrssb/rng.hpp"

namespace nrssb::chansim {

enum class ChannelMode { awgn_only, beam_signature };

/// One reproducible experiment condition: static per-beam frequency responses,
/// a DMRS-referenced noise level, and deterministic impairments.
struct ChannelScenario {
    uint64_t seed = 0;
    int lmax = 8;
    ChannelMode mode = ChannelMode::awgn_only;
    double snr_db = std::numeric_limits<double>::infinity(); // +inf = noiseless
    int taps = 4;
    int timing_offset = 0;
    double cfo_hz = 0.0;
    std::vector<cvec> beam_signatures; // lmax x 240, mean power 1 per beam
};

/// Builds a scenario. beam_signature mode draws `taps` complex Gaussian
/// time-domain taps per beam, converts them to a 240-bin response, and
/// normalizes each beam to unit mean power so snr_db stays well-defined.
inline ChannelScenario scenario_build(uint64_t seed, int lmax, ChannelMode mode, double snr_db,
                                      int taps = 4, int cp_len_limit = 18) {
    if (taps < 1) throw config_error("scenario: taps must be >= 1");
    if (taps > cp_len_limit)
        throw config_error("scenario: taps exceed the cyclic prefix; one-tap equalization breaks");
    ChannelScenario sc;
    sc.seed = seed;
    sc.lmax = lmax;
    sc.mode = mode;
    sc.snr_db = snr_db;
    sc.taps = taps;
    sc.beam_signatures.assign(lmax, cvec(phy::kSsbSubcarriers, cplx{1.0, 0.0}));
    if (mode == ChannelMode::beam_signature) {
        constexpr int kConvFft = 1024; // nominal grid for tap-to-bin conversion
        for (int b = 0; b < lmax; ++b) {
            Rng rng(stream_seed(seed, 0x5160'0000ull + static_cast<uint64_t>(b)));
            cvec g(taps);
            for (auto& tap : g) tap = rng.cnormal();
            cvec& h = sc.beam_signatures[b];
            double power = 0.0;
            for (int sc_idx = 0; sc_idx < phy::kSsbSubcarriers; ++sc_idx) {
                const double f = static_cast<double>(sc_idx - phy::kSsbSubcarriers / 2);
                cplx acc{};
                for (int t = 0; t < taps; ++t) {
                    const double ang = -2.0 * std::numbers::pi * f * t / kConvFft;
                    acc += g[t] * cplx(std::cos(ang), std::sin(ang));
                }
                h[sc_idx] = acc;
                power += std::norm(acc);
            }
            const double scale = 1.0 / std::sqrt(power / phy::kSsbSubcarriers);
            for (auto& bin : h) bin *= scale;
        }
    }
    return sc;
}

/// Which samples carry which beam's SSB.
struct SsbSlot {
    size_t start_sample = 0; // first sample of the SSB (CP of the PSS symbol)
    int issb = 0;
    int v = 0; // DMRS shift of the transmitted cell
};

/// Applies the scenario: per-SSB beam filtering in the frequency domain,
/// timing delay, CFO rotation, and white noise calibrated so the post-channel
/// DMRS-RE SNR equals snr_db in expectation. Noise stream is derived from
/// (seed, trial) so trials parallelize deterministically.
inline phy::IqBuffer apply(const phy::IqBuffer& buf, const ChannelScenario& scenario,
                           const std::vector<SsbSlot>& schedule, const phy::FrameConfig& cfg,
                           uint64_t trial = 0) {
    phy::IqBuffer out = buf;
    const int n = cfg.fft_size;
    const int sym_len = cfg.symbol_len();

    double dmrs_power = 0.0; // mean |H|^2 over scheduled DMRS REs
    int dmrs_terms = 0;
    for (const auto& slot : schedule) {
        if (slot.issb < 0 || slot.issb >= scenario.lmax)
            throw std::out_of_range("chansim: slot issb out of range");
        const size_t end = slot.start_sample + static_cast<size_t>(phy::kSsbSymbols) * sym_len;
        if (end > out.samples.size()) throw std::out_of_range("chansim: slot outside buffer");

        const cvec& h = scenario.beam_signatures[slot.issb];
        for (int s = 0; s < phy::kSsbSymbols; ++s) {
            cplx* sym = out.samples.data() + slot.start_sample + static_cast<size_t>(s) * sym_len;
            cvec bins(sym + cfg.cp_len, sym + sym_len);
            fft_inplace(bins, false);
            for (int sc_idx = 0; sc_idx < phy::kSsbSubcarriers; ++sc_idx) {
                const int bin = ((sc_idx - phy::kSsbSubcarriers / 2) + n) % n;
                bins[bin] *= h[sc_idx];
            }
            fft_inplace(bins, true);
            for (auto& b : bins) b /= static_cast<double>(n);
            for (int i = 0; i < cfg.cp_len; ++i) sym[i] = bins[n - cfg.cp_len + i];
            std::copy(bins.begin(), bins.end(), sym + cfg.cp_len);
        }
        for (const auto& [psym, psc] : phy::dmrs_positions(slot.v)) {
            (void)psym;
            dmrs_power += std::norm(h[psc]);
            ++dmrs_terms;
        }
    }
    const double signal_power = dmrs_terms > 0 ? dmrs_power / dmrs_terms : 1.0;

    if (scenario.timing_offset != 0) {
        const int k = scenario.timing_offset;
        if (k < 0 || static_cast<size_t>(k) >= out.samples.size())
            throw std::out_of_range("chansim: timing offset outside buffer");
        cvec delayed(out.samples.size(), cplx{});
        std::copy(out.samples.begin(), out.samples.end() - k, delayed.begin() + k);
        out.samples = std::move(delayed);
    }

    if (scenario.cfo_hz != 0.0) {
        const double w = 2.0 * std::numbers::pi * scenario.cfo_hz / cfg.sample_rate;
        for (size_t i = 0; i < out.samples.size(); ++i) {
            out.samples[i] *= cplx(std::cos(w * i), std::sin(w * i));
        }
    }

    if (std::isfinite(scenario.snr_db)) {
        // demodulator scales by 1/N, so per-RE noise variance is sigma_t^2 / N
        const double snr_lin = std::pow(10.0, scenario.snr_db / 10.0);
        const double sigma_t = std::sqrt(signal_power * n / snr_lin);
        Rng rng(stream_seed(scenario.seed, 0xA0D0'0000ull + trial));
        for (auto& sample : out.samples) sample += sigma_t * rng.cnormal();
    }
    return out;
}

/// DMRS-referenced SNR between a known transmitted grid and received symbols.
/// A single complex gain is fit over the DMRS REs; residual power is noise.
inline double snr_measure(const phy::SsbGrid& tx, const std::array<cvec, 3>& rf) {
    const auto pos = phy::dmrs_positions(tx.cell.v());
    cplx cross{};
    double txp = 0.0;
    for (const auto& [sym, sc] : pos) {
        cross += rf[sym - 1][sc] * std::conj(tx.at(sym, sc));
        txp += std::norm(tx.at(sym, sc));
    }
    const cplx g = cross / txp;
    double noise = 0.0;
    for (const auto& [sym, sc] : pos) noise += std::norm(rf[sym - 1][sc] - g * tx.at(sym, sc));
    noise /= static_cast<double>(pos.size());
    const double signal = std::norm(g) * txp / static_cast<double>(pos.size());
    if (noise < 1e-30) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(signal / noise);
}

} // namespace nrssb::chansim
