#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <future>
#include <optional>
#include <vector>

#include "nrssb/common.hpp"
#include "nrssb/phy.hpp"
#include "nrssb/seq.hpp"

namespace nrssb::detect {

inline constexpr int kFeatureCount = 288;

enum class FeatureSource : uint8_t { sim = 0, capture = 1 };

/// 288 real features: interleaved real/imag of the 144 extracted DMRS symbols.
struct DmrsFeatureVector {
    std::vector<double> x; // size 288
    std::optional<int> label;
    std::optional<double> snr_db;
    FeatureSource source = FeatureSource::sim;
};

struct PssResult {
    size_t n_ssb = 0; // first sample of the SSB
    int nid2 = 0;
    double metric = 0.0; // normalized correlation peak in [0,1]
};

struct SearchResult {
    size_t n_ssb = 0;
    seq::CellIdentity cell;
    double pss_metric = 0.0;
    double sss_metric = 0.0;
};

// PSS detection floor: peak must exceed kPssFloorFactor times the median
// normalized correlation over all lags (false-alarm calibrated; see the
// Monte-Carlo calibration in the pss_search tests).
inline constexpr double kPssFloorFactor = 6.0;

namespace detail {

// time-domain PSS replica: the PSS symbol's FFT-size data portion, no CP
inline cvec pss_replica(int nid2, const phy::FrameConfig& cfg) {
    const int n = cfg.fft_size;
    const auto d = seq::pss_sequence(nid2);
    cvec bins(n, cplx{});
    for (int i = 0; i < seq::kSyncLength; ++i) {
        const int sc = phy::kSyncFirstSc + i;
        bins[((sc - phy::kSsbSubcarriers / 2) + n) % n] = d[i];
    }
    fft_inplace(bins, true);
    return bins;
}

} // namespace detail

/// Time/N_ID2 search: normalized cross-correlation of the buffer against the
/// three PSS replicas. Returns nullopt when the best peak is below the
/// detection floor. Lag ranges fan out across the three replicas.
inline std::optional<PssResult> pss_search(const phy::IqBuffer& buf, const phy::FrameConfig& cfg) {
    const int n = cfg.fft_size;
    const int sym_len = cfg.symbol_len();
    const size_t len = buf.samples.size();
    if (len < static_cast<size_t>(phy::kSsbSymbols) * sym_len)
        throw std::invalid_argument("pss_search: buffer shorter than one SSB");

    // correlation lag = start of the PSS data portion; n_ssb = lag - cp_len
    const size_t first_lag = static_cast<size_t>(cfg.cp_len);
    const size_t last_lag = len - static_cast<size_t>(phy::kSsbSymbols) * sym_len + cfg.cp_len;
    const size_t n_lags = last_lag - first_lag + 1;

    // rolling window energies, shared by all three replicas
    std::vector<double> win_energy(n_lags);
    {
        double acc = 0.0;
        for (int i = 0; i < n; ++i) acc += std::norm(buf.samples[first_lag + i]);
        win_energy[0] = acc;
        for (size_t l = 1; l < n_lags; ++l) {
            acc += std::norm(buf.samples[first_lag + l - 1 + n]) -
                   std::norm(buf.samples[first_lag + l - 1]);
            win_energy[l] = acc;
        }
    }

    struct Branch {
        std::vector<double> metric;
        size_t best_lag = 0;
        double best = -1.0;
    };
    auto scan = [&](int nid2) {
        Branch br;
        br.metric.resize(n_lags);
        const cvec rep = detail::pss_replica(nid2, cfg);
        double rep_energy = 0.0;
        for (const auto& r : rep) rep_energy += std::norm(r);
        const cplx* x = buf.samples.data();
        for (size_t l = 0; l < n_lags; ++l) {
            cplx acc{};
            const cplx* w = x + first_lag + l;
            for (int i = 0; i < n; ++i) acc += w[i] * std::conj(rep[i]);
            const double denom = std::sqrt(rep_energy * win_energy[l]);
            const double m = denom > 1e-30 ? std::abs(acc) / denom : 0.0;
            br.metric[l] = m;
            if (m > br.best) {
                br.best = m;
                br.best_lag = l;
            }
        }
        return br;
    };

    std::array<std::future<Branch>, 3> futs;
    for (int nid2 = 0; nid2 < 3; ++nid2)
        futs[nid2] = std::async(std::launch::async, scan, nid2);

    int best_nid2 = 0;
    Branch branches[3];
    for (int nid2 = 0; nid2 < 3; ++nid2) {
        branches[nid2] = futs[nid2].get();
        if (branches[nid2].best > branches[best_nid2].best) best_nid2 = nid2;
    }

    // detection floor from the median metric over all lags and replicas
    std::vector<double> all;
    all.reserve(3 * n_lags);
    for (const auto& br : branches) all.insert(all.end(), br.metric.begin(), br.metric.end());
    std::nth_element(all.begin(), all.begin() + all.size() / 2, all.end());
    const double median = all[all.size() / 2];

    const Branch& win = branches[best_nid2];
    if (win.best < kPssFloorFactor * median) return std::nullopt;
    return PssResult{first_lag + win.best_lag - cfg.cp_len, best_nid2, win.best};
}

/// N_ID1 detection: FFT at the SSS symbol, argmax of the real inner product
/// against all 336 candidates for the detected nid2. Always returns an index;
/// the PBCH CRC catches wrong cells downstream.
inline std::pair<int, double> sss_detect(const phy::IqBuffer& buf, size_t n_ssb, int nid2,
                                         const phy::FrameConfig& cfg) {
    const int n = cfg.fft_size;
    const size_t start = n_ssb + cfg.cp_len + 2 * static_cast<size_t>(cfg.symbol_len());
    if (start + n > buf.samples.size()) throw std::out_of_range("sss_detect: n_ssb out of range");
    cvec bins(buf.samples.begin() + start, buf.samples.begin() + start + n);
    fft_inplace(bins, false);

    std::array<double, seq::kSyncLength> rx_re;
    for (int i = 0; i < seq::kSyncLength; ++i) {
        const int sc = phy::kSyncFirstSc + i;
        rx_re[i] = bins[((sc - phy::kSsbSubcarriers / 2) + n) % n].real();
    }
    int best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (int nid1 = 0; nid1 < 336; ++nid1) {
        const auto d = seq::sss_sequence(nid1, nid2);
        double score = 0.0;
        for (int i = 0; i < seq::kSyncLength; ++i) score += rx_re[i] * d[i];
        if (score > best_score) {
            best_score = score;
            best = nid1;
        }
    }
    return {best, best_score};
}

/// Extracts the 144 DMRS symbols from the three PBCH symbols at shift v and
/// interleaves real/imag into 288 features (offsets 0/60/84 per symbol).
inline DmrsFeatureVector dmrs_extract(const std::array<cvec, 3>& rf, int v) {
    DmrsFeatureVector vec;
    vec.x.resize(kFeatureCount);
    const auto pos = phy::dmrs_positions(v);
    for (int m = 0; m < seq::kDmrsLength; ++m) {
        const cplx s = rf[pos[m].first - 1][pos[m].second];
        vec.x[2 * m] = s.real();
        vec.x[2 * m + 1] = s.imag();
    }
    return vec;
}

/// Running normalization factor N_p: mean over vectors of per-vector mean power.
struct NormalizationState {
    double np_factor = 0.0;
    size_t count = 0;

    void update(const DmrsFeatureVector& vec) {
        double p = 0.0;
        for (double xi : vec.x) p += xi * xi;
        p /= static_cast<double>(kFeatureCount);
        ++count;
        np_factor += (p - np_factor) / static_cast<double>(count);
    }
};

/// Divides features by sqrt(N_p) so the post-normalization mean per-vector
/// power is 1. With update=true the vector is folded into the state first.
inline DmrsFeatureVector normalize(const DmrsFeatureVector& vec, NormalizationState& state,
                                   bool update) {
    if (update) state.update(vec);
    if (state.count == 0) throw std::logic_error("normalize: empty normalization state");
    if (state.np_factor <= 0.0) throw std::logic_error("normalize: nonpositive N_p");
    DmrsFeatureVector out = vec;
    const double scale = 1.0 / std::sqrt(state.np_factor);
    for (double& xi : out.x) xi *= scale;
    return out;
}

/// Correlation-based blind detection: argmax_i Re{rF_h . conj(s_i)} over the
/// candidate DMRS bank for the cell. Ties break to the lowest index.
inline std::pair<int, std::vector<double>> correlate_detect(const DmrsFeatureVector& vec,
                                                            const seq::CellIdentity& cell,
                                                            int lmax = 8) {
    if (vec.x.size() != kFeatureCount)
        throw std::invalid_argument("correlate_detect: need 288 features");
    std::vector<double> scores(lmax);
    int best = 0;
    for (int i = 0; i < lmax; ++i) {
        const auto s = seq::dmrs_sequence(i, cell, lmax);
        double score = 0.0;
        for (int m = 0; m < seq::kDmrsLength; ++m) {
            // Re{rF_h[m] * conj(s[m])}
            score += vec.x[2 * m] * s.symbols[m].real() + vec.x[2 * m + 1] * s.symbols[m].imag();
        }
        scores[i] = score;
        if (score > scores[best]) best = i;
    }
    return {best, scores};
}

enum class ActiveDetector { correlation, learner };

/// Detection selector: shadow-evaluates the learner via PBCH CRC feedback and
/// switches branches on the windowed success rate.
struct SelectorState {
    size_t window_size = 100;
    double threshold = 0.95;
    double hysteresis = 0.05;
    ActiveDetector active = ActiveDetector::correlation;

    std::vector<uint8_t> window; // ring of learner-correctness outcomes
    size_t head = 0;
    size_t filled = 0;

    bool window_full() const { return filled >= window_size; }
    double success_rate() const {
        if (filled == 0) return 0.0;
        size_t ok = 0;
        for (size_t i = 0; i < filled; ++i) ok += window[i];
        return static_cast<double>(ok) / static_cast<double>(filled);
    }
};

/// One selector update. crc_feedback is the PBCH CRC verdict under the
/// learner's hypothesis (shadow evaluation); it is attributed to the learner
/// whenever a learner output exists.
inline int selector_step(SelectorState& state, int corr_issb, std::optional<int> learner_issb,
                         std::optional<bool> crc_feedback) {
    if (state.window.size() != state.window_size) state.window.assign(state.window_size, 0);

    if (learner_issb && crc_feedback) {
        state.window[state.head] = *crc_feedback ? 1 : 0;
        state.head = (state.head + 1) % state.window_size;
        if (state.filled < state.window_size) ++state.filled;
    }

    const double rate = state.success_rate();
    if (state.active == ActiveDetector::correlation) {
        if (state.window_full() && rate >= state.threshold) state.active = ActiveDetector::learner;
    } else {
        if (rate < state.threshold - state.hysteresis) state.active = ActiveDetector::correlation;
    }

    if (state.active == ActiveDetector::learner && learner_issb) return *learner_issb;
    return corr_issb;
}

} // namespace nrssb::detect
