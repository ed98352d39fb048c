#include "rffi/feature/stft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>

namespace rffi::feature {

std::vector<double> hamming_window(std::size_t w) {
    require_config(w >= 1, "window length must be >= 1");
    std::vector<double> win(w, 1.0);
    if (w == 1) return win;
    constexpr double kTwoPi = 6.283185307179586476925286766559;
    for (std::size_t n = 0; n < w; ++n) {
        win[n] = 0.54 - 0.46 * std::cos(kTwoPi * static_cast<double>(n) / static_cast<double>(w - 1));
    }
    return win;
}

StftConfig StftConfig::hamming(std::size_t w, std::size_t hop) {
    StftConfig cfg;
    cfg.window = hamming_window(w);
    cfg.hop = hop;
    cfg.validate();
    return cfg;
}

void StftConfig::validate() const {
    require_config(!window.empty(), "window must be nonempty");
    require_config(hop >= 1 && hop <= window.size(), "hop must satisfy 1 <= R <= W");
    for (double v : window) {
        require_config(v > 0.0 && v <= 1.08, "window values must lie in (0, 1.08]");
    }
}

namespace {

// Shared FFTW plan per transform size. Plans are created unaligned so they
// can execute on caller-provided buffers; creation is serialized because
// the FFTW planner is not thread-safe.
fftw_plan plan_for(std::size_t w) {
    static std::mutex mutex;
    static std::map<std::size_t, fftw_plan> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(w);
    if (it != cache.end()) return it->second;
    std::vector<cplx> probe(w);
    auto* buf = reinterpret_cast<fftw_complex*>(probe.data());
    fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(w), buf, buf, FFTW_FORWARD,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
    cache.emplace(w, plan);
    return plan;
}

}  // namespace

Spectrogram stft(const signal::BasebandSignal& sig, const StftConfig& cfg, PowerTag tag) {
    cfg.validate();
    const std::size_t w = cfg.width();
    const std::size_t n = sig.samples.size();
    require(n >= w, "stft: signal shorter than the window");

    const std::size_t frames = frame_count_for_length(n, w, cfg.hop);
    Spectrogram s;
    s.config = cfg;
    s.power_tag = tag;
    s.bins = ComplexMatrix(w, frames);

    fftw_plan plan = plan_for(w);
    std::vector<cplx> frame(w);
    std::vector<cplx> spectrum(w);
    for (std::size_t m = 0; m < frames; ++m) {
        const std::size_t start = m * cfg.hop;
        for (std::size_t i = 0; i < w; ++i) {
            frame[i] = sig.samples[start + i] * cfg.window[i];
        }
        fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(frame.data()),
                         reinterpret_cast<fftw_complex*>(spectrum.data()));
        // rows follow the w = 1..W bin convention: row r is DFT bin (r+1) mod W
        cplx* col = s.bins.col_data(m);
        for (std::size_t r = 0; r + 1 < w; ++r) col[r] = spectrum[r + 1];
        col[w - 1] = spectrum[0];
    }
    return s;
}

std::size_t frame_count(int preamble_symbols, int spreading_factor, double bandwidth,
                        double sample_rate, std::size_t window, std::size_t hop) {
    require(preamble_symbols > 0 && spreading_factor > 0 && bandwidth > 0.0 &&
                sample_rate > 0.0 && window > 0 && hop > 0,
            "frame_count: all parameters must be positive");
    const double samples = static_cast<double>(preamble_symbols) *
                           std::ldexp(1.0, spreading_factor) / bandwidth * sample_rate;
    require(samples >= static_cast<double>(window), "frame_count: signal shorter than one window");
    return static_cast<std::size_t>((samples - static_cast<double>(window)) / static_cast<double>(hop)) + 1;
}

std::size_t frame_count_for_length(std::size_t n, std::size_t window, std::size_t hop) {
    require(window > 0 && hop > 0, "frame_count: window and hop must be positive");
    require(n >= window, "frame_count: signal shorter than one window");
    return (n - window) / hop + 1;
}

RealMatrix magnitude_db(const ComplexMatrix& bins) {
    RealMatrix db(bins.rows(), bins.cols());
    for (std::size_t i = 0; i < bins.size(); ++i) {
        const double mag = std::max(std::abs(bins.data()[i]), 1e-150);
        db.data()[i] = 20.0 * std::log10(mag);
    }
    return db;
}

}  // namespace rffi::feature
