#ifndef RFFI_FEATURE_STFT_HPP
#define RFFI_FEATURE_STFT_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "rffi/matrix.hpp"
#include "rffi/signal/lora.hpp"

namespace rffi::feature {

// Symmetric Hamming window of length w: 0.54 - 0.46 cos(2 pi n / (w - 1)).
std::vector<double> hamming_window(std::size_t w);

struct StftConfig {
    std::vector<double> window;  // length W, values in (0, 1.08]
    std::size_t hop = 512;       // R

    static StftConfig hamming(std::size_t w = 1024, std::size_t hop = 512);

    std::size_t width() const { return window.size(); }
    void validate() const;
};

enum class PowerTag : std::uint8_t { high = 0, low = 1 };

// W x M complex matrix: rows are frequency bins w = 1..W (so row r holds DFT
// bin (r+1) mod W), columns are frames starting at (m-1)*R.
struct Spectrogram {
    ComplexMatrix bins;
    StftConfig config;
    PowerTag power_tag = PowerTag::high;

    std::size_t width() const { return bins.rows(); }
    std::size_t frames() const { return bins.cols(); }
};

Spectrogram stft(const signal::BasebandSignal& sig, const StftConfig& cfg,
                 PowerTag tag = PowerTag::high);

// Number of frames for a K-symbol preamble:
// floor((K * 2^SF / B * f_S - W) / R) + 1.
std::size_t frame_count(int preamble_symbols, int spreading_factor, double bandwidth,
                        double sample_rate, std::size_t window, std::size_t hop);
std::size_t frame_count_for_length(std::size_t n, std::size_t window, std::size_t hop);

// 10 log10(|S|^2) with a floor on |S| to keep entries finite.
RealMatrix magnitude_db(const ComplexMatrix& bins);

}  // namespace rffi::feature

#endif
