#ifndef RFFI_FEATURE_QUOTIENT_HPP
#define RFFI_FEATURE_QUOTIENT_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "rffi/feature/stft.hpp"

namespace rffi::feature {

// Distorted-pair screening: correlation of the per-frame peak magnitudes of
// the high- and low-power spectrograms, compared against the same statistic
// measured in the reflection-free reference environment.
struct FilterResult {
    bool accepted = false;
    double rho = 0.0;    // Pearson correlation of the two peak sequences
    double rho_d = 0.0;  // |rho_ref - rho|
};

// Per-frame maximum magnitude across frequency bins: a length-M sequence.
std::vector<double> frame_peak_magnitudes(const Spectrogram& s);

double pearson(const std::vector<double>& a, const std::vector<double>& b);

FilterResult correlation_filter(const Spectrogram& s_high, const Spectrogram& s_low,
                                double rho_ref, double theta);

// Element-wise division of high by low, in dB. Bins whose low-power
// denominator magnitude falls below epsilon * max|S_low| are masked and
// reported as 0 dB; they carry no usable quotient information.
struct QuotientFingerprint {
    RealMatrix q_db;                 // W x M
    std::vector<std::uint8_t> mask;  // 1 = guarded bin, same layout as q_db
    std::string device_id;
    std::string claimed_id;

    bool guarded(std::size_t r, std::size_t c) const { return mask[c * q_db.rows() + r] != 0; }
};

constexpr double kQuotientGuardEpsilon = 1e-6;

QuotientFingerprint quotient(const Spectrogram& s_high, const Spectrogram& s_low,
                             double guard_epsilon = kQuotientGuardEpsilon);

}  // namespace rffi::feature

#endif
