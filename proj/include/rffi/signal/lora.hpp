#ifndef RFFI_SIGNAL_LORA_HPP
#define RFFI_SIGNAL_LORA_HPP

#include <cstdint>
#include <vector>

#include "rffi/common.hpp"

namespace rffi::signal {

// Complex baseband samples at a fixed receiver rate.
struct BasebandSignal {
    std::vector<cplx> samples;
    double sample_rate = 0.0;  // Hz

    std::size_t size() const { return samples.size(); }
};

// Chirp-spread-spectrum preamble parameters. A symbol spans 2^SF chips over
// bandwidth B, so its duration is 2^SF/B seconds and it occupies
// (2^SF/B)*f_S samples, which must be an integer.
struct LoRaConfig {
    int spreading_factor = 10;      // SF, 7..12
    double bandwidth = 62.5e3;      // B, Hz
    double sample_rate = 1e6;       // f_S, Hz
    int preamble_symbols = 10;      // K
    double carrier_offset = 0.0;    // Hz, baseband frequency shift

    void validate() const;
    std::size_t samples_per_symbol() const;
    std::size_t preamble_samples() const { return samples_per_symbol() * static_cast<std::size_t>(preamble_symbols); }
};

// K identical up-chirps, each sweeping -B/2 -> +B/2 over one symbol.
// Unit peak amplitude, constant envelope, payload-independent.
BasebandSignal generate_preamble(const LoRaConfig& cfg);

}  // namespace rffi::signal

#endif
