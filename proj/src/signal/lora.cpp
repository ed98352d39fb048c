#include "rffi/signal/lora.hpp"

#include <cmath>

namespace rffi::signal {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

void LoRaConfig::validate() const {
    require_config(spreading_factor >= 7 && spreading_factor <= 12,
                   "spreading factor must be in 7..12");
    require_config(bandwidth > 0.0, "bandwidth must be positive");
    require_config(sample_rate >= bandwidth, "sample rate must be >= bandwidth");
    require_config(preamble_symbols >= 1, "preamble must contain at least one symbol");
    const double sps = std::ldexp(1.0, spreading_factor) / bandwidth * sample_rate;
    require_config(std::abs(sps - std::round(sps)) < 1e-6 && sps >= 1.0,
                   "2^SF/B * f_S must be a positive integer (integer samples per symbol)");
}

std::size_t LoRaConfig::samples_per_symbol() const {
    const double sps = std::ldexp(1.0, spreading_factor) / bandwidth * sample_rate;
    return static_cast<std::size_t>(std::llround(sps));
}

BasebandSignal generate_preamble(const LoRaConfig& cfg) {
    cfg.validate();
    const std::size_t sps = cfg.samples_per_symbol();
    const double symbol_duration = std::ldexp(1.0, cfg.spreading_factor) / cfg.bandwidth;
    const double chirp_rate = cfg.bandwidth / symbol_duration;  // Hz per second
    const double ts = 1.0 / cfg.sample_rate;

    // One symbol: instantaneous frequency f(t) = -B/2 + chirp_rate * t,
    // phase(t) = 2 pi (-B/2 t + chirp_rate t^2 / 2). Constant envelope.
    std::vector<cplx> symbol(sps);
    for (std::size_t n = 0; n < sps; ++n) {
        const double t = static_cast<double>(n) * ts;
        const double phase = kTwoPi * (-0.5 * cfg.bandwidth * t + 0.5 * chirp_rate * t * t);
        symbol[n] = std::polar(1.0, phase);
    }

    BasebandSignal out;
    out.sample_rate = cfg.sample_rate;
    out.samples.resize(sps * static_cast<std::size_t>(cfg.preamble_symbols));
    for (int k = 0; k < cfg.preamble_symbols; ++k) {
        std::copy(symbol.begin(), symbol.end(), out.samples.begin() + static_cast<std::ptrdiff_t>(k) * static_cast<std::ptrdiff_t>(sps));
    }

    if (cfg.carrier_offset != 0.0) {
        for (std::size_t n = 0; n < out.samples.size(); ++n) {
            out.samples[n] *= std::polar(1.0, kTwoPi * cfg.carrier_offset * static_cast<double>(n) * ts);
        }
    }
    return out;
}

}  // namespace rffi::signal
