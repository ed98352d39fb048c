#ifndef RFFI_SIGNAL_CHANNEL_HPP
#define RFFI_SIGNAL_CHANNEL_HPP

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "rffi/signal/lora.hpp"

namespace rffi::signal {

struct ChannelTap {
    std::size_t delay = 0;  // samples
    cplx gain{1.0, 0.0};
};

// Slow multiplicative gain trajectory g[n], unit mean, strictly positive.
// Parameterized rather than materialized so a trajectory can be evaluated
// over the full span of a consecutive high/low capture pair.
struct TimeVariation {
    enum class Kind { flat, sinusoidal, gauss_markov };
    Kind kind = Kind::flat;
    double amplitude = 0.0;  // modulation depth; < 1 for sinusoidal, log-sigma for gauss_markov
    double rate_hz = 0.0;
    double phase = 0.0;           // sinusoidal start phase, radians
    std::uint64_t seed = 0;       // gauss_markov innovation stream

    std::vector<double> materialize(std::size_t n, double sample_rate) const;
};

struct ChannelRealization {
    std::vector<ChannelTap> taps{{0, {1.0, 0.0}}};
    double doppler_hz = 0.0;
    TimeVariation time_variation;
    double snr_db = std::numeric_limits<double>::infinity();
    std::string meta;  // descriptor, e.g. "indoor/seed=42"

    void validate() const;  // >= 1 tap, delays nonnegative strictly increasing
};

// y[n] = g[n] * e^{j 2 pi f_d n / f_S} * sum_k h_k x[n - d_k] + noise,
// with circular complex Gaussian noise at snr_db relative to the power of
// the noiseless output. Output length equals input length. Deterministic
// given noise_seed. sample_offset shifts the time-variation/Doppler clock
// and the noise stream, letting consecutive transmissions share one
// trajectory and one noise floor. noise_power_reference, when positive,
// overrides the power the noise level is computed from.
BasebandSignal apply_channel(const BasebandSignal& signal, const ChannelRealization& ch,
                             std::uint64_t noise_seed, std::size_t sample_offset = 0,
                             double noise_power_reference = 0.0);

enum class Environment { chamber, indoor, outdoor };

Environment parse_environment(const std::string& name);
std::string environment_name(Environment env);

// Qualitative environment descriptions mapped onto sampling ranges.
// All values are simulator defaults and overridable through the config file.
struct EnvPreset {
    int min_taps = 1;
    int max_taps = 1;
    double delay_step_min = 1.0;   // samples between consecutive taps
    double delay_step_max = 1.0;
    double decay_per_sample = 0.0; // exponential tap-power decay vs delay
    double shadow_sigma_db = 0.0;  // lognormal overall gain spread
    double doppler_min_hz = 0.0;
    double doppler_max_hz = 0.0;
    TimeVariation::Kind var_kind = TimeVariation::Kind::flat;
    double var_amp_min = 0.0;
    double var_amp_max = 0.0;
    double var_rate_min_hz = 0.0;
    double var_rate_max_hz = 0.0;
    double snr_min_db = std::numeric_limits<double>::infinity();
    double snr_max_db = std::numeric_limits<double>::infinity();
};

struct ChannelPresets {
    EnvPreset chamber;
    EnvPreset indoor;
    EnvPreset outdoor;

    static ChannelPresets defaults();
    const EnvPreset& get(Environment env) const;
};

ChannelRealization sample_channel(Environment env, std::uint64_t seed,
                                  const ChannelPresets& presets = ChannelPresets::defaults());

}  // namespace rffi::signal

#endif
