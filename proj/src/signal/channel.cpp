#include "rffi/signal/channel.hpp"

#include <cmath>
#include <random>

namespace rffi::signal {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

std::vector<double> TimeVariation::materialize(std::size_t n, double sample_rate) const {
    std::vector<double> g(n, 1.0);
    switch (kind) {
        case Kind::flat:
            break;
        case Kind::sinusoidal: {
            require_config(std::abs(amplitude) < 1.0, "sinusoidal variation depth must be < 1");
            for (std::size_t i = 0; i < n; ++i) {
                g[i] = 1.0 + amplitude * std::sin(kTwoPi * rate_hz * static_cast<double>(i) / sample_rate + phase);
            }
            break;
        }
        case Kind::gauss_markov: {
            // log-domain AR(1): stationary sigma = amplitude, correlation set
            // by rate_hz; exp(s - sigma^2/2) keeps the mean at 1.
            const double sigma = amplitude;
            const double rho = std::exp(-rate_hz / sample_rate);
            const double innov = sigma * std::sqrt(std::max(0.0, 1.0 - rho * rho));
            std::mt19937_64 rng(seed);
            std::normal_distribution<double> normal(0.0, 1.0);
            double s = sigma * normal(rng);
            const double bias = 0.5 * sigma * sigma;
            for (std::size_t i = 0; i < n; ++i) {
                g[i] = std::exp(s - bias);
                s = rho * s + innov * normal(rng);
            }
            break;
        }
    }
    return g;
}

void ChannelRealization::validate() const {
    require(!taps.empty(), "channel needs at least one tap");
    for (std::size_t i = 1; i < taps.size(); ++i) {
        require(taps[i].delay > taps[i - 1].delay, "tap delays must be strictly increasing");
    }
}

BasebandSignal apply_channel(const BasebandSignal& signal, const ChannelRealization& ch,
                             std::uint64_t noise_seed, std::size_t sample_offset,
                             double noise_power_reference) {
    require(!signal.samples.empty(), "apply_channel: empty signal");
    ch.validate();

    const std::size_t n = signal.samples.size();
    BasebandSignal out;
    out.sample_rate = signal.sample_rate;
    out.samples.assign(n, cplx{0.0, 0.0});

    for (const ChannelTap& tap : ch.taps) {
        if (tap.delay >= n) continue;
        for (std::size_t i = tap.delay; i < n; ++i) {
            out.samples[i] += tap.gain * signal.samples[i - tap.delay];
        }
    }

    const std::vector<double> g =
        ch.time_variation.materialize(sample_offset + n, signal.sample_rate);
    double power = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t t = sample_offset + i;
        cplx v = out.samples[i] * g[t];
        if (ch.doppler_hz != 0.0) {
            v *= std::polar(1.0, kTwoPi * ch.doppler_hz * static_cast<double>(t) / signal.sample_rate);
        }
        out.samples[i] = v;
        power += std::norm(v);
    }

    if (!std::isinf(ch.snr_db)) {
        power /= static_cast<double>(n);
        if (noise_power_reference > 0.0) power = noise_power_reference;
        const double noise_var = power * std::pow(10.0, -ch.snr_db / 10.0);
        const double sigma = std::sqrt(noise_var / 2.0);
        std::mt19937_64 rng(noise_seed);
        std::normal_distribution<double> normal(0.0, 1.0);
        // burn the draws belonging to earlier samples of the trajectory clock
        for (std::size_t i = 0; i < 2 * sample_offset; ++i) normal(rng);
        for (std::size_t i = 0; i < n; ++i) {
            out.samples[i] += cplx{sigma * normal(rng), sigma * normal(rng)};
        }
    }
    return out;
}

Environment parse_environment(const std::string& name) {
    if (name == "chamber") return Environment::chamber;
    if (name == "indoor") return Environment::indoor;
    if (name == "outdoor") return Environment::outdoor;
    throw ConfigError("unknown environment: " + name);
}

std::string environment_name(Environment env) {
    switch (env) {
        case Environment::chamber: return "chamber";
        case Environment::indoor: return "indoor";
        case Environment::outdoor: return "outdoor";
    }
    return "?";
}

ChannelPresets ChannelPresets::defaults() {
    ChannelPresets p;
    p.chamber.min_taps = 1;
    p.chamber.max_taps = 1;
    p.chamber.snr_min_db = 40.0;
    p.chamber.snr_max_db = 40.0;

    p.indoor.min_taps = 2;
    p.indoor.max_taps = 4;
    p.indoor.delay_step_min = 1.0;
    p.indoor.delay_step_max = 4.0;
    p.indoor.decay_per_sample = 0.25;
    p.indoor.shadow_sigma_db = 4.0;
    p.indoor.doppler_min_hz = 0.0;
    p.indoor.doppler_max_hz = 2.0;
    p.indoor.var_kind = TimeVariation::Kind::sinusoidal;
    p.indoor.var_amp_min = 0.05;
    p.indoor.var_amp_max = 0.20;
    p.indoor.var_rate_min_hz = 0.2;
    p.indoor.var_rate_max_hz = 2.0;
    p.indoor.snr_min_db = 15.0;
    p.indoor.snr_max_db = 25.0;

    p.outdoor.min_taps = 4;
    p.outdoor.max_taps = 8;
    p.outdoor.delay_step_min = 2.0;
    p.outdoor.delay_step_max = 8.0;
    p.outdoor.decay_per_sample = 0.12;
    p.outdoor.shadow_sigma_db = 6.0;
    p.outdoor.doppler_min_hz = 2.0;
    p.outdoor.doppler_max_hz = 10.0;
    p.outdoor.var_kind = TimeVariation::Kind::gauss_markov;
    p.outdoor.var_amp_min = 0.10;
    p.outdoor.var_amp_max = 0.35;
    p.outdoor.var_rate_min_hz = 1.0;
    p.outdoor.var_rate_max_hz = 5.0;
    p.outdoor.snr_min_db = 5.0;
    p.outdoor.snr_max_db = 15.0;
    return p;
}

const EnvPreset& ChannelPresets::get(Environment env) const {
    switch (env) {
        case Environment::chamber: return chamber;
        case Environment::indoor: return indoor;
        case Environment::outdoor: return outdoor;
    }
    return chamber;
}

ChannelRealization sample_channel(Environment env, std::uint64_t seed, const ChannelPresets& presets) {
    const EnvPreset& p = presets.get(env);
    ChannelRealization ch;
    ch.meta = environment_name(env) + "/seed=" + std::to_string(seed);

    if (env == Environment::chamber) {
        ch.taps = {{0, cplx{1.0, 0.0}}};
        ch.snr_db = p.snr_min_db;
        return ch;
    }

    std::mt19937_64 rng(derive_seed(seed, "channel"));
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);

    std::uniform_int_distribution<int> tap_count(p.min_taps, p.max_taps);
    const int n_taps = tap_count(rng);
    std::uniform_real_distribution<double> step(p.delay_step_min, p.delay_step_max);

    // lognormal shadowing applied to every tap: per-capture path gain
    const double shadow_db = p.shadow_sigma_db * normal(rng);
    const double shadow = std::pow(10.0, shadow_db / 20.0);

    ch.taps.clear();
    double delay = 0.0;
    for (int k = 0; k < n_taps; ++k) {
        if (k > 0) delay += std::max(1.0, step(rng));
        const double amp = shadow * std::exp(-0.5 * p.decay_per_sample * delay) *
                           std::sqrt(0.5) * std::hypot(normal(rng), normal(rng));
        const double ph = kTwoPi * uni(rng);
        ch.taps.push_back({static_cast<std::size_t>(std::llround(delay)), std::polar(amp, ph)});
    }

    std::uniform_real_distribution<double> dop(p.doppler_min_hz, p.doppler_max_hz);
    ch.doppler_hz = dop(rng);

    ch.time_variation.kind = p.var_kind;
    if (p.var_kind != TimeVariation::Kind::flat) {
        std::uniform_real_distribution<double> amp(p.var_amp_min, p.var_amp_max);
        std::uniform_real_distribution<double> rate(p.var_rate_min_hz, p.var_rate_max_hz);
        ch.time_variation.amplitude = amp(rng);
        ch.time_variation.rate_hz = rate(rng);
        ch.time_variation.phase = kTwoPi * uni(rng);
        ch.time_variation.seed = derive_seed(seed, "variation");
    }

    std::uniform_real_distribution<double> snr(p.snr_min_db, p.snr_max_db);
    ch.snr_db = snr(rng);
    ch.validate();
    return ch;
}

}  // namespace rffi::signal
