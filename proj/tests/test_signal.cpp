#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <filesystem>
#include <random>

#include "rffi/signal/capture.hpp"

using namespace rffi;
using namespace rffi::signal;

namespace {

constexpr double kTwoPi = 6.283185307179586;

LoRaConfig paper_config() {
    LoRaConfig cfg;
    cfg.spreading_factor = 10;
    cfg.bandwidth = 62.5e3;
    cfg.sample_rate = 1e6;
    cfg.preamble_symbols = 10;
    return cfg;
}

LoRaConfig desk_config() {
    LoRaConfig cfg;
    cfg.spreading_factor = 7;
    cfg.bandwidth = 62.5e3;
    cfg.sample_rate = 250e3;
    cfg.preamble_symbols = 2;
    return cfg;
}

ChannelRealization identity_channel() { return ChannelRealization{}; }

ChannelRealization random_static_channel(std::uint64_t seed, int taps = 3) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    ChannelRealization ch;
    ch.taps.clear();
    std::size_t delay = 0;
    for (int k = 0; k < taps; ++k) {
        ch.taps.push_back({delay, cplx{normal(rng), normal(rng)} * (k == 0 ? 1.0 : 0.3)});
        delay += 1 + rng() % 3;
    }
    ch.meta = "static/seed=" + std::to_string(seed);
    return ch;
}

}  // namespace

TEST_CASE("preamble length matches the LoRa configuration") {
    // 10 symbols * 2^10 / 62.5 kHz * 1 MHz = 163 840 samples
    const BasebandSignal x = generate_preamble(paper_config());
    CHECK(x.samples.size() == 163840);

    LoRaConfig critical;
    critical.spreading_factor = 7;
    critical.bandwidth = 125e3;
    critical.sample_rate = 125e3;
    critical.preamble_symbols = 1;
    const BasebandSignal y = generate_preamble(critical);
    CHECK(y.samples.size() == 128);
    for (const cplx& v : y.samples) {
        CHECK(std::abs(std::abs(v) - 1.0) < 1e-12);
    }
}

TEST_CASE("preamble is constant envelope") {
    for (const LoRaConfig& cfg : {paper_config(), desk_config()}) {
        const BasebandSignal x = generate_preamble(cfg);
        double worst = 0.0;
        for (const cplx& v : x.samples) worst = std::max(worst, std::abs(std::abs(v) - 1.0));
        CHECK(worst < 1e-9);
    }
}

TEST_CASE("instantaneous frequency sweeps -B/2 to +B/2 per symbol") {
    LoRaConfig cfg;
    cfg.spreading_factor = 8;
    cfg.bandwidth = 62.5e3;
    cfg.sample_rate = 250e3;
    cfg.preamble_symbols = 2;
    const BasebandSignal x = generate_preamble(cfg);
    const std::size_t sps = cfg.samples_per_symbol();
    REQUIRE(x.samples.size() == 2 * sps);

    // phase-difference frequency estimate against the closed-form chirp rate
    const double rate = cfg.bandwidth / (std::ldexp(1.0, cfg.spreading_factor) / cfg.bandwidth);
    for (std::size_t k = 0; k < 2; ++k) {
        for (std::size_t n = 1; n + 1 < sps; n += 37) {
            const std::size_t i = k * sps + n;
            const double freq = std::arg(x.samples[i + 1] * std::conj(x.samples[i])) *
                                cfg.sample_rate / kTwoPi;
            const double expected =
                -cfg.bandwidth / 2.0 + rate * (static_cast<double>(n) + 0.5) / cfg.sample_rate;
            CHECK(freq == doctest::Approx(expected).epsilon(1e-6));
        }
    }
}

TEST_CASE("invalid LoRa configurations are rejected") {
    LoRaConfig bad = paper_config();
    bad.spreading_factor = 6;
    CHECK_THROWS_AS(generate_preamble(bad), ConfigError);
    bad = paper_config();
    bad.sample_rate = 50e3;  // below the bandwidth
    CHECK_THROWS_AS(generate_preamble(bad), ConfigError);
    bad = paper_config();
    bad.sample_rate = 999e3;  // non-integer samples per symbol
    CHECK_THROWS_AS(generate_preamble(bad), ConfigError);
    bad = paper_config();
    bad.preamble_symbols = 0;
    CHECK_THROWS_AS(generate_preamble(bad), ConfigError);
}

TEST_CASE("PA output follows the Saleh model") {
    const auto devs = sample_device_population(2, 99);
    const DeviceProfile& dev = devs[0];

    BasebandSignal zero;
    zero.sample_rate = 1e6;
    zero.samples.assign(64, cplx{0.0, 0.0});
    const BasebandSignal amplified = apply_pa(zero, dev, PowerLevel::high());
    for (const cplx& v : amplified.samples) CHECK(std::abs(v) == 0.0);

    // constant-envelope input at both drive levels: output ratio deviates
    // from the drive ratio because of AM/AM compression
    BasebandSignal tone;
    tone.sample_rate = 1e6;
    tone.samples.assign(64, cplx{1.0, 0.0});
    const BasebandSignal hi = apply_pa(tone, dev, PowerLevel::high());
    const BasebandSignal lo = apply_pa(tone, dev, PowerLevel::low());

    const double rh = drive_amplitude(17.0);
    const double rl = drive_amplitude(10.0);
    const double expected_hi = dev.pa_params.am_am(rh);
    const double expected_lo = dev.pa_params.am_am(rl);
    CHECK(std::abs(hi.samples[0]) == doctest::Approx(expected_hi).epsilon(1e-12));
    CHECK(std::abs(lo.samples[0]) == doctest::Approx(expected_lo).epsilon(1e-12));
    const double out_ratio = std::abs(hi.samples[0]) / std::abs(lo.samples[0]);
    CHECK(std::abs(out_ratio - rh / rl) > 1e-3);

    // AM/PM rotation
    const double expected_rot = dev.pa_params.am_pm(rh);
    CHECK(std::arg(hi.samples[0]) == doctest::Approx(expected_rot).epsilon(1e-9));
}

TEST_CASE("small-signal gain scales with alpha_a") {
    DeviceProfile a;
    a.device_id = "a";
    DeviceProfile b = a;
    b.device_id = "b";
    b.pa_params.alpha_a = a.pa_params.alpha_a * 1.05;

    BasebandSignal tiny;
    tiny.sample_rate = 1e6;
    tiny.samples.assign(8, cplx{1e-4, 0.0});
    PowerLevel weak{PowerLevel::Tag::low, -20.0};
    const BasebandSignal ya = apply_pa(tiny, a, weak);
    const BasebandSignal yb = apply_pa(tiny, b, weak);
    CHECK(std::abs(yb.samples[0]) / std::abs(ya.samples[0]) ==
          doctest::Approx(1.05).epsilon(1e-6));
}

TEST_CASE("sampled amplifiers stay monotone over the drive range") {
    const auto devs = sample_device_population(25, 7);
    for (const DeviceProfile& dev : devs) {
        double prev = 0.0;
        for (double r = 0.01; r <= 0.95; r += 0.01) {
            const double a = dev.pa_params.am_am(r);
            CHECK(a > prev);
            prev = a;
        }
    }
}

TEST_CASE("device population sampling is bounded, deterministic and distinct") {
    const auto one = sample_device_population(1, 3);
    const SalehParams nominal{};
    CHECK(std::abs(one[0].pa_params.alpha_a / nominal.alpha_a - 1.0) <= 0.1);
    CHECK(std::abs(one[0].pa_params.beta_a / nominal.beta_a - 1.0) <= 0.1);
    CHECK(std::abs(one[0].pa_params.alpha_phi / nominal.alpha_phi - 1.0) <= 0.1);
    CHECK(std::abs(one[0].pa_params.beta_phi / nominal.beta_phi - 1.0) <= 0.1);

    const auto p1 = sample_device_population(25, 7);
    const auto p2 = sample_device_population(25, 7);
    for (std::size_t i = 0; i < 25; ++i) {
        CHECK(p1[i].pa_params.alpha_a == p2[i].pa_params.alpha_a);
        CHECK(p1[i].pa_params.beta_phi == p2[i].pa_params.beta_phi);
        CHECK(p1[i].device_id == p2[i].device_id);
    }
    for (std::size_t i = 0; i < 25; ++i) {
        for (std::size_t j = i + 1; j < 25; ++j) {
            const bool same = p1[i].pa_params.alpha_a == p1[j].pa_params.alpha_a &&
                              p1[i].pa_params.beta_a == p1[j].pa_params.beta_a &&
                              p1[i].pa_params.alpha_phi == p1[j].pa_params.alpha_phi &&
                              p1[i].pa_params.beta_phi == p1[j].pa_params.beta_phi;
            CHECK_FALSE(same);
        }
    }
}

TEST_CASE("identity and scalar channels pass signals through") {
    const BasebandSignal x = generate_preamble(desk_config());

    const BasebandSignal y = apply_channel(x, identity_channel(), 1);
    for (std::size_t i = 0; i < x.samples.size(); ++i) {
        CHECK(std::abs(y.samples[i] - x.samples[i]) < 1e-15);
    }

    ChannelRealization scalar;
    scalar.taps = {{0, cplx{0.0, 0.5}}};
    const BasebandSignal z = apply_channel(x, scalar, 1);
    for (std::size_t i = 0; i < x.samples.size(); i += 101) {
        CHECK(std::abs(z.samples[i] - cplx{0.0, 0.5} * x.samples[i]) < 1e-15);
    }
}

TEST_CASE("tap convolution matches the direct convolution oracle") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> normal(0.0, 1.0);
    BasebandSignal x;
    x.sample_rate = 1e6;
    for (int i = 0; i < 257; ++i) x.samples.push_back(cplx{normal(rng), normal(rng)});

    ChannelRealization ch;
    ch.taps = {{0, cplx{0.7, -0.1}}, {3, cplx{-0.2, 0.4}}};
    const BasebandSignal y = apply_channel(x, ch, 1);

    for (std::size_t n = 0; n < x.samples.size(); ++n) {
        cplx expected{0.0, 0.0};
        for (const ChannelTap& tap : ch.taps) {
            if (n >= tap.delay) expected += tap.gain * x.samples[n - tap.delay];
        }
        CHECK(std::abs(y.samples[n] - expected) < 1e-12);
    }
}

TEST_CASE("noise-free channel application is linear") {
    const ChannelRealization ch = random_static_channel(11, 4);
    std::mt19937_64 rng(6);
    std::normal_distribution<double> normal(0.0, 1.0);
    BasebandSignal x, y;
    x.sample_rate = y.sample_rate = 1e6;
    for (int i = 0; i < 300; ++i) {
        x.samples.push_back(cplx{normal(rng), normal(rng)});
        y.samples.push_back(cplx{normal(rng), normal(rng)});
    }
    const cplx a{1.3, -0.2}, b{-0.4, 2.1};
    BasebandSignal mix;
    mix.sample_rate = 1e6;
    for (int i = 0; i < 300; ++i) mix.samples.push_back(a * x.samples[i] + b * y.samples[i]);

    const BasebandSignal hx = apply_channel(x, ch, 1);
    const BasebandSignal hy = apply_channel(y, ch, 1);
    const BasebandSignal hmix = apply_channel(mix, ch, 1);
    for (int i = 0; i < 300; ++i) {
        CHECK(std::abs(hmix.samples[i] - (a * hx.samples[i] + b * hy.samples[i])) < 1e-10);
    }
}

TEST_CASE("channel noise is deterministic given the seed") {
    ChannelRealization ch = identity_channel();
    ch.snr_db = 10.0;
    const BasebandSignal x = generate_preamble(desk_config());
    const BasebandSignal y1 = apply_channel(x, ch, 42);
    const BasebandSignal y2 = apply_channel(x, ch, 42);
    const BasebandSignal y3 = apply_channel(x, ch, 43);
    CHECK(y1.samples == y2.samples);
    CHECK(y1.samples != y3.samples);

    // SNR is honored within Monte Carlo tolerance
    double signal_power = 0.0, noise_power = 0.0;
    for (std::size_t i = 0; i < x.samples.size(); ++i) {
        signal_power += std::norm(x.samples[i]);
        noise_power += std::norm(y1.samples[i] - x.samples[i]);
    }
    const double snr = 10.0 * std::log10(signal_power / noise_power);
    CHECK(snr == doctest::Approx(10.0).epsilon(0.05));
}

TEST_CASE("capture pair: coherent ratio is channel independent at infinite SNR") {
    const auto devs = sample_device_population(1, 17);
    const LoRaConfig cfg = desk_config();

    const CapturePair p1 = synthesize_capture(devs[0], random_static_channel(100), cfg, 5);
    const CapturePair p2 = synthesize_capture(devs[0], random_static_channel(200), cfg, 5);
    REQUIRE(p1.high.samples.size() == p1.low.samples.size());

    double worst = 0.0;
    for (std::size_t n = 0; n < p1.high.samples.size(); ++n) {
        if (std::abs(p1.low.samples[n]) < 1e-9 || std::abs(p2.low.samples[n]) < 1e-9) continue;
        const cplx r1 = p1.high.samples[n] / p1.low.samples[n];
        const cplx r2 = p2.high.samples[n] / p2.low.samples[n];
        worst = std::max(worst, std::abs(r1 - r2) / std::abs(r1));
    }
    CHECK(worst < 1e-9);
}

TEST_CASE("capture synthesis is bit-deterministic") {
    const auto devs = sample_device_population(1, 21);
    ChannelRealization ch = random_static_channel(7);
    ch.snr_db = 20.0;
    const CapturePair a = synthesize_capture(devs[0], ch, desk_config(), 33);
    const CapturePair b = synthesize_capture(devs[0], ch, desk_config(), 33);
    CHECK(a.high.samples == b.high.samples);
    CHECK(a.low.samples == b.low.samples);
}

TEST_CASE("static channel with infinite SNR: pair differs only by PA distortion") {
    const auto devs = sample_device_population(1, 30);
    const CapturePair pair = synthesize_capture(devs[0], identity_channel(), desk_config(), 1);
    // constant-envelope preamble: high/low ratio is one complex constant
    const cplx ref = pair.high.samples[100] / pair.low.samples[100];
    for (std::size_t n = 0; n < pair.high.samples.size(); n += 53) {
        const cplx r = pair.high.samples[n] / pair.low.samples[n];
        CHECK(std::abs(r - ref) < 1e-9);
    }
    CHECK(std::abs(ref) > 1.0);  // compression keeps the ratio above 0 dB but distinct per device
}

TEST_CASE("channel presets: chamber, indoor, outdoor") {
    const ChannelRealization chamber = sample_channel(Environment::chamber, 4);
    REQUIRE(chamber.taps.size() == 1);
    CHECK(chamber.taps[0].delay == 0);
    CHECK(chamber.taps[0].gain == cplx{1.0, 0.0});
    CHECK(chamber.doppler_hz == 0.0);

    const ChannelRealization i1 = sample_channel(Environment::indoor, 1);
    const ChannelRealization i2 = sample_channel(Environment::indoor, 2);
    bool gains_differ = i1.taps.size() != i2.taps.size();
    for (std::size_t k = 0; !gains_differ && k < i1.taps.size(); ++k) {
        gains_differ = i1.taps[k].gain != i2.taps[k].gain;
    }
    CHECK(gains_differ);

    // outdoor delay spread dominates indoor in expectation
    double indoor_spread = 0.0, outdoor_spread = 0.0;
    for (std::uint64_t s = 0; s < 100; ++s) {
        indoor_spread += static_cast<double>(sample_channel(Environment::indoor, s).taps.back().delay);
        outdoor_spread += static_cast<double>(sample_channel(Environment::outdoor, s).taps.back().delay);
    }
    CHECK(outdoor_spread > indoor_spread);
}

TEST_CASE("time variation trajectories are positive with unit mean") {
    // sinusoidal: unit mean per trajectory over whole cycles
    TimeVariation sin_var{TimeVariation::Kind::sinusoidal, 0.4, 3.0, 0.0, 0};
    const std::size_t cycle = static_cast<std::size_t>(250e3 / 3.0);
    const auto g1 = sin_var.materialize(4 * cycle, 250e3);
    double mean1 = 0.0;
    for (double v : g1) {
        CHECK(v > 0.0);
        mean1 += v;
    }
    CHECK(std::abs(mean1 / static_cast<double>(g1.size()) - 1.0) < 0.01);

    // gauss-markov drifts slowly; unit mean holds over the seed ensemble
    double ensemble = 0.0;
    for (std::uint64_t s = 0; s < 200; ++s) {
        TimeVariation gm{TimeVariation::Kind::gauss_markov, 0.3, 5.0, 0.0, s};
        const auto g = gm.materialize(64, 250e3);
        for (double v : g) CHECK(v > 0.0);
        ensemble += g[0];
    }
    CHECK(std::abs(ensemble / 200.0 - 1.0) < 0.1);
}

TEST_CASE("channel realization invariants are enforced") {
    ChannelRealization bad;
    bad.taps.clear();
    const BasebandSignal x = generate_preamble(desk_config());
    CHECK_THROWS_AS(apply_channel(x, bad, 0), DataError);
    bad.taps = {{3, cplx{1, 0}}, {3, cplx{0.5, 0}}};  // not strictly increasing
    CHECK_THROWS_AS(apply_channel(x, bad, 0), DataError);
}

TEST_CASE("capture files and manifests round-trip") {
    const auto dir = std::filesystem::temp_directory_path() / "rffi_capture_io_test";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);

    const auto devs = sample_device_population(2, 55);
    std::vector<CaptureRecord> records;
    std::vector<CapturePair> pairs;
    for (std::size_t i = 0; i < 2; ++i) {
        ChannelRealization ch = random_static_channel(60 + i);
        ch.snr_db = 25.0;
        pairs.push_back(synthesize_capture(devs[i], ch, desk_config(), 70 + i));
        records.push_back(write_capture(dir, pairs.back(), "indoor", 70 + i, 17.0, 10.0));
    }
    write_manifest(dir / "manifest.jsonl", records);

    const auto loaded_records = read_manifest(dir / "manifest.jsonl");
    REQUIRE(loaded_records.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(loaded_records[i].device_id == records[i].device_id);
        const CapturePair round = read_capture(dir, loaded_records[i]);
        REQUIRE(round.high.samples.size() == pairs[i].high.samples.size());
        // float32 payload: exact for values written through float
        for (std::size_t n = 0; n < round.high.samples.size(); n += 97) {
            CHECK(static_cast<float>(pairs[i].high.samples[n].real()) ==
                  doctest::Approx(round.high.samples[n].real()));
        }
    }
    std::filesystem::remove_all(dir);
}
