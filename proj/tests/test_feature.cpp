#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "rffi/feature/dataset.hpp"
#include "rffi/feature/quotient.hpp"
#include "rffi/feature/raster.hpp"
#include "rffi/feature/stft.hpp"
#include "rffi/signal/capture.hpp"

using namespace rffi;
using namespace rffi::feature;
using namespace rffi::signal;

namespace {

constexpr double kTwoPi = 6.283185307179586;

LoRaConfig desk_config() {
    LoRaConfig cfg;
    cfg.spreading_factor = 7;
    cfg.bandwidth = 62.5e3;
    cfg.sample_rate = 250e3;
    cfg.preamble_symbols = 10;
    return cfg;
}

StftConfig desk_stft() { return StftConfig::hamming(256, 128); }

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
    return ch;
}

// O(W^2) direct DFT of one windowed frame, following the bin convention
// of the spectrogram rows (row r = DFT bin (r+1) mod W).
std::vector<cplx> direct_frame_dft(const std::vector<cplx>& sig, std::size_t start,
                                   const std::vector<double>& window) {
    const std::size_t w = window.size();
    std::vector<cplx> out(w);
    for (std::size_t row = 0; row < w; ++row) {
        const std::size_t bin = (row + 1) % w;
        cplx acc{0.0, 0.0};
        for (std::size_t n = 0; n < w; ++n) {
            const double angle = -kTwoPi * static_cast<double>(bin) * static_cast<double>(n) /
                                 static_cast<double>(w);
            acc += sig[start + n] * window[n] * cplx{std::cos(angle), std::sin(angle)};
        }
        out[row] = acc;
    }
    return out;
}

Spectrogram make_spec(const ComplexMatrix& bins) {
    Spectrogram s;
    s.bins = bins;
    s.config = StftConfig::hamming(bins.rows(), bins.rows() / 2);
    return s;
}

}  // namespace

TEST_CASE("frame count formula") {
    CHECK(frame_count(10, 10, 62.5e3, 1e6, 1024, 512) == 319);
    CHECK(frame_count(1, 7, 125e3, 128e3, 128, 128) == 1);
    CHECK(frame_count(2, 8, 62.5e3, 250e3, 256, 128) == 15);
    CHECK_THROWS_AS(frame_count(1, 7, 125e3, 125e3, 256, 128), DataError);
}

TEST_CASE("stft produces the configured frame count") {
    LoRaConfig cfg;
    cfg.spreading_factor = 10;
    cfg.bandwidth = 62.5e3;
    cfg.sample_rate = 1e6;
    cfg.preamble_symbols = 10;
    const BasebandSignal x = generate_preamble(cfg);
    const Spectrogram s = stft(x, StftConfig::hamming(1024, 512));
    CHECK(s.width() == 1024);
    CHECK(s.frames() == 319);
    CHECK(s.frames() == frame_count(10, 10, 62.5e3, 1e6, 1024, 512));
}

TEST_CASE("stft frame count always matches frame_count") {
    std::mt19937_64 rng(8);
    for (int rep = 0; rep < 12; ++rep) {
        const std::size_t w = 16 + rng() % 128;
        const std::size_t hop = 1 + rng() % w;
        const std::size_t n = w + rng() % 4000;
        BasebandSignal sig;
        sig.sample_rate = 1e6;
        sig.samples.assign(n, cplx{1.0, 0.0});
        const Spectrogram s = stft(sig, StftConfig::hamming(w, hop));
        CHECK(s.frames() == frame_count_for_length(n, w, hop));
    }
}

TEST_CASE("all-zero signal gives an all-zero spectrogram") {
    BasebandSignal sig;
    sig.sample_rate = 1e6;
    sig.samples.assign(1024, cplx{0.0, 0.0});
    const Spectrogram s = stft(sig, StftConfig::hamming(256, 128));
    for (const cplx& v : s.bins.data()) CHECK(std::abs(v) == 0.0);
}

TEST_CASE("single-frame pure tone concentrates at its bin (rectangular window)") {
    const std::size_t w = 64;
    StftConfig cfg;
    cfg.window.assign(w, 1.0);
    cfg.hop = w;

    const std::size_t k = 5;
    BasebandSignal sig;
    sig.sample_rate = 1e6;
    for (std::size_t n = 0; n < w; ++n) {
        const double angle = kTwoPi * static_cast<double>(k) * static_cast<double>(n) /
                             static_cast<double>(w);
        sig.samples.push_back(cplx{std::cos(angle), std::sin(angle)});
    }
    const Spectrogram s = stft(sig, cfg);
    REQUIRE(s.frames() == 1);

    // bin w = k in the 1-based convention is row k-1
    CHECK(std::abs(s.bins(k - 1, 0)) == doctest::Approx(static_cast<double>(w)).epsilon(1e-9));
    for (std::size_t r = 0; r < w; ++r) {
        if (r == k - 1) continue;
        CHECK(std::abs(s.bins(r, 0)) < 1e-9 * w);
    }

    const auto oracle = direct_frame_dft(sig.samples, 0, cfg.window);
    for (std::size_t r = 0; r < w; ++r) {
        CHECK(std::abs(s.bins(r, 0) - oracle[r]) < 1e-9 * static_cast<double>(w));
    }
}

TEST_CASE("stft matches the direct DFT oracle on random signals") {
    std::mt19937_64 rng(77);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int rep = 0; rep < 3; ++rep) {
        const std::size_t w = rep == 0 ? 64 : (rep == 1 ? 100 : 256);  // non power of two too
        const std::size_t hop = w / 2;
        const std::size_t n = std::min<std::size_t>(8192, w * 6 + 13);
        BasebandSignal sig;
        sig.sample_rate = 1e6;
        for (std::size_t i = 0; i < n; ++i) sig.samples.push_back(cplx{normal(rng), normal(rng)});
        const StftConfig cfg = StftConfig::hamming(w, hop);
        const Spectrogram s = stft(sig, cfg);

        double max_mag = 0.0;
        for (const cplx& v : s.bins.data()) max_mag = std::max(max_mag, std::abs(v));
        for (std::size_t m = 0; m < s.frames(); m += std::max<std::size_t>(1, s.frames() / 3)) {
            const auto oracle = direct_frame_dft(sig.samples, m * hop, cfg.window);
            for (std::size_t r = 0; r < w; ++r) {
                CHECK(std::abs(s.bins(r, m) - oracle[r]) < 1e-9 * max_mag);
            }
        }
    }
}

TEST_CASE("stft rejects too-short signals and bad windows") {
    BasebandSignal sig;
    sig.sample_rate = 1e6;
    sig.samples.assign(100, cplx{1.0, 0.0});
    CHECK_THROWS_AS(stft(sig, StftConfig::hamming(256, 128)), DataError);

    StftConfig bad;
    bad.window.assign(64, 2.0);  // outside (0, 1.08]
    bad.hop = 32;
    CHECK_THROWS_AS(stft(sig, bad), ConfigError);

    StftConfig bad_hop = StftConfig::hamming(64, 32);
    bad_hop.hop = 65;
    CHECK_THROWS_AS(stft(sig, bad_hop), ConfigError);
}

TEST_CASE("correlation filter accepts scaled pairs and flags zero variance") {
    const BasebandSignal x = generate_preamble(desk_config());
    const Spectrogram sh = stft(x, desk_stft(), PowerTag::high);
    Spectrogram sl = sh;
    for (cplx& v : sl.bins.data()) v *= 0.37;
    sl.power_tag = PowerTag::low;

    // rho is exactly 1 up to rounding, so any nonnegative theta accepts
    const FilterResult res = correlation_filter(sh, sl, 1.0, 1e-12);
    CHECK(res.accepted);
    CHECK(res.rho == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(res.rho_d) < 1e-12);

    // constant peak sequences have undefined correlation
    BasebandSignal tone;
    tone.sample_rate = 250e3;
    tone.samples.assign(2048, cplx{1.0, 0.0});
    const Spectrogram st = stft(tone, desk_stft());
    CHECK_THROWS_AS(correlation_filter(st, st, 1.0, 0.05), MetricError);
}

namespace {

struct PairSpectra {
    Spectrogram high;
    Spectrogram low;
};

PairSpectra capture_spectra(const DeviceProfile& dev, const ChannelRealization& ch,
                            std::uint64_t seed) {
    const CapturePair pair = synthesize_capture(dev, ch, desk_config(), seed);
    return {stft(pair.high, desk_stft(), PowerTag::high),
            stft(pair.low, desk_stft(), PowerTag::low)};
}

double chamber_rho_ref(const DeviceProfile& dev) {
    ChannelRealization chamber;
    chamber.snr_db = 40.0;
    double acc = 0.0;
    for (std::uint64_t i = 0; i < 5; ++i) {
        const PairSpectra ps = capture_spectra(dev, chamber, 1000 + i);
        acc += pearson(frame_peak_magnitudes(ps.high), frame_peak_magnitudes(ps.low));
    }
    return acc / 5.0;
}

}  // namespace

TEST_CASE("filter accepts static-channel pairs and rejects gain steps") {
    const auto devs = sample_device_population(1, 40);
    const double rho_ref = chamber_rho_ref(devs[0]);

    std::size_t accepted = 0;
    const std::size_t trials = 40;
    for (std::uint64_t i = 0; i < trials; ++i) {
        ChannelRealization ch = random_static_channel(500 + i);
        ch.snr_db = 30.0;
        const PairSpectra ps = capture_spectra(devs[0], ch, 2000 + i);
        if (correlation_filter(ps.high, ps.low, rho_ref, 0.05).accepted) ++accepted;
    }
    CHECK(static_cast<double>(accepted) / trials >= 0.95);

    // times-5 gain step on the low-power half decorrelates the peaks
    std::size_t rejected = 0;
    for (std::uint64_t i = 0; i < trials; ++i) {
        ChannelRealization ch = random_static_channel(700 + i);
        ch.snr_db = 30.0;
        const CapturePair pair = synthesize_capture(devs[0], ch, desk_config(), 3000 + i);
        CapturePair distorted = pair;
        for (std::size_t n = distorted.low.samples.size() / 2; n < distorted.low.samples.size(); ++n) {
            distorted.low.samples[n] *= 5.0;
        }
        const Spectrogram sh = stft(distorted.high, desk_stft(), PowerTag::high);
        const Spectrogram sl = stft(distorted.low, desk_stft(), PowerTag::low);
        if (!correlation_filter(sh, sl, rho_ref, 0.05).accepted) ++rejected;
    }
    CHECK(static_cast<double>(rejected) / trials >= 0.95);
}

TEST_CASE("quotient identities") {
    const BasebandSignal x = generate_preamble(desk_config());
    const Spectrogram sh = stft(x, desk_stft(), PowerTag::high);

    const QuotientFingerprint self = quotient(sh, sh);
    for (std::size_t i = 0; i < self.q_db.size(); ++i) {
        CHECK(std::abs(self.q_db.data()[i]) < 1e-12);
    }

    Spectrogram s10 = sh;
    for (cplx& v : s10.bins.data()) v *= 10.0;
    const QuotientFingerprint ten = quotient(s10, sh);
    for (std::size_t w = 0; w < ten.q_db.rows(); ++w) {
        for (std::size_t m = 0; m < ten.q_db.cols(); ++m) {
            if (ten.guarded(w, m)) continue;
            CHECK(ten.q_db(w, m) == doctest::Approx(20.0).epsilon(1e-9));
        }
    }
}

TEST_CASE("channel cancellation: quotient is invariant, spectrogram is not") {
    const auto devs = sample_device_population(1, 50);
    const PairSpectra a = capture_spectra(devs[0], random_static_channel(81, 3), 10);
    const PairSpectra b = capture_spectra(devs[0], random_static_channel(82, 4), 10);

    const QuotientFingerprint qa = quotient(a.high, a.low);
    const QuotientFingerprint qb = quotient(b.high, b.low);
    double worst = 0.0;
    std::size_t compared = 0;
    for (std::size_t i = 0; i < qa.q_db.size(); ++i) {
        if (qa.mask[i] || qb.mask[i]) continue;
        worst = std::max(worst, std::abs(qa.q_db.data()[i] - qb.q_db.data()[i]));
        ++compared;
    }
    CHECK(compared > qa.q_db.size() / 2);
    CHECK(worst < 1e-6);

    const RealMatrix da = spectrogram_db(a.high);
    const RealMatrix db = spectrogram_db(b.high);
    double mean_diff = 0.0;
    for (std::size_t i = 0; i < da.size(); ++i) {
        mean_diff += std::abs(da.data()[i] - db.data()[i]);
    }
    mean_diff /= static_cast<double>(da.size());
    CHECK(mean_diff > 0.1);
}

TEST_CASE("device sensitivity exceeds channel-induced deviation") {
    const auto devs = sample_device_population(2, 51);
    const PairSpectra a1 = capture_spectra(devs[0], random_static_channel(91), 11);
    const PairSpectra a2 = capture_spectra(devs[0], random_static_channel(92), 11);
    const PairSpectra b = capture_spectra(devs[1], random_static_channel(93), 11);

    const QuotientFingerprint qa1 = quotient(a1.high, a1.low);
    const QuotientFingerprint qa2 = quotient(a2.high, a2.low);
    const QuotientFingerprint qb = quotient(b.high, b.low);

    double channel_dev = 0.0, device_dev = 0.0;
    std::size_t n1 = 0, n2 = 0;
    for (std::size_t i = 0; i < qa1.q_db.size(); ++i) {
        if (!qa1.mask[i] && !qa2.mask[i]) {
            channel_dev += std::abs(qa1.q_db.data()[i] - qa2.q_db.data()[i]);
            ++n1;
        }
        if (!qa1.mask[i] && !qb.mask[i]) {
            device_dev += std::abs(qa1.q_db.data()[i] - qb.q_db.data()[i]);
            ++n2;
        }
    }
    channel_dev /= static_cast<double>(n1);
    device_dev /= static_cast<double>(n2);
    CHECK(device_dev > 10.0 * channel_dev);
}

TEST_CASE("twenty devices produce distinct fingerprints downstream") {
    const auto devs = sample_device_population(20, 60);
    std::vector<RealMatrix> prints;
    for (std::size_t d = 0; d < devs.size(); ++d) {
        ChannelRealization ch = sample_channel(Environment::indoor, 400 + d);
        const PairSpectra ps = capture_spectra(devs[d], ch, 500 + d);
        prints.push_back(quotient(ps.high, ps.low).q_db);
    }
    for (std::size_t i = 0; i < prints.size(); ++i) {
        for (std::size_t j = i + 1; j < prints.size(); ++j) {
            double dot = 0.0, ni = 0.0, nj = 0.0;
            for (std::size_t k = 0; k < prints[i].size(); ++k) {
                dot += prints[i].data()[k] * prints[j].data()[k];
                ni += prints[i].data()[k] * prints[i].data()[k];
                nj += prints[j].data()[k] * prints[j].data()[k];
            }
            CHECK(dot / std::sqrt(ni * nj) < 0.999);
        }
    }
}

TEST_CASE("rasterize: saturation, ramps and rank preservation") {
    ClipRange clip{0.0, 10.0};

    RealMatrix constant(3, 3, 10.0);  // everything at p99
    const FeatureImage sat = rasterize(constant, 4, 8, clip);
    for (std::uint8_t p : sat.pixels) CHECK(p == 255);

    RealMatrix ramp(2, 2);
    ramp(0, 0) = 0.0;
    ramp(0, 1) = 1.0;
    ramp(1, 0) = 0.0;
    ramp(1, 1) = 1.0;
    const FeatureImage img = rasterize(ramp, 4, 8, ClipRange{0.0, 1.0});
    for (std::size_t r = 0; r < 4; ++r) {
        for (std::size_t c = 1; c < 4; ++c) {
            CHECK(img.at(r, c) >= img.at(r, c - 1));
        }
        CHECK(img.at(r, 0) == 0);
        CHECK(img.at(r, 3) == 255);
    }

    // rank order survives quantization for pairs more than one step apart
    std::mt19937_64 rng(123);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    RealMatrix m(16, 16);
    for (double& v : m.data()) v = uni(rng);
    const FeatureImage q = rasterize(m, 16, 8, ClipRange{0.0, 1.0});
    const double step = 1.0 / 255.0;
    for (std::size_t a = 0; a < m.size(); a += 7) {
        for (std::size_t b = a + 1; b < m.size(); b += 13) {
            if (m.data()[a] > m.data()[b] + step) {
                CHECK(q.pixels[(a % 16) * 16 + a / 16] >= q.pixels[(b % 16) * 16 + b / 16]);
            }
        }
    }

    CHECK_THROWS_AS(rasterize(constant, 4, 8, ClipRange{5.0, 5.0}), DataError);
}

TEST_CASE("spectrogram feature: determinism and channel visibility") {
    const auto devs = sample_device_population(1, 70);
    ChannelRealization chamber;
    chamber.snr_db = 40.0;

    const PairSpectra c = capture_spectra(devs[0], chamber, 42);
    CorpusPercentiles pct;
    pct.add(spectrogram_db(c.high));
    const ClipRange clip = pct.range();

    const FeatureImage img1 = spectrogram_feature(c.high, 64, 8, clip);
    const FeatureImage img2 = spectrogram_feature(c.high, 64, 8, clip);
    CHECK(img1.pixels == img2.pixels);

    const ChannelRealization rough = sample_channel(Environment::outdoor, 11);
    const PairSpectra o = capture_spectra(devs[0], rough, 43);
    const FeatureImage img3 = spectrogram_feature(o.high, 64, 8, clip);
    double mean_abs = 0.0;
    for (std::size_t i = 0; i < img1.pixels.size(); ++i) {
        mean_abs += std::abs(static_cast<double>(img1.pixels[i]) - static_cast<double>(img3.pixels[i]));
    }
    CHECK(mean_abs / static_cast<double>(img1.pixels.size()) > 0.0);

    // all-zero spectrogram rasterizes to a uniform image under a fixed range
    ComplexMatrix zeros(64, 8);
    const FeatureImage uniform = spectrogram_feature(make_spec(zeros), 16, 8, clip);
    for (std::uint8_t p : uniform.pixels) CHECK(p == uniform.pixels[0]);
}

TEST_CASE("feature sets round-trip through disk") {
    const auto dir = std::filesystem::temp_directory_path() / "rffi_featureset_io";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);

    LabeledFeatureSet set;
    set.split = "train";
    set.meta.source = FeatureSource::quotient;
    set.meta.image_size = 8;
    set.meta.depth = 8;
    set.meta.clip = {-3.0, 9.0};
    set.meta.theta = 0.05;
    set.meta.rho_ref = 0.98;
    set.meta.stft_window = 256;
    set.meta.stft_hop = 128;
    std::mt19937_64 rng(9);
    for (int i = 0; i < 5; ++i) {
        LabeledItem item;
        item.claimed = "D0" + std::to_string(i % 2);
        item.true_id = item.claimed;
        item.capture_seed = 100 + static_cast<std::uint64_t>(i);
        item.image.size = 8;
        item.image.depth = 8;
        for (int p = 0; p < 64; ++p) item.image.pixels.push_back(static_cast<std::uint8_t>(rng() % 256));
        set.items.push_back(std::move(item));
    }
    save_feature_set(dir / "set", set);
    const LabeledFeatureSet loaded = load_feature_set(dir / "set");
    REQUIRE(loaded.items.size() == set.items.size());
    CHECK(loaded.split == "train");
    CHECK(loaded.meta.clip.lo == set.meta.clip.lo);
    CHECK(loaded.meta.rho_ref == set.meta.rho_ref);
    for (std::size_t i = 0; i < set.items.size(); ++i) {
        CHECK(loaded.items[i].image.pixels == set.items[i].image.pixels);
        CHECK(loaded.items[i].claimed == set.items[i].claimed);
        CHECK(loaded.items[i].capture_seed == set.items[i].capture_seed);
    }
    std::filesystem::remove_all(dir);
}
