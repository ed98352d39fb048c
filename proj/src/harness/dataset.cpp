#include "rffi/harness/dataset.hpp"

#include <algorithm>
#include <set>

namespace rffi::harness {

std::vector<std::string> DevicePopulation::legit_labels() const {
    std::vector<std::string> out;
    for (const auto& d : legit) out.push_back(d.device_id);
    return out;
}

std::vector<std::string> DevicePopulation::rogue_labels() const {
    std::vector<std::string> out;
    for (const auto& d : rogue) out.push_back(d.device_id);
    return out;
}

DevicePopulation sample_population(const ExperimentConfig& cfg, std::uint64_t seed) {
    DevicePopulation pop;
    pop.legit = signal::sample_device_population(cfg.legit_devices,
                                                 derive_seed(seed, "legit-pop"), "D");
    if (cfg.rogue_devices > 0) {
        pop.rogue = signal::sample_device_population(cfg.rogue_devices,
                                                     derive_seed(seed, "rogue-pop"), "R");
    }
    return pop;
}

DatasetBuilder::RawCapture DatasetBuilder::extract_raw(const signal::DeviceProfile& dev,
                                                       signal::Environment env,
                                                       std::uint64_t capture_seed,
                                                       double rho_ref) const {
    const signal::ChannelRealization ch =
        signal::sample_channel(env, derive_seed(capture_seed, "channel"), cfg_.presets);
    const signal::CapturePair pair = signal::synthesize_capture(
        dev, ch, cfg_.lora, capture_seed, signal::PowerLevel::high(cfg_.high_dbm),
        signal::PowerLevel::low(cfg_.low_dbm));

    const feature::StftConfig stft_cfg = feature::StftConfig::hamming(cfg_.stft_window, cfg_.stft_hop);
    const feature::Spectrogram s_high = feature::stft(pair.high, stft_cfg, feature::PowerTag::high);
    const feature::Spectrogram s_low = feature::stft(pair.low, stft_cfg, feature::PowerTag::low);

    RawCapture raw;
    const feature::FilterResult filt =
        feature::correlation_filter(s_high, s_low, rho_ref, cfg_.theta);
    raw.rho_d = filt.rho_d;
    raw.accepted = filt.accepted;
    if (!raw.accepted) return raw;

    raw.quotient = feature::quotient(s_high, s_low);
    raw.quotient.device_id = dev.device_id;
    raw.quotient.claimed_id = dev.device_id;
    raw.spectrogram_db = feature::spectrogram_db(s_high);
    return raw;
}

double DatasetBuilder::measure_rho_ref(const DevicePopulation& pop, std::uint64_t seed) const {
    require(!pop.legit.empty(), "rho_ref: empty population");
    const feature::StftConfig stft_cfg = feature::StftConfig::hamming(cfg_.stft_window, cfg_.stft_hop);
    double acc = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < cfg_.reference_pairs; ++i) {
        const signal::DeviceProfile& dev = pop.legit[i % pop.legit.size()];
        const std::uint64_t capture_seed = derive_seed(seed, "rho-ref", {i});
        const signal::ChannelRealization ch = signal::sample_channel(
            signal::Environment::chamber, derive_seed(capture_seed, "channel"), cfg_.presets);
        const signal::CapturePair pair = signal::synthesize_capture(
            dev, ch, cfg_.lora, capture_seed, signal::PowerLevel::high(cfg_.high_dbm),
            signal::PowerLevel::low(cfg_.low_dbm));
        const feature::Spectrogram s_high = feature::stft(pair.high, stft_cfg, feature::PowerTag::high);
        const feature::Spectrogram s_low = feature::stft(pair.low, stft_cfg, feature::PowerTag::low);
        acc += feature::pearson(feature::frame_peak_magnitudes(s_high),
                                feature::frame_peak_magnitudes(s_low));
        ++n;
    }
    return acc / static_cast<double>(n);
}

FeatureExtractor DatasetBuilder::calibrate(const DevicePopulation& pop, std::uint64_t seed) const {
    FeatureExtractor ex;
    ex.stft = feature::StftConfig::hamming(cfg_.stft_window, cfg_.stft_hop);
    ex.image_size = cfg_.image_size;
    ex.depth = cfg_.image_depth;
    ex.theta = cfg_.theta;
    ex.rho_ref = measure_rho_ref(pop, derive_seed(seed, "reference"));

    // first pass over the base training corpus: accumulate dB percentiles
    feature::CorpusPercentiles pq, ps;
    for (std::size_t d = 0; d < pop.legit.size(); ++d) {
        std::size_t accepted = 0;
        std::uint64_t attempt = 0;
        while (accepted < cfg_.base_train_per_device) {
            require(attempt < 20 * cfg_.base_train_per_device + 100,
                    "calibrate: filter rejects nearly every base capture");
            const std::uint64_t capture_seed =
                derive_seed(seed, "base-train", {d, attempt++});
            const RawCapture raw = extract_raw(pop.legit[d], cfg_.base_env, capture_seed, ex.rho_ref);
            if (!raw.accepted) continue;
            ++accepted;
            pq.add(raw.quotient.q_db);
            ps.add(raw.spectrogram_db);
        }
    }
    ex.clip_quotient = pq.range();
    ex.clip_spectrogram = ps.range();
    require(ex.clip_quotient.hi > ex.clip_quotient.lo, "degenerate quotient clip range");
    require(ex.clip_spectrogram.hi > ex.clip_spectrogram.lo, "degenerate spectrogram clip range");
    return ex;
}

FeatureSetPair DatasetBuilder::build_sets(const std::vector<signal::DeviceProfile>& devices,
                                          signal::Environment env, std::size_t per_device,
                                          const std::string& split, const FeatureExtractor& ex,
                                          std::uint64_t seed, const std::string& tag) const {
    FeatureSetPair out;
    for (feature::LabeledFeatureSet* set : {&out.quotient, &out.spectrogram}) {
        set->split = split;
        set->meta.image_size = ex.image_size;
        set->meta.depth = ex.depth;
        set->meta.theta = ex.theta;
        set->meta.rho_ref = ex.rho_ref;
        set->meta.stft_window = ex.stft.width();
        set->meta.stft_hop = ex.stft.hop;
    }
    out.quotient.meta.source = feature::FeatureSource::quotient;
    out.quotient.meta.clip = ex.clip_quotient;
    out.spectrogram.meta.source = feature::FeatureSource::spectrogram;
    out.spectrogram.meta.clip = ex.clip_spectrogram;

    for (std::size_t d = 0; d < devices.size(); ++d) {
        std::size_t accepted = 0;
        std::uint64_t attempt = 0;
        while (accepted < per_device) {
            require(attempt < 20 * per_device + 100,
                    "build_sets: filter rejects nearly every capture (" + tag + ")");
            const std::uint64_t capture_seed = derive_seed(seed, tag, {d, attempt++});
            const RawCapture raw = extract_raw(devices[d], env, capture_seed, ex.rho_ref);
            if (!raw.accepted) continue;
            ++accepted;

            feature::LabeledItem qitem;
            qitem.claimed = devices[d].device_id;
            qitem.true_id = devices[d].device_id;
            qitem.capture_seed = capture_seed;
            qitem.image = feature::quotient_feature(raw.quotient, ex.image_size, ex.depth,
                                                    ex.clip_quotient);
            qitem.image.device_id = devices[d].device_id;
            qitem.image.claimed_id = devices[d].device_id;
            out.quotient.items.push_back(std::move(qitem));

            feature::LabeledItem sitem;
            sitem.claimed = devices[d].device_id;
            sitem.true_id = devices[d].device_id;
            sitem.capture_seed = capture_seed;
            sitem.image = feature::rasterize(raw.spectrogram_db, ex.image_size, ex.depth,
                                             ex.clip_spectrogram);
            sitem.image.source = feature::FeatureSource::spectrogram;
            sitem.image.device_id = devices[d].device_id;
            sitem.image.claimed_id = devices[d].device_id;
            out.spectrogram.items.push_back(std::move(sitem));
        }
    }
    return out;
}

void check_split_hygiene(const feature::LabeledFeatureSet& train,
                         const feature::LabeledFeatureSet& test) {
    std::set<std::uint64_t> train_seeds;
    for (const feature::LabeledItem& item : train.items) train_seeds.insert(item.capture_seed);
    for (const feature::LabeledItem& item : test.items) {
        require(!train_seeds.count(item.capture_seed),
                "split hygiene: capture seed appears in both train and test");
    }
}

}  // namespace rffi::harness
