#include "rffi/signal/capture.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

#include "rffi/io.hpp"

namespace rffi::signal {

void CapturePair::validate() const {
    require(!high.samples.empty() && !low.samples.empty(), "capture pair signals must be nonempty");
    require(high.samples.size() == low.samples.size(), "capture pair signals must have equal length");
    require(high.sample_rate == low.sample_rate, "capture pair signals must share the sample rate");
}

CapturePair synthesize_capture(const DeviceProfile& dev, const ChannelRealization& ch,
                               const LoRaConfig& cfg, std::uint64_t seed,
                               const PowerLevel& high, const PowerLevel& low) {
    require_config(high.tx_power_dbm > low.tx_power_dbm,
                   "high power level must exceed low power level");
    const BasebandSignal preamble = generate_preamble(cfg);
    const BasebandSignal tx_high = apply_pa(preamble, dev, high);
    const BasebandSignal tx_low = apply_pa(preamble, dev, low);

    // Consecutive packets separated by a guard gap longer than the delay
    // spread: each transmission starts from channel silence, while the gain
    // trajectory, the Doppler clock and the noise floor continue across the
    // pair. One shared noise power reference models the receiver's fixed
    // noise floor over the whole reception.
    const std::size_t n = preamble.size();
    const std::uint64_t noise_seed = derive_seed(seed, "noise");

    double pair_power = 0.0;
    if (!std::isinf(ch.snr_db)) {
        signal::ChannelRealization quiet = ch;
        quiet.snr_db = std::numeric_limits<double>::infinity();
        const BasebandSignal yh = apply_channel(tx_high, quiet, noise_seed, 0);
        const BasebandSignal yl = apply_channel(tx_low, quiet, noise_seed, n);
        for (const cplx& v : yh.samples) pair_power += std::norm(v);
        for (const cplx& v : yl.samples) pair_power += std::norm(v);
        pair_power /= static_cast<double>(2 * n);
    }

    CapturePair pair;
    pair.device_id = dev.device_id;
    pair.claimed_id = dev.device_id;
    pair.channel_meta = ch.meta;
    pair.high = apply_channel(tx_high, ch, noise_seed, 0, pair_power);
    pair.low = apply_channel(tx_low, ch, noise_seed, n, pair_power);
    pair.validate();
    return pair;
}

namespace {

std::vector<float> interleave(const CapturePair& pair) {
    std::vector<float> iq;
    iq.reserve(4 * pair.high.size());
    for (const cplx& v : pair.high.samples) {
        iq.push_back(static_cast<float>(v.real()));
        iq.push_back(static_cast<float>(v.imag()));
    }
    for (const cplx& v : pair.low.samples) {
        iq.push_back(static_cast<float>(v.real()));
        iq.push_back(static_cast<float>(v.imag()));
    }
    return iq;
}

}  // namespace

CaptureRecord write_capture(const std::filesystem::path& dir, const CapturePair& pair,
                            const std::string& env, std::uint64_t seed,
                            double high_dbm, double low_dbm) {
    pair.validate();
    std::filesystem::create_directories(dir / "iq");
    CaptureRecord rec;
    rec.device_id = pair.device_id;
    rec.claimed_id = pair.claimed_id;
    rec.env = env;
    rec.seed = seed;
    rec.high_dbm = high_dbm;
    rec.low_dbm = low_dbm;
    rec.samples_per_signal = pair.high.size();
    rec.sample_rate = pair.high.sample_rate;
    rec.iq_file = "iq/" + pair.device_id + "_" + std::to_string(seed) + ".iq";
    write_f32(dir / rec.iq_file, interleave(pair));
    return rec;
}

CapturePair read_capture(const std::filesystem::path& dir, const CaptureRecord& rec) {
    const std::vector<float> iq = read_f32(dir / rec.iq_file);
    if (iq.size() != 4 * rec.samples_per_signal)
        throw FormatError("IQ payload size does not match manifest: " + rec.iq_file);
    CapturePair pair;
    pair.device_id = rec.device_id;
    pair.claimed_id = rec.claimed_id;
    pair.channel_meta = rec.env + "/seed=" + std::to_string(rec.seed);
    pair.high.sample_rate = rec.sample_rate;
    pair.low.sample_rate = rec.sample_rate;
    pair.high.samples.resize(rec.samples_per_signal);
    pair.low.samples.resize(rec.samples_per_signal);
    for (std::size_t i = 0; i < rec.samples_per_signal; ++i) {
        pair.high.samples[i] = cplx{iq[2 * i], iq[2 * i + 1]};
        const std::size_t j = 2 * rec.samples_per_signal + 2 * i;
        pair.low.samples[i] = cplx{iq[j], iq[j + 1]};
    }
    return pair;
}

void write_manifest(const std::filesystem::path& path, const std::vector<CaptureRecord>& records) {
    std::ofstream os(path);
    if (!os) throw FormatError("cannot open manifest for writing: " + path.string());
    for (const CaptureRecord& rec : records) {
        nlohmann::ordered_json j;
        j["device_id"] = rec.device_id;
        j["claimed_id"] = rec.claimed_id;
        j["env"] = rec.env;
        j["seed"] = rec.seed;
        j["high_dbm"] = rec.high_dbm;
        j["low_dbm"] = rec.low_dbm;
        j["iq_file"] = rec.iq_file;
        j["samples_per_signal"] = rec.samples_per_signal;
        j["sample_rate"] = rec.sample_rate;
        os << j.dump() << '\n';
    }
}

std::vector<CaptureRecord> read_manifest(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw FormatError("cannot open manifest: " + path.string());
    std::vector<CaptureRecord> records;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw FormatError("bad manifest line: " + std::string(e.what()));
        }
        CaptureRecord rec;
        rec.device_id = j.at("device_id").get<std::string>();
        rec.claimed_id = j.at("claimed_id").get<std::string>();
        rec.env = j.at("env").get<std::string>();
        rec.seed = j.at("seed").get<std::uint64_t>();
        rec.high_dbm = j.at("high_dbm").get<double>();
        rec.low_dbm = j.at("low_dbm").get<double>();
        rec.iq_file = j.at("iq_file").get<std::string>();
        rec.samples_per_signal = j.at("samples_per_signal").get<std::size_t>();
        rec.sample_rate = j.at("sample_rate").get<double>();
        records.push_back(std::move(rec));
    }
    return records;
}

}  // namespace rffi::signal
