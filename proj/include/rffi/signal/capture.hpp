#ifndef RFFI_SIGNAL_CAPTURE_HPP
#define RFFI_SIGNAL_CAPTURE_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rffi/signal/channel.hpp"
#include "rffi/signal/device.hpp"
#include "rffi/signal/lora.hpp"

namespace rffi::signal {

// Two consecutive preamble transmissions from one device through one
// channel realization: first at high power, then at low power. The channel
// trajectory and the noise stream run continuously across the pair.
struct CapturePair {
    BasebandSignal high;
    BasebandSignal low;
    std::string device_id;
    std::string claimed_id;
    std::string channel_meta;

    void validate() const;
};

CapturePair synthesize_capture(const DeviceProfile& dev, const ChannelRealization& ch,
                               const LoRaConfig& cfg, std::uint64_t seed,
                               const PowerLevel& high = PowerLevel::high(),
                               const PowerLevel& low = PowerLevel::low());

// Dataset emission: manifest.jsonl with one record per capture plus a raw
// interleaved little-endian float32 I/Q payload per capture (high signal
// first, then low).
struct CaptureRecord {
    std::string device_id;
    std::string claimed_id;
    std::string env;
    std::uint64_t seed = 0;
    double high_dbm = 17.0;
    double low_dbm = 10.0;
    std::string iq_file;  // path relative to the manifest directory
    std::size_t samples_per_signal = 0;
    double sample_rate = 0.0;
};

CaptureRecord write_capture(const std::filesystem::path& dir, const CapturePair& pair,
                            const std::string& env, std::uint64_t seed,
                            double high_dbm, double low_dbm);
CapturePair read_capture(const std::filesystem::path& dir, const CaptureRecord& rec);

void write_manifest(const std::filesystem::path& path, const std::vector<CaptureRecord>& records);
std::vector<CaptureRecord> read_manifest(const std::filesystem::path& path);

}  // namespace rffi::signal

#endif
