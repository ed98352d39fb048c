#ifndef RFFI_HARNESS_CONFIG_HPP
#define RFFI_HARNESS_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "rffi/signal/channel.hpp"
#include "rffi/signal/lora.hpp"

namespace rffi::harness {

// Line-oriented `key = value` file: `#` starts a comment, values are
// scalars or comma-separated lists. Unknown keys are rejected so typos
// fail loudly.
class KeyValueConfig {
public:
    static KeyValueConfig from_file(const std::filesystem::path& path);
    static KeyValueConfig from_string(const std::string& text);

    void set(const std::string& key, const std::string& value);
    bool has(const std::string& key) const;

    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
    std::vector<std::int64_t> get_int_list(const std::string& key,
                                           const std::vector<std::int64_t>& fallback) const;

    const std::map<std::string, std::string>& entries() const { return entries_; }
    // keys read so far; used to reject unknown keys after parsing a config
    void check_unknown_keys() const;

private:
    std::map<std::string, std::string> entries_;
    mutable std::map<std::string, bool> touched_;
};

// Full experiment parameterization with desk-scale defaults. The paper-scale
// preset (20+5 devices, 256x256 images, W=1024) ships as a config file.
struct ExperimentConfig {
    // populations
    std::size_t legit_devices = 5;
    std::size_t rogue_devices = 2;

    signal::LoRaConfig lora{7, 62.5e3, 250e3, 10, 0.0};
    std::size_t stft_window = 256;
    std::size_t stft_hop = 128;
    std::size_t image_size = 64;
    int image_depth = 8;

    double high_dbm = 17.0;
    double low_dbm = 10.0;

    double theta = 0.05;
    std::size_t reference_pairs = 20;

    signal::Environment base_env = signal::Environment::chamber;
    std::size_t base_train_per_device = 200;
    std::size_t base_test_per_device = 40;

    signal::Environment deploy_env = signal::Environment::indoor;
    std::vector<std::size_t> train_counts = {50, 100, 200};
    std::size_t test_per_device = 80;

    int scratch_epochs = 30;
    int transfer_epochs = 15;
    std::size_t batch_size = 32;
    double scratch_lr = 0.005;
    double transfer_lr = 0.0001;
    double head_lr_factor = 20.0;

    std::size_t trend_seeds = 3;

    // impersonation
    std::size_t impersonation_count = 100;

    // contamination + countermeasure
    std::size_t contamination_count = 100;
    std::size_t contamination_draws = 10;
    std::vector<std::size_t> detect_counts = {50, 100, 200};
    std::size_t detect_normals_train = 50;
    std::size_t detect_normals_test = 20;
    std::size_t detect_anomalies_test = 20;
    std::size_t detect_test_per_device = 40;
    int detect_scratch_epochs = 12;
    int detect_transfer_epochs = 6;
    int embed_epochs = 10;
    std::size_t embed_proxy_groups = 10;
    double ocsvm_nu = 0.1;

    signal::ChannelPresets presets = signal::ChannelPresets::defaults();

    std::uint64_t master_seed = 1;

    static ExperimentConfig desk_defaults();
    static ExperimentConfig from_file(const std::filesystem::path& path);
    static ExperimentConfig from_kv(const KeyValueConfig& kv);
    void apply_override(const std::string& key, const std::string& value);
    void validate() const;
    std::map<std::string, std::string> echo() const;
};

}  // namespace rffi::harness

#endif
