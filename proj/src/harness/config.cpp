#include "rffi/harness/config.hpp"

#include <charconv>
#include <sstream>

#include "rffi/io.hpp"

namespace rffi::harness {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

}  // namespace

KeyValueConfig KeyValueConfig::from_file(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) {
        throw ConfigError("config file not found: " + path.string());
    }
    return from_string(read_text(path));
}

KeyValueConfig KeyValueConfig::from_string(const std::string& text) {
    KeyValueConfig cfg;
    std::istringstream is(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
        }
        cfg.entries_[key] = value;
    }
    return cfg;
}

void KeyValueConfig::set(const std::string& key, const std::string& value) {
    entries_[key] = value;
}

bool KeyValueConfig::has(const std::string& key) const { return entries_.count(key) > 0; }

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) const {
    touched_[key] = true;
    const auto it = entries_.find(key);
    return it == entries_.end() ? fallback : it->second;
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
    touched_[key] = true;
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    try {
        std::size_t used = 0;
        const double v = std::stod(it->second, &used);
        if (used != it->second.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config key " + key + ": expected a number, got '" + it->second + "'");
    }
}

std::int64_t KeyValueConfig::get_int(const std::string& key, std::int64_t fallback) const {
    touched_[key] = true;
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(it->second.data(), it->second.data() + it->second.size(), v);
    if (ec != std::errc{} || ptr != it->second.data() + it->second.size()) {
        throw ConfigError("config key " + key + ": expected an integer, got '" + it->second + "'");
    }
    return v;
}

std::vector<std::int64_t> KeyValueConfig::get_int_list(
    const std::string& key, const std::vector<std::int64_t>& fallback) const {
    touched_[key] = true;
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    std::vector<std::int64_t> out;
    std::istringstream is(it->second);
    std::string tok;
    while (std::getline(is, tok, ',')) {
        tok = trim(tok);
        if (tok.empty()) continue;
        std::int64_t v = 0;
        const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
            throw ConfigError("config key " + key + ": bad list element '" + tok + "'");
        }
        out.push_back(v);
    }
    if (out.empty()) throw ConfigError("config key " + key + ": empty list");
    return out;
}

void KeyValueConfig::check_unknown_keys() const {
    for (const auto& [key, value] : entries_) {
        if (!touched_.count(key)) {
            throw ConfigError("unknown config key: " + key);
        }
    }
}

ExperimentConfig ExperimentConfig::desk_defaults() { return ExperimentConfig{}; }

namespace {

void read_env_preset(const KeyValueConfig& kv, const std::string& prefix, signal::EnvPreset& p) {
    p.min_taps = static_cast<int>(kv.get_int(prefix + ".min_taps", p.min_taps));
    p.max_taps = static_cast<int>(kv.get_int(prefix + ".max_taps", p.max_taps));
    p.delay_step_min = kv.get_double(prefix + ".delay_step_min", p.delay_step_min);
    p.delay_step_max = kv.get_double(prefix + ".delay_step_max", p.delay_step_max);
    p.decay_per_sample = kv.get_double(prefix + ".decay_per_sample", p.decay_per_sample);
    p.shadow_sigma_db = kv.get_double(prefix + ".shadow_sigma_db", p.shadow_sigma_db);
    p.doppler_min_hz = kv.get_double(prefix + ".doppler_min_hz", p.doppler_min_hz);
    p.doppler_max_hz = kv.get_double(prefix + ".doppler_max_hz", p.doppler_max_hz);
    p.var_amp_min = kv.get_double(prefix + ".var_amp_min", p.var_amp_min);
    p.var_amp_max = kv.get_double(prefix + ".var_amp_max", p.var_amp_max);
    p.var_rate_min_hz = kv.get_double(prefix + ".var_rate_min_hz", p.var_rate_min_hz);
    p.var_rate_max_hz = kv.get_double(prefix + ".var_rate_max_hz", p.var_rate_max_hz);
    p.snr_min_db = kv.get_double(prefix + ".snr_min_db", p.snr_min_db);
    p.snr_max_db = kv.get_double(prefix + ".snr_max_db", p.snr_max_db);
    const std::string kind = kv.get_string(prefix + ".variation", "");
    if (!kind.empty()) {
        if (kind == "flat") p.var_kind = signal::TimeVariation::Kind::flat;
        else if (kind == "sinusoidal") p.var_kind = signal::TimeVariation::Kind::sinusoidal;
        else if (kind == "gauss_markov") p.var_kind = signal::TimeVariation::Kind::gauss_markov;
        else throw ConfigError("unknown variation kind: " + kind);
    }
}

std::vector<std::size_t> to_sizes(const std::vector<std::int64_t>& in, const std::string& key) {
    std::vector<std::size_t> out;
    for (std::int64_t v : in) {
        if (v <= 0) throw ConfigError("config key " + key + ": values must be positive");
        out.push_back(static_cast<std::size_t>(v));
    }
    return out;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_kv(const KeyValueConfig& kv) {
    ExperimentConfig c = desk_defaults();
    c.legit_devices = static_cast<std::size_t>(kv.get_int("population.legit", static_cast<std::int64_t>(c.legit_devices)));
    c.rogue_devices = static_cast<std::size_t>(kv.get_int("population.rogue", static_cast<std::int64_t>(c.rogue_devices)));

    c.lora.spreading_factor = static_cast<int>(kv.get_int("lora.sf", c.lora.spreading_factor));
    c.lora.bandwidth = kv.get_double("lora.bandwidth", c.lora.bandwidth);
    c.lora.sample_rate = kv.get_double("lora.sample_rate", c.lora.sample_rate);
    c.lora.preamble_symbols = static_cast<int>(kv.get_int("lora.preamble_symbols", c.lora.preamble_symbols));
    c.lora.carrier_offset = kv.get_double("lora.carrier_offset", c.lora.carrier_offset);

    c.stft_window = static_cast<std::size_t>(kv.get_int("stft.window", static_cast<std::int64_t>(c.stft_window)));
    c.stft_hop = static_cast<std::size_t>(kv.get_int("stft.hop", static_cast<std::int64_t>(c.stft_hop)));
    c.image_size = static_cast<std::size_t>(kv.get_int("image.size", static_cast<std::int64_t>(c.image_size)));
    c.image_depth = static_cast<int>(kv.get_int("image.depth", c.image_depth));

    c.high_dbm = kv.get_double("power.high_dbm", c.high_dbm);
    c.low_dbm = kv.get_double("power.low_dbm", c.low_dbm);

    c.theta = kv.get_double("filter.theta", c.theta);
    c.reference_pairs = static_cast<std::size_t>(kv.get_int("filter.reference_pairs", static_cast<std::int64_t>(c.reference_pairs)));

    c.base_env = signal::parse_environment(kv.get_string("base.env", signal::environment_name(c.base_env)));
    c.base_train_per_device = static_cast<std::size_t>(kv.get_int("base.train_per_device", static_cast<std::int64_t>(c.base_train_per_device)));
    c.base_test_per_device = static_cast<std::size_t>(kv.get_int("base.test_per_device", static_cast<std::int64_t>(c.base_test_per_device)));

    c.deploy_env = signal::parse_environment(kv.get_string("deploy.env", signal::environment_name(c.deploy_env)));
    c.train_counts = to_sizes(kv.get_int_list("deploy.train_counts",
                                              {static_cast<std::int64_t>(c.train_counts[0]),
                                               static_cast<std::int64_t>(c.train_counts[1]),
                                               static_cast<std::int64_t>(c.train_counts[2])}),
                              "deploy.train_counts");
    c.test_per_device = static_cast<std::size_t>(kv.get_int("deploy.test_per_device", static_cast<std::int64_t>(c.test_per_device)));

    c.scratch_epochs = static_cast<int>(kv.get_int("train.scratch_epochs", c.scratch_epochs));
    c.transfer_epochs = static_cast<int>(kv.get_int("train.transfer_epochs", c.transfer_epochs));
    c.batch_size = static_cast<std::size_t>(kv.get_int("train.batch_size", static_cast<std::int64_t>(c.batch_size)));
    c.scratch_lr = kv.get_double("train.scratch_lr", c.scratch_lr);
    c.transfer_lr = kv.get_double("train.transfer_lr", c.transfer_lr);
    c.head_lr_factor = kv.get_double("train.head_lr_factor", c.head_lr_factor);

    c.trend_seeds = static_cast<std::size_t>(kv.get_int("trend.seeds", static_cast<std::int64_t>(c.trend_seeds)));

    c.impersonation_count = static_cast<std::size_t>(kv.get_int("impersonation.count", static_cast<std::int64_t>(c.impersonation_count)));

    c.contamination_count = static_cast<std::size_t>(kv.get_int("contamination.count", static_cast<std::int64_t>(c.contamination_count)));
    c.contamination_draws = static_cast<std::size_t>(kv.get_int("contamination.draws", static_cast<std::int64_t>(c.contamination_draws)));

    std::vector<std::int64_t> dc;
    for (std::size_t v : c.detect_counts) dc.push_back(static_cast<std::int64_t>(v));
    c.detect_counts = to_sizes(kv.get_int_list("detect.counts", dc), "detect.counts");
    c.detect_normals_train = static_cast<std::size_t>(kv.get_int("detect.normals_train", static_cast<std::int64_t>(c.detect_normals_train)));
    c.detect_normals_test = static_cast<std::size_t>(kv.get_int("detect.normals_test", static_cast<std::int64_t>(c.detect_normals_test)));
    c.detect_anomalies_test = static_cast<std::size_t>(kv.get_int("detect.anomalies_test", static_cast<std::int64_t>(c.detect_anomalies_test)));
    c.detect_test_per_device = static_cast<std::size_t>(kv.get_int("detect.test_per_device", static_cast<std::int64_t>(c.detect_test_per_device)));
    c.detect_scratch_epochs = static_cast<int>(kv.get_int("detect.scratch_epochs", c.detect_scratch_epochs));
    c.detect_transfer_epochs = static_cast<int>(kv.get_int("detect.transfer_epochs", c.detect_transfer_epochs));
    c.embed_epochs = static_cast<int>(kv.get_int("detect.embed_epochs", c.embed_epochs));
    c.embed_proxy_groups = static_cast<std::size_t>(kv.get_int("detect.proxy_groups", static_cast<std::int64_t>(c.embed_proxy_groups)));
    c.ocsvm_nu = kv.get_double("detect.nu", c.ocsvm_nu);

    c.master_seed = static_cast<std::uint64_t>(kv.get_int("seed", static_cast<std::int64_t>(c.master_seed)));

    read_env_preset(kv, "chamber", c.presets.chamber);
    read_env_preset(kv, "indoor", c.presets.indoor);
    read_env_preset(kv, "outdoor", c.presets.outdoor);

    kv.check_unknown_keys();
    c.validate();
    return c;
}

ExperimentConfig ExperimentConfig::from_file(const std::filesystem::path& path) {
    return from_kv(KeyValueConfig::from_file(path));
}

void ExperimentConfig::apply_override(const std::string& key, const std::string& value) {
    KeyValueConfig kv;
    for (const auto& [k, v] : echo()) kv.set(k, v);
    kv.set(key, value);
    *this = from_kv(kv);
}

void ExperimentConfig::validate() const {
    lora.validate();
    require_config(legit_devices >= 2, "need at least two legitimate devices");
    require_config(stft_window >= 2 && stft_hop >= 1 && stft_hop <= stft_window,
                   "bad STFT window/hop");
    require_config(lora.preamble_samples() >= stft_window, "preamble shorter than the STFT window");
    require_config(image_size >= 8, "image size too small");
    require_config(image_depth >= 1 && image_depth <= 8, "image depth must be 1..8");
    require_config(high_dbm > low_dbm, "high power must exceed low power");
    require_config(theta >= 0.0, "theta must be nonnegative");
    require_config(!train_counts.empty(), "empty train count sweep");
    require_config(trend_seeds >= 1, "need at least one trend seed");
    require_config(ocsvm_nu > 0.0 && ocsvm_nu <= 0.5, "nu must lie in (0, 0.5]");
}

std::map<std::string, std::string> ExperimentConfig::echo() const {
    std::map<std::string, std::string> m;
    auto put_int = [&](const std::string& k, std::int64_t v) { m[k] = std::to_string(v); };
    auto put_dbl = [&](const std::string& k, double v) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.10g", v);
        m[k] = buf;
    };
    put_int("population.legit", static_cast<std::int64_t>(legit_devices));
    put_int("population.rogue", static_cast<std::int64_t>(rogue_devices));
    put_int("lora.sf", lora.spreading_factor);
    put_dbl("lora.bandwidth", lora.bandwidth);
    put_dbl("lora.sample_rate", lora.sample_rate);
    put_int("lora.preamble_symbols", lora.preamble_symbols);
    put_dbl("lora.carrier_offset", lora.carrier_offset);
    put_int("stft.window", static_cast<std::int64_t>(stft_window));
    put_int("stft.hop", static_cast<std::int64_t>(stft_hop));
    put_int("image.size", static_cast<std::int64_t>(image_size));
    put_int("image.depth", image_depth);
    put_dbl("power.high_dbm", high_dbm);
    put_dbl("power.low_dbm", low_dbm);
    put_dbl("filter.theta", theta);
    put_int("filter.reference_pairs", static_cast<std::int64_t>(reference_pairs));
    m["base.env"] = signal::environment_name(base_env);
    put_int("base.train_per_device", static_cast<std::int64_t>(base_train_per_device));
    put_int("base.test_per_device", static_cast<std::int64_t>(base_test_per_device));
    m["deploy.env"] = signal::environment_name(deploy_env);
    {
        std::string list;
        for (std::size_t i = 0; i < train_counts.size(); ++i) {
            if (i) list += ",";
            list += std::to_string(train_counts[i]);
        }
        m["deploy.train_counts"] = list;
    }
    put_int("deploy.test_per_device", static_cast<std::int64_t>(test_per_device));
    put_int("train.scratch_epochs", scratch_epochs);
    put_int("train.transfer_epochs", transfer_epochs);
    put_int("train.batch_size", static_cast<std::int64_t>(batch_size));
    put_dbl("train.scratch_lr", scratch_lr);
    put_dbl("train.transfer_lr", transfer_lr);
    put_dbl("train.head_lr_factor", head_lr_factor);
    put_int("trend.seeds", static_cast<std::int64_t>(trend_seeds));
    put_int("impersonation.count", static_cast<std::int64_t>(impersonation_count));
    put_int("contamination.count", static_cast<std::int64_t>(contamination_count));
    put_int("contamination.draws", static_cast<std::int64_t>(contamination_draws));
    {
        std::string list;
        for (std::size_t i = 0; i < detect_counts.size(); ++i) {
            if (i) list += ",";
            list += std::to_string(detect_counts[i]);
        }
        m["detect.counts"] = list;
    }
    put_int("detect.normals_train", static_cast<std::int64_t>(detect_normals_train));
    put_int("detect.normals_test", static_cast<std::int64_t>(detect_normals_test));
    put_int("detect.anomalies_test", static_cast<std::int64_t>(detect_anomalies_test));
    put_int("detect.test_per_device", static_cast<std::int64_t>(detect_test_per_device));
    put_int("detect.scratch_epochs", detect_scratch_epochs);
    put_int("detect.transfer_epochs", detect_transfer_epochs);
    put_int("detect.embed_epochs", embed_epochs);
    put_int("detect.proxy_groups", static_cast<std::int64_t>(embed_proxy_groups));
    put_dbl("detect.nu", ocsvm_nu);
    put_int("seed", static_cast<std::int64_t>(master_seed));

    auto put_env = [&](const std::string& prefix, const signal::EnvPreset& p) {
        put_int(prefix + ".min_taps", p.min_taps);
        put_int(prefix + ".max_taps", p.max_taps);
        put_dbl(prefix + ".delay_step_min", p.delay_step_min);
        put_dbl(prefix + ".delay_step_max", p.delay_step_max);
        put_dbl(prefix + ".decay_per_sample", p.decay_per_sample);
        put_dbl(prefix + ".shadow_sigma_db", p.shadow_sigma_db);
        put_dbl(prefix + ".doppler_min_hz", p.doppler_min_hz);
        put_dbl(prefix + ".doppler_max_hz", p.doppler_max_hz);
        put_dbl(prefix + ".var_amp_min", p.var_amp_min);
        put_dbl(prefix + ".var_amp_max", p.var_amp_max);
        put_dbl(prefix + ".var_rate_min_hz", p.var_rate_min_hz);
        put_dbl(prefix + ".var_rate_max_hz", p.var_rate_max_hz);
        put_dbl(prefix + ".snr_min_db", p.snr_min_db);
        put_dbl(prefix + ".snr_max_db", p.snr_max_db);
        switch (p.var_kind) {
            case signal::TimeVariation::Kind::flat: m[prefix + ".variation"] = "flat"; break;
            case signal::TimeVariation::Kind::sinusoidal: m[prefix + ".variation"] = "sinusoidal"; break;
            case signal::TimeVariation::Kind::gauss_markov: m[prefix + ".variation"] = "gauss_markov"; break;
        }
    };
    put_env("chamber", presets.chamber);
    put_env("indoor", presets.indoor);
    put_env("outdoor", presets.outdoor);
    return m;
}

}  // namespace rffi::harness
