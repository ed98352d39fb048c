#include "rffi/feature/dataset.hpp"

#include <json.hpp>

#include <algorithm>

#include "rffi/io.hpp"

namespace rffi::feature {

std::vector<std::string> LabeledFeatureSet::distinct_claimed_labels() const {
    std::vector<std::string> labels;
    for (const LabeledItem& item : items) {
        if (std::find(labels.begin(), labels.end(), item.claimed) == labels.end()) {
            labels.push_back(item.claimed);
        }
    }
    std::sort(labels.begin(), labels.end());
    return labels;
}

std::vector<FeatureImage> LabeledFeatureSet::images() const {
    std::vector<FeatureImage> out;
    out.reserve(items.size());
    for (const LabeledItem& item : items) out.push_back(item.image);
    return out;
}

std::vector<std::string> LabeledFeatureSet::claimed_labels() const {
    std::vector<std::string> out;
    out.reserve(items.size());
    for (const LabeledItem& item : items) out.push_back(item.claimed);
    return out;
}

std::vector<std::string> LabeledFeatureSet::true_labels() const {
    std::vector<std::string> out;
    out.reserve(items.size());
    for (const LabeledItem& item : items) out.push_back(item.true_id);
    return out;
}

void save_feature_set(const std::filesystem::path& stem, const LabeledFeatureSet& set) {
    nlohmann::ordered_json j;
    j["split"] = set.split;
    j["source"] = feature_source_name(set.meta.source);
    j["image_size"] = set.meta.image_size;
    j["depth"] = set.meta.depth;
    j["clip"] = {set.meta.clip.lo, set.meta.clip.hi};
    j["theta"] = set.meta.theta;
    j["rho_ref"] = set.meta.rho_ref;
    j["stft_window"] = set.meta.stft_window;
    j["stft_hop"] = set.meta.stft_hop;
    j["count"] = set.items.size();

    nlohmann::ordered_json items = nlohmann::ordered_json::array();
    std::vector<std::uint8_t> blob;
    blob.reserve(set.items.size() * set.meta.image_size * set.meta.image_size);
    for (const LabeledItem& item : set.items) {
        require(item.image.size == set.meta.image_size, "feature set: inconsistent image size");
        nlohmann::ordered_json it;
        it["claimed"] = item.claimed;
        it["true"] = item.true_id;
        it["capture_seed"] = item.capture_seed;
        items.push_back(std::move(it));
        blob.insert(blob.end(), item.image.pixels.begin(), item.image.pixels.end());
    }
    j["items"] = std::move(items);

    write_text(stem.string() + ".json", j.dump(2) + "\n");
    write_u8(stem.string() + ".u8", blob);
}

LabeledFeatureSet load_feature_set(const std::filesystem::path& stem) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text(stem.string() + ".json"));
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("bad feature manifest: " + std::string(e.what()));
    }

    LabeledFeatureSet set;
    try {
        set.split = j.at("split").get<std::string>();
        set.meta.source = parse_feature_source(j.at("source").get<std::string>());
        set.meta.image_size = j.at("image_size").get<std::size_t>();
        set.meta.depth = j.at("depth").get<int>();
        set.meta.clip.lo = j.at("clip").at(0).get<double>();
        set.meta.clip.hi = j.at("clip").at(1).get<double>();
        set.meta.theta = j.at("theta").get<double>();
        set.meta.rho_ref = j.at("rho_ref").get<double>();
        set.meta.stft_window = j.at("stft_window").get<std::size_t>();
        set.meta.stft_hop = j.at("stft_hop").get<std::size_t>();
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("bad feature manifest: " + std::string(e.what()));
    }

    const std::vector<std::uint8_t> blob = read_u8(stem.string() + ".u8");
    const std::size_t px = set.meta.image_size * set.meta.image_size;
    const auto& items = j.at("items");
    if (blob.size() != px * items.size())
        throw FormatError("feature blob size does not match manifest");

    std::size_t offset = 0;
    for (const auto& it : items) {
        LabeledItem item;
        item.claimed = it.at("claimed").get<std::string>();
        item.true_id = it.at("true").get<std::string>();
        item.capture_seed = it.at("capture_seed").get<std::uint64_t>();
        item.image.size = set.meta.image_size;
        item.image.depth = set.meta.depth;
        item.image.source = set.meta.source;
        item.image.claimed_id = item.claimed;
        item.image.device_id = item.true_id;
        item.image.pixels.assign(blob.begin() + static_cast<std::ptrdiff_t>(offset),
                                 blob.begin() + static_cast<std::ptrdiff_t>(offset + px));
        offset += px;
        set.items.push_back(std::move(item));
    }
    return set;
}

}  // namespace rffi::feature
