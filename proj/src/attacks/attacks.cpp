#include "rffi/attacks/attacks.hpp"

#include <json.hpp>

#include <algorithm>
#include <numeric>
#include <random>

#include "rffi/io.hpp"

namespace rffi::attacks {

std::string attack_kind_name(AttackScenario::Kind kind) {
    return kind == AttackScenario::Kind::impersonation ? "impersonation" : "contamination";
}

AttackScenario::Kind parse_attack_kind(const std::string& name) {
    if (name == "impersonation") return AttackScenario::Kind::impersonation;
    if (name == "contamination") return AttackScenario::Kind::contamination;
    throw ConfigError("unknown attack kind: " + name);
}

void save_scenario(const std::filesystem::path& path, const AttackScenario& sc) {
    nlohmann::ordered_json j;
    j["kind"] = attack_kind_name(sc.kind);
    j["target"] = sc.target;
    j["rogue"] = sc.rogue;
    j["seed"] = sc.seed;
    write_text(path, j.dump(2) + "\n");
}

AttackScenario load_scenario(const std::filesystem::path& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text(path));
        AttackScenario sc;
        sc.kind = parse_attack_kind(j.at("kind").get<std::string>());
        sc.target = j.at("target").get<std::string>();
        sc.rogue = j.at("rogue").get<std::string>();
        sc.seed = j.at("seed").get<std::uint64_t>();
        return sc;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("bad scenario file: " + std::string(e.what()));
    }
}

feature::LabeledFeatureSet impersonation_testset(const feature::LabeledFeatureSet& legit_test,
                                                 const feature::LabeledFeatureSet& rogue_pool,
                                                 const AttackScenario& sc) {
    require(sc.kind == AttackScenario::Kind::impersonation, "scenario kind must be impersonation");
    require(!legit_test.items.empty(), "impersonation: empty legitimate test set");

    feature::LabeledFeatureSet out;
    out.split = "test";
    out.meta = legit_test.meta;
    for (const feature::LabeledItem& item : legit_test.items) {
        if (item.true_id == sc.target) out.items.push_back(item);
    }
    require(!out.items.empty(), "impersonation: target has no test samples");

    for (const feature::LabeledItem& item : rogue_pool.items) {
        if (!sc.rogue.empty() && item.true_id != sc.rogue) continue;
        feature::LabeledItem forged = item;
        forged.claimed = sc.target;
        forged.image.claimed_id = sc.target;
        out.items.push_back(std::move(forged));
    }
    return out;
}

feature::LabeledFeatureSet contaminate_enrollment(const feature::LabeledFeatureSet& train,
                                                  const feature::LabeledFeatureSet& rogue_pool,
                                                  const AttackScenario& sc) {
    require(sc.kind == AttackScenario::Kind::contamination, "scenario kind must be contamination");
    require(!sc.rogue.empty(), "contamination: scenario must name a rogue device");

    std::vector<std::size_t> rogue_idx;
    for (std::size_t i = 0; i < rogue_pool.items.size(); ++i) {
        if (rogue_pool.items[i].true_id == sc.rogue) rogue_idx.push_back(i);
    }

    std::size_t target_count = 0;
    for (const feature::LabeledItem& item : train.items) {
        if (item.claimed == sc.target) ++target_count;
    }
    require(rogue_idx.size() >= target_count,
            "contamination: rogue pool smaller than the target's training share");

    // deterministic draw of which rogue samples stand in for the target
    std::mt19937_64 rng(derive_seed(sc.seed, "contaminate"));
    std::shuffle(rogue_idx.begin(), rogue_idx.end(), rng);

    feature::LabeledFeatureSet out;
    out.split = train.split;
    out.meta = train.meta;
    out.items.reserve(train.items.size());
    std::size_t next_rogue = 0;
    for (const feature::LabeledItem& item : train.items) {
        if (item.claimed != sc.target) {
            out.items.push_back(item);
            continue;
        }
        feature::LabeledItem forged = rogue_pool.items[rogue_idx[next_rogue++]];
        forged.claimed = sc.target;
        forged.image.claimed_id = sc.target;
        out.items.push_back(std::move(forged));
    }
    return out;
}

}  // namespace rffi::attacks
