#ifndef RFFI_ATTACKS_ATTACKS_HPP
#define RFFI_ATTACKS_ATTACKS_HPP

#include <cstdint>
#include <filesystem>
#include <string>

#include "rffi/feature/dataset.hpp"

namespace rffi::attacks {

// One attack instance: a rogue device claiming a legitimate identity.
// `rogue` may be empty for impersonation, meaning every device in the rogue
// pool claims the target (the multi-attacker authentication case).
struct AttackScenario {
    enum class Kind { impersonation, contamination };
    Kind kind = Kind::impersonation;
    std::string target;
    std::string rogue;
    std::uint64_t seed = 0;
};

std::string attack_kind_name(AttackScenario::Kind kind);
AttackScenario::Kind parse_attack_kind(const std::string& name);

void save_scenario(const std::filesystem::path& path, const AttackScenario& sc);
AttackScenario load_scenario(const std::filesystem::path& path);

// Authentication-step test set: the target's genuine test samples (claimed =
// true = target) plus rogue samples relabeled claimed = target. True labels
// are preserved for scoring.
feature::LabeledFeatureSet impersonation_testset(const feature::LabeledFeatureSet& legit_test,
                                                 const feature::LabeledFeatureSet& rogue_pool,
                                                 const AttackScenario& sc);

// Enrollment-step contamination: every sample claiming the target identity
// is replaced by a rogue sample carrying claimed = target; all other
// devices' samples are untouched and the total count is preserved.
feature::LabeledFeatureSet contaminate_enrollment(const feature::LabeledFeatureSet& train,
                                                  const feature::LabeledFeatureSet& rogue_pool,
                                                  const AttackScenario& sc);

}  // namespace rffi::attacks

#endif
