#include "rffi/harness/experiment.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

#include "rffi/attacks/attacks.hpp"
#include "rffi/detection/diff.hpp"
#include "rffi/detection/embedder.hpp"
#include "rffi/io.hpp"

namespace rffi::harness {

void Report::add(const std::string& scenario, const std::string& metric, double value) {
    metrics.push_back({scenario, metric, value});
}

double Report::get(const std::string& scenario, const std::string& metric) const {
    for (const ScenarioMetric& m : metrics) {
        if (m.scenario == scenario && m.metric == metric) return m.value;
    }
    throw DataError("report metric not found: " + scenario + "/" + metric);
}

bool Report::has(const std::string& scenario, const std::string& metric) const {
    for (const ScenarioMetric& m : metrics) {
        if (m.scenario == scenario && m.metric == metric) return true;
    }
    return false;
}

namespace {

std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

}  // namespace

std::string Report::to_json() const {
    nlohmann::ordered_json j;
    j["kind"] = kind;
    nlohmann::ordered_json ms = nlohmann::ordered_json::array();
    for (const ScenarioMetric& m : metrics) {
        ms.push_back({{"scenario", m.scenario}, {"metric", m.metric}, {"value", format_value(m.value)}});
    }
    j["metrics"] = std::move(ms);
    j["config"] = config_echo;
    nlohmann::ordered_json seeds = nlohmann::ordered_json::array();
    for (const auto& [name, seed] : seed_manifest) {
        seeds.push_back({{"name", name}, {"seed", seed}});
    }
    j["seed_manifest"] = std::move(seeds);
    return j.dump(2) + "\n";
}

std::string Report::to_csv() const {
    std::ostringstream os;
    os << "scenario,metric,value\n";
    for (const ScenarioMetric& m : metrics) {
        os << m.scenario << "," << m.metric << "," << format_value(m.value) << "\n";
    }
    return os.str();
}

std::string Report::to_text() const {
    std::ostringstream os;
    os << "report: " << kind << "\n";
    for (const ScenarioMetric& m : metrics) {
        os << "  " << m.scenario << "  " << m.metric << " = " << format_value(m.value) << "\n";
    }
    os << "runtime: " << format_value(runtime_seconds) << " s\n";
    return os.str();
}

void write_report(const std::filesystem::path& dir, const Report& report) {
    std::filesystem::create_directories(dir);
    write_text(dir / "report.json", report.to_json());
    write_text(dir / "report.csv", report.to_csv());
    write_text(dir / "report.log",
               "kind=" + report.kind + "\nruntime_seconds=" + format_value(report.runtime_seconds) + "\n");
}

Report read_report_json(const std::filesystem::path& path) {
    Report r;
    try {
        const nlohmann::json j = nlohmann::json::parse(read_text(path));
        r.kind = j.at("kind").get<std::string>();
        for (const auto& m : j.at("metrics")) {
            r.metrics.push_back({m.at("scenario").get<std::string>(),
                                 m.at("metric").get<std::string>(),
                                 std::stod(m.at("value").get<std::string>())});
        }
        for (const auto& [k, v] : j.at("config").items()) {
            r.config_echo[k] = v.get<std::string>();
        }
        for (const auto& s : j.at("seed_manifest")) {
            r.seed_manifest.emplace_back(s.at("name").get<std::string>(),
                                         s.at("seed").get<std::uint64_t>());
        }
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("bad report file: " + std::string(e.what()));
    }
    return r;
}

namespace {

classifier::TrainHyper scratch_hyper(const ExperimentConfig& cfg, std::uint64_t seed, int epochs) {
    classifier::TrainHyper h;
    h.learning_rate = cfg.scratch_lr;
    h.batch_size = cfg.batch_size;
    h.epochs = epochs;
    h.seed = seed;
    return h;
}

classifier::TrainHyper transfer_hyper(const ExperimentConfig& cfg, std::uint64_t seed, int epochs) {
    classifier::TrainHyper h;
    h.learning_rate = cfg.transfer_lr;
    h.new_layer_lr_factor = cfg.head_lr_factor;
    h.batch_size = cfg.batch_size;
    h.epochs = epochs;
    h.seed = seed;
    return h;
}

classifier::ArchSpec arch_for(const ExperimentConfig& cfg, std::size_t classes) {
    classifier::ArchSpec arch;
    arch.input_size = cfg.image_size;
    arch.num_classes = classes;
    return arch;
}

const feature::LabeledFeatureSet& pick(const FeatureSetPair& pair, feature::FeatureSource src) {
    return src == feature::FeatureSource::quotient ? pair.quotient : pair.spectrogram;
}

classifier::TrainedModel train_combo(const ExperimentConfig& cfg, const SeedArtifacts& art,
                                     const feature::LabeledFeatureSet& train,
                                     feature::FeatureSource src, bool transfer_mode,
                                     std::uint64_t seed, int scratch_epochs, int transfer_epochs) {
    if (transfer_mode) {
        const classifier::TrainedModel& base =
            src == feature::FeatureSource::quotient ? art.base_quotient : art.base_spectrogram;
        return classifier::transfer(base, train, transfer_hyper(cfg, seed, transfer_epochs));
    }
    classifier::TrainedModel model =
        classifier::build(arch_for(cfg, art.pop.legit.size()), art.pop.legit_labels(),
                          derive_seed(seed, "scratch-init"));
    return classifier::train_scratch(std::move(model), train, scratch_hyper(cfg, seed, scratch_epochs));
}

double evaluate_accuracy(classifier::TrainedModel& model, const feature::LabeledFeatureSet& test) {
    const classifier::PosteriorMatrix pm = classifier::forward(model, test.images());
    return accuracy(predict_labels(pm), test.true_labels());
}

// target-restricted binary problem over an attack test set: positives are
// the target's genuine samples, negatives the forgeries; score is the
// posterior of the claimed (target) class
void claimed_class_scores(classifier::TrainedModel& model,
                          const feature::LabeledFeatureSet& attack_set, const std::string& target,
                          std::vector<double>& scores, std::vector<int>& labels) {
    const classifier::PosteriorMatrix pm = classifier::forward(model, attack_set.images());
    const auto it = std::find(pm.col_classes.begin(), pm.col_classes.end(), target);
    require(it != pm.col_classes.end(), "target class missing from the model");
    const std::size_t col = static_cast<std::size_t>(it - pm.col_classes.begin());
    for (std::size_t o = 0; o < pm.probs.rows(); ++o) {
        scores.push_back(pm.probs(o, col));
        labels.push_back(attack_set.items[o].true_id == target ? 1 : 0);
    }
}

struct ComboName {
    feature::FeatureSource src;
    bool transfer;
    std::string str() const {
        return feature::feature_source_name(src) + "+" + (transfer ? "transfer" : "scratch");
    }
};

const ComboName kCombos[4] = {
    {feature::FeatureSource::quotient, true},
    {feature::FeatureSource::quotient, false},
    {feature::FeatureSource::spectrogram, true},
    {feature::FeatureSource::spectrogram, false},
};

}  // namespace

SeedArtifacts build_seed_artifacts(const ExperimentConfig& cfg, std::size_t seed_index) {
    SeedArtifacts art;
    art.seed = derive_seed(cfg.master_seed, "trend-seed", {seed_index});
    art.pop = sample_population(cfg, derive_seed(art.seed, "population"));

    DatasetBuilder builder(cfg);
    art.extractor = builder.calibrate(art.pop, art.seed);
    art.base_train = builder.build_sets(art.pop.legit, cfg.base_env, cfg.base_train_per_device,
                                        "train", art.extractor, art.seed, "base-train");
    art.base_test = builder.build_sets(art.pop.legit, cfg.base_env, cfg.base_test_per_device,
                                       "test", art.extractor, art.seed, "base-test");
    check_split_hygiene(art.base_train.quotient, art.base_test.quotient);

    const auto labels = art.pop.legit_labels();
    const classifier::ArchSpec arch = arch_for(cfg, labels.size());
    classifier::TrainedModel mq = classifier::build(arch, labels, derive_seed(art.seed, "base-q"));
    art.base_quotient = classifier::train_scratch(
        std::move(mq), art.base_train.quotient,
        scratch_hyper(cfg, derive_seed(art.seed, "base-q-train"), cfg.scratch_epochs));
    classifier::TrainedModel ms = classifier::build(arch, labels, derive_seed(art.seed, "base-s"));
    art.base_spectrogram = classifier::train_scratch(
        std::move(ms), art.base_train.spectrogram,
        scratch_hyper(cfg, derive_seed(art.seed, "base-s-train"), cfg.scratch_epochs));
    return art;
}

Report run_classification_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();
    Report report;
    report.kind = "classification";
    report.config_echo = cfg.echo();

    // mean accuracy accumulators over seeds: [count][combo]
    std::map<std::size_t, std::map<std::string, double>> mean_acc;

    for (std::size_t s = 0; s < cfg.trend_seeds; ++s) {
        SeedArtifacts art = build_seed_artifacts(cfg, s);
        const std::string seed_tag = "seed=" + std::to_string(s);
        report.seed_manifest.emplace_back("classify/" + seed_tag, art.seed);

        DatasetBuilder builder(cfg);
        report.add("classify/" + seed_tag + "/chamber/quotient", "accuracy",
                   evaluate_accuracy(art.base_quotient, art.base_test.quotient));
        report.add("classify/" + seed_tag + "/chamber/spectrogram", "accuracy",
                   evaluate_accuracy(art.base_spectrogram, art.base_test.spectrogram));

        const FeatureSetPair deploy_test =
            builder.build_sets(art.pop.legit, cfg.deploy_env, cfg.test_per_device, "test",
                               art.extractor, art.seed, "deploy-test");

        for (std::size_t count : cfg.train_counts) {
            const FeatureSetPair deploy_train = builder.build_sets(
                art.pop.legit, cfg.deploy_env, count, "train", art.extractor, art.seed,
                "deploy-train/count=" + std::to_string(count));
            check_split_hygiene(deploy_train.quotient, deploy_test.quotient);

            for (const ComboName& combo : kCombos) {
                const std::uint64_t train_seed =
                    derive_seed(art.seed, "classify-train", {count, static_cast<std::uint64_t>(combo.transfer),
                                                             static_cast<std::uint64_t>(combo.src)});
                classifier::TrainedModel model =
                    train_combo(cfg, art, pick(deploy_train, combo.src), combo.src, combo.transfer,
                                train_seed, cfg.scratch_epochs, cfg.transfer_epochs);
                const double acc = evaluate_accuracy(model, pick(deploy_test, combo.src));
                report.add("classify/" + seed_tag + "/count=" + std::to_string(count) + "/" + combo.str(),
                           "accuracy", acc);
                mean_acc[count][combo.str()] += acc;
            }
        }
    }

    for (auto& [count, per_combo] : mean_acc) {
        for (auto& [combo, sum] : per_combo) {
            report.add("classify/mean/count=" + std::to_string(count) + "/" + combo, "accuracy",
                       sum / static_cast<double>(cfg.trend_seeds));
        }
    }

    report.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

Report run_impersonation_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    require_config(cfg.rogue_devices >= 1, "impersonation experiment needs a rogue population");
    const auto t0 = std::chrono::steady_clock::now();
    Report report;
    report.kind = "impersonation";
    report.config_echo = cfg.echo();

    std::map<std::string, double> mean_auc;

    for (std::size_t s = 0; s < cfg.trend_seeds; ++s) {
        SeedArtifacts art = build_seed_artifacts(cfg, s);
        const std::string seed_tag = "seed=" + std::to_string(s);
        report.seed_manifest.emplace_back("impersonation/" + seed_tag, art.seed);

        DatasetBuilder builder(cfg);
        const FeatureSetPair deploy_train = builder.build_sets(
            art.pop.legit, cfg.deploy_env, cfg.impersonation_count, "train", art.extractor,
            art.seed, "deploy-train/count=" + std::to_string(cfg.impersonation_count));
        const FeatureSetPair deploy_test =
            builder.build_sets(art.pop.legit, cfg.deploy_env, cfg.test_per_device, "test",
                               art.extractor, art.seed, "deploy-test");
        const FeatureSetPair rogue_test =
            builder.build_sets(art.pop.rogue, cfg.deploy_env, cfg.test_per_device, "test",
                               art.extractor, art.seed, "rogue-test");
        check_split_hygiene(deploy_train.quotient, deploy_test.quotient);

        for (const ComboName& combo : kCombos) {
            const std::uint64_t train_seed =
                derive_seed(art.seed, "impersonation-train",
                            {static_cast<std::uint64_t>(combo.transfer), static_cast<std::uint64_t>(combo.src)});
            classifier::TrainedModel model =
                train_combo(cfg, art, pick(deploy_train, combo.src), combo.src, combo.transfer,
                            train_seed, cfg.scratch_epochs, cfg.transfer_epochs);

            // pool the per-target one-versus-all problems (micro averaging)
            std::vector<double> scores;
            std::vector<int> labels;
            for (const std::string& target : art.pop.legit_labels()) {
                attacks::AttackScenario sc;
                sc.kind = attacks::AttackScenario::Kind::impersonation;
                sc.target = target;
                sc.seed = derive_seed(art.seed, "impersonation-sc", {hash_tag(target)});
                const feature::LabeledFeatureSet attack_set = attacks::impersonation_testset(
                    pick(deploy_test, combo.src), pick(rogue_test, combo.src), sc);
                claimed_class_scores(model, attack_set, target, scores, labels);
            }
            const double pooled_auc = binary_auc(scores, labels);
            report.add("impersonation/" + seed_tag + "/" + combo.str(), "auc", pooled_auc);
            mean_auc[combo.str()] += pooled_auc;
        }
    }

    for (auto& [combo, sum] : mean_auc) {
        report.add("impersonation/mean/" + combo, "auc",
                   sum / static_cast<double>(cfg.trend_seeds));
    }

    report.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

namespace {

struct EnrollmentOutcome {
    detection::DiffMatrix diff;
    std::map<std::string, double> margins;  // over claimed labels of the test split
};

// Algorithm 2 at one enrollment: train the transfer and the from-scratch
// classifier on the same (possibly contaminated) training set, evaluate both
// on the enrollment test split, and form the normalized difference.
EnrollmentOutcome run_enrollment(const ExperimentConfig& cfg, const SeedArtifacts& art,
                                 const feature::LabeledFeatureSet& train,
                                 const feature::LabeledFeatureSet& test, std::uint64_t seed,
                                 const std::string& meta) {
    classifier::TrainedModel transfer_model = classifier::transfer(
        art.base_quotient, train,
        transfer_hyper(cfg, derive_seed(seed, "enroll-transfer"), cfg.detect_transfer_epochs));
    classifier::TrainedModel scratch_model = classifier::build(
        arch_for(cfg, art.pop.legit.size()), art.pop.legit_labels(), derive_seed(seed, "enroll-scratch"));
    scratch_model = classifier::train_scratch(
        std::move(scratch_model), train,
        scratch_hyper(cfg, derive_seed(seed, "enroll-scratch-train"), cfg.detect_scratch_epochs));

    const auto images = test.images();
    classifier::PosteriorMatrix mt = classifier::forward(transfer_model, images);
    classifier::PosteriorMatrix md = classifier::forward(scratch_model, images);

    EnrollmentOutcome out;
    out.diff = detection::posterior_difference(mt, md);
    out.diff.scenario_meta = meta;
    out.margins = detection::true_positive_margin(out.diff, test.claimed_labels());
    return out;
}

}  // namespace

Report run_contamination_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    require_config(cfg.rogue_devices >= 1, "contamination experiment needs a rogue population");
    const auto t0 = std::chrono::steady_clock::now();
    Report report;
    report.kind = "contamination";
    report.config_echo = cfg.echo();

    SeedArtifacts art = build_seed_artifacts(cfg, 0);
    report.seed_manifest.emplace_back("contamination/seed=0", art.seed);
    DatasetBuilder builder(cfg);

    const std::size_t max_count =
        std::max(cfg.contamination_count,
                 *std::max_element(cfg.detect_counts.begin(), cfg.detect_counts.end()));

    // rogue feature pools, sized for the largest replacement
    const FeatureSetPair rogue_train_pool = builder.build_sets(
        art.pop.rogue, cfg.deploy_env, max_count, "train", art.extractor, art.seed, "rogue-train");
    const FeatureSetPair rogue_test_pool = builder.build_sets(
        art.pop.rogue, cfg.deploy_env,
        std::max(cfg.detect_test_per_device, cfg.test_per_device), "test", art.extractor,
        art.seed, "rogue-test");

    const auto legit_labels = art.pop.legit_labels();
    const auto rogue_labels = art.pop.rogue_labels();

    // --- (a) vulnerability of the contaminated transfer classifier ---------
    {
        const FeatureSetPair train = builder.build_sets(
            art.pop.legit, cfg.deploy_env, cfg.contamination_count, "train", art.extractor,
            art.seed, "contam-train");
        const FeatureSetPair test =
            builder.build_sets(art.pop.legit, cfg.deploy_env, cfg.test_per_device, "test",
                               art.extractor, art.seed, "contam-test");
        check_split_hygiene(train.quotient, test.quotient);

        std::mt19937_64 draw_rng(derive_seed(art.seed, "contam-draws"));
        std::size_t below = 0;
        for (std::size_t draw = 0; draw < cfg.contamination_draws; ++draw) {
            attacks::AttackScenario sc;
            sc.kind = attacks::AttackScenario::Kind::contamination;
            sc.target = legit_labels[draw_rng() % legit_labels.size()];
            sc.rogue = rogue_labels[draw_rng() % rogue_labels.size()];
            sc.seed = derive_seed(art.seed, "contam-sc", {draw});

            const feature::LabeledFeatureSet poisoned =
                attacks::contaminate_enrollment(train.quotient, rogue_train_pool.quotient, sc);
            classifier::TrainedModel model = classifier::transfer(
                art.base_quotient, poisoned,
                transfer_hyper(cfg, derive_seed(sc.seed, "vuln-train"), cfg.transfer_epochs));

            attacks::AttackScenario probe = sc;
            probe.kind = attacks::AttackScenario::Kind::impersonation;
            const feature::LabeledFeatureSet attack_set =
                attacks::impersonation_testset(test.quotient, rogue_test_pool.quotient, probe);
            std::vector<double> scores;
            std::vector<int> labels;
            claimed_class_scores(model, attack_set, sc.target, scores, labels);
            const double target_auc = binary_auc(scores, labels);
            report.add("contamination/vulnerability/draw=" + std::to_string(draw), "target_auc",
                       target_auc);
            if (target_auc < 0.9) ++below;
        }
        report.add("contamination/vulnerability", "fraction_below_0.9",
                   static_cast<double>(below) / static_cast<double>(cfg.contamination_draws));
    }

    // --- (b) countermeasure: posterior difference + one-class boundary -----
    for (std::size_t count : cfg.detect_counts) {
        const std::string count_tag = "count=" + std::to_string(count);
        std::vector<detection::DiffMatrix> normals;
        double positive_margins = 0.0, margin_total = 0.0;

        const std::size_t total_normals = cfg.detect_normals_train + cfg.detect_normals_test;
        for (std::size_t e = 0; e < total_normals; ++e) {
            const std::uint64_t enroll_seed = derive_seed(art.seed, "normal-enroll", {count, e});
            const FeatureSetPair train = builder.build_sets(
                art.pop.legit, cfg.deploy_env, count, "train", art.extractor, enroll_seed,
                "enroll-train/" + count_tag + "/e=" + std::to_string(e));
            const FeatureSetPair test = builder.build_sets(
                art.pop.legit, cfg.deploy_env, cfg.detect_test_per_device, "test", art.extractor,
                enroll_seed, "enroll-test/" + count_tag + "/e=" + std::to_string(e));
            EnrollmentOutcome outcome =
                run_enrollment(cfg, art, train.quotient, test.quotient, enroll_seed,
                               "normal/" + count_tag + "/e=" + std::to_string(e));
            outcome.diff.label = detection::DiffMatrix::Label::normal;
            for (const auto& [cls, margin] : outcome.margins) {
                margin_total += 1.0;
                if (margin > 0.0) positive_margins += 1.0;
            }
            normals.push_back(std::move(outcome.diff));
        }
        report.add("margins/noattack/" + count_tag, "positive_fraction",
                   positive_margins / margin_total);

        std::vector<detection::DiffMatrix> anomalies;
        std::mt19937_64 draw_rng(derive_seed(art.seed, "anomaly-draws", {count}));
        double negative_target_margins = 0.0;
        for (std::size_t a = 0; a < cfg.detect_anomalies_test; ++a) {
            const std::uint64_t enroll_seed = derive_seed(art.seed, "anomaly-enroll", {count, a});
            attacks::AttackScenario sc;
            sc.kind = attacks::AttackScenario::Kind::contamination;
            sc.target = legit_labels[draw_rng() % legit_labels.size()];
            sc.rogue = rogue_labels[draw_rng() % rogue_labels.size()];
            sc.seed = derive_seed(enroll_seed, "scenario");

            const FeatureSetPair train = builder.build_sets(
                art.pop.legit, cfg.deploy_env, count, "train", art.extractor, enroll_seed,
                "attack-train/" + count_tag + "/a=" + std::to_string(a));
            const FeatureSetPair test = builder.build_sets(
                art.pop.legit, cfg.deploy_env, cfg.detect_test_per_device, "test", art.extractor,
                enroll_seed, "attack-test/" + count_tag + "/a=" + std::to_string(a));

            // the receiver's entire enrollment stream is contaminated: both
            // the training share and the held-out test share of the target
            // are rogue transmissions claiming its identity
            const feature::LabeledFeatureSet poisoned_train =
                attacks::contaminate_enrollment(train.quotient, rogue_train_pool.quotient, sc);
            attacks::AttackScenario sc_test = sc;
            sc_test.seed = derive_seed(sc.seed, "test-share");
            const feature::LabeledFeatureSet poisoned_test =
                attacks::contaminate_enrollment(test.quotient, rogue_test_pool.quotient, sc_test);

            EnrollmentOutcome outcome =
                run_enrollment(cfg, art, poisoned_train, poisoned_test, enroll_seed,
                               "anomaly/" + count_tag + "/a=" + std::to_string(a) + "/target=" +
                                   sc.target + "/rogue=" + sc.rogue);
            outcome.diff.label = detection::DiffMatrix::Label::anomaly;
            if (outcome.margins.count(sc.target) && outcome.margins.at(sc.target) < 0.0) {
                negative_target_margins += 1.0;
            }
            anomalies.push_back(std::move(outcome.diff));
        }
        report.add("margins/attacked/" + count_tag, "negative_fraction",
                   negative_target_margins / static_cast<double>(cfg.detect_anomalies_test));

        // detector: extractor + boundary on the training normals
        std::vector<detection::DiffMatrix> train_normals(
            normals.begin(), normals.begin() + static_cast<std::ptrdiff_t>(cfg.detect_normals_train));
        detection::EmbedderConfig ecfg;
        ecfg.image_size = cfg.image_size;
        ecfg.depth = cfg.image_depth;
        ecfg.proxy_groups = cfg.embed_proxy_groups;
        ecfg.epochs = cfg.embed_epochs;
        detection::OneClassDetector detector;
        detector.extractor = detection::train_extractor(
            train_normals, derive_seed(art.seed, "extractor", {count}), ecfg);
        detector.boundary = detection::fit_boundary(
            detector.extractor.embed_all(train_normals), cfg.ocsvm_nu);

        std::size_t detected = 0;
        for (const detection::DiffMatrix& d : anomalies) {
            if (detection::detect(detector, d).anomaly) ++detected;
        }
        const double rate = static_cast<double>(detected) / static_cast<double>(anomalies.size());
        report.add("detection/" + count_tag, "detection_rate", rate);

        std::size_t false_alarms = 0;
        for (std::size_t e = cfg.detect_normals_train; e < total_normals; ++e) {
            if (detection::detect(detector, normals[e]).anomaly) ++false_alarms;
        }
        report.add("detection/" + count_tag, "false_alarm_rate",
                   static_cast<double>(false_alarms) / static_cast<double>(cfg.detect_normals_test));
    }

    report.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

}  // namespace rffi::harness
