// Command-line front end for the RFFI testbed: dataset synthesis, feature
// extraction, classifier training, attack dataset transforms, one-class
// detection and the full experiment runners.

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <iostream>

#include "rffi/attacks/attacks.hpp"
#include "rffi/classifier/model_io.hpp"
#include "rffi/classifier/train.hpp"
#include "rffi/detection/embedder.hpp"
#include "rffi/detection/ocsvm.hpp"
#include "rffi/harness/experiment.hpp"
#include "rffi/io.hpp"

namespace fs = std::filesystem;
using namespace rffi;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitMetric = 4;

harness::ExperimentConfig load_config(const std::string& config_path,
                                      const std::vector<std::string>& overrides,
                                      std::int64_t seed) {
    harness::ExperimentConfig cfg = config_path.empty()
                                        ? harness::ExperimentConfig::desk_defaults()
                                        : harness::ExperimentConfig::from_file(config_path);
    for (const std::string& kv : overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw ConfigError("--set expects key=value, got: " + kv);
        cfg.apply_override(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (seed >= 0) cfg.master_seed = static_cast<std::uint64_t>(seed);
    cfg.validate();
    return cfg;
}

int cmd_simulate(const harness::ExperimentConfig& cfg, const std::string& out_dir,
                 const std::string& env_name, std::size_t per_device, bool include_rogue) {
    const signal::Environment env = signal::parse_environment(env_name);
    const harness::DevicePopulation pop =
        harness::sample_population(cfg, derive_seed(cfg.master_seed, "population"));

    std::vector<signal::DeviceProfile> devices = pop.legit;
    if (include_rogue) devices.insert(devices.end(), pop.rogue.begin(), pop.rogue.end());

    std::vector<signal::CaptureRecord> records;
    for (std::size_t d = 0; d < devices.size(); ++d) {
        for (std::size_t i = 0; i < per_device; ++i) {
            const std::uint64_t capture_seed =
                derive_seed(cfg.master_seed, "simulate/" + env_name, {d, i});
            const signal::ChannelRealization ch =
                signal::sample_channel(env, derive_seed(capture_seed, "channel"), cfg.presets);
            const signal::CapturePair pair = signal::synthesize_capture(
                devices[d], ch, cfg.lora, capture_seed, signal::PowerLevel::high(cfg.high_dbm),
                signal::PowerLevel::low(cfg.low_dbm));
            records.push_back(signal::write_capture(out_dir, pair, env_name, capture_seed,
                                                    cfg.high_dbm, cfg.low_dbm));
        }
    }
    signal::write_manifest(fs::path(out_dir) / "manifest.jsonl", records);
    std::cout << "wrote " << records.size() << " captures to " << out_dir << "\n";
    return kExitOk;
}

int cmd_extract(const harness::ExperimentConfig& cfg, const std::string& in_dir,
                const std::string& out_stem, const std::string& feature_name, double rho_ref,
                const std::string& clip_from, const std::string& split) {
    const feature::FeatureSource src = feature::parse_feature_source(feature_name);
    const auto records = signal::read_manifest(fs::path(in_dir) / "manifest.jsonl");
    require(!records.empty(), "no captures in manifest");

    const feature::StftConfig stft_cfg =
        feature::StftConfig::hamming(cfg.stft_window, cfg.stft_hop);

    struct Extracted {
        RealMatrix db;
        std::string claimed, true_id;
        std::uint64_t seed;
    };
    std::vector<Extracted> kept;
    feature::CorpusPercentiles pct;
    for (const auto& rec : records) {
        const signal::CapturePair pair = signal::read_capture(in_dir, rec);
        const feature::Spectrogram s_high = feature::stft(pair.high, stft_cfg, feature::PowerTag::high);
        const feature::Spectrogram s_low = feature::stft(pair.low, stft_cfg, feature::PowerTag::low);
        const feature::FilterResult filt =
            feature::correlation_filter(s_high, s_low, rho_ref, cfg.theta);
        if (!filt.accepted) continue;
        Extracted e;
        e.db = src == feature::FeatureSource::quotient
                   ? feature::quotient(s_high, s_low).q_db
                   : feature::spectrogram_db(s_high);
        e.claimed = rec.claimed_id;
        e.true_id = rec.device_id;
        e.seed = rec.seed;
        pct.add(e.db);
        kept.push_back(std::move(e));
    }
    require(!kept.empty(), "every capture was rejected by the distortion filter");

    feature::ClipRange clip;
    if (!clip_from.empty()) {
        const feature::LabeledFeatureSet ref = feature::load_feature_set(clip_from);
        clip = ref.meta.clip;
    } else {
        clip = pct.range();
    }

    feature::LabeledFeatureSet set;
    set.split = split;
    set.meta.source = src;
    set.meta.image_size = cfg.image_size;
    set.meta.depth = cfg.image_depth;
    set.meta.clip = clip;
    set.meta.theta = cfg.theta;
    set.meta.rho_ref = rho_ref;
    set.meta.stft_window = cfg.stft_window;
    set.meta.stft_hop = cfg.stft_hop;
    for (const Extracted& e : kept) {
        feature::LabeledItem item;
        item.claimed = e.claimed;
        item.true_id = e.true_id;
        item.capture_seed = e.seed;
        item.image = feature::rasterize(e.db, cfg.image_size, cfg.image_depth, clip);
        item.image.source = src;
        item.image.claimed_id = e.claimed;
        item.image.device_id = e.true_id;
        set.items.push_back(std::move(item));
    }
    fs::create_directories(fs::path(out_stem).parent_path().empty()
                               ? fs::path(".")
                               : fs::path(out_stem).parent_path());
    feature::save_feature_set(out_stem, set);
    std::cout << "extracted " << set.items.size() << " " << feature_name << " features ("
              << records.size() - kept.size() << " rejected) to " << out_stem << ".json/.u8\n";
    return kExitOk;
}

int cmd_train(const harness::ExperimentConfig& cfg, const std::string& features_stem,
              const std::string& mode, const std::string& base_path, const std::string& out_path,
              const std::string& log_path, std::int64_t epochs) {
    const feature::LabeledFeatureSet data = feature::load_feature_set(features_stem);
    require(!data.items.empty(), "empty training set");

    classifier::TrainLog log;
    classifier::TrainedModel model;
    if (mode == "scratch") {
        classifier::TrainHyper hyper;
        hyper.learning_rate = cfg.scratch_lr;
        hyper.batch_size = cfg.batch_size;
        hyper.epochs = epochs > 0 ? static_cast<int>(epochs) : cfg.scratch_epochs;
        hyper.seed = cfg.master_seed;
        classifier::ArchSpec arch;
        arch.input_size = data.meta.image_size;
        const auto labels = data.distinct_claimed_labels();
        arch.num_classes = labels.size();
        model = classifier::build(arch, labels, derive_seed(cfg.master_seed, "cli-build"));
        model = classifier::train_scratch(std::move(model), data, hyper, &log);
    } else if (mode == "transfer") {
        require_config(!base_path.empty(), "transfer mode needs --base");
        const classifier::TrainedModel base = classifier::load(base_path);
        classifier::TrainHyper hyper;
        hyper.learning_rate = cfg.transfer_lr;
        hyper.new_layer_lr_factor = cfg.head_lr_factor;
        hyper.batch_size = cfg.batch_size;
        hyper.epochs = epochs > 0 ? static_cast<int>(epochs) : cfg.transfer_epochs;
        hyper.seed = cfg.master_seed;
        model = classifier::transfer(base, data, hyper, &log);
    } else {
        throw ConfigError("unknown training mode: " + mode);
    }
    classifier::save(model, out_path);
    if (!log_path.empty()) write_text(log_path, classifier::train_log_csv(log));
    std::cout << "trained " << mode << " model (" << model.net.param_count()
              << " parameters) -> " << out_path << "\n";
    return kExitOk;
}

int cmd_attack(const std::string& features_stem, const std::string& pool_stem,
               const std::string& scenario_path, const std::string& out_stem) {
    const attacks::AttackScenario sc = attacks::load_scenario(scenario_path);
    const feature::LabeledFeatureSet input = feature::load_feature_set(features_stem);
    const feature::LabeledFeatureSet pool = feature::load_feature_set(pool_stem);
    feature::LabeledFeatureSet out;
    if (sc.kind == attacks::AttackScenario::Kind::impersonation) {
        out = attacks::impersonation_testset(input, pool, sc);
    } else {
        out = attacks::contaminate_enrollment(input, pool, sc);
    }
    feature::save_feature_set(out_stem, out);
    std::cout << attacks::attack_kind_name(sc.kind) << " scenario applied: " << out.items.size()
              << " items -> " << out_stem << ".json/.u8\n";
    return kExitOk;
}

std::vector<detection::DiffMatrix> load_diff_dir(const std::string& dir) {
    std::vector<fs::path> stems;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.path().extension() == ".json") {
            fs::path stem = entry.path();
            stem.replace_extension();
            stems.push_back(stem);
        }
    }
    std::sort(stems.begin(), stems.end());
    std::vector<detection::DiffMatrix> out;
    for (const fs::path& stem : stems) out.push_back(detection::load_diff_matrix(stem));
    require(!out.empty(), "no diff matrices in " + dir);
    return out;
}

int cmd_detect(const harness::ExperimentConfig& cfg, const std::string& normals_dir,
               const std::string& test_dir, const std::string& out_dir) {
    const auto normals = load_diff_dir(normals_dir);
    const auto tests = load_diff_dir(test_dir);

    detection::EmbedderConfig ecfg;
    ecfg.image_size = cfg.image_size;
    ecfg.depth = cfg.image_depth;
    ecfg.proxy_groups = cfg.embed_proxy_groups;
    ecfg.epochs = cfg.embed_epochs;

    detection::OneClassDetector det;
    det.extractor =
        detection::train_extractor(normals, derive_seed(cfg.master_seed, "cli-extractor"), ecfg);
    det.boundary = detection::fit_boundary(det.extractor.embed_all(normals), cfg.ocsvm_nu);

    fs::create_directories(out_dir);
    detection::save_detector(det, fs::path(out_dir) / "detector.bin");

    std::ostringstream csv;
    csv << "index,scenario,label,score,flag\n";
    std::size_t anomalies = 0;
    for (std::size_t i = 0; i < tests.size(); ++i) {
        const detection::DetectionResult res = detection::detect(det, tests[i]);
        if (res.anomaly) ++anomalies;
        csv << i << "," << tests[i].scenario_meta << ","
            << (tests[i].label == detection::DiffMatrix::Label::anomaly
                    ? "anomaly"
                    : (tests[i].label == detection::DiffMatrix::Label::normal ? "normal" : "unknown"))
            << "," << res.score << "," << (res.anomaly ? "anomaly" : "normal") << "\n";
    }
    write_text(fs::path(out_dir) / "detection.csv", csv.str());
    write_text(fs::path(out_dir) / "embeddings.csv",
               detection::embeddings_csv(detection::export_embeddings(tests, det)));
    std::cout << "flagged " << anomalies << "/" << tests.size() << " matrices as anomalies; "
              << "results in " << out_dir << "\n";
    return kExitOk;
}

int cmd_experiment(const harness::ExperimentConfig& cfg, const std::string& kind,
                   const std::string& out_dir) {
    auto run_one = [&](const std::string& k) {
        harness::Report report;
        if (k == "classification") report = harness::run_classification_experiment(cfg);
        else if (k == "impersonation") report = harness::run_impersonation_experiment(cfg);
        else if (k == "contamination") report = harness::run_contamination_experiment(cfg);
        else throw ConfigError("unknown experiment kind: " + k);
        harness::write_report(fs::path(out_dir) / k, report);
        std::cout << k << ": " << report.metrics.size() << " metrics, "
                  << report.runtime_seconds << " s\n";
    };
    if (kind == "all") {
        run_one("classification");
        run_one("impersonation");
        run_one("contamination");
    } else {
        run_one(kind);
    }
    return kExitOk;
}

int cmd_report(const std::string& in_path, const std::string& format) {
    const harness::Report report = harness::read_report_json(in_path);
    if (format == "csv") std::cout << report.to_csv();
    else if (format == "text") std::cout << report.to_text();
    else if (format == "json") std::cout << report.to_json();
    else throw ConfigError("unknown report format: " + format);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulated LoRa RFFI testbed: PA nonlinearity quotient features, "
                 "transfer-learning classification, impersonation attacks and the "
                 "posterior-difference countermeasure"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> overrides;
    std::int64_t seed = -1;
    app.add_option("--config", config_path, "experiment config file (key = value lines)");
    app.add_option("--set", overrides, "override a config key, e.g. --set image.size=64");
    app.add_option("--seed", seed, "master seed override");

    auto* sim = app.add_subcommand("simulate", "synthesize capture pairs to disk");
    std::string sim_out = "captures", sim_env = "indoor";
    std::size_t sim_count = 10;
    bool sim_rogue = false;
    sim->add_option("--out", sim_out, "output directory");
    sim->add_option("--env", sim_env, "chamber|indoor|outdoor");
    sim->add_option("--count", sim_count, "captures per device");
    sim->add_flag("--rogue", sim_rogue, "include the rogue population");

    auto* ext = app.add_subcommand("extract", "captures -> rasterized feature dataset");
    std::string ext_in = "captures", ext_out = "features/set", ext_feature = "quotient";
    std::string ext_clip_from, ext_split = "train";
    double ext_rho_ref = 1.0;
    ext->add_option("--in", ext_in, "capture directory (with manifest.jsonl)");
    ext->add_option("--out", ext_out, "output stem (writes .json/.u8)");
    ext->add_option("--feature", ext_feature, "quotient|spectrogram");
    ext->add_option("--rho-ref", ext_rho_ref, "reference correlation for the distortion filter");
    ext->add_option("--clip-from", ext_clip_from, "reuse the clip range of an existing feature set");
    ext->add_option("--split", ext_split, "split tag stored in the manifest");

    auto* trn = app.add_subcommand("train", "train a classifier on a feature dataset");
    std::string trn_features, trn_mode = "scratch", trn_base, trn_out = "model.bin", trn_log;
    std::int64_t trn_epochs = -1;
    trn->add_option("--features", trn_features, "feature set stem")->required();
    trn->add_option("--mode", trn_mode, "scratch|transfer");
    trn->add_option("--base", trn_base, "base model file (transfer mode)");
    trn->add_option("--out", trn_out, "output model file");
    trn->add_option("--log", trn_log, "training log CSV path");
    trn->add_option("--epochs", trn_epochs, "epoch budget override");

    auto* atk = app.add_subcommand("attack", "apply an attack scenario to a feature dataset");
    std::string atk_features, atk_pool, atk_scenario, atk_out = "features/attacked";
    atk->add_option("--features", atk_features, "input feature set stem")->required();
    atk->add_option("--rogue-pool", atk_pool, "rogue feature pool stem")->required();
    atk->add_option("--scenario", atk_scenario, "scenario JSON file")->required();
    atk->add_option("--out", atk_out, "output stem");

    auto* det = app.add_subcommand("detect", "one-class detection over diff matrices");
    std::string det_normals, det_test, det_out = "detection";
    det->add_option("--normals", det_normals, "directory of normal diff matrices")->required();
    det->add_option("--test", det_test, "directory of matrices to score")->required();
    det->add_option("--out", det_out, "output directory");

    auto* exp = app.add_subcommand("experiment", "run a full scenario and write a report");
    std::string exp_kind = "classification", exp_out = "runs";
    exp->add_option("--kind", exp_kind, "classification|impersonation|contamination|all");
    exp->add_option("--out", exp_out, "output directory");

    auto* rep = app.add_subcommand("report", "render a report file");
    std::string rep_in, rep_format = "text";
    rep->add_option("--in", rep_in, "report.json path")->required();
    rep->add_option("--format", rep_format, "text|csv|json");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return kExitOk;  // --help
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (!host_is_little_endian()) throw ConfigError("this tool requires a little-endian host");
        const harness::ExperimentConfig cfg = load_config(config_path, overrides, seed);
        if (sim->parsed()) return cmd_simulate(cfg, sim_out, sim_env, sim_count, sim_rogue);
        if (ext->parsed())
            return cmd_extract(cfg, ext_in, ext_out, ext_feature, ext_rho_ref, ext_clip_from, ext_split);
        if (trn->parsed())
            return cmd_train(cfg, trn_features, trn_mode, trn_base, trn_out, trn_log, trn_epochs);
        if (atk->parsed()) return cmd_attack(atk_features, atk_pool, atk_scenario, atk_out);
        if (det->parsed()) return cmd_detect(cfg, det_normals, det_test, det_out);
        if (exp->parsed()) return cmd_experiment(cfg, exp_kind, exp_out);
        if (rep->parsed()) return cmd_report(rep_in, rep_format);
        std::cerr << "no subcommand\n";
        return kExitUsage;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const MetricError& e) {
        std::cerr << "metric error: " << e.what() << "\n";
        return kExitMetric;
    } catch (const FormatError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
}
