#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "qksvm/dataset.hpp"
#include "qksvm/device.hpp"
#include "qksvm/errors.hpp"
#include "qksvm/kernel.hpp"
#include "qksvm/pca.hpp"
#include "qksvm/svm.hpp"

#include <json.hpp>

namespace qksvm {

/// One column of the accuracy comparison. Quantum arms share the experiment
/// feature map; sampled arms run under device emulation when a device is set.
struct ArmConfig {
    enum class Kernel { Rbf, QuantumExact, QuantumSampled };
    std::string name;
    Kernel kernel = Kernel::Rbf;
    std::string device; // empty = ideal sampling (no routing / noise)
};

inline std::vector<ArmConfig> canonical_arms() {
    return {{"classical", ArmConfig::Kernel::Rbf, ""},
            {"qsvm_sim", ArmConfig::Kernel::QuantumExact, ""},
            {"qsvm_ourense", ArmConfig::Kernel::QuantumSampled, "ourense"},
            {"qsvm_yorktown", ArmConfig::Kernel::QuantumSampled, "yorktown"}};
}

struct ExperimentConfig {
    std::string dataset_path;
    EncodingSpec encoding;
    std::size_t n_samples = 40;
    std::size_t pca_components = 2;
    double scale_lo = 0.0;
    double scale_hi = 2.0 * std::numbers::pi;
    double train_fraction = 0.5;
    std::vector<std::uint64_t> split_seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    std::uint64_t master_seed = 7;
    std::uint64_t shots = 1024;
    FeatureMapConfig feature_map; // n_features is forced to pca_components
    double rbf_sigma = 1.0;
    SvmTrainConfig svm;
    NoiseModel noise;
    std::vector<ArmConfig> arms = canonical_arms();
    std::string output_dir = "out";
};

// --- config (de)serialization ---------------------------------------------------

inline std::string to_string(ArmConfig::Kernel k) {
    switch (k) {
    case ArmConfig::Kernel::Rbf:
        return "rbf";
    case ArmConfig::Kernel::QuantumExact:
        return "exact";
    default:
        return "sampled";
    }
}

inline nlohmann::json to_json(const ArmConfig& arm) {
    nlohmann::json j{{"name", arm.name}, {"kernel", to_string(arm.kernel)}};
    if (!arm.device.empty()) {
        j["device"] = arm.device;
    }
    return j;
}

inline ArmConfig arm_from_json(const nlohmann::json& j) {
    if (j.is_string()) { // canonical shorthand
        const std::string name = j.get<std::string>();
        for (const ArmConfig& arm : canonical_arms()) {
            if (arm.name == name) {
                return arm;
            }
        }
        throw ConfigError("unknown arm shorthand: " + name);
    }
    ArmConfig arm;
    arm.name = j.at("name").get<std::string>();
    const std::string kernel = j.value("kernel", std::string("rbf"));
    if (kernel == "rbf") {
        arm.kernel = ArmConfig::Kernel::Rbf;
    } else if (kernel == "exact") {
        arm.kernel = ArmConfig::Kernel::QuantumExact;
    } else if (kernel == "sampled") {
        arm.kernel = ArmConfig::Kernel::QuantumSampled;
    } else {
        throw ConfigError("unknown arm kernel: " + kernel);
    }
    arm.device = j.value("device", std::string());
    return arm;
}

inline nlohmann::json to_json(const ExperimentConfig& cfg) {
    nlohmann::json arms = nlohmann::json::array();
    for (const ArmConfig& arm : cfg.arms) {
        arms.push_back(to_json(arm));
    }
    return {{"dataset", cfg.dataset_path},
            {"encoding", to_json(cfg.encoding)},
            {"n_samples", cfg.n_samples},
            {"pca_components", cfg.pca_components},
            {"scale_lo", cfg.scale_lo},
            {"scale_hi", cfg.scale_hi},
            {"train_fraction", cfg.train_fraction},
            {"split_seeds", cfg.split_seeds},
            {"master_seed", cfg.master_seed},
            {"shots", cfg.shots},
            {"feature_map", to_json(cfg.feature_map)},
            {"rbf_sigma", cfg.rbf_sigma},
            {"svm", to_json(cfg.svm)},
            {"noise", to_json(cfg.noise)},
            {"arms", arms},
            {"output_dir", cfg.output_dir}};
}

inline ExperimentConfig experiment_config_from_json(const nlohmann::json& j) {
    ExperimentConfig cfg;
    cfg.dataset_path = j.at("dataset").get<std::string>();
    cfg.encoding = encoding_spec_from_json(j.at("encoding"));
    cfg.n_samples = j.value("n_samples", cfg.n_samples);
    cfg.pca_components = j.value("pca_components", cfg.pca_components);
    cfg.scale_lo = j.value("scale_lo", cfg.scale_lo);
    cfg.scale_hi = j.value("scale_hi", cfg.scale_hi);
    cfg.train_fraction = j.value("train_fraction", cfg.train_fraction);
    if (j.contains("split_seeds")) {
        cfg.split_seeds = j.at("split_seeds").get<std::vector<std::uint64_t>>();
    }
    cfg.master_seed = j.value("master_seed", cfg.master_seed);
    cfg.shots = j.value("shots", cfg.shots);
    if (j.contains("feature_map")) {
        cfg.feature_map = feature_map_from_json(j.at("feature_map"));
    }
    cfg.rbf_sigma = j.value("rbf_sigma", cfg.rbf_sigma);
    if (j.contains("svm")) {
        cfg.svm = svm_config_from_json(j.at("svm"));
    }
    if (j.contains("noise")) {
        cfg.noise = noise_model_from_json(j.at("noise"));
    }
    if (j.contains("arms")) {
        cfg.arms.clear();
        for (const auto& a : j.at("arms")) {
            cfg.arms.push_back(arm_from_json(a));
        }
    }
    cfg.output_dir = j.value("output_dir", cfg.output_dir);

    if (cfg.n_samples < 4 || cfg.pca_components == 0 || cfg.split_seeds.empty() ||
        cfg.arms.empty()) {
        throw ConfigError("experiment config needs n_samples >= 4, pca_components >= 1, "
                          "at least one split seed and one arm");
    }
    if (!(cfg.train_fraction > 0.0) || !(cfg.train_fraction < 1.0)) {
        throw ConfigError("train_fraction must lie strictly between 0 and 1");
    }
    if (!(cfg.scale_hi > cfg.scale_lo)) {
        throw ConfigError("scale range requires scale_hi > scale_lo");
    }
    if (cfg.shots == 0 || !(cfg.rbf_sigma > 0.0)) {
        throw ConfigError("shots must be >= 1 and rbf_sigma > 0");
    }
    cfg.feature_map.n_features = static_cast<int>(cfg.pca_components);
    if (cfg.feature_map.kind == FeatureMapKind::ZZ && cfg.pca_components < 2) {
        throw ConfigError("ZZ feature map needs pca_components >= 2");
    }
    return cfg;
}

/// Loads a config file; the QKSVM_SEED environment variable, when set,
/// overrides the master seed.
inline ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open config file: " + path);
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config parse failure in " + path + ": " + e.what());
    }
    ExperimentConfig cfg = experiment_config_from_json(j);
    if (const char* env = std::getenv("QKSVM_SEED")) {
        try {
            cfg.master_seed = std::stoull(env);
        } catch (const std::exception&) {
            throw ConfigError("QKSVM_SEED must be a non-negative integer");
        }
    }
    return cfg;
}

// --- helpers --------------------------------------------------------------------

/// Kernel row of x against a point list, dispatching on the kernel family.
inline std::vector<double> kernel_row(const KernelConfig& kc, const DataPoint& x,
                                      const std::vector<DataPoint>& points) {
    std::vector<double> row(points.size());
    if (std::holds_alternative<RbfConfig>(kc)) {
        const RbfConfig& rbf = std::get<RbfConfig>(kc);
        for (std::size_t i = 0; i < points.size(); ++i) {
            row[i] = rbf_kernel(x, points[i], rbf);
        }
    } else {
        const FeatureMapConfig& fm = std::get<FeatureMapConfig>(kc);
        for (std::size_t i = 0; i < points.size(); ++i) {
            row[i] = kernel_exact(x, points[i], fm);
        }
    }
    return row;
}

/// Removes wall-clock fields recursively; used to compare reports for
/// determinism (spec: runs are identical "excluding timing fields").
inline nlohmann::json strip_timing(nlohmann::json j) {
    if (j.is_object()) {
        j.erase("wall_ms");
        j.erase("total_wall_ms");
        for (auto& [key, value] : j.items()) {
            (void)key;
            value = strip_timing(value);
        }
    } else if (j.is_array()) {
        for (auto& value : j) {
            value = strip_timing(value);
        }
    }
    return j;
}

namespace detail {

inline double mean_of(const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) {
        acc += x;
    }
    return acc / static_cast<double>(v.size());
}

inline double stddev_of(const std::vector<double>& v) {
    if (v.size() < 2) {
        return 0.0;
    }
    const double m = mean_of(v);
    double acc = 0.0;
    for (double x : v) {
        acc += (x - m) * (x - m);
    }
    return std::sqrt(acc / static_cast<double>(v.size() - 1));
}

struct PreparedData {
    std::vector<DataPoint> reduced; // PCA coordinates + labels, pre-split
    PcaTransform pca;
    std::size_t rows_loaded = 0;
    std::size_t rows_dropped = 0;
    std::size_t n_features_encoded = 0;
};

/// Shared front half of the pipeline: load, encode, subsample, standardize,
/// reduce. Splitting and scaling are per-seed and happen in the arm loop.
inline PreparedData prepare_data(const ExperimentConfig& cfg) {
    const RawTable table = load_csv(cfg.dataset_path);
    Dataset ds = encode_dataset(table, cfg.encoding);
    if (ds.points.size() < 4) {
        throw DataError("fewer than 4 usable rows after encoding");
    }

    PreparedData prep;
    prep.rows_loaded = table.rows.size();
    prep.rows_dropped = ds.n_dropped;
    prep.n_features_encoded = ds.feature_names.size();

    const std::vector<DataPoint> sample =
        subsample_stratified(ds.points, cfg.n_samples, derive_seed(cfg.master_seed, 0x414d53));
    if (sample[0].features.size() < cfg.pca_components) {
        throw ConfigError("pca_components exceeds encoded feature count");
    }

    std::vector<std::vector<double>> rows;
    rows.reserve(sample.size());
    for (const DataPoint& p : sample) {
        rows.push_back(p.features);
    }
    const auto zrows = standardize(rows);
    prep.pca = fit_pca(zrows, cfg.pca_components);
    const auto projected = apply_pca(prep.pca, zrows);
    for (std::size_t i = 0; i < sample.size(); ++i) {
        prep.reduced.push_back({projected[i], sample[i].label});
    }
    return prep;
}

inline void write_scatter_csv(const std::string& path, const std::vector<DataPoint>& reduced) {
    std::ofstream os(path);
    if (!os) {
        throw IoError("cannot write " + path);
    }
    os << "pc1,pc2,label\n" << std::setprecision(17);
    for (const DataPoint& p : reduced) {
        const double pc2 = p.features.size() > 1 ? p.features[1] : 0.0;
        os << p.features[0] << "," << pc2 << "," << p.label << "\n";
    }
}

} // namespace detail

/// Runs every configured arm over every split seed and writes report.json,
/// scatter.csv, and (for the first split seed) gram_<arm>.csv and
/// model_<arm>.json into the output directory. A failing arm is recorded in
/// the report and does not abort the remaining arms.
inline nlohmann::json run_experiment(const ExperimentConfig& cfg) {
    namespace fs = std::filesystem;
    using clock = std::chrono::steady_clock;
    const auto t_start = clock::now();
    auto ms_since = [](clock::time_point t0) {
        return std::chrono::duration_cast<std::chrono::milliseconds>(clock::now() - t0).count();
    };

    const detail::PreparedData prep = detail::prepare_data(cfg);
    fs::create_directories(cfg.output_dir);
    detail::write_scatter_csv((fs::path(cfg.output_dir) / "scatter.csv").string(), prep.reduced);

    // Splits are shared across arms so every arm sees the same data.
    struct SplitData {
        std::vector<DataPoint> train;
        std::vector<DataPoint> test;
    };
    std::vector<SplitData> splits;
    for (std::uint64_t seed : cfg.split_seeds) {
        const SplitIndices idx = split_stratified(prep.reduced, cfg.train_fraction, seed);
        SplitData sd;
        std::vector<std::vector<double>> train_rows;
        for (std::size_t i : idx.train) {
            train_rows.push_back(prep.reduced[i].features);
        }
        const ScaleRecord rec = fit_scale(train_rows, cfg.scale_lo, cfg.scale_hi);
        const auto scaled_train = apply_scale(rec, train_rows);
        for (std::size_t k = 0; k < idx.train.size(); ++k) {
            sd.train.push_back({scaled_train[k], prep.reduced[idx.train[k]].label});
        }
        std::vector<std::vector<double>> test_rows;
        for (std::size_t i : idx.test) {
            test_rows.push_back(prep.reduced[i].features);
        }
        const auto scaled_test = apply_scale(rec, test_rows);
        for (std::size_t k = 0; k < idx.test.size(); ++k) {
            sd.test.push_back({scaled_test[k], prep.reduced[idx.test[k]].label});
        }
        splits.push_back(std::move(sd));
    }

    nlohmann::json arms_report = nlohmann::json::object();
    for (std::size_t arm_idx = 0; arm_idx < cfg.arms.size(); ++arm_idx) {
        const ArmConfig& arm = cfg.arms[arm_idx];
        const auto t_arm = clock::now();
        nlohmann::json entry;
        try {
            EmulationConfig emu;
            const EmulationConfig* emu_ptr = nullptr;
            if (arm.kernel == ArmConfig::Kernel::QuantumSampled && !arm.device.empty()) {
                emu.coupling = builtin_coupling_map(arm.device);
                emu.noise = cfg.noise;
                emu_ptr = &emu;
            }

            std::vector<double> train_acc;
            std::vector<double> test_acc;
            for (std::size_t s = 0; s < splits.size(); ++s) {
                const SplitData& sd = splits[s];
                const std::uint64_t arm_seed =
                    derive_seed(derive_seed(cfg.master_seed, cfg.split_seeds[s]), arm_idx);

                KernelMatrix gram;
                Matrix cross;
                if (arm.kernel == ArmConfig::Kernel::Rbf) {
                    const RbfConfig rbf{cfg.rbf_sigma};
                    gram = rbf_gram(sd.train, rbf);
                    cross = rbf_cross_gram(sd.train, sd.test, rbf);
                } else if (arm.kernel == ArmConfig::Kernel::QuantumExact) {
                    gram = gram_matrix(sd.train, cfg.feature_map, KernelMode::Exact, 0, 0);
                    cross = cross_gram(sd.train, sd.test, cfg.feature_map, KernelMode::Exact, 0, 0);
                } else {
                    gram = psd_project(gram_matrix(sd.train, cfg.feature_map, KernelMode::Sampled,
                                                   cfg.shots, derive_seed(arm_seed, 1), emu_ptr));
                    cross = cross_gram(sd.train, sd.test, cfg.feature_map, KernelMode::Sampled,
                                       cfg.shots, derive_seed(arm_seed, 2), emu_ptr);
                }

                std::vector<int> y;
                for (const DataPoint& p : sd.train) {
                    y.push_back(p.label);
                }
                SvmTrainConfig svm_cfg = cfg.svm;
                svm_cfg.seed = derive_seed(cfg.svm.seed, arm_seed);
                const SvmModel model = train_smo(gram, y, svm_cfg);

                std::vector<int> train_pred;
                for (std::size_t i = 0; i < sd.train.size(); ++i) {
                    std::vector<double> row(sd.train.size());
                    for (std::size_t k = 0; k < sd.train.size(); ++k) {
                        row[k] = gram.values(i, k);
                    }
                    train_pred.push_back(predict(model, row));
                }
                std::vector<int> truth;
                std::vector<int> test_pred;
                for (std::size_t i = 0; i < sd.test.size(); ++i) {
                    std::vector<double> row(sd.train.size());
                    for (std::size_t k = 0; k < sd.train.size(); ++k) {
                        row[k] = cross(i, k);
                    }
                    test_pred.push_back(predict(model, row));
                    truth.push_back(sd.test[i].label);
                }
                train_acc.push_back(accuracy(train_pred, y));
                test_acc.push_back(accuracy(test_pred, truth));

                if (s == 0) { // first-seed artifacts
                    std::ofstream os(fs::path(cfg.output_dir) / ("gram_" + arm.name + ".csv"));
                    if (!os) {
                        throw IoError("cannot write gram CSV for arm " + arm.name);
                    }
                    write_matrix_csv(os, gram.values);
                    SvmModel persisted = model;
                    for (const DataPoint& p : sd.train) {
                        persisted.training_points.push_back(p.features);
                    }
                    std::ofstream ms(fs::path(cfg.output_dir) / ("model_" + arm.name + ".json"));
                    if (!ms) {
                        throw IoError("cannot write model file for arm " + arm.name);
                    }
                    ms << to_json(persisted).dump(2) << "\n";
                }
            }

            entry["train_accuracy"] = train_acc;
            entry["test_accuracy"] = test_acc;
            entry["train_mean"] = detail::mean_of(train_acc);
            entry["train_std"] = detail::stddev_of(train_acc);
            entry["test_mean"] = detail::mean_of(test_acc);
            entry["test_std"] = detail::stddev_of(test_acc);
        } catch (const std::exception& e) {
            entry["error"] = e.what();
        }
        entry["wall_ms"] = ms_since(t_arm);
        arms_report[arm.name] = std::move(entry);
    }

    nlohmann::json report{
        {"config", to_json(cfg)},
        {"dataset",
         {{"rows_loaded", prep.rows_loaded},
          {"rows_dropped", prep.rows_dropped},
          {"n_features_encoded", prep.n_features_encoded},
          {"n_used", prep.reduced.size()}}},
        {"pca", {{"explained_variance", prep.pca.explained_variance}}},
        {"arms", arms_report},
        {"total_wall_ms", ms_since(t_start)}};

    std::ofstream os(fs::path(cfg.output_dir) / "report.json");
    if (!os) {
        throw IoError("cannot write report.json");
    }
    os << report.dump(2) << "\n";
    return report;
}

} // namespace qksvm
