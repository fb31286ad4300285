// qksvm: quantum-kernel SVM experiment toolkit.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qksvm/qksvm.hpp"

namespace {

using qksvm::ArmConfig;
using qksvm::DataPoint;
using qksvm::ExperimentConfig;

int cmd_run(const std::string& config_path) {
    const ExperimentConfig cfg = qksvm::load_experiment_config(config_path);
    const nlohmann::json report = qksvm::run_experiment(cfg);

    std::cout << std::fixed << std::setprecision(3);
    std::cout << "arm                 train mean (std)   test mean (std)\n";
    for (const ArmConfig& arm : cfg.arms) {
        const auto& entry = report.at("arms").at(arm.name);
        std::cout << std::left << std::setw(20) << arm.name;
        if (entry.contains("error")) {
            std::cout << "FAILED: " << entry.at("error").get<std::string>() << "\n";
            continue;
        }
        std::cout << entry.at("train_mean").get<double>() << " ("
                  << entry.at("train_std").get<double>() << ")      "
                  << entry.at("test_mean").get<double>() << " ("
                  << entry.at("test_std").get<double>() << ")\n";
    }
    std::cout << "artifacts written to " << cfg.output_dir << "/\n";
    return 0;
}

/// Front half of the pipeline without a split: encode, subsample,
/// standardize, reduce, scale over the whole working set.
std::vector<DataPoint> prepared_points(const ExperimentConfig& cfg) {
    const auto prep = qksvm::detail::prepare_data(cfg);
    std::vector<std::vector<double>> rows;
    for (const DataPoint& p : prep.reduced) {
        rows.push_back(p.features);
    }
    const auto scaled = qksvm::apply_scale(qksvm::fit_scale(rows, cfg.scale_lo, cfg.scale_hi), rows);
    std::vector<DataPoint> points;
    for (std::size_t i = 0; i < scaled.size(); ++i) {
        points.push_back({scaled[i], prep.reduced[i].label});
    }
    return points;
}

int cmd_kernel(const std::string& config_path, const std::string& mode, const std::string& device,
               const std::string& out_path) {
    const ExperimentConfig cfg = qksvm::load_experiment_config(config_path);
    const std::vector<DataPoint> points = prepared_points(cfg);

    qksvm::KernelMatrix gram;
    if (mode == "exact") {
        gram = qksvm::gram_matrix(points, cfg.feature_map, qksvm::KernelMode::Exact, 0, 0);
    } else {
        qksvm::EmulationConfig emu;
        const qksvm::EmulationConfig* emu_ptr = nullptr;
        if (!device.empty()) {
            emu.coupling = qksvm::builtin_coupling_map(device);
            emu.noise = cfg.noise;
            emu_ptr = &emu;
        }
        gram = qksvm::gram_matrix(points, cfg.feature_map, qksvm::KernelMode::Sampled, cfg.shots,
                                  qksvm::derive_seed(cfg.master_seed, 0x4b524e), emu_ptr);
    }
    std::ofstream os(out_path);
    if (!os) {
        throw qksvm::IoError("cannot write " + out_path);
    }
    qksvm::write_matrix_csv(os, gram.values);
    std::cout << "wrote " << gram.values.rows << "x" << gram.values.cols << " " << mode
              << " Gram matrix to " << out_path << "\n";
    return 0;
}

int cmd_train(const std::string& config_path, const std::string& arm_name,
              const std::string& out_path) {
    const ExperimentConfig cfg = qksvm::load_experiment_config(config_path);
    const ArmConfig* arm = nullptr;
    for (const ArmConfig& a : cfg.arms) {
        if (a.name == arm_name) {
            arm = &a;
        }
    }
    if (arm == nullptr) {
        throw qksvm::UsageError("arm '" + arm_name + "' is not in the config");
    }

    const auto prep = qksvm::detail::prepare_data(cfg);
    const auto idx = qksvm::split_stratified(prep.reduced, cfg.train_fraction, cfg.split_seeds[0]);
    std::vector<std::vector<double>> train_rows;
    std::vector<int> y;
    for (std::size_t i : idx.train) {
        train_rows.push_back(prep.reduced[i].features);
        y.push_back(prep.reduced[i].label);
    }
    const auto scaled = qksvm::apply_scale(
        qksvm::fit_scale(train_rows, cfg.scale_lo, cfg.scale_hi), train_rows);
    std::vector<DataPoint> train;
    for (std::size_t k = 0; k < scaled.size(); ++k) {
        train.push_back({scaled[k], y[k]});
    }

    qksvm::KernelMatrix gram;
    if (arm->kernel == ArmConfig::Kernel::Rbf) {
        gram = qksvm::rbf_gram(train, qksvm::RbfConfig{cfg.rbf_sigma});
    } else if (arm->kernel == ArmConfig::Kernel::QuantumExact) {
        gram = qksvm::gram_matrix(train, cfg.feature_map, qksvm::KernelMode::Exact, 0, 0);
    } else {
        qksvm::EmulationConfig emu;
        const qksvm::EmulationConfig* emu_ptr = nullptr;
        if (!arm->device.empty()) {
            emu.coupling = qksvm::builtin_coupling_map(arm->device);
            emu.noise = cfg.noise;
            emu_ptr = &emu;
        }
        gram = qksvm::psd_project(
            qksvm::gram_matrix(train, cfg.feature_map, qksvm::KernelMode::Sampled, cfg.shots,
                               qksvm::derive_seed(cfg.master_seed, 0x54524e), emu_ptr));
    }

    qksvm::SvmModel model = qksvm::train_smo(gram, y, cfg.svm);
    for (const DataPoint& p : train) {
        model.training_points.push_back(p.features);
    }

    std::vector<int> pred;
    for (std::size_t i = 0; i < train.size(); ++i) {
        std::vector<double> row(train.size());
        for (std::size_t k = 0; k < train.size(); ++k) {
            row[k] = gram.values(i, k);
        }
        pred.push_back(qksvm::predict(model, row));
    }

    std::ofstream os(out_path);
    if (!os) {
        throw qksvm::IoError("cannot write " + out_path);
    }
    os << qksvm::to_json(model).dump(2) << "\n";
    std::cout << "trained arm '" << arm_name << "' on " << train.size() << " points; "
              << "training accuracy " << std::fixed << std::setprecision(3)
              << qksvm::accuracy(pred, y) << "; model written to " << out_path << "\n";
    return 0;
}

int cmd_predict(const std::string& model_path, const std::string& input_path,
                const std::string& out_path) {
    std::ifstream in(model_path);
    if (!in) {
        throw qksvm::IoError("cannot open model file: " + model_path);
    }
    nlohmann::json j;
    in >> j;
    const qksvm::SvmModel model = qksvm::svm_model_from_json(j);
    if (model.training_points.empty()) {
        throw qksvm::ConfigError("model file has no training points; cannot form kernel rows");
    }

    std::vector<DataPoint> train;
    for (const auto& f : model.training_points) {
        train.push_back({f, 0});
    }
    const std::size_t dim = train[0].features.size();

    const qksvm::RawTable table = qksvm::load_csv(input_path);
    if (table.header.size() != dim) {
        throw qksvm::DataError("input rows have " + std::to_string(table.header.size()) +
                               " columns; model expects " + std::to_string(dim));
    }

    std::ostream* os = &std::cout;
    std::ofstream file;
    if (!out_path.empty()) {
        file.open(out_path);
        if (!file) {
            throw qksvm::IoError("cannot write " + out_path);
        }
        os = &file;
    }
    *os << "index,decision,prediction\n" << std::setprecision(17);
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        DataPoint x;
        for (const std::string& cell : table.rows[r]) {
            try {
                x.features.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw qksvm::DataError("input row " + std::to_string(r + 1) +
                                       " has a non-numeric cell: " + cell);
            }
        }
        const std::vector<double> row = qksvm::kernel_row(model.kernel, x, train);
        *os << r << "," << qksvm::decision_value(model, row) << ","
            << qksvm::predict(model, row) << "\n";
    }
    return 0;
}

int cmd_bell_demo(std::uint64_t shots, std::uint64_t seed) {
    qksvm::StateVector state = qksvm::new_zero_state(2);
    qksvm::apply_circuit(state, qksvm::bell_circuit());
    const qksvm::CountHistogram hist = qksvm::sample_counts(state, shots, seed);

    std::cout << "bell state histogram (" << shots << " shots, seed " << seed << ")\n";
    for (const auto& [bits, count] : hist.counts) {
        std::cout << "  " << bits << "  " << count << "  ("
                  << static_cast<double>(count) / static_cast<double>(shots) << ")\n";
    }
    return 0;
}

int cmd_devices() {
    for (const std::string& name : qksvm::builtin_device_names()) {
        const qksvm::CouplingMap cm = qksvm::builtin_coupling_map(name);
        std::cout << name << ": " << cm.n_qubits << " qubits, edges";
        for (const auto& [a, b] : cm.edges) {
            std::cout << " " << a << "-" << b;
        }
        std::cout << "\n";
    }
    std::cout << "line(n), full(n): parametric path / complete graphs\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"quantum-kernel SVM toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    std::string mode = "exact";
    std::string device;
    std::string out_path;
    std::string arm_name = "qsvm_sim";
    std::string model_path;
    std::string input_path;
    std::uint64_t shots = 10000;
    std::uint64_t seed = 1;

    auto* run = app.add_subcommand("run", "run the full experiment described by a config file");
    run->add_option("--config", config_path, "experiment config JSON")->required();

    auto* kernel = app.add_subcommand("kernel", "compute a Gram matrix over the working set");
    kernel->add_option("--config", config_path, "experiment config JSON")->required();
    kernel->add_option("--mode", mode, "exact or sampled")
        ->check(CLI::IsMember({"exact", "sampled"}));
    kernel->add_option("--device", device, "emulate this device (sampled mode)");
    kernel->add_option("--out", out_path, "output CSV path")->required();

    auto* train = app.add_subcommand("train", "train one arm on the first configured split");
    train->add_option("--config", config_path, "experiment config JSON")->required();
    train->add_option("--arm", arm_name, "arm name from the config (default qsvm_sim)");
    train->add_option("--out", out_path, "model JSON path")->required();

    auto* predict = app.add_subcommand("predict", "classify feature rows with a trained model");
    predict->add_option("--model", model_path, "model JSON written by train/run")->required();
    predict->add_option("--input", input_path, "CSV of feature rows (header + numeric cells)")
        ->required();
    predict->add_option("--out", out_path, "write predictions here instead of stdout");

    auto* bell = app.add_subcommand("bell-demo", "sample a Bell state and print the histogram");
    bell->add_option("--shots", shots, "number of shots (default 10000)");
    bell->add_option("--seed", seed, "sampling seed (default 1)");

    app.add_subcommand("devices", "list built-in coupling maps");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            return cmd_run(config_path);
        }
        if (kernel->parsed()) {
            return cmd_kernel(config_path, mode, device, out_path);
        }
        if (train->parsed()) {
            return cmd_train(config_path, arm_name, out_path);
        }
        if (predict->parsed()) {
            return cmd_predict(model_path, input_path, out_path);
        }
        if (bell->parsed()) {
            return cmd_bell_demo(shots, seed);
        }
        return cmd_devices();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
