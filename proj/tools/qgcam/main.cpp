// qgcam: train, explain, and verify hybrid CNN + variational-quantum-circuit
// classifiers with gradient class-activation heatmaps.

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qgcam/cli/commands.hpp"

namespace {

using qgcam::cli::RunConfig;

// First pass: pull --config out of argv so its values become the defaults the
// CLI11 flags then override (flags > config file > built-ins).
std::string find_config_arg(int argc, char** argv) {
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--config" && i + 1 < argc) return argv[i + 1];
        if (arg.rfind("--config=", 0) == 0) return arg.substr(9);
    }
    return {};
}

}  // namespace

int main(int argc, char** argv) {
    RunConfig cfg;
    try {
        const std::string config_path = find_config_arg(argc, argv);
        if (!config_path.empty()) qgcam::cli::apply_config_file(cfg, config_path);
    } catch (const qgcam::cli::UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    CLI::App app{"hybrid CNN + VQC classifier with gradient class-activation maps"};
    app.require_subcommand(1);

    std::string config_path_flag;  // accepted everywhere, consumed above
    app.add_option("--config", config_path_flag, "JSON config file");

    const auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--seed", cfg.seed, "deterministic run seed");
        cmd->add_option("--out", cfg.out, "output directory");
        cmd->add_option("--config", config_path_flag, "JSON config file");
    };

    CLI::App* train = app.add_subcommand("train", "train a model end to end");
    add_common(train);
    train->add_option("--dataset", cfg.dataset,
                      "synth-shapes | synth-speech | synth-mnist | MNIST IDX dir");
    train->add_option("--epochs", cfg.epochs, "training epochs");
    train->add_option("--batch", cfg.batch, "batch size");
    train->add_option("--lr-classical", cfg.lr_classical, "classical learning rate");
    train->add_option("--lr-quantum", cfg.lr_quantum, "circuit learning rate");
    train->add_option("--qubits", cfg.qubits, "circuit width");
    train->add_option("--blocks", cfg.blocks, "ansatz blocks");
    train->add_flag("--momentum", cfg.momentum, "SGD momentum");
    train->add_option("--train-count", cfg.train_count, "training sample cap");
    train->add_option("--test-count", cfg.test_count, "test sample cap");

    CLI::App* explain = app.add_subcommand("explain", "heatmap for one input");
    add_common(explain);
    explain->add_option("--checkpoint", cfg.checkpoint, "model checkpoint");
    explain->add_option("--input", cfg.input, "input image (P5 PGM)");
    explain->add_option("--class", cfg.class_spec, "class index or \"predicted\"");
    explain->add_option("--grad-path", cfg.grad_path, "shift | analytic")
        ->check(CLI::IsMember({"shift", "analytic"}));

    CLI::App* gradcheck =
        app.add_subcommand("gradcheck", "gradient and bracket identity checks");
    add_common(gradcheck);
    gradcheck->add_option("--qubits", cfg.qubits, "circuit width (<= 8)");
    gradcheck->add_option("--blocks", cfg.blocks, "ansatz blocks");
    gradcheck->add_option("--trials", cfg.trials, "random circuits to test");

    CLI::App* demo =
        app.add_subcommand("demo-data", "generate synthetic datasets to disk");
    add_common(demo);
    demo->add_option("--kind", cfg.kind, "shapes | speech");
    demo->add_option("--count", cfg.count, "sample count");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (train->parsed()) return qgcam::cli::run_train(cfg).exit_code;
        if (explain->parsed()) return qgcam::cli::run_explain(cfg).exit_code;
        if (gradcheck->parsed()) return qgcam::cli::run_gradcheck(cfg).exit_code;
        if (demo->parsed()) return qgcam::cli::run_demo_data(cfg);
    } catch (const qgcam::cli::UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
