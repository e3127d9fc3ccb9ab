#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "qgcam/cam/export.hpp"
#include "qgcam/cam/heatmap.hpp"
#include "qgcam/data/mnist.hpp"
#include "qgcam/data/shapes.hpp"
#include "qgcam/data/speech_task.hpp"
#include "qgcam/hybrid/checkpoint.hpp"
#include "qgcam/hybrid/train.hpp"
#include "qgcam/io/image.hpp"
#include "qgcam/util/rng.hpp"
#include "qgcam/vqc/gradients.hpp"

namespace qgcam::cli {

namespace fs = std::filesystem;
using nlohmann::json;

// Thrown for bad flags, bad config files, unusable inputs: exit code 2.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    // shared
    std::uint64_t seed = 42;
    std::string out = "qgcam-out";
    std::string config_path;

    // train
    std::string dataset;
    int epochs = 5;
    int batch = 16;
    double lr_classical = 0.01;
    double lr_quantum = 0.05;
    int qubits = 8;
    int blocks = 4;
    bool momentum = false;
    int train_count = 500;
    int test_count = 100;
    std::vector<int> digits = {0, 1};

    // explain
    std::string checkpoint;
    std::string input;
    std::string class_spec = "predicted";
    std::string grad_path = "shift";

    // gradcheck
    int trials = 50;

    // demo-data
    std::string kind = "shapes";
    int count = 200;
};

// Overlays JSON config values; command-line flags are applied on top by the
// caller, giving flags > config file > built-in defaults.
inline void apply_config_file(RunConfig& cfg, const std::string& path) {
    std::ifstream f(path);
    if (!f) throw UsageError("--config: cannot open " + path);
    json j;
    try {
        f >> j;
    } catch (const json::exception& e) {
        throw UsageError("--config: invalid JSON in " + path + ": " + e.what());
    }
    for (const auto& [key, value] : j.items()) {
        try {
            if (key == "seed") cfg.seed = value.get<std::uint64_t>();
            else if (key == "out") cfg.out = value.get<std::string>();
            else if (key == "dataset") cfg.dataset = value.get<std::string>();
            else if (key == "epochs") cfg.epochs = value.get<int>();
            else if (key == "batch") cfg.batch = value.get<int>();
            else if (key == "lr-classical") cfg.lr_classical = value.get<double>();
            else if (key == "lr-quantum") cfg.lr_quantum = value.get<double>();
            else if (key == "qubits") cfg.qubits = value.get<int>();
            else if (key == "blocks") cfg.blocks = value.get<int>();
            else if (key == "momentum") cfg.momentum = value.get<bool>();
            else if (key == "train-count") cfg.train_count = value.get<int>();
            else if (key == "test-count") cfg.test_count = value.get<int>();
            else if (key == "digits") cfg.digits = value.get<std::vector<int>>();
            else if (key == "checkpoint") cfg.checkpoint = value.get<std::string>();
            else if (key == "input") cfg.input = value.get<std::string>();
            else if (key == "class") cfg.class_spec = value.get<std::string>();
            else if (key == "grad-path") cfg.grad_path = value.get<std::string>();
            else if (key == "trials") cfg.trials = value.get<int>();
            else if (key == "kind") cfg.kind = value.get<std::string>();
            else if (key == "count") cfg.count = value.get<int>();
            else throw UsageError("--config: unknown key \"" + key + "\"");
        } catch (const json::exception& e) {
            throw UsageError("--config: bad value for \"" + key + "\": " + e.what());
        }
    }
}

inline json effective_config_json(const RunConfig& c, const std::string& command) {
    return json{{"command", command},
                {"seed", c.seed},
                {"out", c.out},
                {"dataset", c.dataset},
                {"epochs", c.epochs},
                {"batch", c.batch},
                {"lr-classical", c.lr_classical},
                {"lr-quantum", c.lr_quantum},
                {"qubits", c.qubits},
                {"blocks", c.blocks},
                {"momentum", c.momentum},
                {"train-count", c.train_count},
                {"test-count", c.test_count},
                {"digits", c.digits},
                {"checkpoint", c.checkpoint},
                {"input", c.input},
                {"class", c.class_spec},
                {"grad-path", c.grad_path},
                {"trials", c.trials},
                {"kind", c.kind},
                {"count", c.count}};
}

// Line-oriented JSON sink: every record goes to the log file and stdout.
class MetricsLog {
public:
    explicit MetricsLog(const fs::path& path, std::ostream& echo = std::cout)
        : file_(path), echo_(echo) {
        if (!file_) throw UsageError("cannot open metrics log " + path.string());
    }

    void line(const json& j) {
        const std::string s = j.dump();
        file_ << s << '\n';
        echo_ << s << '\n';
    }

    void flush() { file_.flush(); }

private:
    std::ofstream file_;
    std::ostream& echo_;
};

struct SplitDataset {
    data::Dataset train;
    data::Dataset test;
    // Speech metadata (empty for image datasets): utterance band per test
    // sample, inclusive pixel columns.
    std::vector<std::pair<int, int>> test_bands;
};

namespace detail {

inline data::Dataset take(const data::Dataset& ds, int start, int count,
                          const std::string& split) {
    data::Dataset out;
    out.classes = ds.classes;
    out.split = split;
    for (int i = start; i < start + count && i < static_cast<int>(ds.samples.size());
         ++i)
        out.samples.push_back(ds.samples[i]);
    return out;
}

inline SplitDataset load_mnist_dir(const RunConfig& cfg) {
    const fs::path dir = cfg.dataset;
    const auto need = [&](const char* name) {
        const fs::path p = dir / name;
        if (!fs::exists(p))
            throw UsageError("--dataset: directory " + dir.string() + " lacks " +
                             name);
        return p.string();
    };
    data::Dataset train = data::load_mnist_idx(need("train-images-idx3-ubyte"),
                                               need("train-labels-idx1-ubyte"));
    data::Dataset test = data::load_mnist_idx(need("t10k-images-idx3-ubyte"),
                                              need("t10k-labels-idx1-ubyte"));
    if (cfg.digits.size() == 2) {
        train = data::filter_binary(train, cfg.digits[0], cfg.digits[1]);
        test = data::filter_binary(test, cfg.digits[0], cfg.digits[1]);
    } else if (!cfg.digits.empty()) {
        throw UsageError("digits: expected exactly two digits or an empty list");
    }
    SplitDataset out;
    out.train = take(train, 0, cfg.train_count, "train");
    out.test = take(test, 0, cfg.test_count, "test");
    return out;
}

inline SplitDataset make_synth_mnist(const RunConfig& cfg) {
    // Write IDX files and read them back so every run exercises the same
    // parser path real MNIST files would take.
    fs::create_directories(cfg.out);
    const data::RawDigits train_raw =
        data::synth_digits(cfg.train_count, cfg.seed);
    const data::RawDigits test_raw =
        data::synth_digits(cfg.test_count, cfg.seed + 1);
    const fs::path dir = cfg.out;
    data::write_digits_idx(train_raw, (dir / "train-images-idx3-ubyte").string(),
                           (dir / "train-labels-idx1-ubyte").string());
    data::write_digits_idx(test_raw, (dir / "t10k-images-idx3-ubyte").string(),
                           (dir / "t10k-labels-idx1-ubyte").string());
    SplitDataset out;
    out.train = data::filter_binary(
        data::load_mnist_idx((dir / "train-images-idx3-ubyte").string(),
                             (dir / "train-labels-idx1-ubyte").string()),
        0, 1);
    out.train.split = "train";
    out.test = data::filter_binary(
        data::load_mnist_idx((dir / "t10k-images-idx3-ubyte").string(),
                             (dir / "t10k-labels-idx1-ubyte").string()),
        0, 1);
    out.test.split = "test";
    return out;
}

}  // namespace detail

inline SplitDataset resolve_dataset(const RunConfig& cfg) {
    if (cfg.dataset.empty())
        throw UsageError("--dataset: required (synth-shapes, synth-speech, "
                         "synth-mnist, or a directory of MNIST IDX files)");
    if (cfg.dataset == "synth-shapes") {
        const data::Dataset all =
            data::synth_shapes(cfg.train_count + cfg.test_count, cfg.seed);
        SplitDataset out;
        out.train = detail::take(all, 0, cfg.train_count, "train");
        out.test = detail::take(all, cfg.train_count, cfg.test_count, "test");
        return out;
    }
    if (cfg.dataset == "synth-speech") {
        const auto all =
            data::synth_speech_task(cfg.train_count + cfg.test_count, cfg.seed);
        SplitDataset out;
        std::vector<data::SpeechSample> train_samples(
            all.begin(), all.begin() + std::min<std::size_t>(cfg.train_count,
                                                             all.size()));
        std::vector<data::SpeechSample> test_samples(
            all.begin() + std::min<std::size_t>(cfg.train_count, all.size()),
            all.end());
        out.train = data::speech_to_dataset(train_samples, "train");
        out.test = data::speech_to_dataset(test_samples, "test");
        for (const auto& s : test_samples)
            out.test_bands.emplace_back(s.band_lo, s.band_hi);
        return out;
    }
    if (cfg.dataset == "synth-mnist") return detail::make_synth_mnist(cfg);
    if (fs::is_directory(cfg.dataset)) return detail::load_mnist_dir(cfg);
    throw UsageError("--dataset: unknown dataset \"" + cfg.dataset + "\"");
}

struct TrainOutcome {
    int exit_code = 0;
    double best_test_accuracy = 0.0;
    int best_epoch = 0;
    std::string checkpoint_path;
    std::string metrics_path;
};

inline TrainOutcome run_train(const RunConfig& cfg, std::ostream& human = std::cerr) {
    const SplitDataset split = resolve_dataset(cfg);
    if (split.train.samples.empty())
        throw UsageError("--dataset: resolved to an empty training set");
    split.train.validate();
    split.test.validate();

    fs::create_directories(cfg.out);
    MetricsLog log(fs::path(cfg.out) / "metrics.jsonl");
    log.line({{"config", effective_config_json(cfg, "train")}});

    const auto& first = split.train.samples.front().input;
    Rng rng(cfg.seed);
    cnn::ConvNet net = cnn::default_convnet(first.channels, rng);
    hybrid::HybridModel model =
        hybrid::build_model(first.channels, first.height, first.width,
                            std::move(net), cfg.qubits, cfg.blocks,
                            split.train.classes, rng);

    hybrid::TrainConfig tc;
    tc.epochs = cfg.epochs;
    tc.batch = cfg.batch;
    tc.lr_classical = cfg.lr_classical;
    tc.lr_quantum = cfg.lr_quantum;
    tc.seed = cfg.seed;
    tc.momentum = cfg.momentum;

    hybrid::TrainResult result = hybrid::train(model, split.train, split.test, tc);
    for (const auto& em : result.metrics)
        log.line({{"epoch", em.epoch},
                  {"loss", em.loss},
                  {"train_acc", em.train_accuracy},
                  {"test_acc", em.test_accuracy}});

    const std::string ckpt = (fs::path(cfg.out) / "model.qgcm").string();
    hybrid::save_checkpoint(result.model, ckpt);
    log.line({{"final",
               {{"best_epoch", result.best_epoch},
                {"best_test_acc", result.best_test_accuracy},
                {"checkpoint", ckpt}}}});
    human << "train: best test accuracy " << result.best_test_accuracy
          << " at epoch " << result.best_epoch << ", checkpoint " << ckpt << "\n";

    TrainOutcome out;
    out.best_test_accuracy = result.best_test_accuracy;
    out.best_epoch = result.best_epoch;
    out.checkpoint_path = ckpt;
    out.metrics_path = (fs::path(cfg.out) / "metrics.jsonl").string();
    return out;
}

struct ExplainOutcome {
    int exit_code = 0;
    int predicted = 0;
    int explained_class = 0;
    std::vector<double> scores;
    std::string heatmap_path;
    std::string overlay_path;
};

inline ExplainOutcome run_explain(const RunConfig& cfg,
                                  std::ostream& human = std::cerr) {
    if (cfg.checkpoint.empty()) throw UsageError("--checkpoint: required");
    if (cfg.input.empty()) throw UsageError("--input: required");

    hybrid::HybridModel model;
    try {
        model = hybrid::load_checkpoint(cfg.checkpoint);
    } catch (const std::exception& e) {
        throw UsageError(std::string("--checkpoint: ") + e.what());
    }

    const io::GrayImage img = io::read_pgm(cfg.input);
    if (img.height != model.input_h || img.width != model.input_w)
        throw UsageError("--input: image is " + std::to_string(img.width) + "x" +
                         std::to_string(img.height) + " but the model expects " +
                         std::to_string(model.input_w) + "x" +
                         std::to_string(model.input_h));
    cnn::FeatureTensor input(1, img.height, img.width);
    for (std::size_t i = 0; i < img.pixels.size(); ++i)
        input.v[i] = img.pixels[i] / 255.0;

    int cls = 0;  // 0 = predicted
    if (cfg.class_spec != "predicted") {
        try {
            cls = std::stoi(cfg.class_spec);
        } catch (...) {
            throw UsageError("--class: expected an index or \"predicted\"");
        }
        if (cls < 1 || cls > model.classes)
            throw UsageError("--class: index " + std::to_string(cls) +
                             " out of range 1.." + std::to_string(model.classes));
    }
    cam::GradPath path;
    if (cfg.grad_path == "shift") path = cam::GradPath::Shift;
    else if (cfg.grad_path == "analytic") path = cam::GradPath::Analytic;
    else throw UsageError("--grad-path: expected shift or analytic");

    const cam::Explanation ex = cam::explain(model, input, cls, path);

    const fs::path out_dir =
        cfg.out.empty() ? fs::path(cfg.input).parent_path() : fs::path(cfg.out);
    fs::create_directories(out_dir.empty() ? "." : out_dir);
    const std::string stem = (out_dir / fs::path(cfg.input).stem()).string();
    const cam::OverlayPaths paths = cam::overlay_paths(stem, ex.requested_class);
    cam::export_overlay(input, ex.upsampled, paths);

    if (ex.map.all_zero)
        human << "explain: heatmap is identically zero (untrained model?); "
                 "normalized map set to zero\n";

    json j{{"predicted", ex.predicted_class},
           {"class", ex.requested_class},
           {"scores", ex.scores},
           {"outputs", {paths.heatmap_pgm, paths.overlay_png}}};
    std::cout << j.dump() << "\n";
    human << "explain: predicted class " << ex.predicted_class << ", wrote "
          << paths.heatmap_pgm << " and " << paths.overlay_png << "\n";

    ExplainOutcome out;
    out.predicted = ex.predicted_class;
    out.explained_class = ex.requested_class;
    out.scores = ex.scores;
    out.heatmap_path = paths.heatmap_pgm;
    out.overlay_path = paths.overlay_png;
    return out;
}

struct GradcheckOutcome {
    int exit_code = 0;
    double max_bracket_dev = 0.0;
    double max_analytic_vs_shift = 0.0;
    double max_shift_vs_fd = 0.0;
};

namespace detail {

inline double fd_rel_err(double a, double b) {
    return std::abs(a - b) / std::max(std::abs(a) + std::abs(b), 1.0);
}

}  // namespace detail

// Oracle triangle (analytic vs shift vs central differences) plus the full
// bracket-identity sweep. Tolerances: 1e-10 absolute between the two exact
// paths, 1e-6 against finite differences (h=1e-5), 1e-12 for the bracket.
inline GradcheckOutcome run_gradcheck(const RunConfig& cfg,
                                      std::ostream& human = std::cerr) {
    if (cfg.trials < 1) throw UsageError("--trials: nothing to check");
    if (cfg.qubits < 1 || cfg.qubits > 8)
        throw UsageError("--qubits: the analytic path is gated to 1..8");
    if (cfg.blocks < 0) throw UsageError("--blocks: must be >= 0");

    // Test hook: corrupt the shift constant to prove the check can fail.
    double shift = std::numbers::pi / 2.0;
    if (std::getenv("QGCAM_TEST_CORRUPT_SHIFT")) shift *= 1.001;

    GradcheckOutcome out;
    Rng rng(cfg.seed);

    for (int k = 1; k <= 3; ++k)
        for (int i = 0; i <= 3; ++i)
            for (const auto pre : {vqc::PreGate::Identity, vqc::PreGate::Hadamard})
                for (int t = 0; t < 20; ++t)
                    out.max_bracket_dev = std::max(
                        out.max_bracket_dev,
                        vqc::lie_bracket_check(static_cast<quantum::Pauli>(k),
                                               static_cast<quantum::Pauli>(i),
                                               rng.uniform(-2.0 * std::numbers::pi,
                                                           2.0 * std::numbers::pi),
                                               pre));

    json worst;
    for (int trial = 0; trial < cfg.trials; ++trial) {
        vqc::CircuitSpec circuit = vqc::default_circuit(
            cfg.qubits, cfg.blocks, std::max(1, std::min(cfg.qubits, 2)));
        for (auto& axis : circuit.encoding.axes)
            axis = static_cast<quantum::Pauli>(rng.uniform_int(1, 3));
        for (auto& block : circuit.ansatz.axes)
            for (auto& axis : block)
                axis = static_cast<quantum::Pauli>(rng.uniform_int(1, 3));
        std::vector<double> x(cfg.qubits);
        for (auto& v : x) v = rng.uniform(-std::numbers::pi, std::numbers::pi);
        vqc::VqcParams params = vqc::VqcParams::zeros(circuit.ansatz);
        for (auto& t : params.theta)
            t = rng.uniform(-std::numbers::pi, std::numbers::pi);

        const RealMatrix analytic = vqc::grad_input_analytic(x, params, circuit);
        const RealMatrix shifted =
            vqc::detail::grad_input_shift_impl(x, params, circuit, shift);

        const double h = 1e-5;
        double trial_as = 0.0, trial_fd = 0.0;
        for (int q = 0; q < cfg.qubits; ++q) {
            std::vector<double> xp = x, xm = x;
            xp[q] += h;
            xm[q] -= h;
            const auto fp = vqc::run(xp, params, circuit);
            const auto fm = vqc::run(xm, params, circuit);
            for (int i = 0; i < circuit.outputs(); ++i) {
                trial_as = std::max(trial_as,
                                    std::abs(analytic(i, q) - shifted(i, q)));
                const double fd = (fp[i] - fm[i]) / (2.0 * h);
                trial_fd =
                    std::max(trial_fd, detail::fd_rel_err(shifted(i, q), fd));
            }
        }
        if (trial_as > out.max_analytic_vs_shift || trial_fd > out.max_shift_vs_fd)
            worst = {{"x", x},
                     {"theta", params.theta},
                     {"circuit", vqc::circuit_to_json(circuit)}};
        out.max_analytic_vs_shift = std::max(out.max_analytic_vs_shift, trial_as);
        out.max_shift_vs_fd = std::max(out.max_shift_vs_fd, trial_fd);
    }

    const bool ok = out.max_bracket_dev < 1e-12 &&
                    out.max_analytic_vs_shift < 1e-10 && out.max_shift_vs_fd < 1e-6;
    json report{{"qubits", cfg.qubits},
                {"blocks", cfg.blocks},
                {"trials", cfg.trials},
                {"max_bracket_dev", out.max_bracket_dev},
                {"max_analytic_vs_shift", out.max_analytic_vs_shift},
                {"max_shift_vs_fd_rel", out.max_shift_vs_fd},
                {"pass", ok}};
    if (!ok) report["worst_case"] = worst;
    std::cout << report.dump() << "\n";
    human << "gradcheck: bracket " << out.max_bracket_dev << ", analytic-vs-shift "
          << out.max_analytic_vs_shift << ", shift-vs-fd " << out.max_shift_vs_fd
          << (ok ? " [ok]\n" : " [FAIL]\n");
    out.exit_code = ok ? 0 : 1;
    return out;
}

inline int run_demo_data(const RunConfig& cfg, std::ostream& human = std::cerr) {
    if (cfg.count < 2) throw UsageError("--count: must be >= 2");
    fs::create_directories(cfg.out);
    const fs::path dir = cfg.out;

    const auto write_dataset = [&](const data::Dataset& ds,
                                   const std::string& prefix) {
        const auto& first = ds.samples.front().input;
        std::vector<std::uint8_t> images;
        std::vector<std::uint8_t> labels;
        images.reserve(ds.samples.size() * first.v.size());
        for (const auto& s : ds.samples) {
            for (double v : s.input.v) images.push_back(io::quantize(v));
            labels.push_back(static_cast<std::uint8_t>(s.label - 1));
        }
        io::write_idx((dir / (prefix + "-images-idx3-ubyte")).string(),
                      {static_cast<int>(ds.samples.size()), first.height,
                       first.width},
                      images);
        io::write_idx((dir / (prefix + "-labels-idx1-ubyte")).string(),
                      {static_cast<int>(ds.samples.size())}, labels);
        // A few PGM previews for the explain workflow.
        for (std::size_t i = 0; i < std::min<std::size_t>(4, ds.samples.size());
             ++i) {
            std::vector<std::uint8_t> px(first.v.size());
            for (std::size_t p = 0; p < px.size(); ++p)
                px[p] = io::quantize(ds.samples[i].input.v[p]);
            io::write_pgm((dir / (prefix + "-sample" + std::to_string(i) + ".pgm"))
                              .string(),
                          first.height, first.width, px);
        }
    };

    if (cfg.kind == "shapes") {
        const data::Dataset ds = data::synth_shapes(cfg.count, cfg.seed);
        write_dataset(ds, "shapes");
        human << "demo-data: wrote " << ds.samples.size() << " shape samples to "
              << dir << "\n";
    } else if (cfg.kind == "speech") {
        const auto samples = data::synth_speech_task(cfg.count, cfg.seed);
        write_dataset(data::speech_to_dataset(samples), "speech");
        std::ofstream meta(dir / "speech-meta.jsonl");
        for (std::size_t i = 0; i < samples.size(); ++i)
            meta << json{{"index", i},
                         {"label", samples[i].label},
                         {"band_lo", samples[i].band_lo},
                         {"band_hi", samples[i].band_hi}}
                        .dump()
                 << "\n";
        human << "demo-data: wrote " << samples.size() << " spectrograms to "
              << dir << "\n";
    } else {
        throw UsageError("--kind: expected shapes or speech");
    }
    return 0;
}

}  // namespace qgcam::cli
