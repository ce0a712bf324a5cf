#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "heightseg/balance.hpp"
#include "heightseg/dataset.hpp"
#include "heightseg/evaluation.hpp"
#include "heightseg/labels.hpp"
#include "heightseg/run_config.hpp"

namespace {

using namespace heightseg;

struct ConfigCliOptions {
    std::string config_path;
    std::string annotations;
    std::string dsm_dir;
    std::string out_dir;
    std::uint64_t split_seed = 0;
    double val_fraction = 0.20;
    CLI::App* sub = nullptr;

    void attach(CLI::App& app) {
        sub = &app;
        app.add_option("--config", config_path, "flat key = value config file");
        app.add_option("--annotations", annotations, "COCO-style annotation file");
        app.add_option("--dsm-dir", dsm_dir, "directory of DSM rasters, matched by file stem");
        app.add_option("--out-dir", out_dir, "output directory for labels/{train,val}");
        app.add_option("--split-seed", split_seed, "seed mixed into the split hash");
        app.add_option("--val-fraction", val_fraction, "validation share of images");
    }

    RunConfig resolve() const {
        RunConfig config;
        if (!config_path.empty()) {
            config = load_run_config(config_path);
        }
        if (sub->count("--annotations") > 0) config.annotations = annotations;
        if (sub->count("--dsm-dir") > 0) config.dsm_dir = dsm_dir;
        if (sub->count("--out-dir") > 0) config.out_dir = out_dir;
        if (sub->count("--split-seed") > 0) config.split_seed = split_seed;
        if (sub->count("--val-fraction") > 0) config.val_fraction = val_fraction;
        return config;
    }
};

void require_directory(const std::filesystem::path& path, const char* what) {
    if (!std::filesystem::is_directory(path)) {
        raise(Errc::io_failure, std::string(what) + " directory not found: " + path.string());
    }
}

int cmd_convert(const RunConfig& config, const std::string& report_file) {
    config.validate();
    require_directory(config.dsm_dir, "DSM");
    const DatasetIndex index = load_dataset(config.annotations);
    const ValidationReport validation = validate_alignment(index, config.dsm_dir);
    std::cout << config.echo_text() << "\n" << validation.to_text() << "\n";
    if (!validation.clean()) {
        std::cerr << "error: " << validation.missing_count() << " missing and "
                  << validation.mismatch_count() << " misaligned rasters under "
                  << config.dsm_dir.string() << "\n";
        return 1;
    }
    const SplitSpec split{config.split_seed, config.val_fraction};
    const ConversionReport report = convert_dataset(index, config.dsm_dir, config.out_dir, split);
    std::cout << report.to_text();
    if (!report_file.empty()) {
        std::ofstream out(report_file, std::ios::trunc);
        if (!out || !(out << report.to_text())) {
            raise(Errc::io_failure, "cannot write report file " + report_file);
        }
    }
    return 0;
}

int cmd_stats(const std::string& label_dir) {
    require_directory(label_dir, "label");
    std::cout << class_histogram(label_dir).to_text();
    return 0;
}

int cmd_weights(const std::string& label_dir, const std::string& out_file) {
    require_directory(label_dir, "label");
    const SampleWeights weights = image_weights(label_dir);
    write_weights(weights, out_file);
    std::cout << "wrote " << weights.weights.size() << " image weights to " << out_file << "\n";
    return 0;
}

int cmd_split(const RunConfig& config) {
    if (config.annotations.empty()) {
        raise(Errc::malformed_document, "split requires 'annotations'");
    }
    if (!(config.val_fraction > 0.0 && config.val_fraction < 1.0)) {
        raise(Errc::domain_error, "val_fraction must be in (0,1)");
    }
    const DatasetIndex index = load_dataset(config.annotations);
    const SplitSpec split{config.split_seed, config.val_fraction};
    std::vector<std::string> train;
    std::vector<std::string> val;
    for (const ImageRecord& img : index.images()) {
        const std::string stem = image_stem(img);
        (is_validation_stem(stem, split) ? val : train).push_back(stem);
    }
    std::sort(train.begin(), train.end());
    std::sort(val.begin(), val.end());
    std::cout << "train (" << train.size() << "):\n";
    for (const std::string& stem : train) {
        std::cout << "  " << stem << "\n";
    }
    std::cout << "val (" << val.size() << "):\n";
    for (const std::string& stem : val) {
        std::cout << "  " << stem << "\n";
    }
    return 0;
}

int cmd_evaluate(const std::string& gt_dir, const std::string& pred_dir,
                 const std::string& sizes_file, const std::string& json_file) {
    require_directory(gt_dir, "ground-truth label");
    require_directory(pred_dir, "prediction label");
    const ImageSizeMap sizes = read_sizes_file(sizes_file);
    const EvalReport report = evaluate(gt_dir, pred_dir, sizes);
    std::cout << report.to_table();
    if (!json_file.empty()) {
        std::ofstream out(json_file, std::ios::trunc);
        if (!out || !(out << report.to_json() << '\n')) {
            raise(Errc::io_failure, "cannot write JSON report " + json_file);
        }
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"building height-class dataset and evaluation toolkit"};
    app.require_subcommand(1);

    auto* convert = app.add_subcommand(
        "convert", "convert COCO annotations + DSM rasters to YOLO height-class labels");
    ConfigCliOptions convert_opts;
    convert_opts.attach(*convert);
    std::string report_file;
    convert->add_option("--report-file", report_file, "also write the conversion report here");

    auto* stats = app.add_subcommand("stats", "per-class instance histogram of a label directory");
    std::string stats_dir;
    stats->add_option("labels", stats_dir, "label directory")->required();

    auto* weights = app.add_subcommand("weights", "inverse-frequency image sampling weights");
    std::string weights_dir;
    std::string weights_out;
    weights->add_option("labels", weights_dir, "label directory")->required();
    weights->add_option("out", weights_out, "output weights file")->required();

    auto* split = app.add_subcommand("split", "print the deterministic train/val stem lists");
    ConfigCliOptions split_opts;
    split_opts.attach(*split);

    auto* evaluate_cmd = app.add_subcommand("evaluate", "score prediction labels against ground truth");
    std::string gt_dir;
    std::string pred_dir;
    std::string sizes_file;
    std::string json_file;
    evaluate_cmd->add_option("--gt", gt_dir, "ground-truth label directory")->required();
    evaluate_cmd->add_option("--pred", pred_dir, "prediction label directory")->required();
    evaluate_cmd->add_option("--sizes", sizes_file, "file of '<stem> <width> <height>' lines")
        ->required();
    evaluate_cmd->add_option("--json", json_file, "also write the report as JSON here");

    CLI11_PARSE(app, argc, argv);

    try {
        if (convert->parsed()) {
            return cmd_convert(convert_opts.resolve(), report_file);
        }
        if (stats->parsed()) {
            return cmd_stats(stats_dir);
        }
        if (weights->parsed()) {
            return cmd_weights(weights_dir, weights_out);
        }
        if (split->parsed()) {
            return cmd_split(split_opts.resolve());
        }
        if (evaluate_cmd->parsed()) {
            return cmd_evaluate(gt_dir, pred_dir, sizes_file, json_file);
        }
    } catch (const heightseg::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
