#include <CLI11.hpp>
#include <iostream>
#include <optional>
#include <string>

#include "kqeeg/study.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<std::string> manifest;
    std::optional<std::string> features_csv;
    std::optional<int> filter_order;
    std::optional<std::string> band;
    std::optional<int> welch_window;
    std::optional<int> welch_overlap;
    std::optional<int> nfft;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "Study config JSON");
    cmd->add_option("--seed", args.seed, "Override the run seed");
    cmd->add_option("--out", args.out_dir, "Output directory");
    cmd->add_option("--manifest", args.manifest, "Manifest JSON path");
    cmd->add_option("--features", args.features_csv, "Feature table CSV path");
    cmd->add_option("--filter-order", args.filter_order, "FIR bandpass order (even)");
    cmd->add_option("--band", args.band, "Passband as LO:HI in Hz (default 1:12)");
    cmd->add_option("--welch-window", args.welch_window, "Welch window length in samples");
    cmd->add_option("--welch-overlap", args.welch_overlap, "Welch overlap in samples");
    cmd->add_option("--nfft", args.nfft, "FFT length (0 = auto for 0.5 Hz bins)");
}

kqeeg::StudyConfig resolve_config(const CommonArgs& args) {
    kqeeg::StudyConfig config =
        args.config_path.empty() ? kqeeg::default_config() : kqeeg::load_config(args.config_path);
    if (args.seed) config.seed = *args.seed;
    if (args.out_dir) config.out_dir = *args.out_dir;
    if (args.manifest) config.manifest = *args.manifest;
    if (args.features_csv) config.features_csv = *args.features_csv;
    if (args.filter_order) config.filter.order = *args.filter_order;
    if (args.band) {
        const auto pos = args.band->find(':');
        if (pos == std::string::npos) throw kqeeg::ConfigError("--band expects LO:HI");
        config.filter.low_hz = std::stod(args.band->substr(0, pos));
        config.filter.high_hz = std::stod(args.band->substr(pos + 1));
    }
    if (args.welch_window) config.welch.window_len = *args.welch_window;
    if (args.welch_overlap) config.welch.overlap = *args.welch_overlap;
    if (args.nfft) config.welch.nfft = *args.nfft;
    config.simulate.seed = config.seed;
    config.simulate.responder_threshold = config.responder.threshold;
    return config;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Prefrontal EEG treatment-response analysis pipeline"};
    app.require_subcommand(1);

    CommonArgs args;
    bool dump_psd = false;
    std::optional<double> duration;

    auto* simulate = app.add_subcommand("simulate", "Generate a synthetic cohort on disk");
    add_common(simulate, args);
    simulate->add_option("--duration", duration, "Recording length in seconds");

    auto* features = app.add_subcommand("features", "Extract the feature table from a manifest");
    add_common(features, args);
    features->add_flag("--dump-psd", dump_psd, "Also write per-channel PSD CSVs");

    auto* stats = app.add_subcommand("stats", "Group comparisons on the feature table");
    add_common(stats, args);

    auto* predict = app.add_subcommand("predict", "Cross-validated baseline response predictors");
    add_common(predict, args);

    auto* report = app.add_subcommand("report", "Combine stats and predict outputs");
    add_common(report, args);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? 0 : 2;
    }

    try {
        kqeeg::StudyConfig config = resolve_config(args);
        if (duration) config.simulate.base.duration_s = *duration;

        if (simulate->parsed()) return kqeeg::run_simulate(config);
        if (features->parsed()) return kqeeg::run_features(config, dump_psd);
        if (stats->parsed()) return kqeeg::run_stats(config);
        if (predict->parsed()) return kqeeg::run_predict(config);
        if (report->parsed()) return kqeeg::run_report(config);
    } catch (const kqeeg::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
