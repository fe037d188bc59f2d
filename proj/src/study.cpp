#include "kqeeg/study.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace kqeeg {

using nlohmann::json;

std::filesystem::path StudyConfig::manifest_path() const {
    return manifest.empty() ? out_dir / "manifest.json" : manifest;
}

std::filesystem::path StudyConfig::features_path() const {
    return features_csv.empty() ? out_dir / "features.csv" : features_csv;
}

StudyConfig default_config() {
    StudyConfig config;
    // The CLI default keeps simulated sessions short enough for quick runs;
    // per-recording generation still honors any configured duration.
    config.simulate.base.duration_s = 60.0;
    return config;
}

namespace {

json config_to_json(const StudyConfig& c) {
    json j;
    j["seed"] = c.seed;
    j["out_dir"] = c.out_dir.string();
    if (!c.manifest.empty()) j["manifest"] = c.manifest.string();
    if (!c.features_csv.empty()) j["features_csv"] = c.features_csv.string();
    j["filter"] = {{"low_hz", c.filter.low_hz},
                   {"high_hz", c.filter.high_hz},
                   {"order", c.filter.order}};
    j["welch"] = {{"window_len", c.welch.window_len},
                  {"overlap", c.welch.overlap},
                  {"nfft", c.welch.nfft},
                  {"window", to_string(c.welch.window)}};
    j["features"] = {
        {"asymmetry_input",
         c.features.asymmetry_input == AsymmetryInput::Relative ? "relative" : "absolute"},
        {"cordance_norm", c.features.cordance_norm == CordanceNorm::WithinChannel
                              ? "within_channel"
                              : "across_channels"}};
    j["responder"] = {{"threshold", c.responder.threshold},
                      {"timepoint", to_string(c.responder.at)}};
    j["stats"] = {{"alpha", c.stats.alpha}, {"secondary_alpha", c.stats.secondary_alpha}};
    json kinds = json::array();
    for (const auto k : c.predict.kinds) kinds.push_back(to_string(k));
    json sets = json::array();
    for (const auto s : c.predict.sets) sets.push_back(to_string(s));
    j["predict"] = {{"classifiers", kinds},
                    {"feature_sets", sets},
                    {"repeats", c.predict.repeats},
                    {"svm_c", c.predict.hyper.svm_c},
                    {"svm_gamma", c.predict.hyper.svm_gamma},
                    {"knn_k", c.predict.hyper.knn_k}};
    j["validation"] = {{"min_seconds", c.validation.min_seconds},
                       {"amp_limit_uv", c.validation.amp_limit_uv}};

    json sim;
    json npg, rf;
    for (const TrialArm arm : {TrialArm::A_Ket05, TrialArm::B_Ket02, TrialArm::C_Saline}) {
        const auto n_it = c.simulate.n_per_group.find(arm);
        npg[to_string(arm)] = n_it == c.simulate.n_per_group.end() ? 0 : n_it->second;
        const auto f_it = c.simulate.responder_fraction.find(arm);
        rf[to_string(arm)] = f_it == c.simulate.responder_fraction.end() ? 0.0 : f_it->second;
    }
    sim["n_per_group"] = npg;
    sim["responder_fraction"] = rf;
    sim["theta_deficit"] = c.simulate.theta_deficit;
    sim["alpha_deficit"] = c.simulate.alpha_deficit;
    sim["post_alpha_gain"] = c.simulate.post_alpha_gain;
    sim["include_post"] = c.simulate.include_post;
    sim["hdrs"] = {{"baseline_mean", c.simulate.hdrs.baseline_mean},
                   {"baseline_sd", c.simulate.hdrs.baseline_sd},
                   {"responder_reduction_mean", c.simulate.hdrs.responder_reduction_mean},
                   {"responder_reduction_sd", c.simulate.hdrs.responder_reduction_sd},
                   {"nonresponder_reduction_mean", c.simulate.hdrs.nonresponder_reduction_mean},
                   {"nonresponder_reduction_sd", c.simulate.hdrs.nonresponder_reduction_sd}};
    json amps = json::array();
    for (int b = 0; b < kNumBands; ++b) amps.push_back(c.simulate.base.band_amps_uv[b]);
    sim["recording"] = {{"fs_hz", c.simulate.base.fs_hz},
                        {"duration_s", c.simulate.base.duration_s},
                        {"noise_exponent", c.simulate.base.noise_exponent},
                        {"noise_rms_uv", c.simulate.base.noise_rms_uv},
                        {"band_amps_uv", amps},
                        {"asymmetry_bias", c.simulate.base.asymmetry_bias}};
    j["simulate"] = sim;
    return j;
}

void config_from_json(const json& j, StudyConfig& c) {
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("out_dir")) c.out_dir = j.at("out_dir").get<std::string>();
    if (j.contains("manifest")) c.manifest = j.at("manifest").get<std::string>();
    if (j.contains("features_csv")) c.features_csv = j.at("features_csv").get<std::string>();
    if (j.contains("filter")) {
        const json& f = j.at("filter");
        c.filter.low_hz = f.value("low_hz", c.filter.low_hz);
        c.filter.high_hz = f.value("high_hz", c.filter.high_hz);
        c.filter.order = f.value("order", c.filter.order);
    }
    if (j.contains("welch")) {
        const json& w = j.at("welch");
        c.welch.window_len = w.value("window_len", c.welch.window_len);
        c.welch.overlap = w.value("overlap", c.welch.overlap);
        c.welch.nfft = w.value("nfft", c.welch.nfft);
        if (w.contains("window")) c.welch.window = window_from_string(w.at("window"));
    }
    if (j.contains("features")) {
        const json& f = j.at("features");
        if (f.contains("asymmetry_input")) {
            c.features.asymmetry_input = f.at("asymmetry_input") == "absolute"
                                             ? AsymmetryInput::Absolute
                                             : AsymmetryInput::Relative;
        }
        if (f.contains("cordance_norm")) {
            c.features.cordance_norm = f.at("cordance_norm") == "across_channels"
                                           ? CordanceNorm::AcrossChannels
                                           : CordanceNorm::WithinChannel;
        }
    }
    if (j.contains("responder")) {
        const json& r = j.at("responder");
        c.responder.threshold = r.value("threshold", c.responder.threshold);
        if (r.contains("timepoint")) c.responder.at = timepoint_from_string(r.at("timepoint"));
    }
    if (j.contains("stats")) {
        const json& s = j.at("stats");
        c.stats.alpha = s.value("alpha", c.stats.alpha);
        c.stats.secondary_alpha = s.value("secondary_alpha", c.stats.secondary_alpha);
    }
    if (j.contains("predict")) {
        const json& p = j.at("predict");
        if (p.contains("classifiers")) {
            c.predict.kinds.clear();
            for (const auto& k : p.at("classifiers")) {
                c.predict.kinds.push_back(classifier_from_string(k));
            }
        }
        if (p.contains("feature_sets")) {
            c.predict.sets.clear();
            for (const auto& s : p.at("feature_sets")) {
                c.predict.sets.push_back(feature_set_from_string(s));
            }
        }
        c.predict.repeats = p.value("repeats", c.predict.repeats);
        c.predict.hyper.svm_c = p.value("svm_c", c.predict.hyper.svm_c);
        c.predict.hyper.svm_gamma = p.value("svm_gamma", c.predict.hyper.svm_gamma);
        c.predict.hyper.knn_k = p.value("knn_k", c.predict.hyper.knn_k);
    }
    if (j.contains("validation")) {
        const json& v = j.at("validation");
        c.validation.min_seconds = v.value("min_seconds", c.validation.min_seconds);
        c.validation.amp_limit_uv = v.value("amp_limit_uv", c.validation.amp_limit_uv);
    }
    if (j.contains("simulate")) {
        const json& s = j.at("simulate");
        if (s.contains("n_per_group")) {
            for (const auto& [key, val] : s.at("n_per_group").items()) {
                c.simulate.n_per_group[arm_from_string(key)] = val.get<int>();
            }
        }
        if (s.contains("responder_fraction")) {
            for (const auto& [key, val] : s.at("responder_fraction").items()) {
                c.simulate.responder_fraction[arm_from_string(key)] = val.get<double>();
            }
        }
        c.simulate.theta_deficit = s.value("theta_deficit", c.simulate.theta_deficit);
        c.simulate.alpha_deficit = s.value("alpha_deficit", c.simulate.alpha_deficit);
        c.simulate.post_alpha_gain = s.value("post_alpha_gain", c.simulate.post_alpha_gain);
        c.simulate.include_post = s.value("include_post", c.simulate.include_post);
        if (s.contains("hdrs")) {
            const json& h = s.at("hdrs");
            auto& m = c.simulate.hdrs;
            m.baseline_mean = h.value("baseline_mean", m.baseline_mean);
            m.baseline_sd = h.value("baseline_sd", m.baseline_sd);
            m.responder_reduction_mean =
                h.value("responder_reduction_mean", m.responder_reduction_mean);
            m.responder_reduction_sd = h.value("responder_reduction_sd", m.responder_reduction_sd);
            m.nonresponder_reduction_mean =
                h.value("nonresponder_reduction_mean", m.nonresponder_reduction_mean);
            m.nonresponder_reduction_sd =
                h.value("nonresponder_reduction_sd", m.nonresponder_reduction_sd);
        }
        if (s.contains("recording")) {
            const json& r = s.at("recording");
            auto& b = c.simulate.base;
            b.fs_hz = r.value("fs_hz", b.fs_hz);
            b.duration_s = r.value("duration_s", b.duration_s);
            b.noise_exponent = r.value("noise_exponent", b.noise_exponent);
            b.noise_rms_uv = r.value("noise_rms_uv", b.noise_rms_uv);
            b.asymmetry_bias = r.value("asymmetry_bias", b.asymmetry_bias);
            if (r.contains("band_amps_uv")) {
                const auto amps = r.at("band_amps_uv").get<std::vector<double>>();
                if (amps.size() != kNumBands) throw ConfigError("band_amps_uv needs 4 entries");
                for (int i = 0; i < kNumBands; ++i) b.band_amps_uv[i] = amps[static_cast<std::size_t>(i)];
            }
        }
    }
    // Simulation shares the top-level seed and responder rule.
    c.simulate.seed = c.seed;
    c.simulate.responder_threshold = c.responder.threshold;
}

std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

} // namespace

StudyConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config: " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("config parse error: " + std::string(e.what()));
    }
    StudyConfig config = default_config();
    try {
        config_from_json(j, config);
    } catch (const json::exception& e) {
        throw ConfigError("config field error: " + std::string(e.what()));
    }
    return config;
}

void save_config(const StudyConfig& config, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write config: " + path.string());
    out << config_to_json(config).dump(2) << '\n';
}

Manifest load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open manifest: " + path.string());
    const json j = json::parse(in);
    const auto base = path.parent_path();

    Manifest m;
    for (const auto& entry : j.at("recordings")) {
        ManifestEntry e;
        e.recording_csv = base / entry.at("recording_csv").get<std::string>();
        e.sidecar_json = base / entry.at("sidecar_json").get<std::string>();
        m.recordings.push_back(e);
    }
    if (j.contains("cohort_csv")) m.cohort_csv = base / j.at("cohort_csv").get<std::string>();
    return m;
}

void save_manifest(const Manifest& manifest, const std::filesystem::path& path) {
    const auto base = path.parent_path();
    json j;
    j["recordings"] = json::array();
    for (const auto& e : manifest.recordings) {
        j["recordings"].push_back(
            {{"recording_csv", std::filesystem::relative(e.recording_csv, base).string()},
             {"sidecar_json", std::filesystem::relative(e.sidecar_json, base).string()}});
    }
    if (!manifest.cohort_csv.empty()) {
        j["cohort_csv"] = std::filesystem::relative(manifest.cohort_csv, base).string();
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write manifest: " + path.string());
    out << j.dump(2) << '\n';
}

std::vector<std::string> feature_column_names() {
    std::vector<std::string> names;
    for (const auto& band : standard_bands()) {
        for (const auto& ch : kMontage) {
            names.push_back("rel_" + to_string(band.name) + "_" + ch.name);
        }
    }
    for (const auto& band : standard_bands()) {
        for (const auto& ch : kMontage) {
            names.push_back("absdb_" + to_string(band.name) + "_" + ch.name);
        }
    }
    for (const Band band : {Band::LowAlpha, Band::HighAlpha}) {
        for (const ChannelPair pair : {ChannelPair::MidLateral, ChannelPair::MidPrefrontal}) {
            names.push_back("asym_" + to_string(band) + "_" + pair_name(pair));
        }
    }
    for (const auto& ch : kMontage) {
        names.push_back("cordance_theta_" + ch.name);
    }
    return names;
}

Eigen::Index FeatureTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < feature_names.size(); ++i) {
        if (feature_names[i] == name) return static_cast<Eigen::Index>(i);
    }
    throw ConfigError("unknown feature column: " + name);
}

double FeatureTable::value(const FeatureTableRow& row, const std::string& name) const {
    return row.values[column(name)];
}

void save_feature_table(const FeatureTable& table, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write feature table: " + path.string());
    out << "subject_id,session,group,label";
    for (const auto& name : table.feature_names) out << ',' << name;
    out << '\n';
    for (const auto& row : table.rows) {
        out << row.subject_id << ',' << to_string(row.session) << ',' << to_string(row.group)
            << ',' << to_string(row.label);
        for (Eigen::Index i = 0; i < row.values.size(); ++i) {
            out << ',' << format_double(row.values[i]);
        }
        out << '\n';
    }
}

FeatureTable load_feature_table(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open feature table: " + path.string());

    FeatureTable table;
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("empty feature table");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::stringstream header(line);
    std::string field;
    std::vector<std::string> cols;
    while (std::getline(header, field, ',')) cols.push_back(field);
    if (cols.size() < 5 || cols[0] != "subject_id") {
        throw ConfigError("unexpected feature table header");
    }
    table.feature_names.assign(cols.begin() + 4, cols.end());

    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::stringstream ss(line);
        FeatureTableRow row;
        std::getline(ss, row.subject_id, ',');
        std::getline(ss, field, ',');
        row.session = session_from_string(field);
        std::getline(ss, field, ',');
        row.group = arm_from_string(field);
        std::getline(ss, field, ',');
        row.label = label_from_string(field);
        std::vector<double> vals;
        while (std::getline(ss, field, ',')) vals.push_back(std::stod(field));
        if (vals.size() != table.feature_names.size()) {
            throw ConfigError("ragged feature table row for " + row.subject_id);
        }
        row.values = Eigen::Map<const Eigen::VectorXd>(vals.data(),
                                                       static_cast<Eigen::Index>(vals.size()));
        table.rows.push_back(std::move(row));
    }
    return table;
}

std::map<std::string, BandPowers> channel_band_powers(const Recording& rec,
                                                      const StudyConfig& config) {
    const FilterKernel kernel = design_bandpass_fir(config.filter.low_hz, config.filter.high_hz,
                                                    rec.fs_hz, config.filter.order);
    std::map<std::string, BandPowers> out;
    for (const auto& ch : rec.channels) {
        const Eigen::ArrayXd filtered = filter_zero_phase(rec.channel(ch.name), kernel);
        const PowerSpectrum psd = welch_psd(filtered, rec.fs_hz, config.welch, ch);
        out.emplace(ch.name, relative_power(psd));
    }
    return out;
}

FeatureTableRow extract_row(const Recording& rec, ResponseLabel label,
                            const StudyConfig& config) {
    const auto powers = channel_band_powers(rec, config);
    for (const auto& ch : kMontage) {
        if (powers.find(ch.name) == powers.end()) {
            throw MissingChannel("recording lacks channel " + ch.name);
        }
    }

    FeatureTableRow row;
    row.subject_id = rec.subject_id;
    row.session = rec.session;
    row.group = rec.group;
    row.label = label;

    std::vector<double> vals;
    for (const auto& band : standard_bands()) {
        for (const auto& ch : kMontage) vals.push_back(powers.at(ch.name).rel(band.name));
    }
    for (const auto& band : standard_bands()) {
        for (const auto& ch : kMontage) {
            vals.push_back(powers.at(ch.name).absolute_db[static_cast<int>(band.name)]);
        }
    }
    for (const Band band : {Band::LowAlpha, Band::HighAlpha}) {
        for (const ChannelPair pair : {ChannelPair::MidLateral, ChannelPair::MidPrefrontal}) {
            const auto score =
                alpha_asymmetry(powers.at(pair_left(pair).name), powers.at(pair_right(pair).name),
                                band, config.features.asymmetry_input);
            vals.push_back(score.value);
        }
    }
    if (config.features.cordance_norm == CordanceNorm::WithinChannel) {
        for (const auto& ch : kMontage) {
            const auto cv = cordance(powers.at(ch.name));
            vals.push_back(cv[static_cast<std::size_t>(Band::Theta)].value);
        }
    } else {
        const auto all = cordance_across_channels(powers);
        for (const auto& ch : kMontage) {
            vals.push_back(all.at(ch.name)[static_cast<std::size_t>(Band::Theta)].value);
        }
    }

    row.values =
        Eigen::Map<const Eigen::VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size()));
    return row;
}

int run_simulate(const StudyConfig& config) {
    namespace fs = std::filesystem;
    const auto out_dir = config.out_dir;
    const auto rec_dir = out_dir / "recordings";
    fs::create_directories(rec_dir);

    CohortSpec spec = config.simulate;
    spec.seed = config.seed;
    spec.responder_threshold = config.responder.threshold;
    const auto cohort = gen_cohort(spec);

    Manifest manifest;
    std::vector<SubjectRecord> records;
    for (const auto& subject : cohort) {
        records.push_back(subject.record);
        const auto save_session = [&](const Recording& rec) {
            const std::string stem = rec.subject_id + "_" + to_string(rec.session);
            const auto csv = rec_dir / (stem + ".csv");
            const auto sidecar = rec_dir / (stem + ".json");
            save_recording(rec, csv, sidecar);
            manifest.recordings.push_back({csv, sidecar});
        };
        save_session(subject.baseline);
        if (subject.post) save_session(*subject.post);
    }

    manifest.cohort_csv = out_dir / "cohort.csv";
    save_cohort_csv(records, manifest.cohort_csv);
    save_manifest(manifest, config.manifest_path());
    save_config(config, out_dir / "effective_config.json");
    return 0;
}

FeaturesResult compute_features(const StudyConfig& config) {
    const Manifest manifest = load_manifest(config.manifest_path());

    std::map<std::string, SubjectRecord> records;
    if (!manifest.cohort_csv.empty()) {
        for (auto& rec : load_cohort_csv(manifest.cohort_csv, config.responder.threshold,
                                         config.responder.at)) {
            records.emplace(rec.subject_id, std::move(rec));
        }
    }

    FeaturesResult result;
    result.table.feature_names = feature_column_names();
    for (const auto& entry : manifest.recordings) {
        try {
            const Recording rec = load_recording(entry.recording_csv, entry.sidecar_json);
            for (const auto& finding :
                 validate_recording(rec, config.validation.min_seconds,
                                    config.validation.amp_limit_uv)) {
                result.warnings.push_back(rec.subject_id + "/" + to_string(rec.session) + ": " +
                                          finding.message);
            }
            ResponseLabel label = ResponseLabel::Unlabeled;
            const auto it = records.find(rec.subject_id);
            if (it != records.end()) label = it->second.label;
            result.table.rows.push_back(extract_row(rec, label, config));
        } catch (const std::exception& e) {
            result.errors.push_back(entry.recording_csv.string() + ": " + e.what());
        }
    }

    std::stable_sort(result.table.rows.begin(), result.table.rows.end(),
                     [](const FeatureTableRow& a, const FeatureTableRow& b) {
                         if (a.subject_id != b.subject_id) return a.subject_id < b.subject_id;
                         return static_cast<int>(a.session) < static_cast<int>(b.session);
                     });
    return result;
}

int run_features(const StudyConfig& config, bool dump_psd) {
    std::filesystem::create_directories(config.out_dir);
    FeaturesResult result = compute_features(config);

    if (dump_psd) {
        const auto psd_dir = config.out_dir / "psd";
        std::filesystem::create_directories(psd_dir);
        const Manifest manifest = load_manifest(config.manifest_path());
        for (const auto& entry : manifest.recordings) {
            try {
                const Recording rec = load_recording(entry.recording_csv, entry.sidecar_json);
                const FilterKernel kernel = design_bandpass_fir(
                    config.filter.low_hz, config.filter.high_hz, rec.fs_hz, config.filter.order);
                for (const auto& ch : rec.channels) {
                    const auto filtered = filter_zero_phase(rec.channel(ch.name), kernel);
                    const auto psd = welch_psd(filtered, rec.fs_hz, config.welch, ch);
                    write_psd_csv(psd, psd_dir / (rec.subject_id + "_" + to_string(rec.session) +
                                                  "_" + ch.name + ".csv"));
                }
            } catch (const std::exception&) {
                // extraction errors are already reported below
            }
        }
    }

    save_feature_table(result.table, config.features_path());
    save_config(config, config.out_dir / "effective_config.json");
    for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
    for (const auto& e : result.errors) std::cerr << "error: " << e << '\n';
    return result.errors.empty() ? 0 : 1;
}

namespace {

// Paired baseline/post pulls for one cohort subset.
void add_paired_comparisons(std::vector<Comparison>& comparisons, const FeatureTable& table,
                            const std::vector<std::string>& features, const std::string& cohort,
                            const std::function<bool(const FeatureTableRow&)>& in_cohort) {
    std::map<std::string, const FeatureTableRow*> baseline, post;
    for (const auto& row : table.rows) {
        if (!in_cohort(row)) continue;
        (row.session == Session::Baseline ? baseline : post)[row.subject_id] = &row;
    }
    for (const auto& feature : features) {
        Comparison c;
        c.feature = feature;
        c.groups = cohort + ":baseline_vs_post";
        c.paired = true;
        std::vector<double> x, y;
        for (const auto& [sid, brow] : baseline) {
            const auto it = post.find(sid);
            if (it == post.end()) continue;
            x.push_back(table.value(*brow, feature));
            y.push_back(table.value(*it->second, feature));
        }
        c.x = Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
        c.y = Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size()));
        comparisons.push_back(std::move(c));
    }
}

} // namespace

StatsReport compute_stats(const FeatureTable& table, const std::vector<SubjectRecord>& records,
                          const StudyConfig& config) {
    StatsReport report;
    if (!records.empty()) report.cohort = cohort_summary(records, config.responder.at);

    // Baseline responders vs non-responders per ketamine arm, relative power.
    std::vector<std::string> power_features;
    for (const auto& band : standard_bands()) {
        for (const auto& ch : kMontage) {
            power_features.push_back("rel_" + to_string(band.name) + "_" + ch.name);
        }
    }
    std::vector<Comparison> baseline_comparisons;
    for (const TrialArm arm : {TrialArm::A_Ket05, TrialArm::B_Ket02}) {
        for (const auto& feature : power_features) {
            Comparison c;
            c.feature = feature;
            c.groups = to_string(arm) + ":resp_vs_nonresp";
            std::vector<double> x, y;
            for (const auto& row : table.rows) {
                if (row.session != Session::Baseline || row.group != arm) continue;
                if (row.label == ResponseLabel::Responder) {
                    x.push_back(table.value(row, feature));
                } else if (row.label == ResponseLabel::NonResponder) {
                    y.push_back(table.value(row, feature));
                }
            }
            c.x = Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
            c.y = Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size()));
            baseline_comparisons.push_back(std::move(c));
        }
    }
    report.baseline_power =
        group_compare(baseline_comparisons, config.stats.alpha, config.stats.secondary_alpha);

    // Baseline vs post within the active / inactive / saline cohorts.
    std::vector<std::string> paired_features = power_features;
    for (const Band band : {Band::LowAlpha, Band::HighAlpha}) {
        for (const ChannelPair pair : {ChannelPair::MidLateral, ChannelPair::MidPrefrontal}) {
            paired_features.push_back("asym_" + to_string(band) + "_" + pair_name(pair));
        }
    }
    for (const auto& ch : kMontage) paired_features.push_back("cordance_theta_" + ch.name);

    std::vector<Comparison> paired;
    const auto is_ketamine = [](const FeatureTableRow& r) {
        return r.group == TrialArm::A_Ket05 || r.group == TrialArm::B_Ket02;
    };
    add_paired_comparisons(paired, table, paired_features, "active",
                           [&](const FeatureTableRow& r) {
                               return is_ketamine(r) && r.label == ResponseLabel::Responder;
                           });
    add_paired_comparisons(paired, table, paired_features, "inactive",
                           [&](const FeatureTableRow& r) {
                               return is_ketamine(r) && r.label == ResponseLabel::NonResponder;
                           });
    add_paired_comparisons(paired, table, paired_features, "saline",
                           [](const FeatureTableRow& r) { return r.group == TrialArm::C_Saline; });
    report.paired = group_compare(paired, config.stats.alpha, config.stats.secondary_alpha);
    return report;
}

namespace {

json outcome_to_json(const ComparisonOutcome& o) {
    json j;
    j["feature"] = o.feature;
    j["groups"] = o.groups;
    j["paired"] = o.paired;
    if (o.skipped) {
        j["skipped"] = true;
        j["note"] = o.note;
    } else {
        j["statistic"] = o.result.statistic;
        j["p"] = o.result.p_value;
        j["method"] = to_string(o.result.method);
        j["n1"] = o.result.n1;
        j["n2"] = o.result.n2;
        j["reject_primary"] = o.reject_primary;
        j["reject_secondary"] = o.reject_secondary;
    }
    return j;
}

std::string flag_mark(const ComparisonOutcome& o) {
    if (o.skipped) return "skip";
    if (o.reject_secondary) return "**";
    if (o.reject_primary) return "*";
    return "";
}

} // namespace

std::string render_stats_text(const StatsReport& report, const StudyConfig& config) {
    std::ostringstream out;
    char buf[256];

    out << "== Cohort response summary (HDRS-17 at " << to_string(config.responder.at) << ") ==\n";
    std::snprintf(buf, sizeof(buf), "%-6s %4s %6s %16s %16s %16s\n", "group", "n", "resp",
                  "baseline", "post", "reduction");
    out << buf;
    for (const auto& g : report.cohort) {
        std::snprintf(buf, sizeof(buf), "%-6s %4d %6d %8.1f +- %5.1f %8.1f +- %5.1f %7.1f%% +- %4.1f%%\n",
                      to_string(g.group).c_str(), g.n, g.n_responders, g.baseline_mean,
                      g.baseline_sd, g.at_mean, g.at_sd, 100.0 * g.rate_mean, 100.0 * g.rate_sd);
        out << buf;
    }

    out << "\n== Baseline relative power: responders vs non-responders ==\n";
    std::snprintf(buf, sizeof(buf), "%-24s %-20s %10s %12s %6s\n", "feature", "groups", "W", "p",
                  "flag");
    out << buf;
    for (const auto& o : report.baseline_power) {
        if (o.skipped) {
            std::snprintf(buf, sizeof(buf), "%-24s %-20s %10s %12s %6s\n", o.feature.c_str(),
                          o.groups.c_str(), "-", "-", "skip");
        } else {
            std::snprintf(buf, sizeof(buf), "%-24s %-20s %10.1f %12.5g %6s\n", o.feature.c_str(),
                          o.groups.c_str(), o.result.statistic, o.result.p_value,
                          flag_mark(o).c_str());
        }
        out << buf;
    }

    out << "\n== Baseline vs 240-min post-treatment (paired) ==\n";
    std::snprintf(buf, sizeof(buf), "%-24s %-24s %10s %12s %6s\n", "feature", "cohort", "T", "p",
                  "flag");
    out << buf;
    for (const auto& o : report.paired) {
        if (o.skipped) {
            std::snprintf(buf, sizeof(buf), "%-24s %-24s %10s %12s %6s\n", o.feature.c_str(),
                          o.groups.c_str(), "-", "-", "skip");
        } else {
            std::snprintf(buf, sizeof(buf), "%-24s %-24s %10.1f %12.5g %6s\n", o.feature.c_str(),
                          o.groups.c_str(), o.result.statistic, o.result.p_value,
                          flag_mark(o).c_str());
        }
        out << buf;
    }
    out << "\n*  significant after Hochberg at alpha = " << config.stats.alpha << "\n";
    out << "** also significant at the secondary level " << config.stats.secondary_alpha << "\n";
    return out.str();
}

int run_stats(const StudyConfig& config) {
    const FeatureTable table = load_feature_table(config.features_path());
    std::vector<SubjectRecord> records;
    const auto manifest_file = config.manifest_path();
    if (std::filesystem::exists(manifest_file)) {
        const Manifest manifest = load_manifest(manifest_file);
        if (!manifest.cohort_csv.empty() && std::filesystem::exists(manifest.cohort_csv)) {
            records = load_cohort_csv(manifest.cohort_csv, config.responder.threshold,
                                      config.responder.at);
        }
    }

    const StatsReport report = compute_stats(table, records, config);

    json j;
    j["cohort"] = json::array();
    for (const auto& g : report.cohort) {
        j["cohort"].push_back({{"group", to_string(g.group)},
                               {"n", g.n},
                               {"responders", g.n_responders},
                               {"baseline_mean", g.baseline_mean},
                               {"baseline_sd", g.baseline_sd},
                               {"post_mean", g.at_mean},
                               {"post_sd", g.at_sd},
                               {"reduction_mean", g.rate_mean},
                               {"reduction_sd", g.rate_sd}});
    }
    j["baseline_power"] = json::array();
    for (const auto& o : report.baseline_power) j["baseline_power"].push_back(outcome_to_json(o));
    j["paired"] = json::array();
    for (const auto& o : report.paired) j["paired"].push_back(outcome_to_json(o));

    std::filesystem::create_directories(config.out_dir);
    std::ofstream out(config.out_dir / "stats.json", std::ios::binary);
    out << j.dump(2) << '\n';
    std::ofstream text(config.out_dir / "stats.txt", std::ios::binary);
    text << render_stats_text(report, config);
    save_config(config, config.out_dir / "effective_config.json");
    return 0;
}

Dataset dataset_from_table(const FeatureTable& table, FeatureSet set,
                           const std::vector<TrialArm>& arms) {
    std::vector<std::string> cols;
    switch (set) {
        case FeatureSet::Theta:
            for (const auto& ch : kMontage) cols.push_back("rel_theta_" + ch.name);
            break;
        case FeatureSet::LowAlpha:
            for (const auto& ch : kMontage) cols.push_back("rel_low_alpha_" + ch.name);
            break;
        case FeatureSet::ThetaLowAlpha:
            for (const auto& ch : kMontage) cols.push_back("rel_theta_" + ch.name);
            for (const auto& ch : kMontage) cols.push_back("rel_low_alpha_" + ch.name);
            break;
        case FeatureSet::Asymmetry:
            for (const Band band : {Band::LowAlpha, Band::HighAlpha}) {
                for (const ChannelPair pair :
                     {ChannelPair::MidLateral, ChannelPair::MidPrefrontal}) {
                    cols.push_back("asym_" + to_string(band) + "_" + pair_name(pair));
                }
            }
            break;
        case FeatureSet::Cordance:
            for (const auto& ch : kMontage) cols.push_back("cordance_theta_" + ch.name);
            break;
    }

    Dataset data;
    data.feature_names = cols;
    std::vector<Eigen::VectorXd> rows;
    for (const auto& row : table.rows) {
        if (row.session != Session::Baseline) continue;
        if (row.label == ResponseLabel::Unlabeled) continue;
        if (std::find(arms.begin(), arms.end(), row.group) == arms.end()) continue;
        Eigen::VectorXd v(static_cast<Eigen::Index>(cols.size()));
        for (std::size_t i = 0; i < cols.size(); ++i) {
            v[static_cast<Eigen::Index>(i)] = table.value(row, cols[i]);
        }
        rows.push_back(v);
        data.y.push_back(row.label == ResponseLabel::Responder ? 1 : 0);
        data.subject_ids.push_back(row.subject_id);
    }
    data.x.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        data.x.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
    }
    return data;
}

PredictReport compute_predict(const FeatureTable& table, const StudyConfig& config) {
    PredictReport report;
    double best_acc = -1.0;

    const std::vector<std::pair<std::string, std::vector<TrialArm>>> cohorts{
        {"mixed", {TrialArm::A_Ket05, TrialArm::B_Ket02}},
        {"A", {TrialArm::A_Ket05}},
        {"B", {TrialArm::B_Ket02}},
    };

    for (const auto& [cohort_name, arms] : cohorts) {
        for (const FeatureSet set : config.predict.sets) {
            const Dataset data = dataset_from_table(table, set, arms);
            if (data.rows() == 0) continue;
            for (const ClassifierKind kind : config.predict.kinds) {
                PredictCell cell;
                cell.cohort = cohort_name;
                cell.kind = kind;
                cell.set = set;
                if (cohort_name == "mixed") {
                    cell.report = three_fold_cv(data, kind, config.predict.hyper, config.seed,
                                                config.predict.repeats);
                } else {
                    cell.report = loso_cv(data, kind, config.predict.hyper, config.seed);
                }
                if (cohort_name == "mixed" && cell.report.mean_of("accuracy") > best_acc) {
                    best_acc = cell.report.mean_of("accuracy");
                    report.best_cohort = cohort_name;
                    report.best_kind = kind;
                    report.best_set = set;
                }
                report.cells.push_back(std::move(cell));
            }
        }
    }
    return report;
}

namespace {

const PredictCell* find_cell(const PredictReport& report, const std::string& cohort,
                             ClassifierKind kind, FeatureSet set) {
    for (const auto& cell : report.cells) {
        if (cell.cohort == cohort && cell.kind == kind && cell.set == set) return &cell;
    }
    return nullptr;
}

void write_predict_svg(const PredictReport& report, const StudyConfig& config,
                       const std::filesystem::path& path) {
    // Grouped bar chart of mixed-cohort mean accuracy, one group per
    // classifier, one bar per feature set.
    std::vector<ClassifierKind> kinds = config.predict.kinds;
    std::vector<FeatureSet> sets = config.predict.sets;
    const int bar_w = 22;
    const int gap = 18;
    const int group_w = bar_w * static_cast<int>(sets.size()) + gap;
    const int width = 80 + group_w * static_cast<int>(kinds.size());
    const int height = 360;
    const int base_y = 300;
    const double y_scale = 2.4; // pixels per accuracy percent

    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write svg: " + path.string());
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\">\n";
    out << "<text x=\"10\" y=\"20\" font-size=\"14\">Mean accuracy (%) by classifier and feature "
           "set (mixed cohort)</text>\n";
    const std::array<const char*, 5> palette{"#4477aa", "#ee6677", "#228833", "#ccbb44",
                                             "#aa3377"};
    for (int g = 0; g <= 100; g += 25) {
        const int y = base_y - static_cast<int>(g * y_scale);
        out << "<line x1=\"40\" y1=\"" << y << "\" x2=\"" << (width - 10) << "\" y2=\"" << y
            << "\" stroke=\"#dddddd\"/>\n";
        out << "<text x=\"8\" y=\"" << (y + 4) << "\" font-size=\"10\">" << g << "</text>\n";
    }
    int x = 50;
    char buf[160];
    for (const auto kind : kinds) {
        int bx = x;
        for (std::size_t s = 0; s < sets.size(); ++s) {
            const PredictCell* cell = find_cell(report, "mixed", kind, sets[s]);
            if (cell) {
                const double acc = cell->report.mean_of("accuracy");
                const int h = static_cast<int>(acc * y_scale);
                std::snprintf(buf, sizeof(buf),
                              "<rect x=\"%d\" y=\"%d\" width=\"%d\" height=\"%d\" fill=\"%s\"/>\n",
                              bx, base_y - h, bar_w - 2, h, palette[s % palette.size()]);
                out << buf;
            }
            bx += bar_w;
        }
        out << "<text x=\"" << x << "\" y=\"" << (base_y + 16) << "\" font-size=\"10\">"
            << to_string(kind) << "</text>\n";
        x += group_w;
    }
    int ly = 40;
    for (std::size_t s = 0; s < sets.size(); ++s) {
        out << "<rect x=\"" << (width - 150) << "\" y=\"" << (ly - 10)
            << "\" width=\"12\" height=\"12\" fill=\"" << palette[s % palette.size()] << "\"/>\n";
        out << "<text x=\"" << (width - 132) << "\" y=\"" << ly << "\" font-size=\"11\">"
            << to_string(sets[s]) << "</text>\n";
        ly += 18;
    }
    out << "</svg>\n";
}

json summary_to_json(const EvalReport& report) {
    json j;
    for (const auto& [key, s] : report.summary) {
        j[key] = {{"mean", s.mean}, {"sd", s.sd}, {"n", s.n_used}, {"excluded", s.n_excluded}};
    }
    return j;
}

} // namespace

std::string render_predict_text(const PredictReport& report) {
    std::ostringstream out;
    char buf[256];
    const std::vector<std::pair<std::string, std::string>> cohorts{
        {"mixed", "Mixed ketamine groups (3-fold CV)"},
        {"A", "Group A (leave-one-subject-out)"},
        {"B", "Group B (leave-one-subject-out)"}};

    std::vector<FeatureSet> sets;
    std::vector<ClassifierKind> kinds;
    for (const auto& cell : report.cells) {
        if (std::find(sets.begin(), sets.end(), cell.set) == sets.end()) sets.push_back(cell.set);
        if (std::find(kinds.begin(), kinds.end(), cell.kind) == kinds.end()) {
            kinds.push_back(cell.kind);
        }
    }

    for (const auto& [cohort, title] : cohorts) {
        bool any = false;
        for (const auto& cell : report.cells) any |= cell.cohort == cohort;
        if (!any) continue;
        out << "== " << title << ": mean accuracy +- SD (%) ==\n";
        std::snprintf(buf, sizeof(buf), "%-12s", "classifier");
        out << buf;
        for (const auto set : sets) {
            std::snprintf(buf, sizeof(buf), " %18s", to_string(set).c_str());
            out << buf;
        }
        out << '\n';
        for (const auto kind : kinds) {
            std::snprintf(buf, sizeof(buf), "%-12s", to_string(kind).c_str());
            out << buf;
            for (const auto set : sets) {
                const PredictCell* cell = find_cell(report, cohort, kind, set);
                if (cell) {
                    const auto& acc = cell->report.summary.at("accuracy");
                    std::snprintf(buf, sizeof(buf), "     %6.1f +- %5.1f", acc.mean, acc.sd);
                } else {
                    std::snprintf(buf, sizeof(buf), " %18s", "-");
                }
                out << buf;
            }
            out << '\n';
        }
        out << '\n';
    }

    const PredictCell* best = find_cell(report, report.best_cohort, report.best_kind,
                                        report.best_set);
    if (best) {
        out << "Best mixed-cohort cell: " << to_string(report.best_kind) << " on "
            << to_string(report.best_set) << '\n';
        for (const auto& [key, s] : best->report.summary) {
            std::snprintf(buf, sizeof(buf), "  %-12s %6.1f +- %5.1f (n=%d, excluded=%d)\n",
                          key.c_str(), s.mean, s.sd, s.n_used, s.n_excluded);
            out << buf;
        }
    }
    return out.str();
}

int run_predict(const StudyConfig& config) {
    const FeatureTable table = load_feature_table(config.features_path());
    const PredictReport report = compute_predict(table, config);
    if (report.cells.empty()) {
        std::cerr << "error: no labeled baseline rows to train on\n";
        return 2;
    }

    json j;
    for (const auto& cell : report.cells) {
        j[cell.cohort][to_string(cell.kind)][to_string(cell.set)] = summary_to_json(cell.report);
    }
    j["best"] = {{"cohort", report.best_cohort},
                 {"classifier", to_string(report.best_kind)},
                 {"feature_set", to_string(report.best_set)}};

    std::filesystem::create_directories(config.out_dir);
    std::ofstream out(config.out_dir / "predict.json", std::ios::binary);
    out << j.dump(2) << '\n';
    std::ofstream text(config.out_dir / "predict.txt", std::ios::binary);
    text << render_predict_text(report);
    write_predict_svg(report, config, config.out_dir / "predict_grid.svg");
    save_config(config, config.out_dir / "effective_config.json");
    return 0;
}

int run_report(const StudyConfig& config) {
    const auto stats_txt = config.out_dir / "stats.txt";
    const auto predict_txt = config.out_dir / "predict.txt";
    if (!std::filesystem::exists(stats_txt) || !std::filesystem::exists(predict_txt)) {
        std::cerr << "error: run the stats and predict subcommands first\n";
        return 2;
    }
    std::ofstream out(config.out_dir / "study_report.txt", std::ios::binary);
    out << "==== Study report ====\n\n";
    for (const auto& path : {stats_txt, predict_txt}) {
        std::ifstream in(path);
        out << in.rdbuf() << '\n';
    }
    return 0;
}

} // namespace kqeeg
