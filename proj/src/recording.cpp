#include "kqeeg/recording.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace kqeeg {

using nlohmann::json;

std::string to_string(Session s) {
    return s == Session::Baseline ? "baseline" : "post240";
}

Session session_from_string(const std::string& s) {
    if (s == "baseline") return Session::Baseline;
    if (s == "post240") return Session::Post240;
    throw MalformedCsv("unknown session label: " + s);
}

std::string to_string(TrialArm g) {
    switch (g) {
        case TrialArm::A_Ket05: return "A";
        case TrialArm::B_Ket02: return "B";
        case TrialArm::C_Saline: return "C";
    }
    return "?";
}

TrialArm arm_from_string(const std::string& s) {
    if (s == "A") return TrialArm::A_Ket05;
    if (s == "B") return TrialArm::B_Ket02;
    if (s == "C") return TrialArm::C_Saline;
    throw MalformedCsv("unknown trial arm: " + s);
}

NonFiniteSample::NonFiniteSample(long row_, std::string channel_)
    : Error("non-finite sample at row " + std::to_string(row_) + ", channel " + channel_),
      row(row_),
      channel(std::move(channel_)) {}

Eigen::Index Recording::channel_index(const std::string& name) const {
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(channels.size()); ++i) {
        if (channels[i].name == name) return i;
    }
    return -1;
}

Eigen::Ref<const Eigen::ArrayXd> Recording::channel(const std::string& name) const {
    const Eigen::Index i = channel_index(name);
    if (i < 0) throw MissingChannel("channel not present: " + name);
    return samples.col(i).array();
}

void check_invariants(const Recording& rec) {
    if (!(rec.fs_hz > 0.0)) throw InvalidSamplingRate("fs_hz must be > 0");
    if (rec.samples.rows() < 1) throw MalformedCsv("recording has no samples");
    if (rec.samples.cols() != static_cast<Eigen::Index>(rec.channels.size())) {
        throw ChannelMismatch("channel list does not match sample columns");
    }
    if (!rec.samples.allFinite()) {
        for (Eigen::Index c = 0; c < rec.samples.cols(); ++c) {
            for (Eigen::Index r = 0; r < rec.samples.rows(); ++r) {
                if (!std::isfinite(rec.samples(r, c))) {
                    throw NonFiniteSample(static_cast<long>(r), rec.channels[c].name);
                }
            }
        }
    }
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_double(const std::string& s, long row, const std::string& channel) {
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) {
        // from_chars rejects nan/inf spellings and garbage alike
        if (s == "nan" || s == "NaN" || s == "inf" || s == "-inf" || s == "Inf") {
            throw NonFiniteSample(row, channel);
        }
        throw MalformedCsv("cannot parse value '" + s + "' at row " + std::to_string(row));
    }
    if (!std::isfinite(v)) throw NonFiniteSample(row, channel);
    return v;
}

std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

} // namespace

Recording load_recording(const std::filesystem::path& csv_path,
                         const std::filesystem::path& meta_path) {
    std::ifstream meta_in(meta_path);
    if (!meta_in) throw MalformedCsv("cannot open sidecar: " + meta_path.string());
    json meta = json::parse(meta_in);

    Recording rec;
    rec.subject_id = meta.at("subject_id").get<std::string>();
    rec.session = session_from_string(meta.at("session").get<std::string>());
    rec.fs_hz = meta.at("fs_hz").get<double>();
    if (!(rec.fs_hz > 0.0)) throw InvalidSamplingRate("sidecar fs_hz must be > 0");
    rec.reference = meta.value("reference", std::string("A2"));
    rec.group = arm_from_string(meta.at("group").get<std::string>());

    std::ifstream in(csv_path);
    if (!in) throw MalformedCsv("cannot open recording csv: " + csv_path.string());

    std::string line;
    if (!std::getline(in, line)) throw MalformedCsv("empty recording csv");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto header = split_line(line);
    if (header.size() < 2 || header[0] != "time_s") {
        throw MalformedCsv("recording csv header must start with time_s");
    }
    for (std::size_t i = 1; i < header.size(); ++i) {
        if (header[i].empty()) throw MalformedCsv("empty channel name in header");
        rec.channels.push_back(ChannelId{header[i]});
    }
    if (meta.contains("channels")) {
        const auto expected = meta.at("channels").get<std::vector<std::string>>();
        if (expected.size() != rec.channels.size()) {
            throw ChannelMismatch("sidecar channel count differs from csv header");
        }
    }

    const std::size_t n_cols = header.size();
    std::vector<std::vector<double>> cols(rec.channels.size());
    long row = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_line(line);
        if (fields.size() != n_cols) {
            throw MalformedCsv("ragged row " + std::to_string(row) + ": expected " +
                               std::to_string(n_cols) + " fields, got " +
                               std::to_string(fields.size()));
        }
        for (std::size_t c = 1; c < n_cols; ++c) {
            cols[c - 1].push_back(parse_double(fields[c], row, rec.channels[c - 1].name));
        }
        ++row;
    }
    if (row == 0) throw MalformedCsv("recording csv has no sample rows");

    rec.samples.resize(row, static_cast<Eigen::Index>(rec.channels.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) {
        rec.samples.col(static_cast<Eigen::Index>(c)) =
            Eigen::Map<const Eigen::VectorXd>(cols[c].data(), row);
    }
    check_invariants(rec);
    return rec;
}

void save_recording(const Recording& rec,
                    const std::filesystem::path& csv_path,
                    const std::filesystem::path& meta_path) {
    check_invariants(rec);

    std::ofstream out(csv_path, std::ios::binary);
    if (!out) throw MalformedCsv("cannot write recording csv: " + csv_path.string());
    out << "time_s";
    for (const auto& ch : rec.channels) out << ',' << ch.name;
    out << '\n';
    const double dt = 1.0 / rec.fs_hz;
    for (Eigen::Index r = 0; r < rec.samples.rows(); ++r) {
        out << format_double(static_cast<double>(r) * dt);
        for (Eigen::Index c = 0; c < rec.samples.cols(); ++c) {
            out << ',' << format_double(rec.samples(r, c));
        }
        out << '\n';
    }

    json meta;
    meta["subject_id"] = rec.subject_id;
    meta["session"] = to_string(rec.session);
    meta["fs_hz"] = rec.fs_hz;
    meta["reference"] = rec.reference;
    meta["group"] = to_string(rec.group);
    std::ofstream meta_out(meta_path, std::ios::binary);
    if (!meta_out) throw MalformedCsv("cannot write sidecar: " + meta_path.string());
    meta_out << meta.dump(2) << '\n';
}

std::vector<Finding> validate_recording(const Recording& rec, double min_seconds,
                                        double amp_limit_uv) {
    std::vector<Finding> findings;
    if (rec.duration_seconds() < min_seconds) {
        findings.push_back({FindingKind::TooShort, "",
                            "duration " + std::to_string(rec.duration_seconds()) +
                                " s below minimum " + std::to_string(min_seconds) + " s"});
    }
    for (Eigen::Index c = 0; c < rec.samples.cols(); ++c) {
        const auto col = rec.samples.col(c).array();
        const double mean = col.mean();
        const double var = (col - mean).square().sum() /
                           static_cast<double>(std::max<Eigen::Index>(1, col.size() - 1));
        if (var == 0.0) {
            findings.push_back({FindingKind::FlatChannel, rec.channels[c].name,
                                "zero variance on " + rec.channels[c].name});
        }
        const double peak = col.abs().maxCoeff();
        if (peak > amp_limit_uv) {
            findings.push_back({FindingKind::AmplitudeOutOfRange, rec.channels[c].name,
                                "peak |amplitude| " + std::to_string(peak) + " uV on " +
                                    rec.channels[c].name + " exceeds " +
                                    std::to_string(amp_limit_uv) + " uV"});
        }
    }
    return findings;
}

} // namespace kqeeg
