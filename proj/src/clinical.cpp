#include "kqeeg/clinical.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace kqeeg {

std::string to_string(Timepoint t) {
    static const std::array<const char*, kNumTimepoints> names{
        "t0", "t40", "t80", "t120", "t240", "d2", "d3", "d4", "d5", "d6", "d7", "d14"};
    return names[static_cast<std::size_t>(t)];
}

Timepoint timepoint_from_string(const std::string& s) {
    for (int i = 0; i < kNumTimepoints; ++i) {
        if (to_string(static_cast<Timepoint>(i)) == s) return static_cast<Timepoint>(i);
    }
    throw Error("unknown timepoint: " + s);
}

const std::array<Timepoint, kNumTimepoints>& all_timepoints() {
    static const std::array<Timepoint, kNumTimepoints> pts = [] {
        std::array<Timepoint, kNumTimepoints> a{};
        for (int i = 0; i < kNumTimepoints; ++i) a[static_cast<std::size_t>(i)] = static_cast<Timepoint>(i);
        return a;
    }();
    return pts;
}

double HdrsSeries::at(Timepoint t) const {
    const auto it = scores.find(t);
    if (it == scores.end()) {
        throw MissingTimepoint("score missing at " + to_string(t));
    }
    return it->second;
}

void HdrsSeries::set(Timepoint t, double score) {
    if (!(score >= 0.0) || !(score <= 52.0)) {
        throw InvalidScore("HDRS-17 score out of [0, 52]: " + std::to_string(score));
    }
    scores[t] = score;
}

std::string to_string(ResponseLabel l) {
    switch (l) {
        case ResponseLabel::Responder: return "responder";
        case ResponseLabel::NonResponder: return "non_responder";
        case ResponseLabel::Unlabeled: return "unlabeled";
    }
    return "?";
}

ResponseLabel label_from_string(const std::string& s) {
    if (s == "responder") return ResponseLabel::Responder;
    if (s == "non_responder") return ResponseLabel::NonResponder;
    if (s == "unlabeled" || s.empty()) return ResponseLabel::Unlabeled;
    throw Error("unknown response label: " + s);
}

double percent_reduction(const HdrsSeries& hdrs, Timepoint at) {
    const double baseline = hdrs.at(Timepoint::T0);
    const double later = hdrs.at(at);
    if (!(baseline > 0.0)) throw ZeroBaseline("baseline HDRS score must be > 0");
    return (baseline - later) / baseline;
}

ResponseLabel label_responder(const HdrsSeries& hdrs, double threshold, Timepoint at) {
    return percent_reduction(hdrs, at) >= threshold ? ResponseLabel::Responder
                                                    : ResponseLabel::NonResponder;
}

namespace {

struct MeanSd {
    double mean = 0.0;
    double sd = 0.0;
};

MeanSd mean_sd(const std::vector<double>& v) {
    MeanSd out;
    if (v.empty()) return out;
    double sum = 0.0;
    for (double x : v) sum += x;
    out.mean = sum / static_cast<double>(v.size());
    if (v.size() > 1) {
        double ss = 0.0;
        for (double x : v) ss += (x - out.mean) * (x - out.mean);
        out.sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
    }
    return out;
}

} // namespace

std::vector<GroupSummary> cohort_summary(const std::vector<SubjectRecord>& records,
                                         Timepoint at) {
    if (records.empty()) throw EmptyCohort("cohort_summary requires at least one record");

    std::vector<GroupSummary> out;
    for (const TrialArm arm : {TrialArm::A_Ket05, TrialArm::B_Ket02, TrialArm::C_Saline}) {
        GroupSummary g;
        g.group = arm;
        std::vector<double> baselines, ats, rates;
        for (const auto& rec : records) {
            if (rec.group != arm) continue;
            ++g.n;
            if (rec.label == ResponseLabel::Responder) ++g.n_responders;
            if (rec.hdrs.has(Timepoint::T0)) baselines.push_back(rec.hdrs.at(Timepoint::T0));
            if (rec.hdrs.has(at)) {
                ats.push_back(rec.hdrs.at(at));
                if (rec.hdrs.has(Timepoint::T0) && rec.hdrs.at(Timepoint::T0) > 0.0) {
                    rates.push_back(percent_reduction(rec.hdrs, at));
                }
            }
        }
        if (g.n == 0) continue;
        const auto b = mean_sd(baselines);
        const auto a = mean_sd(ats);
        const auto r = mean_sd(rates);
        g.baseline_mean = b.mean;
        g.baseline_sd = b.sd;
        g.at_mean = a.mean;
        g.at_sd = a.sd;
        g.rate_mean = r.mean;
        g.rate_sd = r.sd;
        g.n_with_at = static_cast<int>(ats.size());
        g.degenerate_n = g.n == 1;
        out.push_back(g);
    }
    if (out.empty()) throw EmptyCohort("no records in any trial arm");
    return out;
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::string format_score(double v) {
    // Integers print without a decimal point; fractional values keep full
    // precision for round tripping.
    if (v == std::floor(v) && std::abs(v) < 1e15) {
        return std::to_string(static_cast<long long>(v));
    }
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

} // namespace

std::vector<SubjectRecord> load_cohort_csv(const std::filesystem::path& path,
                                           double responder_threshold, Timepoint label_at) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open cohort csv: " + path.string());

    std::string line;
    if (!std::getline(in, line)) throw Error("empty cohort csv");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto header = split_csv(line);
    if (header.size() != 2 + kNumTimepoints || header[0] != "subject_id" || header[1] != "group") {
        throw Error("unexpected cohort csv header");
    }

    std::vector<SubjectRecord> records;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_csv(line);
        if (fields.size() != header.size()) {
            throw Error("ragged cohort csv row for subject " + (fields.empty() ? "?" : fields[0]));
        }
        SubjectRecord rec;
        rec.subject_id = fields[0];
        rec.group = arm_from_string(fields[1]);
        for (int i = 0; i < kNumTimepoints; ++i) {
            const std::string& cell = fields[static_cast<std::size_t>(2 + i)];
            if (cell.empty()) continue;
            rec.hdrs.set(static_cast<Timepoint>(i), std::stod(cell));
        }
        if (rec.hdrs.has(Timepoint::T0) && rec.hdrs.has(label_at) &&
            rec.hdrs.at(Timepoint::T0) > 0.0) {
            rec.label = label_responder(rec.hdrs, responder_threshold, label_at);
        }
        records.push_back(std::move(rec));
    }
    return records;
}

void save_cohort_csv(const std::vector<SubjectRecord>& records,
                     const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write cohort csv: " + path.string());
    out << "subject_id,group";
    for (const Timepoint t : all_timepoints()) out << ',' << to_string(t);
    out << '\n';
    for (const auto& rec : records) {
        out << rec.subject_id << ',' << to_string(rec.group);
        for (const Timepoint t : all_timepoints()) {
            out << ',';
            if (rec.hdrs.has(t)) out << format_score(rec.hdrs.at(t));
        }
        out << '\n';
    }
}

} // namespace kqeeg
