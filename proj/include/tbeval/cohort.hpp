#pragma once

// Case records, reader reads and reader metadata: loading from the fixed CSV
// schemas, dataset combination, validation, and outlier-reader detection.

#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "tbeval/csv.hpp"
#include "tbeval/errors.hpp"
#include "tbeval/stats.hpp"

namespace tbeval {

enum class Sex { female, male, unknown };
enum class TriState { positive, negative, unknown };
enum class CohortTag { india_based, us_based, other };

inline constexpr std::array<const char*, 6> kSymptomNames = {
    "cough", "weight_loss", "fever", "night_sweats", "shortness_of_breath", "chest_pain"};

struct CaseRecord {
    std::string case_id;
    std::string dataset;
    std::string patient_id;
    bool tb_positive = false;
    double dls_tb_score = 0.0;
    std::optional<double> dls_abnormal_score;
    std::optional<unsigned> age;
    Sex sex = Sex::unknown;
    TriState hiv_status = TriState::unknown;
    TriState smear_status = TriState::unknown;
    std::optional<bool> tb_history;
    // Indexed like kSymptomNames; nullopt = unknown.
    std::array<std::optional<bool>, 6> symptoms{};

    bool operator==(const CaseRecord&) const = default;
};

struct ReaderRead {
    std::string case_id;
    std::string reader_id;
    bool tb_call = false;
    std::optional<bool> abnormal_call;
    bool technical_issue = false;

    bool operator==(const ReaderRead&) const = default;
};

struct ReaderInfo {
    std::string reader_id;
    CohortTag cohort_tag = CohortTag::other;
    std::optional<unsigned> years_experience;

    bool operator==(const ReaderInfo&) const = default;
};

struct Cohort {
    std::vector<CaseRecord> cases;
    std::vector<ReaderRead> reads;
    std::vector<ReaderInfo> readers;
    std::set<std::string> excluded_readers;

    std::size_t n_positive() const {
        std::size_t n = 0;
        for (const auto& c : cases) n += c.tb_positive ? 1 : 0;
        return n;
    }
    std::size_t n_negative() const { return cases.size() - n_positive(); }

    const CaseRecord* find_case(const std::string& case_id) const {
        for (const auto& c : cases)
            if (c.case_id == case_id) return &c;
        return nullptr;
    }
    const ReaderInfo* find_reader(const std::string& reader_id) const {
        for (const auto& r : readers)
            if (r.reader_id == reader_id) return &r;
        return nullptr;
    }
    bool is_excluded(const std::string& reader_id) const {
        return excluded_readers.count(reader_id) > 0;
    }
};

inline const std::vector<std::string>& cases_header() {
    static const std::vector<std::string> h = {
        "case_id", "dataset", "patient_id", "tb_label", "dls_tb_score", "dls_abnormal_score",
        "age", "sex", "hiv_status", "smear_status", "tb_history", "cough", "weight_loss",
        "fever", "night_sweats", "shortness_of_breath", "chest_pain"};
    return h;
}
inline const std::vector<std::string>& reads_header() {
    static const std::vector<std::string> h = {"case_id", "reader_id", "tb_call", "abnormal_call",
                                               "technical_issue"};
    return h;
}
inline const std::vector<std::string>& readers_header() {
    static const std::vector<std::string> h = {"reader_id", "cohort_tag", "years_experience"};
    return h;
}

namespace detail {

inline Sex parse_sex(const csv::Reader& r, const std::vector<std::string>& row, std::size_t col) {
    const std::string& s = row[col];
    if (s.empty() || s == "unknown") return Sex::unknown;
    if (s == "female") return Sex::female;
    if (s == "male") return Sex::male;
    r.fail(col + 1, "expected female/male/unknown, got '" + s + "'");
}

inline TriState parse_tristate(const csv::Reader& r, const std::vector<std::string>& row,
                               std::size_t col) {
    const std::string& s = row[col];
    if (s.empty() || s == "unknown") return TriState::unknown;
    if (s == "positive") return TriState::positive;
    if (s == "negative") return TriState::negative;
    r.fail(col + 1, "expected positive/negative/unknown, got '" + s + "'");
}

inline CohortTag parse_cohort_tag(const csv::Reader& r, const std::vector<std::string>& row,
                                  std::size_t col) {
    const std::string& s = row[col];
    if (s == "india_based") return CohortTag::india_based;
    if (s == "us_based") return CohortTag::us_based;
    if (s == "other") return CohortTag::other;
    r.fail(col + 1, "expected india_based/us_based/other, got '" + s + "'");
}

inline double parse_unit_real(const csv::Reader& r, const std::vector<std::string>& row,
                              std::size_t col) {
    double v = r.parse_real(row, col);
    if (!(v >= 0.0 && v <= 1.0)) r.fail(col + 1, "score outside [0,1]: " + row[col]);
    return v;
}

}  // namespace detail

inline const char* to_string(Sex s) {
    switch (s) {
        case Sex::female: return "female";
        case Sex::male: return "male";
        default: return "unknown";
    }
}
inline const char* to_string(TriState s) {
    switch (s) {
        case TriState::positive: return "positive";
        case TriState::negative: return "negative";
        default: return "unknown";
    }
}
inline const char* to_string(CohortTag t) {
    switch (t) {
        case CohortTag::india_based: return "india_based";
        case CohortTag::us_based: return "us_based";
        default: return "other";
    }
}

inline Cohort load_cohort(const std::string& cases_path, const std::string& reads_path,
                          const std::string& readers_path) {
    Cohort cohort;

    {
        csv::Reader r(cases_path, cases_header());
        std::unordered_set<std::string> seen_ids;
        while (auto row_opt = r.next()) {
            const auto& row = *row_opt;
            CaseRecord c;
            c.case_id = r.require_nonempty(row, 0);
            c.dataset = r.require_nonempty(row, 1);
            c.patient_id = r.require_nonempty(row, 2);
            c.tb_positive = r.parse_binary(row, 3);
            c.dls_tb_score = detail::parse_unit_real(r, row, 4);
            if (!row[5].empty()) c.dls_abnormal_score = detail::parse_unit_real(r, row, 5);
            if (!row[6].empty()) {
                long age = r.parse_integer(row, 6);
                if (age < 0) r.fail(7, "negative age");
                c.age = static_cast<unsigned>(age);
            }
            c.sex = detail::parse_sex(r, row, 7);
            c.hiv_status = detail::parse_tristate(r, row, 8);
            c.smear_status = detail::parse_tristate(r, row, 9);
            c.tb_history = r.parse_optional_binary(row, 10);
            for (std::size_t s = 0; s < 6; ++s)
                c.symptoms[s] = r.parse_optional_binary(row, 11 + s);
            if (!seen_ids.insert(c.case_id).second)
                throw IntegrityError(cases_path + ": duplicate case_id '" + c.case_id + "'");
            cohort.cases.push_back(std::move(c));
        }
    }

    {
        csv::Reader r(readers_path, readers_header());
        std::unordered_set<std::string> seen_ids;
        while (auto row_opt = r.next()) {
            const auto& row = *row_opt;
            ReaderInfo info;
            info.reader_id = r.require_nonempty(row, 0);
            info.cohort_tag = detail::parse_cohort_tag(r, row, 1);
            if (!row[2].empty()) {
                long y = r.parse_integer(row, 2);
                if (y < 0) r.fail(3, "negative years_experience");
                info.years_experience = static_cast<unsigned>(y);
            }
            if (!seen_ids.insert(info.reader_id).second)
                throw IntegrityError(readers_path + ": duplicate reader_id '" + info.reader_id +
                                     "'");
            cohort.readers.push_back(std::move(info));
        }
    }

    {
        csv::Reader r(reads_path, reads_header());
        std::unordered_set<std::string> seen_pairs;
        std::unordered_set<std::string> case_ids;
        std::unordered_set<std::string> reader_ids;
        for (const auto& c : cohort.cases) case_ids.insert(c.case_id);
        for (const auto& info : cohort.readers) reader_ids.insert(info.reader_id);
        while (auto row_opt = r.next()) {
            const auto& row = *row_opt;
            ReaderRead read;
            read.case_id = r.require_nonempty(row, 0);
            read.reader_id = r.require_nonempty(row, 1);
            read.tb_call = r.parse_binary(row, 2);
            read.abnormal_call = r.parse_optional_binary(row, 3);
            read.technical_issue = r.parse_binary(row, 4);
            if (!case_ids.count(read.case_id))
                throw IntegrityError(reads_path + ": read references unknown case_id '" +
                                     read.case_id + "'");
            if (!reader_ids.count(read.reader_id))
                throw IntegrityError(reads_path + ": read references unknown reader_id '" +
                                     read.reader_id + "'");
            if (!seen_pairs.insert(read.case_id + "\x1f" + read.reader_id).second)
                throw IntegrityError(reads_path + ": duplicate read for (case_id='" +
                                     read.case_id + "', reader_id='" + read.reader_id + "')");
            cohort.reads.push_back(std::move(read));
        }
    }

    return cohort;
}

inline void write_cohort(const Cohort& cohort, const std::string& cases_path,
                         const std::string& reads_path, const std::string& readers_path) {
    {
        csv::Writer w(cases_path, cases_header());
        for (const auto& c : cohort.cases) {
            std::vector<std::string> row = {
                c.case_id,
                c.dataset,
                c.patient_id,
                c.tb_positive ? "1" : "0",
                csv::format_real(c.dls_tb_score),
                c.dls_abnormal_score ? csv::format_real(*c.dls_abnormal_score) : "",
                c.age ? std::to_string(*c.age) : "",
                c.sex == Sex::unknown ? "" : to_string(c.sex),
                c.hiv_status == TriState::unknown ? "" : to_string(c.hiv_status),
                c.smear_status == TriState::unknown ? "" : to_string(c.smear_status),
                c.tb_history ? (*c.tb_history ? "1" : "0") : ""};
            for (const auto& s : c.symptoms) row.push_back(s ? (*s ? "1" : "0") : "");
            w.write_row(row);
        }
    }
    {
        csv::Writer w(readers_path, readers_header());
        for (const auto& info : cohort.readers)
            w.write_row({info.reader_id, to_string(info.cohort_tag),
                         info.years_experience ? std::to_string(*info.years_experience) : ""});
    }
    {
        csv::Writer w(reads_path, reads_header());
        for (const auto& read : cohort.reads)
            w.write_row({read.case_id, read.reader_id, read.tb_call ? "1" : "0",
                         read.abnormal_call ? (*read.abnormal_call ? "1" : "0") : "",
                         read.technical_issue ? "1" : "0"});
    }
}

/// Union of cohorts with disjoint case sets. Shared readers are merged;
/// conflicting metadata for the same reader_id is an integrity error.
inline Cohort combine_datasets(const std::vector<Cohort>& cohorts) {
    Cohort out;
    std::unordered_set<std::string> case_ids;
    std::unordered_map<std::string, ReaderInfo> readers_by_id;
    std::vector<std::string> reader_order;
    for (const auto& cohort : cohorts) {
        for (const auto& c : cohort.cases) {
            if (!case_ids.insert(c.case_id).second)
                throw IntegrityError("combine_datasets: case_id '" + c.case_id +
                                     "' appears in more than one cohort");
            out.cases.push_back(c);
        }
        for (const auto& info : cohort.readers) {
            auto it = readers_by_id.find(info.reader_id);
            if (it == readers_by_id.end()) {
                readers_by_id.emplace(info.reader_id, info);
                reader_order.push_back(info.reader_id);
            } else if (!(it->second == info)) {
                throw IntegrityError("combine_datasets: conflicting metadata for reader '" +
                                     info.reader_id + "'");
            }
        }
        out.reads.insert(out.reads.end(), cohort.reads.begin(), cohort.reads.end());
        out.excluded_readers.insert(cohort.excluded_readers.begin(),
                                    cohort.excluded_readers.end());
    }
    for (const auto& id : reader_order) out.readers.push_back(readers_by_id.at(id));
    return out;
}

/// Positive-call rate per reader over non-excluded reads. Readers with zero
/// reads are omitted; their ids are appended to `warnings` when provided.
inline std::map<std::string, double> reader_positive_rates(
    const Cohort& cohort, bool include_excluded = false,
    std::vector<std::string>* warnings = nullptr) {
    std::map<std::string, std::pair<std::size_t, std::size_t>> counts;  // reader -> (pos, total)
    for (const auto& info : cohort.readers) {
        if (!include_excluded && cohort.is_excluded(info.reader_id)) continue;
        counts[info.reader_id];
    }
    for (const auto& read : cohort.reads) {
        auto it = counts.find(read.reader_id);
        if (it == counts.end()) continue;
        it->second.second += 1;
        if (read.tb_call) it->second.first += 1;
    }
    std::map<std::string, double> rates;
    for (const auto& [id, c] : counts) {
        if (c.second == 0) {
            if (warnings) warnings->push_back("reader '" + id + "' has no reads; omitted");
            continue;
        }
        rates[id] = static_cast<double>(c.first) / static_cast<double>(c.second);
    }
    return rates;
}

/// Tukey fences on positive-call rates: strictly below Q1 - 1.5*IQR or
/// strictly above Q3 + 1.5*IQR, quartiles by linear interpolation at p*(n-1).
inline std::set<std::string> detect_outlier_readers(const std::map<std::string, double>& rates) {
    if (rates.size() < 4)
        throw Error("detect_outlier_readers: need >= 4 readers, got " +
                    std::to_string(rates.size()));
    std::vector<double> values;
    values.reserve(rates.size());
    for (const auto& [id, rate] : rates) values.push_back(rate);
    double q1 = quantile_linear(values, 0.25);
    double q3 = quantile_linear(values, 0.75);
    double iqr = q3 - q1;
    double lo = q1 - 1.5 * iqr;
    double hi = q3 + 1.5 * iqr;
    std::set<std::string> out;
    for (const auto& [id, rate] : rates)
        if (rate < lo || rate > hi) out.insert(id);
    return out;
}

struct DatasetCounts {
    std::size_t n_cases = 0;
    std::size_t n_positive = 0;
    std::size_t n_negative = 0;
};

struct ValidationReport {
    std::map<std::string, DatasetCounts> per_dataset;
    std::size_t n_cases = 0;
    std::size_t n_positive = 0;
    std::size_t n_negative = 0;
    std::size_t n_readers = 0;
    std::size_t n_reads = 0;
    std::size_t n_excluded_readers = 0;
    std::map<std::string, std::size_t> missing_attributes;  // attribute -> #cases unknown
    std::vector<std::string> violations;

    bool valid() const { return violations.empty(); }
};

inline ValidationReport validate(const Cohort& cohort) {
    ValidationReport rep;
    rep.n_cases = cohort.cases.size();
    rep.n_readers = cohort.readers.size();
    rep.n_reads = cohort.reads.size();
    rep.n_excluded_readers = cohort.excluded_readers.size();

    std::unordered_set<std::string> case_ids, reader_ids;
    std::map<std::string, std::vector<std::string>> cases_per_patient;  // dataset\x1fpatient -> ids
    for (const auto& c : cohort.cases) {
        auto& d = rep.per_dataset[c.dataset];
        d.n_cases += 1;
        (c.tb_positive ? d.n_positive : d.n_negative) += 1;
        (c.tb_positive ? rep.n_positive : rep.n_negative) += 1;
        if (!case_ids.insert(c.case_id).second)
            rep.violations.push_back("duplicate case_id '" + c.case_id + "'");
        cases_per_patient[c.dataset + "\x1f" + c.patient_id].push_back(c.case_id);
        if (!(c.dls_tb_score >= 0.0 && c.dls_tb_score <= 1.0))
            rep.violations.push_back("case '" + c.case_id + "': dls_tb_score outside [0,1]");
        if (c.dls_abnormal_score && !(*c.dls_abnormal_score >= 0.0 && *c.dls_abnormal_score <= 1.0))
            rep.violations.push_back("case '" + c.case_id + "': dls_abnormal_score outside [0,1]");
        if (!c.age) rep.missing_attributes["age"] += 1;
        if (c.sex == Sex::unknown) rep.missing_attributes["sex"] += 1;
        if (c.hiv_status == TriState::unknown) rep.missing_attributes["hiv_status"] += 1;
        if (c.smear_status == TriState::unknown) rep.missing_attributes["smear_status"] += 1;
        if (!c.tb_history) rep.missing_attributes["tb_history"] += 1;
        for (std::size_t s = 0; s < 6; ++s)
            if (!c.symptoms[s]) rep.missing_attributes[kSymptomNames[s]] += 1;
    }
    for (const auto& [key, ids] : cases_per_patient) {
        if (ids.size() > 1) {
            auto sep = key.find('\x1f');
            rep.violations.push_back("patient '" + key.substr(sep + 1) + "' has " +
                                     std::to_string(ids.size()) + " cases in dataset '" +
                                     key.substr(0, sep) + "'");
        }
    }
    for (const auto& info : cohort.readers)
        if (!reader_ids.insert(info.reader_id).second)
            rep.violations.push_back("duplicate reader_id '" + info.reader_id + "'");
    std::unordered_set<std::string> read_pairs;
    for (const auto& read : cohort.reads) {
        if (!case_ids.count(read.case_id))
            rep.violations.push_back("read references unknown case_id '" + read.case_id + "'");
        if (!reader_ids.count(read.reader_id))
            rep.violations.push_back("read references unknown reader_id '" + read.reader_id +
                                     "'");
        if (!read_pairs.insert(read.case_id + "\x1f" + read.reader_id).second)
            rep.violations.push_back("duplicate read (case '" + read.case_id + "', reader '" +
                                     read.reader_id + "')");
    }
    for (const auto& id : cohort.excluded_readers)
        if (!reader_ids.count(id))
            rep.violations.push_back("excluded reader '" + id + "' not in reader list");
    return rep;
}

}  // namespace tbeval
