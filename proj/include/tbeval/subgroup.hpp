#pragma once

// Cohort stratification: declarative case filters, technical-issue grouping,
// and the abnormality ("TB or other finding") evaluation slices.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "tbeval/cohort.hpp"
#include "tbeval/roc.hpp"

namespace tbeval {

enum class StratumOp { eq, ne, lt, ge, in_set, any_of, in_range };

/// Declarative filter over CaseRecord fields and per-case read aggregates.
/// field names: dataset, sex, hiv_status, smear_status, tb_history, tb_label,
/// age, technical_issue_count, or a symptom name; op any_of takes a list of
/// symptom names; in_range takes {lo, hi} with lo <= x < hi.
struct StratumSpec {
    std::string name;
    std::string field;
    StratumOp op = StratumOp::eq;
    std::vector<std::string> values;
    std::size_t min_cases = 0;
};

struct StratifyResult {
    Cohort cohort;
    std::size_t n_excluded_unknown = 0;  // relevant field unknown on these cases
    bool suppressed = false;             // matched fewer than min_cases
};

namespace detail {

enum class Tri { yes, no, unknown };

inline std::optional<int> symptom_index(const std::string& name) {
    for (std::size_t i = 0; i < kSymptomNames.size(); ++i)
        if (name == kSymptomNames[i]) return static_cast<int>(i);
    return std::nullopt;
}

inline double spec_number(const StratumSpec& spec, std::size_t i = 0) {
    if (spec.values.size() <= i)
        throw Error("stratum '" + spec.name + "': missing numeric value");
    try {
        return std::stod(spec.values[i]);
    } catch (...) {
        throw Error("stratum '" + spec.name + "': unparseable number '" + spec.values[i] + "'");
    }
}

inline Tri match_string(const StratumSpec& spec, const std::string& actual) {
    switch (spec.op) {
        case StratumOp::eq: return actual == spec.values.at(0) ? Tri::yes : Tri::no;
        case StratumOp::ne: return actual != spec.values.at(0) ? Tri::yes : Tri::no;
        case StratumOp::in_set:
            return std::find(spec.values.begin(), spec.values.end(), actual) != spec.values.end()
                       ? Tri::yes
                       : Tri::no;
        default: throw Error("stratum '" + spec.name + "': operator not valid for strings");
    }
}

inline Tri match_number(const StratumSpec& spec, double x) {
    switch (spec.op) {
        case StratumOp::eq: return x == spec_number(spec) ? Tri::yes : Tri::no;
        case StratumOp::ne: return x != spec_number(spec) ? Tri::yes : Tri::no;
        case StratumOp::lt: return x < spec_number(spec) ? Tri::yes : Tri::no;
        case StratumOp::ge: return x >= spec_number(spec) ? Tri::yes : Tri::no;
        case StratumOp::in_range:
            return (x >= spec_number(spec, 0) && x < spec_number(spec, 1)) ? Tri::yes : Tri::no;
        default: throw Error("stratum '" + spec.name + "': operator not valid for numbers");
    }
}

inline Tri evaluate(const StratumSpec& spec, const CaseRecord& c,
                    const std::map<std::string, std::size_t>& issue_counts) {
    if (spec.field == "dataset") return match_string(spec, c.dataset);
    if (spec.field == "tb_label") return match_number(spec, c.tb_positive ? 1.0 : 0.0);
    if (spec.field == "sex") {
        if (c.sex == Sex::unknown) return Tri::unknown;
        return match_string(spec, to_string(c.sex));
    }
    if (spec.field == "hiv_status" || spec.field == "smear_status") {
        TriState v = spec.field == "hiv_status" ? c.hiv_status : c.smear_status;
        if (v == TriState::unknown) return Tri::unknown;
        return match_string(spec, to_string(v));
    }
    if (spec.field == "tb_history") {
        if (!c.tb_history) return Tri::unknown;
        return match_number(spec, *c.tb_history ? 1.0 : 0.0);
    }
    if (spec.field == "age") {
        if (!c.age) return Tri::unknown;
        return match_number(spec, static_cast<double>(*c.age));
    }
    if (spec.field == "technical_issue_count") {
        auto it = issue_counts.find(c.case_id);
        double count = it == issue_counts.end() ? 0.0 : static_cast<double>(it->second);
        return match_number(spec, count);
    }
    if (auto idx = symptom_index(spec.field)) {
        if (!c.symptoms[*idx]) return Tri::unknown;
        return match_number(spec, *c.symptoms[*idx] ? 1.0 : 0.0);
    }
    if (spec.field == "symptom" && spec.op == StratumOp::any_of) {
        bool any_unknown = false;
        for (const auto& name : spec.values) {
            auto idx = symptom_index(name);
            if (!idx) throw Error("stratum '" + spec.name + "': unknown symptom '" + name + "'");
            if (!c.symptoms[*idx])
                any_unknown = true;
            else if (*c.symptoms[*idx])
                return Tri::yes;
        }
        return any_unknown ? Tri::unknown : Tri::no;
    }
    throw Error("stratum '" + spec.name + "': unknown field '" + spec.field + "'");
}

}  // namespace detail

/// Number of distinct non-excluded readers flagging each case with a
/// technical issue. Cases with zero flags are absent from the map.
inline std::map<std::string, std::size_t> technical_issue_counts(const Cohort& cohort) {
    std::map<std::string, std::set<std::string>> flaggers;
    for (const auto& read : cohort.reads) {
        if (!read.technical_issue) continue;
        if (cohort.is_excluded(read.reader_id)) continue;
        flaggers[read.case_id].insert(read.reader_id);
    }
    std::map<std::string, std::size_t> counts;
    for (const auto& [case_id, readers] : flaggers) counts[case_id] = readers.size();
    return counts;
}

/// Cases satisfying the predicate, with reads restricted to them. Cases on
/// which the relevant field is unknown are left out and counted separately.
inline StratifyResult stratify(const Cohort& cohort, const StratumSpec& spec) {
    auto issue_counts = technical_issue_counts(cohort);
    StratifyResult out;
    std::set<std::string> kept;
    for (const auto& c : cohort.cases) {
        switch (detail::evaluate(spec, c, issue_counts)) {
            case detail::Tri::yes:
                out.cohort.cases.push_back(c);
                kept.insert(c.case_id);
                break;
            case detail::Tri::unknown: out.n_excluded_unknown += 1; break;
            case detail::Tri::no: break;
        }
    }
    for (const auto& read : cohort.reads)
        if (kept.count(read.case_id)) out.cohort.reads.push_back(read);
    out.cohort.readers = cohort.readers;
    out.cohort.excluded_readers = cohort.excluded_readers;
    out.suppressed = out.cohort.cases.size() < spec.min_cases;
    return out;
}

/// Exact-count groups {0, 1, 2, >=3} and cumulative groups {>=1, >=2} by the
/// number of distinct non-excluded readers flagging a technical issue.
inline std::vector<std::pair<std::string, Cohort>> technical_issue_groups(const Cohort& cohort) {
    auto counts = technical_issue_counts(cohort);
    auto count_of = [&](const CaseRecord& c) {
        auto it = counts.find(c.case_id);
        return it == counts.end() ? std::size_t{0} : it->second;
    };
    std::vector<std::pair<std::string, Cohort>> groups;
    auto build = [&](const std::string& label, auto&& pred) {
        Cohort g;
        std::set<std::string> kept;
        for (const auto& c : cohort.cases)
            if (pred(count_of(c))) {
                g.cases.push_back(c);
                kept.insert(c.case_id);
            }
        for (const auto& read : cohort.reads)
            if (kept.count(read.case_id)) g.reads.push_back(read);
        g.readers = cohort.readers;
        g.excluded_readers = cohort.excluded_readers;
        groups.emplace_back(label, std::move(g));
    };
    build("0", [](std::size_t n) { return n == 0; });
    build("1", [](std::size_t n) { return n == 1; });
    build("2", [](std::size_t n) { return n == 2; });
    build(">=3", [](std::size_t n) { return n >= 3; });
    build(">=1", [](std::size_t n) { return n >= 1; });
    build(">=2", [](std::size_t n) { return n >= 2; });
    return groups;
}

enum class AbnormalityMode { tb_or_abnormal, abnormal_only };

/// Scores+labels for the abnormality analyses. Ground truth is a vote among
/// exactly three designated readers' abnormal_call: positive when at least
/// k_of_3 called abnormal. tb_or_abnormal keeps every case, labels it
/// positive if TB-positive or vote-positive, and scores it with
/// dls_tb_score + dls_abnormal_score (unclamped; AUC is rank-based).
/// abnormal_only drops TB-positive cases and scores with dls_abnormal_score.
inline Sample abnormality_eval(const Cohort& cohort,
                               std::span<const std::string> truth_reader_ids, int k_of_3,
                               AbnormalityMode mode) {
    if (truth_reader_ids.size() != 3)
        throw Error("abnormality_eval: exactly 3 ground-truth readers must be designated");
    if (k_of_3 < 1 || k_of_3 > 3) throw Error("abnormality_eval: k_of_3 must be in {1,2,3}");

    std::map<std::pair<std::string, std::string>, std::optional<bool>> abnormal;
    for (const auto& read : cohort.reads)
        abnormal[{read.reader_id, read.case_id}] = read.abnormal_call;

    std::vector<std::string> missing;
    Sample out;
    for (const auto& c : cohort.cases) {
        if (mode == AbnormalityMode::abnormal_only && c.tb_positive) continue;
        int votes = 0;
        bool incomplete = false;
        for (const auto& reader_id : truth_reader_ids) {
            auto it = abnormal.find({reader_id, c.case_id});
            if (it == abnormal.end() || !it->second.has_value()) {
                incomplete = true;
                break;
            }
            votes += *it->second ? 1 : 0;
        }
        if (incomplete) {
            missing.push_back(c.case_id);
            continue;
        }
        bool vote_positive = votes >= k_of_3;
        if (mode == AbnormalityMode::tb_or_abnormal) {
            if (!c.dls_abnormal_score) {
                missing.push_back(c.case_id);
                continue;
            }
            out.labels.push_back((c.tb_positive || vote_positive) ? 1 : 0);
            out.scores.push_back(c.dls_tb_score + *c.dls_abnormal_score);
        } else {
            if (!c.dls_abnormal_score) {
                missing.push_back(c.case_id);
                continue;
            }
            out.labels.push_back(vote_positive ? 1 : 0);
            out.scores.push_back(*c.dls_abnormal_score);
        }
    }
    if (!missing.empty()) {
        std::string msg = "abnormality_eval: cases lacking the 3 designated abnormal calls "
                          "or an abnormality score:";
        for (std::size_t i = 0; i < missing.size() && i < 20; ++i) msg += " " + missing[i];
        if (missing.size() > 20) msg += " (+" + std::to_string(missing.size() - 20) + " more)";
        throw Error(msg);
    }
    return out;
}

/// Age-band strata at the deciles of the observed (known) ages.
inline std::vector<StratumSpec> age_decile_strata(const Cohort& cohort, std::size_t n_bands = 10) {
    if (n_bands < 1) throw Error("age_decile_strata: n_bands must be >= 1");
    std::vector<double> ages;
    for (const auto& c : cohort.cases)
        if (c.age) ages.push_back(static_cast<double>(*c.age));
    if (ages.empty()) return {};
    std::vector<StratumSpec> out;
    for (std::size_t i = 0; i < n_bands; ++i) {
        double lo = quantile_linear(ages, static_cast<double>(i) / n_bands);
        double hi = quantile_linear(ages, static_cast<double>(i + 1) / n_bands);
        if (i + 1 == n_bands) hi += 1.0;  // make the last band inclusive of the max age
        if (!out.empty() && lo == std::stod(out.back().values[0]) &&
            hi == std::stod(out.back().values[1]))
            continue;  // collapse duplicate bands when ages are heavily tied
        StratumSpec spec;
        spec.name = "age_band_" + std::to_string(out.size() + 1);
        spec.field = "age";
        spec.op = StratumOp::in_range;
        spec.values = {csv::format_real(lo), csv::format_real(hi)};
        out.push_back(std::move(spec));
    }
    return out;
}

inline const char* to_string(StratumOp op) {
    switch (op) {
        case StratumOp::eq: return "=";
        case StratumOp::ne: return "!=";
        case StratumOp::lt: return "<";
        case StratumOp::ge: return ">=";
        case StratumOp::in_set: return "in";
        case StratumOp::any_of: return "any-of";
        default: return "range";
    }
}

inline StratumOp stratum_op_from_string(const std::string& s) {
    if (s == "=" || s == "eq") return StratumOp::eq;
    if (s == "!=" || s == "ne") return StratumOp::ne;
    if (s == "<" || s == "lt") return StratumOp::lt;
    if (s == ">=" || s == "ge") return StratumOp::ge;
    if (s == "in") return StratumOp::in_set;
    if (s == "any-of") return StratumOp::any_of;
    if (s == "range") return StratumOp::in_range;
    throw Error("unknown stratum operator '" + s + "'");
}

}  // namespace tbeval
