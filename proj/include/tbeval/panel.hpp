#pragma once

// Bridges between cohort data and score/label slices: extracting the model
// sample, per-reader empirical performance, and reader-panel membership.

#include <string>
#include <vector>

#include "tbeval/cohort.hpp"
#include "tbeval/roc.hpp"

namespace tbeval {

/// Model TB scores with ground-truth labels, in case order.
inline Sample tb_sample(const Cohort& cohort) {
    Sample s;
    s.scores.reserve(cohort.cases.size());
    s.labels.reserve(cohort.cases.size());
    for (const auto& c : cohort.cases) {
        s.scores.push_back(c.dls_tb_score);
        s.labels.push_back(c.tb_positive ? 1 : 0);
    }
    return s;
}

/// Non-excluded readers carrying the given tag, in reader-list order.
inline std::vector<std::string> panel_reader_ids(const Cohort& cohort, CohortTag tag,
                                                 bool include_excluded = false) {
    std::vector<std::string> ids;
    for (const auto& info : cohort.readers) {
        if (info.cohort_tag != tag) continue;
        if (!include_excluded && cohort.is_excluded(info.reader_id)) continue;
        ids.push_back(info.reader_id);
    }
    return ids;
}

/// Empirical sensitivity/specificity of one reader's TB calls over the cases
/// that reader actually read in this cohort.
inline PerformancePoint reader_performance(const Cohort& cohort, const std::string& reader_id) {
    std::size_t tp = 0, fn = 0, tn = 0, fp = 0;
    for (const auto& read : cohort.reads) {
        if (read.reader_id != reader_id) continue;
        const CaseRecord* c = cohort.find_case(read.case_id);
        if (!c) throw IntegrityError("read references unknown case '" + read.case_id + "'");
        if (c->tb_positive)
            (read.tb_call ? tp : fn) += 1;
        else
            (read.tb_call ? fp : tn) += 1;
    }
    PerformancePoint p;
    p.n_pos = tp + fn;
    p.n_neg = tn + fp;
    if (p.n_pos == 0 || p.n_neg == 0)
        throw Error("reader '" + reader_id + "' has no reads on one of the classes");
    p.sensitivity = static_cast<double>(tp) / static_cast<double>(p.n_pos);
    p.specificity = static_cast<double>(tn) / static_cast<double>(p.n_neg);
    return p;
}

}  // namespace tbeval
