#pragma once

// Operating-point selection on the empirical step function: prespecified
// thresholds, sensitivity/specificity targets, WHO compliance, and matching
// to reader panels. No interpolation anywhere; every returned point is an
// achievable empirical point.

#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "tbeval/roc.hpp"

namespace tbeval {

enum class SelectionRule {
    prespecified,
    sens_at_spec,
    spec_at_sens,
    match_mean_reader,
    match_individual_reader
};

enum class MatchAxis { sensitivity, specificity };

struct OperatingPoint {
    double threshold = 0.0;
    PerformancePoint point;
    SelectionRule selection_rule = SelectionRule::prespecified;
    std::optional<double> target;
};

namespace detail {

/// Distinct score values plus +inf (the predict-nothing point).
inline std::vector<double> candidate_thresholds(std::span<const double> scores) {
    std::vector<double> taus(scores.begin(), scores.end());
    std::sort(taus.begin(), taus.end());
    taus.erase(std::unique(taus.begin(), taus.end()), taus.end());
    taus.push_back(std::numeric_limits<double>::infinity());
    return taus;
}

}  // namespace detail

/// Among thresholds with sensitivity >= target_sens, the one maximizing
/// specificity; ties in specificity break toward the higher threshold.
inline OperatingPoint spec_at_sens(const Sample& sample, double target_sens) {
    if (!(target_sens > 0.0 && target_sens <= 1.0))
        throw Error("spec_at_sens: target must be in (0,1]");
    OperatingPoint best;
    bool have = false;
    for (double tau : detail::candidate_thresholds(sample.scores)) {
        PerformancePoint p = apply_threshold(sample, tau);
        if (p.sensitivity < target_sens) continue;
        if (!have || p.specificity > best.point.specificity ||
            (p.specificity == best.point.specificity && tau > best.threshold)) {
            best = {tau, p, SelectionRule::spec_at_sens, target_sens};
            have = true;
        }
    }
    return best;  // always feasible: the minimum score gives sensitivity 1
}

/// Among thresholds with specificity >= target_spec, the one maximizing
/// sensitivity; ties in sensitivity break toward the higher threshold.
inline OperatingPoint sens_at_spec(const Sample& sample, double target_spec) {
    if (!(target_spec >= 0.0 && target_spec <= 1.0))
        throw Error("sens_at_spec: target must be in [0,1]");
    OperatingPoint best;
    bool have = false;
    for (double tau : detail::candidate_thresholds(sample.scores)) {
        PerformancePoint p = apply_threshold(sample, tau);
        if (p.specificity < target_spec) continue;
        if (!have || p.sensitivity > best.point.sensitivity ||
            (p.sensitivity == best.point.sensitivity && tau > best.threshold)) {
            best = {tau, p, SelectionRule::sens_at_spec, target_spec};
            have = true;
        }
    }
    return best;  // always feasible: +inf gives specificity 1
}

/// Match the panel's arithmetic mean on `match_on`, then maximize the other
/// axis. match_on = specificity reproduces the "compare sensitivities at mean
/// radiologist specificity" analysis, and vice versa.
inline OperatingPoint match_mean_reader(const Sample& sample,
                                        std::span<const PerformancePoint> panel,
                                        MatchAxis match_on) {
    if (panel.empty()) throw Error("match_mean_reader: empty panel");
    double target = 0.0;
    for (const auto& p : panel)
        target += (match_on == MatchAxis::sensitivity) ? p.sensitivity : p.specificity;
    target /= static_cast<double>(panel.size());
    OperatingPoint op = (match_on == MatchAxis::sensitivity) ? spec_at_sens(sample, target)
                                                             : sens_at_spec(sample, target);
    op.selection_rule = SelectionRule::match_mean_reader;
    return op;
}

inline OperatingPoint match_individual_reader(const Sample& sample, const PerformancePoint& reader,
                                              MatchAxis match_on) {
    OperatingPoint op = (match_on == MatchAxis::sensitivity)
                            ? spec_at_sens(sample, reader.sensitivity)
                            : sens_at_spec(sample, reader.specificity);
    op.selection_rule = SelectionRule::match_individual_reader;
    return op;
}

/// WHO target product profile: sensitivity >= 90% and specificity >= 70%,
/// both boundaries inclusive.
inline bool who_compliance(const PerformancePoint& point) {
    return point.sensitivity >= 0.90 && point.specificity >= 0.70;
}

inline const char* to_string(SelectionRule rule) {
    switch (rule) {
        case SelectionRule::prespecified: return "prespecified";
        case SelectionRule::sens_at_spec: return "sens_at_spec";
        case SelectionRule::spec_at_sens: return "spec_at_sens";
        case SelectionRule::match_mean_reader: return "match_mean_reader";
        default: return "match_individual_reader";
    }
}

}  // namespace tbeval
