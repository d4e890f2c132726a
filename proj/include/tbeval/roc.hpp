#pragma once

// Empirical ROC construction, (partial) AUC, and threshold application.
// Everything here is a pure function of (scores, labels).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "tbeval/errors.hpp"

namespace tbeval {

/// A case-level slice: score per case with binary truth (1 = positive).
struct Sample {
    std::vector<double> scores;
    std::vector<std::uint8_t> labels;

    std::size_t size() const { return scores.size(); }
    std::size_t n_positive() const {
        return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
    }
    std::size_t n_negative() const { return labels.size() - n_positive(); }
};

struct RocPoint {
    double fpr = 0.0;
    double tpr = 0.0;
    double threshold = 0.0;
};

struct RocCurve {
    std::vector<RocPoint> points;  // sorted by fpr ascending, (0,0) .. (1,1)
    std::size_t n_pos = 0;
    std::size_t n_neg = 0;
};

struct PerformancePoint {
    double sensitivity = 0.0;
    double specificity = 0.0;
    std::optional<double> threshold;
    std::size_t n_pos = 0;
    std::size_t n_neg = 0;
};

struct ConfidenceInterval {
    double lower = 0.0;
    double upper = 0.0;
    double level = 0.0;
    std::size_t n_resamples = 0;
    std::uint64_t seed = 0;
};

namespace detail {

inline void check_two_classes(std::span<const std::uint8_t> labels) {
    std::size_t pos = 0;
    for (auto l : labels) pos += (l != 0);
    if (pos == 0 || pos == labels.size())
        throw Error("degenerate labels: need at least one positive and one negative");
    for (auto l : labels)
        if (l > 1) throw Error("labels must be 0 or 1");
}

}  // namespace detail

/// Standard empirical ROC: for each distinct score tau (descending), predict
/// positive iff score >= tau. Tied scores collapse to one point, which shows
/// up as a diagonal segment. First point is the (0,0) sentinel at +inf.
inline RocCurve roc_curve(std::span<const double> scores, std::span<const std::uint8_t> labels) {
    if (scores.size() != labels.size()) throw Error("roc_curve: size mismatch");
    detail::check_two_classes(labels);
    for (double s : scores)
        if (!std::isfinite(s)) throw Error("roc_curve: non-finite score");

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    RocCurve curve;
    for (auto l : labels) (l ? curve.n_pos : curve.n_neg) += 1;
    curve.points.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});

    std::size_t tp = 0, fp = 0, i = 0;
    while (i < order.size()) {
        double tau = scores[order[i]];
        while (i < order.size() && scores[order[i]] == tau) {
            (labels[order[i]] ? tp : fp) += 1;
            ++i;
        }
        curve.points.push_back({static_cast<double>(fp) / static_cast<double>(curve.n_neg),
                                static_cast<double>(tp) / static_cast<double>(curve.n_pos), tau});
    }
    return curve;
}

/// Trapezoidal area; equal to the Mann-Whitney statistic (ties count 1/2).
inline double auc(const RocCurve& curve) {
    double area = 0.0;
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
        const auto& a = curve.points[i - 1];
        const auto& b = curve.points[i];
        area += (b.fpr - a.fpr) * (a.tpr + b.tpr) * 0.5;
    }
    return area;
}

inline double auc(std::span<const double> scores, std::span<const std::uint8_t> labels) {
    return auc(roc_curve(scores, labels));
}

/// Area between the curve and the fpr axis over the sensitivity band
/// tpr in [tpr_lo, tpr_hi]: integral of (1 - fpr(tpr)) d tpr, with linear
/// interpolation where the band edges cut a segment. Horizontal segments
/// (fpr varies at fixed tpr) contribute nothing. If `normalize`, the result
/// is divided by the band width so a perfect classifier scores 1.
inline double partial_auc(const RocCurve& curve, double tpr_lo, double tpr_hi,
                          bool normalize = true) {
    if (!(tpr_lo >= 0.0 && tpr_hi <= 1.0 && tpr_lo < tpr_hi))
        throw Error("partial_auc: need 0 <= tpr_lo < tpr_hi <= 1");
    double area = 0.0;
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
        const auto& a = curve.points[i - 1];
        const auto& b = curve.points[i];
        if (b.tpr <= a.tpr) continue;
        double lo = std::max(a.tpr, tpr_lo);
        double hi = std::min(b.tpr, tpr_hi);
        if (hi <= lo) continue;
        auto fpr_at = [&](double t) {
            return a.fpr + (b.fpr - a.fpr) * (t - a.tpr) / (b.tpr - a.tpr);
        };
        area += ((1.0 - fpr_at(lo)) + (1.0 - fpr_at(hi))) * 0.5 * (hi - lo);
    }
    return normalize ? area / (tpr_hi - tpr_lo) : area;
}

/// Predict positive iff score >= threshold.
inline PerformancePoint apply_threshold(std::span<const double> scores,
                                        std::span<const std::uint8_t> labels, double threshold) {
    if (scores.size() != labels.size()) throw Error("apply_threshold: size mismatch");
    detail::check_two_classes(labels);
    std::size_t tp = 0, fn = 0, tn = 0, fp = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        bool predicted = scores[i] >= threshold;
        if (labels[i])
            (predicted ? tp : fn) += 1;
        else
            (predicted ? fp : tn) += 1;
    }
    PerformancePoint point;
    point.n_pos = tp + fn;
    point.n_neg = tn + fp;
    point.sensitivity = static_cast<double>(tp) / static_cast<double>(point.n_pos);
    point.specificity = static_cast<double>(tn) / static_cast<double>(point.n_neg);
    point.threshold = threshold;
    return point;
}

inline PerformancePoint apply_threshold(const Sample& sample, double threshold) {
    return apply_threshold(sample.scores, sample.labels, threshold);
}

}  // namespace tbeval
