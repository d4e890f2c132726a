#pragma once

// Case-level percentile bootstrap. Each resample draws from its own stream
// derived from (seed, resample index), so results do not depend on execution
// order and are reproducible bit-for-bit.

#include <algorithm>
#include <cstdint>
#include <vector>

#include "tbeval/errors.hpp"
#include "tbeval/rng.hpp"
#include "tbeval/roc.hpp"

namespace tbeval {

struct BootstrapConfig {
    std::size_t n_resamples = 1000;
    double level = 0.95;
    std::uint64_t seed = 0;
    bool stratified = true;  // resample positives and negatives separately
};

namespace detail {

inline Sample resample(const Sample& data, const std::vector<std::size_t>& pos_idx,
                       const std::vector<std::size_t>& neg_idx, bool stratified, Rng& rng) {
    Sample out;
    out.scores.reserve(data.size());
    out.labels.reserve(data.size());
    auto push = [&](std::size_t i) {
        out.scores.push_back(data.scores[i]);
        out.labels.push_back(data.labels[i]);
    };
    if (stratified) {
        for (std::size_t k = 0; k < pos_idx.size(); ++k)
            push(pos_idx[rng.uniform_index(pos_idx.size())]);
        for (std::size_t k = 0; k < neg_idx.size(); ++k)
            push(neg_idx[rng.uniform_index(neg_idx.size())]);
    } else {
        for (std::size_t k = 0; k < data.size(); ++k) push(rng.uniform_index(data.size()));
    }
    return out;
}

}  // namespace detail

/// Percentile interval from case-level resampling with replacement.
/// Endpoints follow the nearest-rank convention: with B resamples the bounds
/// are order statistics ceil(alpha/2*B) and B+1-ceil(alpha/2*B) (1-based),
/// e.g. the 25th/976th of 1000 at level 0.95. A resample on which the
/// statistic is undefined (throws tbeval::Error) is redrawn, at most 10
/// attempts per resample.
template <typename Statistic>
ConfidenceInterval bootstrap_ci(Statistic&& statistic, const Sample& data,
                                const BootstrapConfig& config) {
    if (config.n_resamples == 0) throw Error("bootstrap_ci: n_resamples must be > 0");
    if (!(config.level > 0.0 && config.level < 1.0))
        throw Error("bootstrap_ci: level must be in (0,1)");
    if (data.size() == 0) throw Error("bootstrap_ci: empty data");

    std::vector<std::size_t> pos_idx, neg_idx;
    for (std::size_t i = 0; i < data.size(); ++i)
        (data.labels[i] ? pos_idx : neg_idx).push_back(i);
    if (config.stratified && (pos_idx.empty() || neg_idx.empty()))
        throw Error("bootstrap_ci: stratified resampling needs both classes present");

    std::vector<double> stats;
    stats.reserve(config.n_resamples);
    for (std::size_t b = 0; b < config.n_resamples; ++b) {
        Rng rng = Rng::stream(config.seed, b);
        bool done = false;
        for (int attempt = 0; attempt < 10 && !done; ++attempt) {
            Sample draw = detail::resample(data, pos_idx, neg_idx, config.stratified, rng);
            try {
                stats.push_back(statistic(draw));
                done = true;
            } catch (const Error&) {
                // undefined on this resample; redraw from the same stream
            }
        }
        if (!done)
            throw Error("bootstrap_ci: statistic undefined on 10 consecutive redraws "
                        "(resample " +
                        std::to_string(b) + ")");
    }

    std::sort(stats.begin(), stats.end());
    double alpha2 = (1.0 - config.level) / 2.0;
    // ceil with a tolerance so e.g. 0.025*1000 lands on rank 25, not 26.
    auto rank = static_cast<std::size_t>(
        std::ceil(alpha2 * static_cast<double>(config.n_resamples) - 1e-9));
    if (rank < 1) rank = 1;

    ConfidenceInterval ci;
    ci.lower = stats[rank - 1];
    ci.upper = stats[config.n_resamples - rank];
    ci.level = config.level;
    ci.n_resamples = config.n_resamples;
    ci.seed = config.seed;
    return ci;
}

}  // namespace tbeval
