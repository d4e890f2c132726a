#pragma once

// Hypothesis tests for algorithm-vs-reader-panel comparisons:
//
//  * an Obuchowski-Rockette-Hillis style MRMC test of a standalone algorithm
//    against a reader panel on binary accuracy endpoints, cast as a
//    one-sample problem on the per-reader differences d_j = theta_algo -
//    theta_reader_j, with jackknife covariance terms for the case overlap
//    and Hillis-form degrees of freedom;
//  * per-reader paired tests on the same cases (Wald noninferiority on the
//    paired difference, exact McNemar for superiority);
//  * the two-sample Kolmogorov-Smirnov test for score-distribution shift.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tbeval/cohort.hpp"
#include "tbeval/roc.hpp"
#include "tbeval/stats.hpp"

namespace tbeval {

enum class Endpoint { sensitivity, specificity };

inline const char* to_string(Endpoint e) {
    return e == Endpoint::sensitivity ? "sensitivity" : "specificity";
}

struct NoninferiorityConfig {
    double margin = 0.10;          // absolute margin
    double alpha = 0.025;          // one-sided, superiority stage
    double alpha_primary = 0.0125; // Bonferroni-halved gate for noninferiority
    bool higher_is_better = true;

    void check() const {
        if (!(margin > 0.0 && margin < 1.0))
            throw Error("NoninferiorityConfig: margin must be in (0,1)");
        if (!(alpha_primary > 0.0 && alpha_primary <= alpha && alpha < 0.5))
            throw Error("NoninferiorityConfig: need 0 < alpha_primary <= alpha < 0.5");
    }
};

/// Correctness indicators on one endpoint subset: rows[0] is the algorithm,
/// rows[1..J] the readers; entry 1 means the participant's call matched the
/// ground truth on that case.
struct CorrectnessMatrix {
    Endpoint endpoint = Endpoint::sensitivity;
    std::vector<std::string> case_ids;
    std::vector<std::string> participant_ids;  // [0] = "algorithm"
    std::vector<std::vector<std::uint8_t>> rows;

    std::size_t n_cases() const { return case_ids.size(); }
    std::size_t n_readers() const { return rows.empty() ? 0 : rows.size() - 1; }
};

/// Build the complete-block correctness matrix for one endpoint. The
/// algorithm row thresholds dls_tb_score at `threshold` (predict positive iff
/// score >= threshold); reader rows use their binary tb_call. Every listed
/// reader must have read every case in the endpoint subset.
inline CorrectnessMatrix correctness_matrix(const Cohort& cohort,
                                            std::span<const std::string> reader_ids,
                                            Endpoint endpoint, double threshold) {
    const bool want_positive = endpoint == Endpoint::sensitivity;
    CorrectnessMatrix m;
    m.endpoint = endpoint;
    m.participant_ids.push_back("algorithm");
    std::vector<std::uint8_t> algo_row;
    for (const auto& c : cohort.cases) {
        if (c.tb_positive != want_positive) continue;
        m.case_ids.push_back(c.case_id);
        bool predicted = c.dls_tb_score >= threshold;
        algo_row.push_back(predicted == c.tb_positive ? 1 : 0);
    }
    if (m.case_ids.empty())
        throw Error(std::string("correctness_matrix: no ") +
                    (want_positive ? "positive" : "negative") + " cases in cohort");
    m.rows.push_back(std::move(algo_row));

    std::map<std::pair<std::string, std::string>, bool> call;  // (reader, case) -> tb_call
    for (const auto& read : cohort.reads) call[{read.reader_id, read.case_id}] = read.tb_call;

    std::vector<std::string> gaps;
    for (const auto& reader_id : reader_ids) {
        std::vector<std::uint8_t> row;
        row.reserve(m.case_ids.size());
        for (const auto& case_id : m.case_ids) {
            auto it = call.find({reader_id, case_id});
            if (it == call.end()) {
                gaps.push_back(reader_id + "/" + case_id);
                row.push_back(0);
                continue;
            }
            const CaseRecord* c = cohort.find_case(case_id);
            row.push_back(it->second == c->tb_positive ? 1 : 0);
        }
        m.participant_ids.push_back(reader_id);
        m.rows.push_back(std::move(row));
    }
    if (!gaps.empty()) {
        std::string msg = "correctness_matrix: incomplete block design; missing reads:";
        for (std::size_t i = 0; i < gaps.size() && i < 20; ++i) msg += " " + gaps[i];
        if (gaps.size() > 20) msg += " (+" + std::to_string(gaps.size() - 20) + " more)";
        throw Error(msg);
    }
    return m;
}

/// Jackknife covariance of the row means of a and b:
/// Cov = ((n-1)/n) * sum_k (m_a^(-k) - mbar_a)(m_b^(-k) - mbar_b),
/// where m^(-k) is the leave-case-k-out mean.
inline double jackknife_covariance(std::span<const double> a, std::span<const double> b) {
    const std::size_t n = a.size();
    if (n != b.size()) throw Error("jackknife_covariance: length mismatch");
    if (n < 2) throw Error("jackknife_covariance: need >= 2 cases");
    double sa = 0.0, sb = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        sa += a[k];
        sb += b[k];
    }
    const double nd = static_cast<double>(n);
    const double loo_mean_a = sa / nd;  // average of leave-one-out means equals the grand mean
    const double loo_mean_b = sb / nd;
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        double la = (sa - a[k]) / (nd - 1.0) - loo_mean_a;
        double lb = (sb - b[k]) / (nd - 1.0) - loo_mean_b;
        acc += la * lb;
    }
    return (nd - 1.0) / nd * acc;
}

inline double jackknife_covariance(const CorrectnessMatrix& m, std::size_t row_a,
                                   std::size_t row_b) {
    std::vector<double> a(m.rows.at(row_a).begin(), m.rows.at(row_a).end());
    std::vector<double> b(m.rows.at(row_b).begin(), m.rows.at(row_b).end());
    return jackknife_covariance(a, b);
}

struct MrmcResult {
    Endpoint endpoint = Endpoint::sensitivity;
    double delta = 0.0;  // algorithm minus mean reader, oriented so + favors the algorithm
    double se = 0.0;
    double df = 0.0;
    double p_noninferiority = 1.0;
    std::optional<double> p_superiority;
    double s_d_squared = 0.0;
    double cov2_bar = 0.0;  // raw pair-average jackknife covariance (may be negative)
    std::size_t n_readers = 0;
    std::size_t n_cases = 0;
    std::vector<std::string> flags;
};

/// One-sample ORH-style test on the reader differences.
///
/// d_j = theta_0 - theta_j (sign flipped when higher_is_better is false),
/// Delta = mean_j d_j, S_d^2 = sample variance of {d_j}, Cov2 = average over
/// unordered reader pairs of the jackknife covariance of the per-case
/// difference rows, SE^2 = S_d^2/J + max(Cov2, 0), and Hillis-form
/// df = (J-1) * (1 + J*max(Cov2,0)/S_d^2)^2. Noninferiority p-value is the
/// upper t tail of (Delta + margin)/SE; the superiority tail Delta/SE is
/// computed only when noninferiority clears config.alpha_primary.
inline MrmcResult mrmc_orh_test(const CorrectnessMatrix& m, const NoninferiorityConfig& config) {
    config.check();
    const std::size_t J = m.n_readers();
    const std::size_t n = m.n_cases();
    if (J < 2) throw Error("mrmc_orh_test: need >= 2 readers");
    if (n < 2) throw Error("mrmc_orh_test: need >= 2 cases");
    for (const auto& row : m.rows)
        if (row.size() != n) throw Error("mrmc_orh_test: ragged matrix");

    const double sign = config.higher_is_better ? 1.0 : -1.0;
    MrmcResult r;
    r.endpoint = m.endpoint;
    r.n_readers = J;
    r.n_cases = n;

    // Per-case difference rows e_j[k] = sign * (psi_0k - psi_jk); d_j is the
    // row mean, and its leave-one-out values are the row's leave-one-out means.
    std::vector<std::vector<double>> diff(J, std::vector<double>(n));
    std::vector<double> d(J);
    for (std::size_t j = 0; j < J; ++j) {
        double sum = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            diff[j][k] = sign * (static_cast<double>(m.rows[0][k]) -
                                 static_cast<double>(m.rows[j + 1][k]));
            sum += diff[j][k];
        }
        d[j] = sum / static_cast<double>(n);
    }

    r.delta = mean(d);
    r.s_d_squared = sample_variance(d);

    double cov_sum = 0.0;
    std::size_t n_pairs = 0;
    for (std::size_t j = 0; j < J; ++j)
        for (std::size_t jp = j + 1; jp < J; ++jp) {
            cov_sum += jackknife_covariance(diff[j], diff[jp]);
            ++n_pairs;
        }
    r.cov2_bar = cov_sum / static_cast<double>(n_pairs);
    const double cov2 = std::max(r.cov2_bar, 0.0);
    if (r.cov2_bar < 0.0) r.flags.push_back("cov2_truncated");

    r.se = std::sqrt(r.s_d_squared / static_cast<double>(J) + cov2);

    if (r.s_d_squared > 0.0) {
        double ratio = static_cast<double>(J) * cov2 / r.s_d_squared;
        r.df = static_cast<double>(J - 1) * (1.0 + ratio) * (1.0 + ratio);
    } else {
        r.df = static_cast<double>(J - 1);
        if (cov2 > 0.0) r.flags.push_back("df_fallback_s_d_zero");
    }

    if (r.se == 0.0) {
        r.flags.push_back("se_zero");
        r.p_noninferiority = (r.delta + config.margin > 0.0) ? 0.0 : 1.0;
        if (r.p_noninferiority < config.alpha_primary)
            r.p_superiority = (r.delta > 0.0) ? 0.0 : 1.0;
        return r;
    }

    r.p_noninferiority = student_t_tail((r.delta + config.margin) / r.se, r.df);
    if (r.p_noninferiority < config.alpha_primary)
        r.p_superiority = student_t_tail(r.delta / r.se, r.df);
    return r;
}

enum class TestOutcome { not_noninferior, noninferior, superior };

inline const char* to_string(TestOutcome o) {
    switch (o) {
        case TestOutcome::not_noninferior: return "not_noninferior";
        case TestOutcome::noninferior: return "noninferior";
        default: return "superior";
    }
}

struct SequentialOutcome {
    TestOutcome sensitivity = TestOutcome::not_noninferior;
    TestOutcome specificity = TestOutcome::not_noninferior;
};

/// Fixed-sequence primary analysis: noninferiority at alpha_primary
/// (Bonferroni over the two endpoints), then prespecified superiority at the
/// uncorrected one-sided alpha.
inline SequentialOutcome sequential_primary_analysis(const MrmcResult& sens,
                                                     const MrmcResult& spec,
                                                     const NoninferiorityConfig& config) {
    config.check();
    auto judge = [&](const MrmcResult& r) {
        if (!(r.p_noninferiority < config.alpha_primary)) return TestOutcome::not_noninferior;
        if (r.p_superiority && *r.p_superiority < config.alpha) return TestOutcome::superior;
        return TestOutcome::noninferior;
    };
    return {judge(sens), judge(spec)};
}

/// Paired correct/incorrect counts for algorithm (first index) vs one reader
/// (second index) on the same cases. b = algorithm-only correct, c =
/// reader-only correct.
struct PairedCounts {
    std::size_t n11 = 0;
    std::size_t n10 = 0;
    std::size_t n01 = 0;
    std::size_t n00 = 0;

    std::size_t b() const { return n10; }
    std::size_t c() const { return n01; }
    std::size_t n() const { return n11 + n10 + n01 + n00; }
};

/// Paired counts between the algorithm row and one reader row.
inline PairedCounts paired_counts(const CorrectnessMatrix& m, std::size_t reader_row) {
    if (reader_row == 0 || reader_row >= m.rows.size())
        throw Error("paired_counts: reader_row out of range");
    PairedCounts pc;
    for (std::size_t k = 0; k < m.n_cases(); ++k) {
        bool a = m.rows[0][k] != 0;
        bool r = m.rows[reader_row][k] != 0;
        if (a && r) ++pc.n11;
        else if (a && !r) ++pc.n10;
        else if (!a && r) ++pc.n01;
        else ++pc.n00;
    }
    return pc;
}

/// Exact two-sided McNemar test on the discordant pairs:
/// p = min(1, 2 * P(X <= min(b,c))) with X ~ Binomial(b+c, 1/2); p = 1 when
/// there are no discordant pairs.
inline double mcnemar_exact(const PairedCounts& counts) {
    const std::size_t b = counts.b(), c = counts.c();
    const std::size_t m = b + c;
    if (m == 0) return 1.0;
    double p = 2.0 * binomial_half_cdf(static_cast<unsigned>(m),
                                       static_cast<unsigned>(std::min(b, c)));
    return std::min(p, 1.0);
}

/// One-sided Wald noninferiority test on the paired difference of proportions:
/// Delta = (b-c)/n, Var = (b + c - (b-c)^2/n)/n^2, p = 1 - Phi((Delta+margin)/sqrt(Var)).
/// Zero variance degenerates to p = 0 if Delta+margin > 0, else p = 1.
inline double wald_noninferiority_paired(const PairedCounts& counts, double margin) {
    const double n = static_cast<double>(counts.n());
    if (counts.n() == 0) throw Error("wald_noninferiority_paired: empty table");
    const double b = static_cast<double>(counts.b());
    const double c = static_cast<double>(counts.c());
    const double delta = (b - c) / n;
    const double var = (b + c - (b - c) * (b - c) / n) / (n * n);
    if (var <= 0.0) return (delta + margin > 0.0) ? 0.0 : 1.0;
    const double z = (delta + margin) / std::sqrt(var);
    return 1.0 - normal_cdf(z);
}

struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
    std::size_t n1 = 0;
    std::size_t n2 = 0;
};

/// Two-sample Kolmogorov-Smirnov test. D is the exact sup over pooled sample
/// points of |F_a - F_b| (right-continuous ECDFs); the p-value uses the
/// asymptotic Kolmogorov tail with the small-sample correction
/// lambda = (sqrt(m) + 0.12 + 0.11/sqrt(m)) * D, m = n1*n2/(n1+n2).
inline KsResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw Error("ks_two_sample: empty sample");
    std::vector<double> sa(a.begin(), a.end()), sb(b.begin(), b.end());
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());

    const double na = static_cast<double>(sa.size()), nb = static_cast<double>(sb.size());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < sa.size() || j < sb.size()) {
        double x = (i < sa.size() && (j >= sb.size() || sa[i] <= sb[j])) ? sa[i] : sb[j];
        while (i < sa.size() && sa[i] == x) ++i;
        while (j < sb.size() && sb[j] == x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }

    KsResult r;
    r.statistic = d;
    r.n1 = sa.size();
    r.n2 = sb.size();
    const double m = na * nb / (na + nb);
    const double sm = std::sqrt(m);
    r.p_value = kolmogorov_q((sm + 0.12 + 0.11 / sm) * d);
    return r;
}

}  // namespace tbeval
