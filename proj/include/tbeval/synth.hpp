#pragma once

// Synthetic reader panels with known operating characteristics, used as the
// oracle for calibrating the MRMC machinery. Correlation between
// participants reading the same case comes from a probit latent-threshold
// model: participant j is correct on case k with probability
// Phi(a_j + r_j + u_k), where u_k is a shared case difficulty and r_j a
// reader effect. Bases a_j are pre-inflated by sqrt(1 + sigma_case^2 +
// sigma_reader^2) so the requested sensitivities/specificities hold
// *marginally* for any spread; otherwise the noninferiority-boundary
// condition used by calibrate_type1 would drift with the correlation level.

#include <cstdint>
#include <string>
#include <vector>

#include "tbeval/cohort.hpp"
#include "tbeval/inference.hpp"
#include "tbeval/rng.hpp"
#include "tbeval/stats.hpp"

namespace tbeval {

struct PanelSpec {
    std::size_t n_pos = 100;
    std::size_t n_neg = 100;
    std::size_t n_readers = 9;
    std::vector<double> reader_sens = {0.8};  // common value, or one per reader
    std::vector<double> reader_spec = {0.8};
    double reader_effect_spread = 0.0;        // sd of per-reader probit effects
    double case_difficulty_spread = 0.0;      // sd of the shared per-case probit difficulty
    double algo_sens = 0.8;
    double algo_spec = 0.8;
    std::uint64_t seed = 0;

    void check() const {
        if (n_pos < 1 || n_neg < 1) throw Error("PanelSpec: counts must be >= 1");
        if (n_readers < 1) throw Error("PanelSpec: need >= 1 reader");
        if (reader_sens.size() != 1 && reader_sens.size() != n_readers)
            throw Error("PanelSpec: reader_sens must be a common value or one per reader");
        if (reader_spec.size() != 1 && reader_spec.size() != n_readers)
            throw Error("PanelSpec: reader_spec must be a common value or one per reader");
        auto in_unit = [](double v) { return v > 0.0 && v < 1.0; };
        for (double v : reader_sens)
            if (!in_unit(v)) throw Error("PanelSpec: reader_sens outside (0,1)");
        for (double v : reader_spec)
            if (!in_unit(v)) throw Error("PanelSpec: reader_spec outside (0,1)");
        if (!in_unit(algo_sens) || !in_unit(algo_spec))
            throw Error("PanelSpec: algo operating point outside (0,1)");
        if (reader_effect_spread < 0.0 || case_difficulty_spread < 0.0)
            throw Error("PanelSpec: spreads must be >= 0");
    }
};

namespace detail {

inline double clamp_prob(double p) { return std::clamp(p, 0.001, 0.999); }

/// Draw from N(mu,1) conditioned on being >= 0.5 (upper) or < 0.5 (lower).
inline double truncated_normal(Rng& rng, double mu, bool upper) {
    double f = normal_cdf(0.5 - mu);  // P(X < 0.5)
    double u = rng.uniform01();
    double q = upper ? f + u * (1.0 - f) : u * f;
    q = std::clamp(q, 1e-12, 1.0 - 1e-12);
    return mu + normal_quantile(q);
}

/// Monotone squash onto (0,1) fixing 0.5, so thresholding at 0.5 and all
/// rank-based quantities are unchanged.
inline double squash_score(double x) { return 1.0 / (1.0 + std::exp(-(x - 0.5))); }

inline std::string zero_padded(const char* prefix, std::size_t i, int width = 6) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s%0*zu", prefix, width, i);
    return buf;
}

}  // namespace detail

/// Deterministic synthetic cohort: tb labels, reader calls from the latent
/// model, and continuous algorithm scores whose 0.5-threshold predictions
/// reproduce the algorithm's latent correctness exactly.
inline Cohort generate_panel(const PanelSpec& spec) {
    spec.check();
    const std::size_t n_cases = spec.n_pos + spec.n_neg;
    const double infl_reader = std::sqrt(1.0 + spec.case_difficulty_spread * spec.case_difficulty_spread +
                                         spec.reader_effect_spread * spec.reader_effect_spread);
    const double infl_algo =
        std::sqrt(1.0 + spec.case_difficulty_spread * spec.case_difficulty_spread);

    auto reader_target = [&](const std::vector<double>& v, std::size_t j) {
        return v.size() == 1 ? v[0] : v[j];
    };

    Rng rng_cases(derive_seed(spec.seed, "case_difficulty"));
    Rng rng_readers(derive_seed(spec.seed, "reader_effects"));
    Rng rng_reads(derive_seed(spec.seed, "reads"));
    Rng rng_algo(derive_seed(spec.seed, "algo_bits"));
    Rng rng_scores(derive_seed(spec.seed, "scores"));

    std::vector<double> difficulty(n_cases);
    for (auto& u : difficulty) u = rng_cases.normal() * spec.case_difficulty_spread;

    std::vector<double> effect_sens(spec.n_readers), effect_spec(spec.n_readers);
    for (auto& r : effect_sens) r = rng_readers.normal() * spec.reader_effect_spread;
    for (auto& r : effect_spec) r = rng_readers.normal() * spec.reader_effect_spread;

    Cohort cohort;
    cohort.cases.reserve(n_cases);
    for (std::size_t k = 0; k < n_cases; ++k) {
        CaseRecord c;
        c.case_id = detail::zero_padded("c", k + 1);
        c.dataset = "synthetic";
        c.patient_id = detail::zero_padded("p", k + 1);
        c.tb_positive = k < spec.n_pos;
        cohort.cases.push_back(std::move(c));
    }
    for (std::size_t j = 0; j < spec.n_readers; ++j) {
        ReaderInfo info;
        info.reader_id = detail::zero_padded("r", j + 1, 2);
        info.cohort_tag = CohortTag::other;
        cohort.readers.push_back(std::move(info));
    }

    for (std::size_t j = 0; j < spec.n_readers; ++j) {
        const double base_sens =
            normal_quantile(reader_target(spec.reader_sens, j)) * infl_reader + effect_sens[j];
        const double base_spec =
            normal_quantile(reader_target(spec.reader_spec, j)) * infl_reader + effect_spec[j];
        for (std::size_t k = 0; k < n_cases; ++k) {
            const auto& c = cohort.cases[k];
            double base = c.tb_positive ? base_sens : base_spec;
            double p_correct = detail::clamp_prob(normal_cdf(base + difficulty[k]));
            bool correct = rng_reads.bernoulli(p_correct);
            ReaderRead read;
            read.case_id = c.case_id;
            read.reader_id = cohort.readers[j].reader_id;
            read.tb_call = correct ? c.tb_positive : !c.tb_positive;
            cohort.reads.push_back(std::move(read));
        }
    }

    const double algo_base_sens = normal_quantile(spec.algo_sens) * infl_algo;
    const double algo_base_spec = normal_quantile(spec.algo_spec) * infl_algo;
    const double mu_pos = 0.5 + normal_quantile(spec.algo_sens);
    const double mu_neg = 0.5 - normal_quantile(spec.algo_spec);
    for (std::size_t k = 0; k < n_cases; ++k) {
        auto& c = cohort.cases[k];
        double base = c.tb_positive ? algo_base_sens : algo_base_spec;
        double p_correct = detail::clamp_prob(normal_cdf(base + difficulty[k]));
        bool correct = rng_algo.bernoulli(p_correct);
        // Positive case: correct means score above threshold. Negative case:
        // correct means below.
        bool upper = c.tb_positive ? correct : !correct;
        double mu = c.tb_positive ? mu_pos : mu_neg;
        c.dls_tb_score = detail::squash_score(detail::truncated_normal(rng_scores, mu, upper));
    }
    return cohort;
}

/// Monte-Carlo rejection rate of the MRMC noninferiority test over panels
/// drawn from `spec`; per-trial seeds derive from spec.seed.
inline double calibrate_type1(const PanelSpec& spec, std::size_t n_trials, double alpha,
                              double margin = 0.10,
                              Endpoint endpoint = Endpoint::sensitivity) {
    if (n_trials == 0) throw Error("calibrate_type1: n_trials must be > 0");
    NoninferiorityConfig config;
    config.margin = margin;
    config.alpha = alpha;
    config.alpha_primary = alpha;
    std::size_t rejections = 0;
    for (std::size_t t = 0; t < n_trials; ++t) {
        PanelSpec trial = spec;
        trial.seed = derive_seed(spec.seed, t + 1);
        Cohort cohort = generate_panel(trial);
        std::vector<std::string> reader_ids;
        for (const auto& info : cohort.readers) reader_ids.push_back(info.reader_id);
        auto m = correctness_matrix(cohort, reader_ids, endpoint, 0.5);
        auto result = mrmc_orh_test(m, config);
        if (result.p_noninferiority < alpha) ++rejections;
    }
    return static_cast<double>(rejections) / static_cast<double>(n_trials);
}

}  // namespace tbeval
