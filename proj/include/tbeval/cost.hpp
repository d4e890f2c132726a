#pragma once

// Two-stage screening economics: triage with the algorithm, confirm with
// NAAT. The confirmatory test is modeled as perfectly sensitive and specific
// downstream, so the NAAT-for-all baseline detects every prevalent case.

#include <cmath>
#include <vector>

#include "tbeval/errors.hpp"

namespace tbeval {

struct CostInputs {
    double prevalence = 0.0;
    double sensitivity = 0.0;
    double specificity = 0.0;
    double cost_confirmatory_test = 13.06;  // USD per NAAT/GeneXpert test
    double cost_cxr = 1.49;                 // USD per image, acquisition only
    double cost_cad = 0.0;                  // USD per algorithm read

    void check() const {
        if (!(prevalence > 0.0 && prevalence < 1.0))
            throw Error("CostInputs: prevalence must be strictly inside (0,1)");
        if (!(sensitivity >= 0.0 && sensitivity <= 1.0) ||
            !(specificity >= 0.0 && specificity <= 1.0))
            throw Error("CostInputs: sensitivity/specificity must be in [0,1]");
        if (cost_confirmatory_test < 0.0 || cost_cxr < 0.0 || cost_cad < 0.0)
            throw Error("CostInputs: costs must be >= 0");
    }
};

struct CostResult {
    double triage_positive_rate = 0.0;
    double cost_per_patient_screened = 0.0;
    double true_positive_rate_per_patient = 0.0;
    double cost_per_case_detected = 0.0;
    double naat_only_cost_per_case = 0.0;
    double savings_fraction = 0.0;  // vs confirmatory-test-for-all
};

inline CostResult evaluate_cost(const CostInputs& in) {
    in.check();
    const double detected = in.prevalence * in.sensitivity;
    if (detected <= 0.0) throw Error("evaluate_cost: no detectable cases (prevalence*sensitivity = 0)");
    CostResult r;
    r.triage_positive_rate =
        in.prevalence * in.sensitivity + (1.0 - in.prevalence) * (1.0 - in.specificity);
    r.cost_per_patient_screened =
        in.cost_cxr + in.cost_cad + r.triage_positive_rate * in.cost_confirmatory_test;
    r.true_positive_rate_per_patient = detected;
    r.cost_per_case_detected = r.cost_per_patient_screened / detected;
    r.naat_only_cost_per_case = in.cost_confirmatory_test / in.prevalence;
    r.savings_fraction = 1.0 - r.cost_per_case_detected / r.naat_only_cost_per_case;
    return r;
}

struct PrevalencePoint {
    double prevalence = 0.0;
    CostResult result;
};

struct PrevalenceSweep {
    std::vector<PrevalencePoint> points;
    // Diagnostic: cost per case detected should fall as prevalence rises.
    bool cost_per_case_decreasing = true;
};

inline PrevalenceSweep prevalence_sweep(CostInputs inputs, double p_min, double p_max,
                                        double step) {
    if (!(p_min > 0.0 && p_min <= p_max && p_max < 1.0))
        throw Error("prevalence_sweep: need 0 < p_min <= p_max < 1");
    if (!(step > 0.0)) throw Error("prevalence_sweep: step must be > 0");
    PrevalenceSweep sweep;
    const double eps = step * 1e-9;
    for (double p = p_min; p <= p_max + eps; p += step) {
        inputs.prevalence = std::min(p, p_max);
        sweep.points.push_back({inputs.prevalence, evaluate_cost(inputs)});
        if (sweep.points.size() >= 2) {
            const auto& prev = sweep.points[sweep.points.size() - 2];
            if (sweep.points.back().result.cost_per_case_detected >=
                prev.result.cost_per_case_detected)
                sweep.cost_per_case_decreasing = false;
        }
    }
    return sweep;
}

/// Overall detection sensitivity of the two-stage workflow. NAAT is assumed
/// perfectly sensitive downstream, so this is the triage sensitivity; named
/// so reports can check it against the 0.90 WHO floor.
inline double workflow_sensitivity(const CostInputs& in) { return in.sensitivity; }

}  // namespace tbeval
