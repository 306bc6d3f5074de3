#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace pipeline {

/// All rates, placement fractions, capacities, and competition constants of
/// the annual pipeline model. Defaults are the baseline calibration.
struct ModelParams {
    double g_U = 0.14;  ///< undergraduate completion probability per year
    double a_U = 0.12;  ///< undergraduate exit probability per year
    double g_G = 0.17;  ///< graduate completion probability per year
    double a_G = 0.08;  ///< graduate exit probability per year
    double p_GP = 0.45; ///< fraction of graduate completers entering postdocs
    double p_GF = 0.08; ///< fraction of graduate completers entering faculty
    double a_P = 0.25;  ///< postdoc exit probability per year
    double a_F = 0.03;  ///< faculty exit probability per year

    double p_UG_max = 0.5;  ///< ceiling of the undergrad->grad transition
    double K_G = 25000.0;   ///< graduate capacity scale (persons)
    double p_PF_max = 0.18; ///< ceiling of the postdoc->faculty intensity
    double K_F = 4000.0;    ///< faculty capacity scale (persons)
    double alpha_F = 1.0;   ///< competition strength

    double r_M = 0.80; ///< master's share of graduate completions
    double r_D = 0.20; ///< doctoral share of graduate completions

    /// Throws std::invalid_argument on any structural violation
    /// (probabilities outside [0,1], nonpositive capacities,
    /// p_GP + p_GF > 1, r_M + r_D != 1).
    void validate() const;
};

/// One verifiable condition of the feasibility report.
struct FeasibilityCondition {
    std::string name;
    bool ok = false;
    std::string detail;
};

/// Structured pass/fail result of the static parameter checks.
///
/// The positivity conditions guarantee that both step maps preserve the
/// nonnegative orthant; the boundedness conditions guarantee bounded
/// trajectories under bounded inflow. p_PF(F) + a_P <= 1 is enforced via
/// the sufficient static condition p_PF_max + a_P <= 1.
struct FeasibilityReport {
    std::vector<FeasibilityCondition> positivity;
    std::vector<FeasibilityCondition> boundedness;

    bool positivity_ok() const;
    bool boundedness_ok() const;
    bool all_ok() const { return positivity_ok() && boundedness_ok(); }

    /// Name of the first failing positivity condition, or "" if none.
    std::string first_positivity_failure() const;
};

FeasibilityReport feasibility_check(const ModelParams& params);

} // namespace pipeline
