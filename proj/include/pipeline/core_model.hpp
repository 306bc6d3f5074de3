#pragma once

#include <utility>

#include "pipeline/params.hpp"
#include "pipeline/state.hpp"

namespace pipeline {

/// Saturating undergrad->grad transition probability,
/// p_UG(G) = p_UG_max * max(0, 1 - G/K_G).
/// Nonincreasing in G, identically zero for G >= K_G.
double p_ug(double G, const ModelParams& params);

/// Competition-suppressed postdoc->faculty transition intensity,
/// p_PF(F) = p_PF_max / (1 + alpha_F * F / K_F).
/// Strictly decreasing in F when alpha_F > 0.
double p_pf(double F, const ModelParams& params);

/// Faculty vacancies created in one year, V = a_F * F.
double vacancies(double F, const ModelParams& params);

/// Direct graduate-completer candidate supply, C_dir = p_GF * g_G * G.
double candidate_supply_direct(double G, const ModelParams& params);

/// Postdoctoral candidate supply, C_post = p_PF(F) * P.
double candidate_supply_postdoc(double P, double F, const ModelParams& params);

struct HireAllocation {
    double total = 0.0; ///< H = min(V, c_dir + c_post)
    double direct = 0.0;
    double postdoc = 0.0;
};

/// Caps total hires at available vacancies and splits them proportionally
/// to candidate supply. Zero combined supply yields zero hires.
HireAllocation allocate_hires(double V, double c_dir, double c_post);

/// One annual step of the unconstrained four-stage recurrence. Transition
/// intensities are evaluated at the current state before any update.
std::pair<PipelineState, StepLedger>
step_unconstrained(const PipelineState& state, double inflow,
                   const ModelParams& params);

/// One annual step of the vacancy-limited downstream map. The graduate
/// stock is exogenous; only (P, F) evolve. Satisfies
/// F_next - (1 - a_F) * F == hires_total exactly.
struct DownstreamStep {
    double P_next = 0.0;
    double F_next = 0.0;
    StepLedger ledger;
};

DownstreamStep step_vacancy_limited(double G, double P, double F,
                                    const ModelParams& params);

/// One-step accumulation predicates: first = (P_{t+1} > P_t),
/// second = (F_{t+1} > F_t), decided from the closed-form conditions
/// rather than by stepping. Ties map to false.
std::pair<bool, bool> accumulation_predicates(const PipelineState& state,
                                              const ModelParams& params);

/// Closed-form bound U_t <= U_0 + B_max / (g_U + a_U), valid for every
/// trajectory with inflow <= B_max. Requires g_U + a_U > 0.
double analytic_bound_U(double U0, double B_max, const ModelParams& params);

} // namespace pipeline
