#pragma once

#include <string>
#include <vector>

namespace pipeline {

enum class Regime { unconstrained, vacancy_limited };

const char* to_string(Regime regime);

/// Latent stock vector (U, G, P, F) at one annual step.
struct PipelineState {
    double U = 0.0; ///< undergraduate stock (persons)
    double G = 0.0; ///< graduate stock (persons)
    double P = 0.0; ///< postdoc stock (persons)
    double F = 0.0; ///< faculty stock (persons)
    int t = 0;      ///< year index

    bool nonnegative() const { return U >= 0 && G >= 0 && P >= 0 && F >= 0; }
};

/// Per-step flow accounting connecting state t to state t+1.
struct StepLedger {
    double inflow = 0.0;               ///< B(t), new undergraduate entrants
    double undergrad_completions = 0.0; ///< g_U * U_t
    double grad_completions = 0.0;      ///< g_G * G_t
    double exits_U = 0.0;
    double exits_G = 0.0;
    double exits_P = 0.0;
    double exits_F = 0.0;
    double vacancies = 0.0;    ///< V_t = a_F * F_t
    double c_dir = 0.0;        ///< direct graduate candidate supply
    double c_post = 0.0;       ///< postdoctoral candidate supply
    double hires_total = 0.0;  ///< H_t
    double hires_post = 0.0;   ///< hires drawn from the postdoc pool
    double hires_dir = 0.0;    ///< hires drawn from the direct pool
    double p_ug_eff = 0.0;     ///< effective undergrad->grad value this step
    double p_pf_eff = 0.0;     ///< effective postdoc->faculty value this step
    Regime regime = Regime::unconstrained;
};

/// Ordered sequence of states with the ledgers connecting them.
/// ledgers[k] records the flows taking states[k] to states[k+1].
struct Trajectory {
    std::string label;
    Regime regime = Regime::unconstrained;
    std::vector<PipelineState> states;
    std::vector<StepLedger> ledgers;

    const PipelineState& initial() const { return states.front(); }
    const PipelineState& final_state() const { return states.back(); }
};

} // namespace pipeline
