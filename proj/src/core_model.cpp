#include "pipeline/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pipeline {

namespace {

void require_nonnegative(double value, const char* name) {
    if (!(value >= 0.0)) {
        std::ostringstream msg;
        msg << name << " = " << value << " must be nonnegative";
        throw std::invalid_argument(msg.str());
    }
}

void require_finite(double value, const char* name) {
    if (!std::isfinite(value)) {
        std::ostringstream msg;
        msg << "internal fault: non-finite " << name;
        throw std::runtime_error(msg.str());
    }
}

} // namespace

double p_ug(double G, const ModelParams& params) {
    require_nonnegative(G, "G");
    return params.p_UG_max * std::max(0.0, 1.0 - G / params.K_G);
}

double p_pf(double F, const ModelParams& params) {
    require_nonnegative(F, "F");
    return params.p_PF_max / (1.0 + params.alpha_F * F / params.K_F);
}

double vacancies(double F, const ModelParams& params) {
    require_nonnegative(F, "F");
    return params.a_F * F;
}

double candidate_supply_direct(double G, const ModelParams& params) {
    require_nonnegative(G, "G");
    return params.p_GF * params.g_G * G;
}

double candidate_supply_postdoc(double P, double F, const ModelParams& params) {
    require_nonnegative(P, "P");
    return p_pf(F, params) * P;
}

HireAllocation allocate_hires(double V, double c_dir, double c_post) {
    require_nonnegative(V, "V");
    require_nonnegative(c_dir, "c_dir");
    require_nonnegative(c_post, "c_post");

    HireAllocation alloc;
    const double total_supply = c_dir + c_post;
    if (total_supply <= 0.0)
        return alloc;
    if (V >= total_supply) {
        // Supply-limited: every candidate places, exactly.
        alloc.total = total_supply;
        alloc.postdoc = c_post;
        alloc.direct = c_dir;
        return alloc;
    }
    alloc.total = V;
    alloc.postdoc = std::min(c_post, alloc.total * c_post / total_supply);
    alloc.direct = alloc.total - alloc.postdoc;
    return alloc;
}

std::pair<PipelineState, StepLedger>
step_unconstrained(const PipelineState& state, double inflow,
                   const ModelParams& params) {
    if (!state.nonnegative())
        throw std::invalid_argument("state outside the feasible region");
    require_nonnegative(inflow, "inflow");

    // Intensities at the current state, before any update.
    const double pug = p_ug(state.G, params);
    const double ppf = p_pf(state.F, params);

    StepLedger ledger;
    ledger.regime = Regime::unconstrained;
    ledger.inflow = inflow;
    ledger.p_ug_eff = pug;
    ledger.p_pf_eff = ppf;
    ledger.undergrad_completions = params.g_U * state.U;
    ledger.grad_completions = params.g_G * state.G;
    ledger.exits_U = params.a_U * state.U;
    ledger.exits_G = params.a_G * state.G;
    ledger.exits_P = params.a_P * state.P;
    ledger.exits_F = params.a_F * state.F;
    ledger.vacancies = vacancies(state.F, params);
    ledger.c_dir = candidate_supply_direct(state.G, params);
    ledger.c_post = candidate_supply_postdoc(state.P, state.F, params);
    // Without a vacancy cap every candidate places.
    ledger.hires_dir = ledger.c_dir;
    ledger.hires_post = ledger.c_post;
    ledger.hires_total = ledger.c_dir + ledger.c_post;

    PipelineState next;
    next.t = state.t + 1;
    next.U = (1.0 - params.g_U - params.a_U) * state.U + inflow;
    next.G = (1.0 - params.g_G - params.a_G) * state.G +
             pug * params.g_U * state.U;
    next.P = (1.0 - ppf - params.a_P) * state.P +
             params.p_GP * params.g_G * state.G;
    next.F = (1.0 - params.a_F) * state.F + params.p_GF * params.g_G * state.G +
             ppf * state.P;

    require_finite(next.U, "U");
    require_finite(next.G, "G");
    require_finite(next.P, "P");
    require_finite(next.F, "F");
    return {next, ledger};
}

DownstreamStep step_vacancy_limited(double G, double P, double F,
                                    const ModelParams& params) {
    require_nonnegative(G, "G");
    require_nonnegative(P, "P");
    require_nonnegative(F, "F");

    const double ppf = p_pf(F, params);
    const double V = vacancies(F, params);
    const double c_dir = candidate_supply_direct(G, params);
    const double c_post = candidate_supply_postdoc(P, F, params);
    const HireAllocation alloc = allocate_hires(V, c_dir, c_post);

    DownstreamStep step;
    step.ledger.regime = Regime::vacancy_limited;
    step.ledger.p_pf_eff = ppf;
    step.ledger.grad_completions = params.g_G * G;
    step.ledger.exits_P = params.a_P * P;
    step.ledger.exits_F = params.a_F * F;
    step.ledger.vacancies = V;
    step.ledger.c_dir = c_dir;
    step.ledger.c_post = c_post;
    step.ledger.hires_total = alloc.total;
    step.ledger.hires_post = alloc.postdoc;
    step.ledger.hires_dir = alloc.direct;

    step.F_next = (1.0 - params.a_F) * F + alloc.total;
    step.P_next =
        P - alloc.postdoc - params.a_P * P + params.p_GP * params.g_G * G;

    require_finite(step.P_next, "P");
    require_finite(step.F_next, "F");
    return step;
}

std::pair<bool, bool> accumulation_predicates(const PipelineState& state,
                                              const ModelParams& params) {
    if (!state.nonnegative())
        throw std::invalid_argument("state outside the feasible region");
    const double ppf = p_pf(state.F, params);
    const bool dP_positive = params.p_GP * params.g_G * state.G >
                             (ppf + params.a_P) * state.P;
    const bool dF_positive = params.p_GF * params.g_G * state.G +
                                 ppf * state.P >
                             params.a_F * state.F;
    return {dP_positive, dF_positive};
}

double analytic_bound_U(double U0, double B_max, const ModelParams& params) {
    require_nonnegative(U0, "U0");
    require_nonnegative(B_max, "B_max");
    const double outflow = params.g_U + params.a_U;
    if (!(outflow > 0.0))
        throw std::invalid_argument("g_U + a_U must be positive for the bound");
    return U0 + B_max / outflow;
}

} // namespace pipeline
