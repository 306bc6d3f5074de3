#include "pipeline/params.hpp"

#include <cmath>
#include <sstream>

namespace pipeline {

namespace {

void require_unit_interval(double value, const char* name) {
    if (!(value >= 0.0 && value <= 1.0)) {
        std::ostringstream msg;
        msg << "parameter " << name << " = " << value
            << " outside [0, 1]";
        throw std::invalid_argument(msg.str());
    }
}

} // namespace

void ModelParams::validate() const {
    require_unit_interval(g_U, "g_U");
    require_unit_interval(a_U, "a_U");
    require_unit_interval(g_G, "g_G");
    require_unit_interval(a_G, "a_G");
    require_unit_interval(p_GP, "p_GP");
    require_unit_interval(p_GF, "p_GF");
    require_unit_interval(a_P, "a_P");
    require_unit_interval(a_F, "a_F");
    require_unit_interval(p_UG_max, "p_UG_max");
    require_unit_interval(p_PF_max, "p_PF_max");
    require_unit_interval(r_M, "r_M");
    require_unit_interval(r_D, "r_D");
    if (!(K_G > 0.0))
        throw std::invalid_argument("K_G must be positive");
    if (!(K_F > 0.0))
        throw std::invalid_argument("K_F must be positive");
    if (!(alpha_F >= 0.0))
        throw std::invalid_argument("alpha_F must be nonnegative");
    if (p_GP + p_GF > 1.0 + 1e-12)
        throw std::invalid_argument("p_GP + p_GF exceeds 1");
    if (std::abs(r_M + r_D - 1.0) > 1e-9)
        throw std::invalid_argument("r_M + r_D must equal 1");
}

namespace {

FeasibilityCondition cond(const std::string& name, bool ok, double lhs,
                          const char* relation, double rhs) {
    std::ostringstream detail;
    detail << lhs << " " << relation << " " << rhs;
    return {name, ok, detail.str()};
}

} // namespace

bool FeasibilityReport::positivity_ok() const {
    for (const auto& c : positivity)
        if (!c.ok) return false;
    return true;
}

bool FeasibilityReport::boundedness_ok() const {
    for (const auto& c : boundedness)
        if (!c.ok) return false;
    return true;
}

std::string FeasibilityReport::first_positivity_failure() const {
    for (const auto& c : positivity)
        if (!c.ok) return c.name;
    return {};
}

FeasibilityReport feasibility_check(const ModelParams& p) {
    FeasibilityReport report;
    report.positivity.push_back(
        cond("g_U + a_U <= 1", p.g_U + p.a_U <= 1.0, p.g_U + p.a_U, "<=", 1.0));
    report.positivity.push_back(
        cond("g_G + a_G <= 1", p.g_G + p.a_G <= 1.0, p.g_G + p.a_G, "<=", 1.0));
    report.positivity.push_back(cond("p_PF_max + a_P <= 1",
                                     p.p_PF_max + p.a_P <= 1.0,
                                     p.p_PF_max + p.a_P, "<=", 1.0));
    report.positivity.push_back(cond("p_UG_max >= 0", p.p_UG_max >= 0.0,
                                     p.p_UG_max, ">=", 0.0));
    report.positivity.push_back(cond("p_PF_max >= 0", p.p_PF_max >= 0.0,
                                     p.p_PF_max, ">=", 0.0));
    report.positivity.push_back(
        cond("a_F <= 1", p.a_F <= 1.0, p.a_F, "<=", 1.0));

    report.boundedness.push_back(
        cond("g_U + a_U > 0", p.g_U + p.a_U > 0.0, p.g_U + p.a_U, ">", 0.0));
    report.boundedness.push_back(
        cond("g_G + a_G > 0", p.g_G + p.a_G > 0.0, p.g_G + p.a_G, ">", 0.0));
    report.boundedness.push_back(cond("a_P > 0", p.a_P > 0.0, p.a_P, ">", 0.0));
    report.boundedness.push_back(cond("a_F > 0", p.a_F > 0.0, p.a_F, ">", 0.0));
    return report;
}

} // namespace pipeline
