#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "fixlab/gauge.hpp"
#include "fixlab/phi.hpp"
#include "fixlab/picard.hpp"
#include "fixlab/seqlab.hpp"
#include "fixlab/space.hpp"
#include "fixlab/verdict.hpp"

// JSON mirrors of the result types, field for field.
namespace fixlab::report {

using nlohmann::json;

template <typename T>
json opt(const std::optional<T>& v) {
    return v ? json(*v) : json(nullptr);
}

inline json to_json(const Witness& w) {
    return {{"points", w.points}, {"distances", w.distances}, {"excess", w.excess}};
}

inline json to_json(const AxiomReport& r) {
    return {{"axiom", to_string(r.axiom)},
            {"holds", r.holds},
            {"witness", r.witness ? to_json(*r.witness) : json(nullptr)},
            {"checked_count", r.checked_count},
            {"grid", r.grid}};
}

inline json to_json(const StructureClass& c) {
    json labels = json::array(), reports = json::array();
    for (auto l : c.applicable) labels.push_back(to_string(l));
    for (const auto& r : c.reports) reports.push_back(to_json(r));
    return {{"label", to_string(c.label)},
            {"applicable", labels},
            {"reports", reports},
            {"zero_self_distance", c.zero_self_distance},
            {"positive_self_distance_at", opt(c.positive_self_distance_at)}};
}

inline json to_json(const Verdict& v) {
    return {{"check", v.check},         {"holds", v.holds},
            {"witness", opt(v.witness)}, {"witness_value", opt(v.witness_value)},
            {"bad_points", v.bad_points}, {"checked_count", v.checked_count},
            {"status", v.status},        {"seed", opt(v.seed)},
            {"notes", v.notes}};
}

inline json to_json(const LimsupEstimate& e) {
    json ladder = json::array();
    for (const auto& r : e.ladder) ladder.push_back({{"epsilon", r.epsilon}, {"sup", r.sup}});
    return {{"s", e.s}, {"value", e.value}, {"ladder", ladder}, {"converged", e.converged}};
}

inline json to_json(const ContractionReport& r) {
    json w = nullptr;
    if (r.witness)
        w = {{"x", r.witness->x},
             {"y", r.witness->y},
             {"image_distance", r.witness->image_distance},
             {"gauge", r.witness->gauge},
             {"bound", r.witness->bound}};
    return {{"gauge", to_string(r.gauge)},
            {"holds", r.holds},
            {"witness", w},
            {"max_slack", r.max_slack},
            {"checked_count", r.checked_count}};
}

inline json to_json(const PicardTrace& t) {
    return {{"start", t.start},
            {"orbit", t.orbit},
            {"rho", t.rho},
            {"limit", opt(t.limit)},
            {"limit_tail", t.limit_tail},
            {"d_asymptotic", t.d_asymptotic},
            {"cauchy_0d", t.cauchy_0d},
            {"converged_0d", t.converged_0d}};
}

inline json to_json(const TraceSummary& t) {
    return {{"start", t.start},
            {"iterations", t.iterations},
            {"final_rho", t.final_rho},
            {"limit", opt(t.limit)},
            {"d_asymptotic", t.d_asymptotic},
            {"cauchy_0d", t.cauchy_0d},
            {"converged_0d", t.converged_0d}};
}

inline json to_json(const FixedPointSets& s) { return {{"d_fixed", s.d_fixed}, {"fixed", s.fixed}}; }

inline json to_json(const TheoremVerdict& v) {
    json applicable = json::array(), hyps = json::array(), checks = json::array(), traces = json::array();
    for (auto t : v.applicable) applicable.push_back(to_string(t));
    for (const auto& h : v.hypotheses)
        hyps.push_back({{"name", h.name}, {"clause", h.clause}, {"status", to_string(h.status)}, {"detail", h.detail}});
    for (const auto& c : v.checks) checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    for (const auto& t : v.traces) traces.push_back(to_json(t));
    const FixedPointReport& fp = v.fixed_points;
    json limits = json::array();
    for (const auto& z : fp.limits) limits.push_back(opt(z));
    json fixed = {{"limits", limits},
                  {"z", opt(fp.z)},
                  {"self_distance", opt(fp.self_distance)},
                  {"displacement", opt(fp.displacement)},
                  {"max_pairwise_distance", fp.max_pairwise_distance},
                  {"max_pairwise_gap", fp.max_pairwise_gap},
                  {"brute_force", fp.brute_force ? to_json(*fp.brute_force) : json(nullptr)}};
    return {{"theorem_id", v.theorem ? json(to_string(*v.theorem)) : json(nullptr)},
            {"applicable", applicable},
            {"hypotheses", hyps},
            {"conclusion_status", to_string(v.conclusion)},
            {"conclusion_checks", checks},
            {"fixed_point_report", fixed},
            {"space_class", to_json(v.space_class)},
            {"contraction", to_json(v.contraction)},
            {"normal", to_json(v.normal)},
            {"asymptotic_normal", to_json(v.asymptotic_normal)},
            {"nearly_right_admissible", to_json(v.nearly_right_admissible)},
            {"traces", traces}};
}

inline json to_json(const SemiCauchyProfile& p) {
    json violation = nullptr;
    if (p.violation) violation = {p.violation->first, p.violation->second};
    return {{"tol", p.tol},
            {"epsilon", p.epsilon},
            {"final_gap", p.final_gap},
            {"semi_cauchy", p.semi_cauchy},
            {"onset", opt(p.onset)},
            {"cauchy_violation", p.cauchy_violation},
            {"violation", violation},
            {"violation_distance", p.violation_distance}};
}

inline json to_json(const WitnessReport& r) {
    json rows = json::array();
    for (const auto& row : r.rows) {
        json shifted = json::array();
        for (const auto& pr : row.shifted) shifted.push_back({opt(pr[0]), opt(pr[1])});
        rows.push_back({{"j", row.j},
                        {"m", row.m},
                        {"n", row.n},
                        {"d_mn", row.d_mn},
                        {"d_m_prev", row.d_m_prev},
                        {"d_prev_n", row.d_prev_n},
                        {"shifted", shifted},
                        {"separated", row.separated},
                        {"first_crossing", row.first_crossing}});
    }
    return {{"epsilon", r.epsilon},
            {"j_eps", opt(r.j_eps)},
            {"rows", rows},
            {"complete", r.complete},
            {"last_rank", opt(r.last_rank)}};
}

}  // namespace fixlab::report
