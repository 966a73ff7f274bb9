#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "fixlab/errors.hpp"
#include "fixlab/gauge.hpp"
#include "fixlab/phi.hpp"
#include "fixlab/space.hpp"
#include "fixlab/verdict.hpp"

namespace fixlab {

inline constexpr double kDefaultTol = 1e-9;
inline constexpr std::size_t kDefaultMaxIters = 10000;
inline constexpr std::size_t kDefaultWindow = 8;
inline constexpr std::size_t kMaxTabulatedStarts = 64;
inline constexpr std::size_t kAnalyticStarts = 5;

/// The orbit x_n = T^n x_0 and its 0d diagnostics.
struct PicardTrace {
    Point start = 0.0;
    std::vector<Point> orbit;   // x_0 .. x_N
    std::vector<double> rho;    // rho[n] = d(x_n, x_{n+1}), length N
    std::optional<Point> limit;
    std::vector<double> limit_tail;  // d(x_n, limit) over the trailing window
    bool d_asymptotic = false;
    bool cauchy_0d = false;
    bool converged_0d = false;

    std::size_t iterations() const { return rho.size(); }
};

/// True iff the last `window` displacements are all within `tol`.
inline bool check_d_asymptotic(std::span<const double> rho, double tol, std::size_t window = kDefaultWindow) {
    if (window == 0 || rho.size() < window) return false;
    return std::all_of(rho.end() - static_cast<std::ptrdiff_t>(window), rho.end(), [tol](double r) { return r <= tol; });
}

inline bool check_d_asymptotic(const PicardTrace& trace, double tol, std::size_t window = kDefaultWindow) {
    return check_d_asymptotic(trace.rho, tol, window);
}

/// True iff d(x_m, x_n) <= tol for every m < n among the last `window` points.
template <typename Dist>
bool detect_0d_cauchy(std::span<const Point> orbit, const Dist& d, double tol, std::size_t window = kDefaultWindow) {
    if (window < 2 || orbit.size() < window) return false;
    const std::size_t first = orbit.size() - window;
    for (std::size_t m = first; m < orbit.size(); ++m)
        for (std::size_t n = m + 1; n < orbit.size(); ++n)
            if (!(d(orbit[m], orbit[n]) <= tol)) return false;
    return true;
}

inline bool detect_0d_cauchy(const DistanceStructure& d, const PicardTrace& trace, double tol,
                             std::size_t window = kDefaultWindow) {
    return detect_0d_cauchy(std::span<const Point>(trace.orbit), d, tol, window);
}

/// A point z with d(x_n, z) <= tol across the trailing window, if one is found.
///
/// Candidates are every sample point, plus the trailing orbit points and
/// T(x_N) on analytic spaces. Among accepted candidates a d-fixed
/// one (d(z,Tz) <= tol) wins, then the smaller trailing average (tabulated),
/// then the smaller coordinate.
inline std::optional<Point> find_0d_limit(const DistanceStructure& d, const SelfMapSpec& t, const PicardTrace& trace,
                                          double tol, std::size_t window = kDefaultWindow) {
    if (trace.orbit.empty()) return std::nullopt;
    const std::size_t w = std::min(std::max<std::size_t>(window, 1), trace.orbit.size());
    const std::span<const Point> tail(trace.orbit.end() - static_cast<std::ptrdiff_t>(w), trace.orbit.end());

    std::vector<Point> candidates(d.samples().begin(), d.samples().end());
    if (!d.is_tabulated()) {
        candidates.insert(candidates.end(), tail.begin(), tail.end());
        const Point next = t(trace.orbit.back());
        if (d.contains(next)) candidates.push_back(next);
    }

    struct Scored {
        bool not_fixed;
        double average;
        Point z;
    };
    std::optional<Scored> best;
    for (Point z : candidates) {
        double worst = 0.0, sum = 0.0;
        for (Point x : tail) {
            const double v = d(x, z);
            worst = std::max(worst, v);
            sum += v;
        }
        if (!(worst <= tol)) continue;
        Scored s{!(d(z, t(z)) <= tol), d.is_tabulated() ? sum / static_cast<double>(tail.size()) : 0.0, z};
        auto key = [](const Scored& a) { return std::tuple(a.not_fixed, a.average, a.z); };
        if (!best || key(s) < key(*best)) best = s;
    }
    if (!best) return std::nullopt;
    return best->z;
}

/// Picard iteration from x0 until the displacements settle and the trailing window is 0d-Cauchy,
/// or `max_iters` steps. Non-convergence is reported through the flags.
inline PicardTrace iterate(const DistanceStructure& d, const SelfMapSpec& t, Point x0,
                           std::size_t max_iters = kDefaultMaxIters, double tol = kDefaultTol,
                           std::size_t window = kDefaultWindow) {
    if (!d.contains(x0)) throw LoadError("start " + format_number(x0) + " is not a point of the space");
    PicardTrace tr;
    tr.start = x0;
    tr.orbit.push_back(x0);
    while (tr.rho.size() < max_iters) {
        const Point x = tr.orbit.back();
        const Point next = t(x);
        tr.rho.push_back(d(x, next));
        tr.orbit.push_back(next);
        if (tr.rho.back() <= tol && check_d_asymptotic(tr.rho, tol, window) &&
            detect_0d_cauchy(std::span<const Point>(tr.orbit), d, tol, window))
            break;
    }
    tr.d_asymptotic = check_d_asymptotic(tr.rho, tol, window);
    tr.cauchy_0d = detect_0d_cauchy(d, tr, tol, window);
    tr.limit = find_0d_limit(d, t, tr, tol, window);
    tr.converged_0d = tr.limit.has_value();
    if (tr.limit) {
        const std::size_t w = std::min(window, tr.orbit.size());
        for (std::size_t n = tr.orbit.size() - w; n < tr.orbit.size(); ++n) tr.limit_tail.push_back(d(tr.orbit[n], *tr.limit));
    }
    return tr;
}

struct FixedPointSets {
    std::vector<Point> d_fixed;  // d(z, Tz) <= slack
    std::vector<Point> fixed;    // Tz = z
};

inline FixedPointSets brute_force_fixed_points(const DistanceStructure& d, const SelfMapSpec& t) {
    if (!d.is_tabulated() || t.kind() != SelfMapSpec::Kind::tabulated)
        throw LoadError("brute-force fixed points need a tabulated space and map");
    FixedPointSets sets;
    for (Point z : d.samples()) {
        const Point tz = t(z);
        if (d(z, tz) <= kSlack) sets.d_fixed.push_back(z);
        if (tz == z) sets.fixed.push_back(z);
    }
    return sets;
}

// ---------------------------------------------------------------------------
// Theorem harness

enum class TheoremId { T1, T2, T3, T4, T5 };

inline std::string_view to_string(TheoremId t) {
    switch (t) {
        case TheoremId::T1: return "T1";
        case TheoremId::T2: return "T2";
        case TheoremId::T3: return "T3";
        case TheoremId::T4: return "T4";
        case TheoremId::T5: return "T5";
    }
    return "?";
}

/// What each theorem concludes, for text reports.
inline std::string_view conclusion_text(TheoremId t) {
    switch (t) {
        case TheoremId::T1:
        case TheoremId::T2:
        case TheoremId::T4: return "global Picard operator modulo d";
        case TheoremId::T3:
        case TheoremId::T5: return "unique fixed point z with d(z,z)=0, reached from every start";
    }
    return "?";
}

enum class HypothesisStatus { verified_on_samples, derived, assumed, failed };

inline std::string_view to_string(HypothesisStatus s) {
    switch (s) {
        case HypothesisStatus::verified_on_samples: return "verified-on-samples";
        case HypothesisStatus::derived: return "derived";
        case HypothesisStatus::assumed: return "assumed";
        case HypothesisStatus::failed: return "failed";
    }
    return "?";
}

enum class ConclusionStatus { confirmed, refuted, not_applicable };

inline std::string_view to_string(ConclusionStatus s) {
    switch (s) {
        case ConclusionStatus::confirmed: return "confirmed";
        case ConclusionStatus::refuted: return "refuted";
        case ConclusionStatus::not_applicable: return "not-applicable";
    }
    return "?";
}

struct Hypothesis {
    std::string name;
    std::string clause;
    HypothesisStatus status = HypothesisStatus::failed;
    std::string detail;

    bool ok() const { return status != HypothesisStatus::failed; }
};

struct ConclusionCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct FixedPointReport {
    std::vector<std::optional<Point>> limits;  // one per start, in start order
    std::optional<Point> z;
    std::optional<double> self_distance;  // d(z,z)
    std::optional<double> displacement;   // d(z,Tz)
    double max_pairwise_distance = 0.0;   // max d(z_i, z_j)
    double max_pairwise_gap = 0.0;        // max |z_i - z_j|
    std::optional<FixedPointSets> brute_force;
};

struct TraceSummary {
    Point start = 0.0;
    std::size_t iterations = 0;
    double final_rho = 0.0;
    std::optional<Point> limit;
    bool d_asymptotic = false;
    bool cauchy_0d = false;
    bool converged_0d = false;
};

inline TraceSummary summarize(const PicardTrace& tr) {
    return {tr.start, tr.iterations(), tr.rho.empty() ? 0.0 : tr.rho.back(), tr.limit,
            tr.d_asymptotic, tr.cauchy_0d, tr.converged_0d};
}

struct TheoremVerdict {
    std::optional<TheoremId> theorem;   // selected, or the strongest one the space shape allows
    std::vector<TheoremId> applicable;  // all theorems whose hypotheses hold, strongest first
    std::vector<Hypothesis> hypotheses;
    ConclusionStatus conclusion = ConclusionStatus::not_applicable;
    std::vector<ConclusionCheck> checks;
    FixedPointReport fixed_points;
    StructureClass space_class;
    ContractionReport contraction;
    Verdict normal;
    Verdict asymptotic_normal;
    Verdict nearly_right_admissible;
    std::vector<TraceSummary> traces;
    std::vector<PicardTrace> full_traces;

    const Hypothesis* hypothesis(std::string_view name) const {
        for (const auto& h : hypotheses)
            if (h.name == name) return &h;
        return nullptr;
    }
};

struct HarnessOptions {
    double tol = kDefaultTol;
    std::size_t max_iters = kDefaultMaxIters;
    std::size_t window = kDefaultWindow;
    ScanPlan scan;
    std::vector<double> orbit_seeds = {1e-3, 1e-1, 1.0, 10.0, 100.0};
    std::size_t orbit_max_iters = 100000;
    double orbit_tol = 1e-4;
    std::uint64_t seed = kDefaultSeed;
    std::size_t suborbits = kDefaultSuborbits;
    bool assume_d_asymptotic = false;
};

/// Default starts: every point of a small table (evenly thinned beyond 64), or 5 evenly spaced domain points.
inline std::vector<Point> default_starts(const DistanceStructure& d) {
    std::vector<Point> starts;
    if (d.is_tabulated()) {
        const std::size_t n = d.size();
        const std::size_t k = std::min(n, kMaxTabulatedStarts);
        for (std::size_t i = 0; i < k; ++i)
            starts.push_back(k == n ? static_cast<double>(i) : std::floor(static_cast<double>(i) * static_cast<double>(n - 1) / static_cast<double>(k - 1)));
        return starts;
    }
    for (std::size_t i = 0; i < kAnalyticStarts; ++i)
        starts.push_back(i + 1 == kAnalyticStarts
                             ? d.hi()
                             : d.lo() + (d.hi() - d.lo()) * static_cast<double>(i) / static_cast<double>(kAnalyticStarts - 1));
    return starts;
}

namespace detail {

inline Hypothesis axiom_hypothesis(const StructureClass& c, AxiomId a) {
    const AxiomReport& r = c.report(a);
    Hypothesis h{std::string(to_string(a)), std::string(clause(a)),
                 r.holds ? HypothesisStatus::verified_on_samples : HypothesisStatus::failed,
                 std::to_string(r.checked_count) + " tuples checked"};
    if (r.witness) {
        h.detail += "; violated at (";
        for (std::size_t i = 0; i < r.witness->points.size(); ++i)
            h.detail += (i ? ", " : "") + format_number(r.witness->points[i]);
        h.detail += ")";
    }
    return h;
}

inline Hypothesis verdict_hypothesis(std::string name, std::string clause, const Verdict& v, bool ran) {
    Hypothesis h{std::move(name), std::move(clause), HypothesisStatus::failed, v.status};
    if (!ran) {
        h.detail = "not checked: phi is not normal";
        return h;
    }
    if (v.holds) h.status = HypothesisStatus::verified_on_samples;
    if (v.witness) h.detail += "; witness " + format_number(*v.witness);
    return h;
}

}  // namespace detail

/// Checks the hypotheses of the fixed-point theorems on concrete data, picks the
/// strongest one that applies, and confirms its conclusion by Picard iteration.
///
/// Preference order is T3 > T5 > T2 > T4 > T1:
///   T3  reflexive triangular + sufficient, any gauge
///   T5  triangular + sufficient, gauge M1 or M2
///   T2  reflexive triangular, any gauge
///   T4  triangular, gauge M1 or M2
///   T1  triangular, any gauge, d-asymptotic map
/// T2..T5 need phi normal, nearly right admissible and asymptotic normal;
/// T1 needs phi normal and nearly right admissible. All need the contraction
/// and 0-completeness, which is always listed as assumed.
inline TheoremVerdict run_theorem_harness(const DistanceStructure& d, const SelfMapSpec& t,
                                          const ComparisonFunction& phi, GaugeKind g, std::vector<Point> starts,
                                          const HarnessOptions& opt = {}) {
    TheoremVerdict v;
    if (starts.empty()) starts = default_starts(d);
    std::sort(starts.begin(), starts.end());
    starts.erase(std::unique(starts.begin(), starts.end()), starts.end());

    v.space_class = classify_structure(d);
    const auto scan = opt.scan.points();
    v.normal = check_normal(phi, scan);
    const bool normal = v.normal.holds;
    if (normal) {
        std::vector<double> seeds = opt.orbit_seeds;
        double diameter = 0.0;
        for (std::size_t i = 0; i < d.size(); ++i)
            for (std::size_t j = 0; j < d.size(); ++j) diameter = std::max(diameter, d.sample_distance(i, j));
        if (diameter > 0.0) seeds.push_back(diameter);
        v.asymptotic_normal =
            check_asymptotic_normal(phi, seeds, opt.orbit_max_iters, opt.orbit_tol, opt.seed, opt.suborbits);
        v.nearly_right_admissible = check_nearly_right_admissible(phi, scan);
    } else {
        v.asymptotic_normal.check = "asymptotic_normal";
        v.asymptotic_normal.holds = false;
        v.nearly_right_admissible.check = "nearly_right_admissible";
        v.nearly_right_admissible.holds = false;
    }
    v.contraction = verify_contraction(d, t, phi, g);

    for (Point s : starts) v.full_traces.push_back(iterate(d, t, s, opt.max_iters, opt.tol, opt.window));
    for (const auto& tr : v.full_traces) v.traces.push_back(summarize(tr));

    const bool tri = v.space_class.holds(AxiomId::triangular);
    const bool rtri = v.space_class.holds(AxiomId::reflexive_triangular);
    const bool suff = v.space_class.holds(AxiomId::sufficient);
    const bool low_gauge = g != GaugeKind::M3;
    const bool asym = normal && v.asymptotic_normal.holds;
    const bool nra = normal && v.nearly_right_admissible.holds;
    const bool contractive = v.contraction.holds;

    v.hypotheses.push_back(detail::axiom_hypothesis(v.space_class, AxiomId::triangular));
    v.hypotheses.push_back(detail::axiom_hypothesis(v.space_class, AxiomId::reflexive_triangular));
    v.hypotheses.push_back(detail::axiom_hypothesis(v.space_class, AxiomId::sufficient));
    v.hypotheses.push_back({"0_complete", "0-complete: every 0d-Cauchy sequence 0d-converges",
                            HypothesisStatus::assumed, "not checkable from finite data"});
    v.hypotheses.push_back(detail::verdict_hypothesis("normal", "normal: phi(0)=0 and phi(t)<t for t>0", v.normal, true));
    v.hypotheses.push_back(detail::verdict_hypothesis(
        "asymptotic_normal", "asymptotic normal: r_{n+1} <= phi(r_n) forces r_n -> 0", v.asymptotic_normal, normal));
    v.hypotheses.push_back(detail::verdict_hypothesis("nearly_right_admissible",
                                                      "nearly right admissible: L+phi(s) < s off a countable set Q",
                                                      v.nearly_right_admissible, normal));
    {
        Hypothesis h{"contraction", "contraction: d(Tx,Ty) <= phi(G(x,y)) with G=" + std::string(to_string(g)),
                     contractive ? HypothesisStatus::verified_on_samples : HypothesisStatus::failed,
                     "max slack " + format_number(v.contraction.max_slack)};
        if (v.contraction.witness)
            h.detail += "; violated at (" + format_number(v.contraction.witness->x) + ", " +
                        format_number(v.contraction.witness->y) + ")";
        v.hypotheses.push_back(std::move(h));
    }
    bool d_asym = false;
    {
        Hypothesis h;
        h.name = "d_asymptotic";
        h.clause = "d-asymptotic: d(T^n x, T^{n+1} x) -> 0 for every x";
        const bool every_trace = std::all_of(v.full_traces.begin(), v.full_traces.end(),
                                             [](const PicardTrace& tr) { return tr.d_asymptotic; });
        if (contractive && asym && (rtri || (tri && low_gauge))) {
            h.status = HypothesisStatus::derived;
            h.detail = rtri ? "contraction with an asymptotic normal phi on a reflexive triangular space"
                            : "contraction with an asymptotic normal phi and gauge M1/M2 on a triangular space";
        } else if (opt.assume_d_asymptotic) {
            h.status = HypothesisStatus::assumed;
            h.detail = "assumed by request";
        } else {
            h.status = every_trace ? HypothesisStatus::verified_on_samples : HypothesisStatus::failed;
            h.detail = every_trace ? "displacements vanish on every sampled start"
                                   : "displacements do not vanish on some sampled start";
        }
        d_asym = h.ok();
        v.hypotheses.push_back(std::move(h));
    }

    const bool common = contractive && normal && nra;
    struct Candidate {
        TheoremId id;
        bool shape;  // space and gauge requirements
        bool full;
    };
    const Candidate candidates[] = {
        {TheoremId::T3, rtri && suff, common && asym},
        {TheoremId::T5, tri && suff && low_gauge, common && asym},
        {TheoremId::T2, rtri, common && asym},
        {TheoremId::T4, tri && low_gauge, common && asym},
        {TheoremId::T1, tri, common && d_asym},
    };
    for (const auto& c : candidates) {
        if (c.shape && !v.theorem) v.theorem = c.id;
        if (c.shape && c.full) v.applicable.push_back(c.id);
    }
    if (!v.applicable.empty()) v.theorem = v.applicable.front();

    // Fixed-point evidence, reported whether or not a theorem applies.
    FixedPointReport& fp = v.fixed_points;
    for (const auto& tr : v.full_traces) fp.limits.push_back(tr.limit);
    for (const auto& z : fp.limits)
        if (z && !fp.z) fp.z = *z;
    if (fp.z) {
        fp.self_distance = d(*fp.z, *fp.z);
        fp.displacement = d(*fp.z, t(*fp.z));
    }
    for (std::size_t i = 0; i < fp.limits.size(); ++i)
        for (std::size_t j = i + 1; j < fp.limits.size(); ++j)
            if (fp.limits[i] && fp.limits[j]) {
                fp.max_pairwise_distance = std::max(fp.max_pairwise_distance, d(*fp.limits[i], *fp.limits[j]));
                fp.max_pairwise_gap = std::max(fp.max_pairwise_gap, std::fabs(*fp.limits[i] - *fp.limits[j]));
            }
    if (d.is_tabulated() && t.kind() == SelfMapSpec::Kind::tabulated) fp.brute_force = brute_force_fixed_points(d, t);

    if (v.applicable.empty()) {
        v.conclusion = ConclusionStatus::not_applicable;
        return v;
    }

    const TheoremId chosen = *v.theorem;
    const bool unique_point = chosen == TheoremId::T3 || chosen == TheoremId::T5;
    const double tol = opt.tol;
    auto check = [&](std::string name, bool passed, std::string detail) {
        v.checks.push_back({std::move(name), passed, std::move(detail)});
    };

    const bool all_converged = std::all_of(fp.limits.begin(), fp.limits.end(), [](const auto& z) { return z.has_value(); });
    check("orbits_0d_converge", all_converged,
          std::to_string(std::count_if(fp.limits.begin(), fp.limits.end(), [](const auto& z) { return z.has_value(); })) +
              " of " + std::to_string(fp.limits.size()) + " orbits converge");

    double worst_displacement = 0.0, worst_self = 0.0;
    for (const auto& z : fp.limits)
        if (z) {
            worst_displacement = std::max(worst_displacement, d(*z, t(*z)));
            worst_self = std::max(worst_self, d(*z, *z));
        }
    check("limits_d_fixed", all_converged && worst_displacement <= tol,
          "max d(z,Tz) = " + format_number(worst_displacement));
    check("limits_d_singleton", all_converged && fp.max_pairwise_distance <= tol,
          "max d(z_i,z_j) = " + format_number(fp.max_pairwise_distance));

    if (unique_point) {
        check("zero_self_distance", all_converged && worst_self <= tol, "max d(z,z) = " + format_number(worst_self));
        check("limits_coincide", all_converged && fp.max_pairwise_gap <= tol,
              "max |z_i - z_j| = " + format_number(fp.max_pairwise_gap));
    }

    if (fp.brute_force && all_converged) {
        const auto& bf = *fp.brute_force;
        const Point z = *fp.z;
        if (unique_point) {
            const bool agree = bf.fixed.size() == 1 && bf.fixed.front() == z && bf.d_fixed.size() == 1 &&
                               bf.d_fixed.front() == z;
            check("brute_force_agrees", agree,
                  std::to_string(bf.fixed.size()) + " fixed and " + std::to_string(bf.d_fixed.size()) +
                      " d-fixed point(s) by exhaustive scan");
        } else {
            bool singleton = !bf.d_fixed.empty();
            for (Point a : bf.d_fixed)
                for (Point b : bf.d_fixed) singleton = singleton && d(a, b) <= tol;
            bool contains_limits = true;
            for (const auto& lim : fp.limits)
                contains_limits = contains_limits &&
                                  std::find(bf.d_fixed.begin(), bf.d_fixed.end(), *lim) != bf.d_fixed.end();
            check("brute_force_agrees", singleton && contains_limits,
                  std::to_string(bf.d_fixed.size()) + " d-fixed point(s) by exhaustive scan");
        }
    }

    const bool all_pass = std::all_of(v.checks.begin(), v.checks.end(), [](const ConclusionCheck& c) { return c.passed; });
    v.conclusion = all_pass ? ConclusionStatus::confirmed : ConclusionStatus::refuted;
    return v;
}

}  // namespace fixlab
