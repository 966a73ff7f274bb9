#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "fixlab/config.hpp"
#include "fixlab/errors.hpp"
#include "fixlab/gauge.hpp"
#include "fixlab/phi.hpp"
#include "fixlab/picard.hpp"
#include "fixlab/report.hpp"
#include "fixlab/seqlab.hpp"
#include "fixlab/space.hpp"

namespace fixlab::cli {

using nlohmann::json;

enum ExitCode : int { kHolds = 0, kFails = 1, kError = 2 };

inline constexpr std::size_t kDefaultJMax = 100;
/// Gap tolerance of the semi-Cauchy profile when no --tol is given.
inline constexpr double kSequenceTol = 1e-3;

/// Command-line overrides; unset fields fall back to the config document.
struct Flags {
    std::string task;
    std::string config;
    std::string json_out;
    std::optional<double> tol;
    std::optional<std::size_t> grid;
    std::optional<std::uint64_t> seed;
    std::optional<double> eps;
    std::optional<std::string> gauge;
};

/// Number for text reports: shortest round-trip form, with ".0" on integral values.
inline std::string text_number(double v) {
    std::string s = format_number(v);
    if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
    return s;
}

/// --seed, then the config, then FIXLAB_SEED, then the built-in default.
inline std::uint64_t resolve_seed(const Flags& f, const config::RunConfig& c) {
    if (f.seed) return *f.seed;
    if (c.options.seed) return *c.options.seed;
    if (const char* env = std::getenv("FIXLAB_SEED"); env && *env) {
        std::uint64_t v = 0;
        const std::string_view s(env);
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || ptr != s.data() + s.size())
            throw LoadError("FIXLAB_SEED='" + std::string(s) + "' is not a nonnegative integer");
        return v;
    }
    return kDefaultSeed;
}

namespace detail {

struct Outcome {
    int code = kHolds;
    json result;
};

inline void apply_flags(const Flags& f, config::RunConfig& c) {
    if (f.tol) {
        if (!(*f.tol > 0.0)) throw LoadError("--tol must be positive");
        c.options.tol = *f.tol;
    }
    if (f.grid) {
        if (*f.grid == 0) throw LoadError("--grid must be positive");
        c.options.grid = *f.grid;
    }
    if (f.eps) {
        if (!(*f.eps > 0.0)) throw LoadError("--eps must be positive");
        c.options.eps = *f.eps;
    }
    if (f.gauge) {
        parse_gauge(*f.gauge);
        c.gauge = *f.gauge;
    }
}

inline std::string point_list(const std::vector<Point>& pts) {
    std::string s = "(";
    for (std::size_t i = 0; i < pts.size(); ++i) s += (i ? ", " : "") + text_number(pts[i]);
    return s + ")";
}

inline void print_verdict(std::ostream& out, const Verdict& v, std::string_view clause) {
    out << "  " << (v.holds ? "[holds]" : "[fails]") << ' ' << clause << " -- " << v.status;
    if (!v.holds && v.witness) {
        out << "; witness t=" << text_number(*v.witness);
        if (v.witness_value) out << " (value " << text_number(*v.witness_value) << ")";
    }
    out << '\n';
    for (const auto& n : v.notes) out << "      " << n << '\n';
}

inline Outcome classify_space(const config::RunConfig& c, std::ostream& out) {
    const DistanceStructure d = config::build_space(c);
    const StructureClass cls = classify_structure(d);
    out << "space: " << d.describe() << '\n' << "class: " << to_string(cls.label) << '\n';
    for (const auto& r : cls.reports) {
        out << "  " << (r.holds ? "[holds]" : "[fails]") << ' ' << clause(r.axiom);
        if (r.witness) out << " -- witness " << point_list(r.witness->points) << ", excess " << text_number(r.witness->excess);
        out << '\n';
    }
    if (cls.positive_self_distance_at)
        out << "positive self-distance at x=" << text_number(*cls.positive_self_distance_at) << '\n';
    return {kHolds, {{"space", d.describe()}, {"structure", report::to_json(cls)}}};
}

inline Outcome classify_phi(const config::RunConfig& c, std::uint64_t seed, std::ostream& out) {
    const ComparisonFunction phi = config::build_phi(c);
    const HarnessOptions h = config::harness_options(c, seed);
    const auto scan = h.scan.points();
    const Verdict normal = check_normal(phi, scan);
    const Verdict asym = check_asymptotic_normal(phi, h.orbit_seeds, h.orbit_max_iters, h.orbit_tol, seed, h.suborbits);
    const Verdict nra = check_nearly_right_admissible(phi, scan);

    out << "phi(t)=" << phi.definition().to_string() << '\n';
    print_verdict(out, normal, "normal: phi(0)=0 and phi(t)<t for t>0");
    print_verdict(out, asym, "asymptotic normal: r_{n+1} <= phi(r_n) forces r_n -> 0");
    print_verdict(out, nra, "nearly right admissible: L+phi(s) < s off a countable set Q");

    json result = {{"phi", phi.definition().to_string()},
                   {"Q", phi.exceptional()},
                   {"normal", report::to_json(normal)},
                   {"asymptotic_normal", report::to_json(asym)},
                   {"nearly_right_admissible", report::to_json(nra)},
                   {"L_plus", nullptr}};
    if (c.options.s) {
        const LimsupEstimate est = estimate_L_plus(phi, *c.options.s);
        out << "L+phi(" << text_number(est.s) << ") ~ " << text_number(est.value)
            << (est.converged ? "" : " (ladder not converged)") << '\n';
        result["L_plus"] = report::to_json(est);
    }
    const bool ok = normal.holds && asym.holds && nra.holds;
    return {ok ? kHolds : kFails, result};
}

inline Outcome check_contraction(const config::RunConfig& c, std::ostream& out) {
    const DistanceStructure d = config::build_space(c);
    const SelfMapSpec t = config::build_map(c, d);
    const ComparisonFunction phi = config::build_phi(c);
    const GaugeKind g = config::build_gauge(c);
    const ContractionReport r = verify_contraction(d, t, phi, g);

    out << "space: " << d.describe() << "; " << t.describe() << "; phi(t)=" << phi.definition().to_string() << '\n';
    out << (r.holds ? "[holds]" : "[fails]") << " contraction: d(Tx,Ty) <= phi(G(x,y)) with G=" << to_string(g) << " -- "
        << r.checked_count << " pairs, max slack " << text_number(r.max_slack) << '\n';
    if (r.witness) {
        const auto& w = *r.witness;
        out << "witness (" << text_number(w.x) << ", " << text_number(w.y) << "): d(Tx,Ty)=" << text_number(w.image_distance)
            << " > phi(G)=" << text_number(w.bound) << " with G=" << text_number(w.gauge) << '\n';
    }
    return {r.holds ? kHolds : kFails, {{"space", d.describe()}, {"map", t.describe()}, {"contraction", report::to_json(r)}}};
}

inline Outcome iterate_task(const config::RunConfig& c, std::ostream& out) {
    const DistanceStructure d = config::build_space(c);
    const SelfMapSpec t = config::build_map(c, d);
    std::vector<Point> starts = c.starts.empty() ? default_starts(d) : c.starts;
    const double tol = c.options.tol.value_or(kDefaultTol);
    const std::size_t max_iters = c.options.max_iters.value_or(kDefaultMaxIters);
    const std::size_t window = c.options.window.value_or(kDefaultWindow);

    out << "space: " << d.describe() << "; " << t.describe() << '\n';
    json traces = json::array();
    bool all = true;
    for (Point s : starts) {
        const PicardTrace tr = iterate(d, t, s, max_iters, tol, window);
        all = all && tr.converged_0d;
        out << "x0=" << text_number(s) << ": " << tr.iterations() << " steps, final rho "
            << text_number(tr.rho.empty() ? 0.0 : tr.rho.back()) << ", d-asymptotic " << (tr.d_asymptotic ? "yes" : "no")
            << ", 0d-Cauchy " << (tr.cauchy_0d ? "yes" : "no") << ", ";
        if (tr.limit)
            out << "0d-converges to z=" << text_number(*tr.limit) << " (d(z,z)=" << text_number(d(*tr.limit, *tr.limit)) << ")\n";
        else
            out << "not 0d-convergent\n";
        traces.push_back(report::to_json(tr));
    }
    return {all ? kHolds : kFails, {{"space", d.describe()}, {"map", t.describe()}, {"tol", tol}, {"traces", traces}}};
}

inline Outcome harness(const config::RunConfig& c, std::uint64_t seed, std::ostream& out) {
    const DistanceStructure d = config::build_space(c);
    const SelfMapSpec t = config::build_map(c, d);
    const ComparisonFunction phi = config::build_phi(c);
    const GaugeKind g = config::build_gauge(c);
    const TheoremVerdict v = run_theorem_harness(d, t, phi, g, c.starts, config::harness_options(c, seed));

    const std::string name = v.theorem ? "Theorem " + std::string(to_string(*v.theorem)) : "No theorem";
    out << name << ' ' << to_string(v.conclusion);
    const auto& fp = v.fixed_points;
    if (v.conclusion == ConclusionStatus::confirmed && fp.z)
        out << ", z=" << text_number(*fp.z) << ", d(z,z)=" << text_number(*fp.self_distance);
    out << '\n';
    if (v.theorem && v.conclusion == ConclusionStatus::confirmed) out << "conclusion: " << conclusion_text(*v.theorem) << '\n';

    out << "space: " << d.describe() << " (" << to_string(v.space_class.label) << "); " << t.describe()
        << "; phi(t)=" << phi.definition().to_string() << "; gauge " << to_string(g) << '\n';
    out << "hypotheses:\n";
    for (const auto& h : v.hypotheses) out << "  [" << to_string(h.status) << "] " << h.clause << " -- " << h.detail << '\n';
    out << "applicable:";
    if (v.applicable.empty()) out << " none";
    for (auto id : v.applicable) out << ' ' << to_string(id);
    out << '\n';
    if (!v.checks.empty()) {
        out << "conclusion checks:\n";
        for (const auto& ch : v.checks) out << "  [" << (ch.passed ? "pass" : "fail") << "] " << ch.name << " -- " << ch.detail << '\n';
    }
    out << "traces:\n";
    for (const auto& tr : v.traces) {
        out << "  x0=" << text_number(tr.start) << ": " << tr.iterations << " steps, limit "
            << (tr.limit ? text_number(*tr.limit) : std::string("none")) << '\n';
    }

    json result = report::to_json(v);
    result["seed"] = seed;
    return {v.conclusion == ConclusionStatus::confirmed ? kHolds : kFails, result};
}

inline SequencePrefix build_prefix(const config::RunConfig& c, const config::SequenceConfig& sc,
                                   std::optional<DistanceStructure>& space) {
    if (sc.kind == "table") return SequencePrefix::table(sc.table);
    if (sc.use_space) {
        space = config::build_space(c);
        for (double p : sc.points)
            if (!space->contains(p)) throw LoadError("sequence point " + format_number(p) + " is not a point of the space");
        return SequencePrefix::in_space(*space, sc.points);
    }
    return SequencePrefix::real_line(sc.points);
}

inline Outcome witness(const config::RunConfig& c, std::ostream& out) {
    const config::SequenceConfig sc = config::resolve_sequence(c);
    std::optional<DistanceStructure> space;
    const SequencePrefix x = build_prefix(c, sc, space);
    const double eps = c.options.eps ? *c.options.eps : auto_epsilon(x);
    if (!(eps > 0.0)) throw LoadError("automatic epsilon is 0: the late terms of the prefix coincide");
    const std::size_t j_max = c.options.j_max.value_or(kDefaultJMax);
    const SemiCauchyProfile profile = semi_cauchy_profile(x, c.options.tol.value_or(kSequenceTol));
    const WitnessReport rep = lemma1_witness(x, eps, j_max);

    // Row invariants: separation on every row, first crossing from j_eps on.
    bool rows_ok = true;
    for (const auto& row : rep.rows)
        rows_ok = rows_ok && row.separated && (!rep.j_eps || row.j < *rep.j_eps || row.first_crossing);
    const bool ok = rep.complete && rows_ok && !rep.rows.empty();

    out << "sequence: " << x.size() << " terms; epsilon " << text_number(eps) << (c.options.eps ? "" : " (auto)") << '\n';
    out << "semi-Cauchy: " << (profile.semi_cauchy ? "yes from n=" + std::to_string(*profile.onset) : std::string("no"))
        << "; Cauchy violation: ";
    if (profile.violation)
        out << "(" << profile.violation->first << ", " << profile.violation->second << ") at distance "
            << text_number(profile.violation_distance) << '\n';
    else
        out << "none found\n";
    out << "j_eps: " << (rep.j_eps ? std::to_string(*rep.j_eps) : std::string("none")) << '\n';
    out << "rows: " << rep.rows.size() << (rep.complete ? "" : " (partial: A(j) empty past j=" +
                                                                  (rep.last_rank ? std::to_string(*rep.last_rank) : std::string("-")) + ")")
        << '\n';
    const std::size_t shown = std::min<std::size_t>(rep.rows.size(), 8);
    for (std::size_t i = 0; i < shown; ++i) {
        const auto& r = rep.rows[i];
        out << "  j=" << r.j << ": m=" << r.m << ", n=" << r.n << ", d(x_m,x_n)=" << text_number(r.d_mn)
            << ", d(x_m,x_{n-1})=" << text_number(r.d_m_prev) << '\n';
    }
    if (shown < rep.rows.size()) out << "  ... " << rep.rows.size() - shown << " more rows in the JSON report\n";
    out << "witness " << (ok ? "holds" : "fails") << '\n';
    return {ok ? kHolds : kFails, {{"profile", report::to_json(profile)}, {"witness", report::to_json(rep)}}};
}

inline Outcome lemma2(const config::RunConfig& c, std::ostream& out) {
    const ComparisonFunction phi = config::build_phi(c);
    if (!c.options.s) throw LoadError("lemma2 needs options.s");
    const config::SequenceConfig sc = config::resolve_sequence(c);
    if (sc.kind != "points") throw LoadError("lemma2 needs a sequence of points");
    const Verdict v = lemma2_check(phi, *c.options.s, sc.points);
    const LimsupEstimate est = estimate_L_plus(phi, *c.options.s);
    out << "phi(t)=" << phi.definition().to_string() << ", s=" << text_number(*c.options.s) << '\n';
    print_verdict(out, v, "limsup phi(t_n) <= L+phi(s) along t_n decreasing to s");
    return {v.holds ? kHolds : kFails, {{"lemma2", report::to_json(v)}, {"L_plus", report::to_json(est)}}};
}

}  // namespace detail

/// Runs one subcommand. `args` excludes the program name.
/// Exit codes: 0 verdict holds or is confirmed, 1 it fails or is refuted, 2 configuration or evaluation error.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"fixlab: fixed-point hypothesis verification on concrete data", "fixlab"};
    app.require_subcommand(1);
    Flags f;
    for (auto task : config::kTasks) {
        CLI::App* sub = app.add_subcommand(std::string(task));
        sub->add_option("--config,config", f.config, "config document (JSON)");
        sub->add_option("--json", f.json_out, "also write the report as JSON to this file");
        sub->add_option("--tol", f.tol, "convergence tolerance");
        sub->add_option("--grid", f.grid, "analytic grid size");
        sub->add_option("--seed", f.seed, "random seed");
        sub->add_option("--eps", f.eps, "epsilon for the witness task");
        sub->add_option("--gauge", f.gauge, "gauge M1, M2 or M3")->check(CLI::IsMember({"M1", "M2", "M3"}));
        sub->callback([&f, task] { f.task = std::string(task); });
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kError;
    }

    try {
        if (f.config.empty()) throw LoadError("no config document given");
        config::RunConfig c = config::load(f.config);
        detail::apply_flags(f, c);

        detail::Outcome o;
        std::optional<std::uint64_t> seed;
        if (f.task == "classify-space") o = detail::classify_space(c, out);
        else if (f.task == "classify-phi") o = detail::classify_phi(c, *(seed = resolve_seed(f, c)), out);
        else if (f.task == "check-contraction") o = detail::check_contraction(c, out);
        else if (f.task == "iterate") o = detail::iterate_task(c, out);
        else if (f.task == "harness") o = detail::harness(c, *(seed = resolve_seed(f, c)), out);
        else if (f.task == "witness") o = detail::witness(c, out);
        else o = detail::lemma2(c, out);

        if (!f.json_out.empty()) {
            json doc = {{"task", f.task}, {"exit_code", o.code}, {"seed", seed ? json(*seed) : json(nullptr)}, {"result", o.result}};
            std::ofstream js(f.json_out);
            if (!js) throw LoadError("cannot write JSON report to '" + f.json_out + "'");
            js << doc.dump(2) << '\n';
            if (!js) throw LoadError("failed writing JSON report to '" + f.json_out + "'");
        }
        return o.code;
    } catch (const std::exception& e) {
        err << "fixlab " << f.task << ": error: " << e.what() << '\n';
        return kError;
    }
}

}  // namespace fixlab::cli
