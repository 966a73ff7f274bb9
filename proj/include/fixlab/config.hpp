#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "json.hpp"

#include "fixlab/errors.hpp"
#include "fixlab/gauge.hpp"
#include "fixlab/phi.hpp"
#include "fixlab/picard.hpp"
#include "fixlab/space.hpp"

namespace fixlab::config {

using nlohmann::json;

inline constexpr std::string_view kTasks[] = {"classify-space", "classify-phi", "check-contraction", "iterate",
                                              "harness",        "witness",      "lemma2"};

inline bool is_task(std::string_view t) {
    for (auto k : kTasks)
        if (k == t) return true;
    return false;
}

struct SpaceConfig {
    std::string kind;  // "tabulated" | "analytic"
    std::vector<std::vector<double>> matrix;
    std::string expr;
    double lo = 0.0;
    double hi = 1.0;
    std::optional<std::size_t> grid;
};

struct MapConfig {
    std::optional<std::vector<std::size_t>> indices;
    std::optional<std::string> expr;
};

struct PhiConfig {
    std::string expr;
    std::vector<double> exceptional;
    std::optional<bool> monotone;
};

/// A sequence for the witness and lemma2 tasks: inline points, an inline
/// distance table, or a text file with one point or one table row per line.
struct SequenceConfig {
    std::string kind = "points";  // "points" | "table"
    std::optional<std::string> file;
    std::vector<double> points;
    std::vector<std::vector<double>> table;
    bool use_space = false;  // measure points with the configured space instead of |x - y|
};

struct Options {
    std::optional<double> tol;
    std::optional<std::size_t> max_iters;
    std::optional<std::size_t> window;
    std::optional<std::size_t> grid;
    std::optional<std::uint64_t> seed;
    std::optional<ScanPlan> scan;
    std::optional<std::vector<double>> orbit_seeds;
    std::optional<std::size_t> orbit_max_iters;
    std::optional<double> orbit_tol;
    bool assume_d_asymptotic = false;
    std::optional<double> eps;
    std::optional<std::size_t> j_max;
    std::optional<double> s;
};

struct RunConfig {
    std::optional<std::string> task;
    std::optional<SpaceConfig> space;
    std::optional<MapConfig> map;
    std::optional<PhiConfig> phi;
    std::optional<std::string> gauge;
    std::vector<double> starts;
    Options options;
    std::optional<SequenceConfig> sequence;
    std::filesystem::path base_dir;  // relative sequence files resolve against this
};

namespace detail {

inline void only_keys(const json& j, std::string_view where, std::initializer_list<std::string_view> allowed) {
    if (!j.is_object()) throw LoadError(std::string(where) + " must be a JSON object");
    for (const auto& [key, _] : j.items()) {
        bool known = false;
        for (auto a : allowed) known = known || key == a;
        if (!known) throw LoadError("unknown key '" + key + "' in " + std::string(where));
    }
}

template <typename T>
T get(const json& j, std::string_view key, std::string_view where) {
    if constexpr (std::is_unsigned_v<T> && !std::is_same_v<T, bool>) {
        const auto it = j.find(std::string(key));
        if (it != j.end() && !(it->is_number_unsigned() || (it->is_number_integer() && it->template get<std::int64_t>() >= 0)))
            throw LoadError("'" + std::string(key) + "' in " + std::string(where) + " must be a nonnegative integer");
    }
    try {
        return j.at(std::string(key)).get<T>();
    } catch (const json::exception& e) {
        throw LoadError("bad or missing '" + std::string(key) + "' in " + std::string(where) + ": " + e.what());
    }
}

template <typename T>
std::optional<T> get_opt(const json& j, std::string_view key, std::string_view where) {
    if (!j.contains(std::string(key))) return std::nullopt;
    return get<T>(j, key, where);
}

inline double positive(double v, std::string_view what) {
    if (!(v > 0.0)) throw LoadError(std::string(what) + " must be positive");
    return v;
}

inline std::size_t positive(std::size_t v, std::string_view what) {
    if (v == 0) throw LoadError(std::string(what) + " must be positive");
    return v;
}

}  // namespace detail

/// Strict parse: unknown keys anywhere are an error.
inline RunConfig parse(const json& j) {
    using namespace detail;
    only_keys(j, "config", {"task", "space", "map", "phi", "gauge", "starts", "options", "sequence"});
    RunConfig c;
    c.task = get_opt<std::string>(j, "task", "config");
    if (c.task && !is_task(*c.task)) throw LoadError("unknown task '" + *c.task + "'");

    if (j.contains("space")) {
        const json& s = j["space"];
        only_keys(s, "space", {"kind", "matrix", "expr", "domain", "grid"});
        SpaceConfig sc;
        sc.kind = get<std::string>(s, "kind", "space");
        if (sc.kind == "tabulated") {
            sc.matrix = get<std::vector<std::vector<double>>>(s, "matrix", "space");
            if (s.contains("expr") || s.contains("domain") || s.contains("grid"))
                throw LoadError("tabulated space takes only 'matrix'");
        } else if (sc.kind == "analytic") {
            sc.expr = get<std::string>(s, "expr", "space");
            auto dom = get<std::vector<double>>(s, "domain", "space");
            if (dom.size() != 2) throw LoadError("space domain must be [lo, hi]");
            sc.lo = dom[0];
            sc.hi = dom[1];
            sc.grid = get_opt<std::size_t>(s, "grid", "space");
            if (s.contains("matrix")) throw LoadError("analytic space does not take 'matrix'");
        } else {
            throw LoadError("space kind must be 'tabulated' or 'analytic'");
        }
        c.space = sc;
    }

    if (j.contains("map")) {
        const json& m = j["map"];
        only_keys(m, "map", {"indices", "expr"});
        MapConfig mc;
        mc.indices = get_opt<std::vector<std::size_t>>(m, "indices", "map");
        mc.expr = get_opt<std::string>(m, "expr", "map");
        if (mc.indices.has_value() == mc.expr.has_value()) throw LoadError("map needs exactly one of 'indices' or 'expr'");
        c.map = mc;
    }

    if (j.contains("phi")) {
        const json& p = j["phi"];
        only_keys(p, "phi", {"expr", "Q", "monotone"});
        PhiConfig pc;
        pc.expr = get<std::string>(p, "expr", "phi");
        pc.exceptional = get_opt<std::vector<double>>(p, "Q", "phi").value_or(std::vector<double>{});
        pc.monotone = get_opt<bool>(p, "monotone", "phi");
        c.phi = pc;
    }

    c.gauge = get_opt<std::string>(j, "gauge", "config");
    if (c.gauge) parse_gauge(*c.gauge);
    c.starts = get_opt<std::vector<double>>(j, "starts", "config").value_or(std::vector<double>{});

    if (j.contains("options")) {
        const json& o = j["options"];
        only_keys(o, "options", {"tol", "max_iters", "window", "grid", "seed", "scan", "orbit_seeds", "orbit_max_iters",
                                 "orbit_tol", "assume_d_asymptotic", "eps", "j_max", "s"});
        Options& op = c.options;
        if (auto v = get_opt<double>(o, "tol", "options")) op.tol = positive(*v, "tol");
        if (auto v = get_opt<std::size_t>(o, "max_iters", "options")) op.max_iters = positive(*v, "max_iters");
        if (auto v = get_opt<std::size_t>(o, "window", "options")) op.window = positive(*v, "window");
        if (auto v = get_opt<std::size_t>(o, "grid", "options")) op.grid = positive(*v, "grid");
        op.seed = get_opt<std::uint64_t>(o, "seed", "options");
        if (o.contains("scan")) {
            const json& sp = o["scan"];
            only_keys(sp, "options.scan", {"lo", "hi", "count"});
            ScanPlan plan;
            plan.lo = positive(get_opt<double>(sp, "lo", "options.scan").value_or(plan.lo), "scan lo");
            plan.hi = positive(get_opt<double>(sp, "hi", "options.scan").value_or(plan.hi), "scan hi");
            plan.count = positive(get_opt<std::size_t>(sp, "count", "options.scan").value_or(plan.count), "scan count");
            op.scan = plan;
        }
        op.orbit_seeds = get_opt<std::vector<double>>(o, "orbit_seeds", "options");
        if (op.orbit_seeds)
            for (double s : *op.orbit_seeds) positive(s, "orbit seed");
        if (auto v = get_opt<std::size_t>(o, "orbit_max_iters", "options")) op.orbit_max_iters = positive(*v, "orbit_max_iters");
        if (auto v = get_opt<double>(o, "orbit_tol", "options")) op.orbit_tol = positive(*v, "orbit_tol");
        op.assume_d_asymptotic = get_opt<bool>(o, "assume_d_asymptotic", "options").value_or(false);
        if (auto v = get_opt<double>(o, "eps", "options")) op.eps = positive(*v, "eps");
        op.j_max = get_opt<std::size_t>(o, "j_max", "options");
        if (auto v = get_opt<double>(o, "s", "options")) op.s = positive(*v, "s");
    }

    if (j.contains("sequence")) {
        const json& s = j["sequence"];
        only_keys(s, "sequence", {"kind", "file", "points", "table", "metric"});
        SequenceConfig sc;
        sc.kind = get_opt<std::string>(s, "kind", "sequence").value_or("points");
        if (sc.kind != "points" && sc.kind != "table") throw LoadError("sequence kind must be 'points' or 'table'");
        sc.file = get_opt<std::string>(s, "file", "sequence");
        sc.points = get_opt<std::vector<double>>(s, "points", "sequence").value_or(std::vector<double>{});
        sc.table = get_opt<std::vector<std::vector<double>>>(s, "table", "sequence").value_or(std::vector<std::vector<double>>{});
        const std::string metric = get_opt<std::string>(s, "metric", "sequence").value_or("real_line");
        if (metric != "real_line" && metric != "space") throw LoadError("sequence metric must be 'real_line' or 'space'");
        sc.use_space = metric == "space";
        const int sources = (sc.file ? 1 : 0) + (s.contains("points") ? 1 : 0) + (s.contains("table") ? 1 : 0);
        if (sources != 1) throw LoadError("sequence needs exactly one of 'file', 'points' or 'table'");
        c.sequence = sc;
    }
    return c;
}

inline RunConfig load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw LoadError("cannot open config file '" + path.string() + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw LoadError("config '" + path.string() + "' is not valid JSON: " + e.what());
    }
    RunConfig c = parse(j);
    c.base_dir = path.parent_path();
    return c;
}

/// Reads a sequence file: one point per line, or one whitespace-separated distance row per line.
/// Blank lines and lines starting with '#' are skipped.
inline void read_sequence_file(const std::filesystem::path& path, SequenceConfig& sc) {
    std::ifstream in(path);
    if (!in) throw LoadError("cannot open sequence file '" + path.string() + "'");
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream ls(line);
        std::vector<double> row;
        double v;
        while (ls >> v) row.push_back(v);
        if (!ls.eof()) throw LoadError("sequence file line " + std::to_string(lineno) + " is not plain decimal text");
        if (sc.kind == "points") {
            if (row.size() != 1) throw LoadError("sequence file line " + std::to_string(lineno) + " must hold one point");
            sc.points.push_back(row[0]);
        } else {
            sc.table.push_back(std::move(row));
        }
    }
}

// Builders from a parsed config. Each throws LoadError when its section is missing.

inline DistanceStructure build_space(const RunConfig& c) {
    if (!c.space) throw LoadError("config has no 'space'");
    const SpaceConfig& s = *c.space;
    if (s.kind == "tabulated") return DistanceStructure::tabulated(s.matrix);
    const std::size_t grid = c.options.grid.value_or(s.grid.value_or(kDefaultGrid));
    return DistanceStructure::analytic(s.expr, s.lo, s.hi, grid);
}

inline SelfMapSpec build_map(const RunConfig& c, const DistanceStructure& space) {
    if (!c.map) throw LoadError("config has no 'map'");
    if (c.map->indices) return SelfMapSpec::tabulated(*c.map->indices, space);
    return SelfMapSpec::analytic(*c.map->expr, space);
}

inline ComparisonFunction build_phi(const RunConfig& c) {
    if (!c.phi) throw LoadError("config has no 'phi'");
    return ComparisonFunction(c.phi->expr, c.phi->exceptional, c.phi->monotone);
}

inline GaugeKind build_gauge(const RunConfig& c) {
    if (!c.gauge) throw LoadError("config has no 'gauge'");
    return parse_gauge(*c.gauge);
}

inline SequenceConfig resolve_sequence(const RunConfig& c) {
    if (!c.sequence) throw LoadError("config has no 'sequence'");
    SequenceConfig sc = *c.sequence;
    if (sc.file) {
        std::filesystem::path p(*sc.file);
        if (p.is_relative()) p = c.base_dir / p;
        read_sequence_file(p, sc);
    }
    return sc;
}

inline HarnessOptions harness_options(const RunConfig& c, std::uint64_t seed) {
    HarnessOptions h;
    const Options& o = c.options;
    if (o.tol) h.tol = *o.tol;
    if (o.max_iters) h.max_iters = *o.max_iters;
    if (o.window) h.window = *o.window;
    if (o.scan) h.scan = *o.scan;
    if (o.orbit_seeds) h.orbit_seeds = *o.orbit_seeds;
    if (o.orbit_max_iters) h.orbit_max_iters = *o.orbit_max_iters;
    if (o.orbit_tol) h.orbit_tol = *o.orbit_tol;
    h.assume_d_asymptotic = o.assume_d_asymptotic;
    h.seed = seed;
    return h;
}

}  // namespace fixlab::config
