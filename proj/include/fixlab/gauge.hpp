#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fixlab/errors.hpp"
#include "fixlab/expr.hpp"
#include "fixlab/phi.hpp"
#include "fixlab/space.hpp"

namespace fixlab {

/// A selfmap T: X -> X, as an index table or an expression in x.
class SelfMapSpec {
public:
    enum class Kind { tabulated, analytic };

    /// Indices must address points of `space`.
    static SelfMapSpec tabulated(std::vector<std::size_t> indices, const DistanceStructure& space) {
        if (!space.is_tabulated()) throw LoadError("an index map needs a tabulated space");
        if (indices.size() != space.size())
            throw LoadError("index map has " + std::to_string(indices.size()) + " entries for " +
                            std::to_string(space.size()) + " points");
        for (std::size_t i = 0; i < indices.size(); ++i)
            if (indices[i] >= space.size())
                throw LoadError("index map sends " + std::to_string(i) + " to " + std::to_string(indices[i]) +
                                ", outside [0, " + std::to_string(space.size()) + ")");
        SelfMapSpec m;
        m.kind_ = Kind::tabulated;
        m.indices_ = std::move(indices);
        return m;
    }

    /// T must send every grid point of `space` into its domain interval.
    static SelfMapSpec analytic(expr::Expression map, const DistanceStructure& space) {
        if (space.is_tabulated()) throw LoadError("an expression map needs an analytic space");
        if (map.variables() != std::vector<std::string>{"x"}) throw LoadError("map must be an expression in x");
        for (Point x : space.samples()) {
            const double tx = map.at(x);
            if (!space.contains(tx))
                throw LoadError("map sends " + format_number(x) + " to " + format_number(tx) + ", outside [" +
                                format_number(space.lo()) + ", " + format_number(space.hi()) + "]");
        }
        SelfMapSpec m;
        m.kind_ = Kind::analytic;
        m.expr_ = std::move(map);
        return m;
    }

    static SelfMapSpec analytic(std::string_view source, const DistanceStructure& space) {
        return analytic(expr::parse(source, {"x"}), space);
    }

    Kind kind() const { return kind_; }
    const std::vector<std::size_t>& indices() const { return indices_; }
    const std::optional<expr::Expression>& expression() const { return expr_; }

    Point operator()(Point x) const {
        if (kind_ == Kind::tabulated) {
            if (!(x >= 0.0) || x >= static_cast<double>(indices_.size()) || std::floor(x) != x)
                throw LoadError("point " + format_number(x) + " is not an index of the map");
            return static_cast<double>(indices_[static_cast<std::size_t>(x)]);
        }
        return expr_->at(x);
    }

    std::string describe() const {
        if (kind_ == Kind::analytic) return "T(x)=" + expr_->to_string();
        std::string out = "T=[";
        for (std::size_t i = 0; i < indices_.size(); ++i) out += (i ? "," : "") + std::to_string(indices_[i]);
        return out + "]";
    }

private:
    SelfMapSpec() = default;

    Kind kind_ = Kind::tabulated;
    std::vector<std::size_t> indices_;
    std::optional<expr::Expression> expr_;
};

enum class GaugeKind { M1, M2, M3 };

inline constexpr std::array<GaugeKind, 3> kAllGauges = {GaugeKind::M1, GaugeKind::M2, GaugeKind::M3};

inline std::string_view to_string(GaugeKind g) {
    switch (g) {
        case GaugeKind::M1: return "M1";
        case GaugeKind::M2: return "M2";
        case GaugeKind::M3: return "M3";
    }
    return "?";
}

inline GaugeKind parse_gauge(std::string_view s) {
    if (s == "M1") return GaugeKind::M1;
    if (s == "M2") return GaugeKind::M2;
    if (s == "M3") return GaugeKind::M3;
    throw LoadError("unknown gauge '" + std::string(s) + "', expected M1, M2 or M3");
}

/// Every gauge ingredient at one pair.
struct GaugeTerms {
    double m1 = 0.0;  // d(x,y)
    double h = 0.0;   // max{d(x,Tx), d(y,Ty)}
    double l = 0.0;   // (d(x,Ty) + d(Tx,y)) / 2
    double m2 = 0.0;  // max{M1, H}
    double m3 = 0.0;  // max{M2, L}

    double get(GaugeKind g) const { return g == GaugeKind::M1 ? m1 : g == GaugeKind::M2 ? m2 : m3; }
};

inline GaugeTerms gauge_terms(const DistanceStructure& d, const SelfMapSpec& t, Point x, Point y) {
    const Point tx = t(x), ty = t(y);
    GaugeTerms g;
    g.m1 = d(x, y);
    g.h = std::max(d(x, tx), d(y, ty));
    g.l = 0.5 * (d(x, ty) + d(tx, y));
    g.m2 = std::max(g.m1, g.h);
    g.m3 = std::max(g.m2, g.l);
    return g;
}

inline double gauge_value(const DistanceStructure& d, const SelfMapSpec& t, GaugeKind g, Point x, Point y) {
    return gauge_terms(d, t, x, y).get(g);
}

struct ContractionWitness {
    Point x = 0.0;
    Point y = 0.0;
    double image_distance = 0.0;  // d(Tx,Ty)
    double gauge = 0.0;           // G(x,y)
    double bound = 0.0;           // phi(G(x,y))
};

struct ContractionReport {
    GaugeKind gauge = GaugeKind::M1;
    bool holds = true;
    std::optional<ContractionWitness> witness;
    double max_slack = 0.0;  // max of d(Tx,Ty) - phi(G(x,y)) over the plan
    std::size_t checked_count = 0;
};

/// d(Tx,Ty) <= phi(G(x,y)) + slack over every ordered sample pair.
///
/// The witness is the pair of largest slack, ties going to the lexicographically smallest pair.
inline ContractionReport verify_contraction(const DistanceStructure& d, const SelfMapSpec& t,
                                            const ComparisonFunction& phi, GaugeKind g) {
    ContractionReport rep;
    rep.gauge = g;
    rep.max_slack = -std::numeric_limits<double>::infinity();
    const auto pts = d.samples();
    for (Point x : pts) {
        for (Point y : pts) {
            const double image = d(t(x), t(y));
            const double gv = gauge_value(d, t, g, x, y);
            const double bound = phi(gv);
            const double slack = image - bound;
            if (slack > rep.max_slack) {
                rep.max_slack = slack;
                if (slack > kSlack) rep.witness = ContractionWitness{x, y, image, gv, bound};
            }
        }
    }
    rep.checked_count = pts.size() * pts.size();
    rep.holds = !rep.witness.has_value();
    return rep;
}

}  // namespace fixlab
