#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fixlab/errors.hpp"
#include "fixlab/expr.hpp"

namespace fixlab {

/// Slack on every axiom and contraction inequality: a violation must exceed it.
inline constexpr double kSlack = 1e-12;

/// Distinct analytic grid points closer than this are never reported as a sufficiency violation.
inline constexpr double kGridSeparation = 1e-6;

inline constexpr std::size_t kDefaultGrid = 65;

/// A point of a space: a coordinate in an analytic domain, or an integral index into a table.
using Point = double;

/// A symmetric d: X x X -> R+ over either a finite table or a sampled interval.
class DistanceStructure {
public:
    enum class Kind { tabulated, analytic };

    static DistanceStructure tabulated(std::vector<std::vector<double>> matrix) {
        const std::size_t n = matrix.size();
        if (n == 0) throw LoadError("tabulated space needs at least one point");
        DistanceStructure s;
        s.kind_ = Kind::tabulated;
        s.n_ = n;
        s.table_.reserve(n * n);
        for (std::size_t i = 0; i < n; ++i) {
            if (matrix[i].size() != n)
                throw LoadError("distance matrix row " + std::to_string(i) + " has " +
                                std::to_string(matrix[i].size()) + " entries, expected " + std::to_string(n));
            for (double v : matrix[i]) s.table_.push_back(v);
        }
        s.samples_.resize(n);
        for (std::size_t i = 0; i < n; ++i) s.samples_[i] = static_cast<double>(i);
        s.validate();
        return s;
    }

    static DistanceStructure analytic(expr::Expression d, double lo, double hi, std::size_t grid = kDefaultGrid) {
        if (d.variables() != std::vector<std::string>{"x", "y"})
            throw LoadError("analytic distance must be an expression in (x, y)");
        if (!(lo <= hi) || !std::isfinite(lo) || !std::isfinite(hi))
            throw LoadError("analytic domain needs finite lo <= hi");
        if (grid < 2) throw LoadError("grid resolution must be at least 2");
        DistanceStructure s;
        s.kind_ = Kind::analytic;
        s.expr_ = std::move(d);
        s.lo_ = lo;
        s.hi_ = hi;
        s.n_ = grid;
        s.samples_.resize(grid);
        for (std::size_t i = 0; i < grid; ++i)
            s.samples_[i] = i + 1 == grid ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(grid - 1);
        s.table_.resize(grid * grid);
        for (std::size_t i = 0; i < grid; ++i)
            for (std::size_t j = 0; j < grid; ++j) s.table_[i * grid + j] = s.expr_->at(s.samples_[i], s.samples_[j]);
        s.validate();
        return s;
    }

    static DistanceStructure analytic(std::string_view source, double lo, double hi, std::size_t grid = kDefaultGrid) {
        return analytic(expr::parse(source, {"x", "y"}), lo, hi, grid);
    }

    /// Same analytic structure resampled at a different grid resolution.
    DistanceStructure with_grid(std::size_t grid) const {
        if (kind_ != Kind::analytic) return *this;
        return analytic(*expr_, lo_, hi_, grid);
    }

    Kind kind() const { return kind_; }
    bool is_tabulated() const { return kind_ == Kind::tabulated; }
    std::size_t size() const { return n_; }
    double lo() const { return lo_; }
    double hi() const { return hi_; }
    std::size_t grid() const { return kind_ == Kind::analytic ? n_ : 0; }
    const std::optional<expr::Expression>& expression() const { return expr_; }

    /// The checked sample plan: all indices, or the uniform grid including both endpoints.
    std::span<const Point> samples() const { return samples_; }

    /// d between the i-th and j-th sample points (cached).
    double sample_distance(std::size_t i, std::size_t j) const { return table_[i * n_ + j]; }

    bool contains(Point p) const {
        if (kind_ == Kind::tabulated)
            return p >= 0.0 && p < static_cast<double>(n_) && std::floor(p) == p;
        return p >= lo_ && p <= hi_;
    }

    std::size_t index_of(Point p) const {
        if (kind_ != Kind::tabulated || !contains(p))
            throw LoadError("point " + format_number(p) + " is not an index of the tabulated space");
        return static_cast<std::size_t>(p);
    }

    double operator()(Point x, Point y) const {
        if (kind_ == Kind::tabulated) return table_[index_of(x) * n_ + index_of(y)];
        const double v = expr_->at(x, y);
        if (v < 0.0)
            throw EvalError(EvalError::Kind::domain, "negative distance d(" + format_number(x) + ", " +
                                                         format_number(y) + ") = " + format_number(v));
        return v;
    }

    /// One-line description for reports.
    std::string describe() const {
        if (kind_ == Kind::tabulated) return "tabulated n=" + std::to_string(n_);
        return "analytic d(x,y)=" + expr_->to_string() + " on [" + format_number(lo_) + ", " + format_number(hi_) +
               "], grid " + std::to_string(n_);
    }

private:
    DistanceStructure() = default;

    void validate() const {
        for (std::size_t i = 0; i < n_; ++i) {
            for (std::size_t j = 0; j < n_; ++j) {
                const double v = table_[i * n_ + j];
                if (!std::isfinite(v) || v < 0.0)
                    throw LoadError("distance d(" + format_number(samples_[i]) + ", " + format_number(samples_[j]) +
                                    ") = " + format_number(v) + " is not a finite nonnegative real");
                if (j > i && std::fabs(v - table_[j * n_ + i]) > kSlack)
                    throw LoadError("distance is not symmetric at (" + format_number(samples_[i]) + ", " +
                                    format_number(samples_[j]) + ")");
            }
        }
    }

    Kind kind_ = Kind::tabulated;
    std::size_t n_ = 0;
    std::vector<double> table_;
    std::vector<Point> samples_;
    std::optional<expr::Expression> expr_;
    double lo_ = 0.0;
    double hi_ = 0.0;
};

enum class AxiomId { triangular, reflexive_triangular, sufficient, strongly_sufficient, matthews };

inline constexpr std::array<AxiomId, 5> kAllAxioms = {AxiomId::triangular, AxiomId::reflexive_triangular,
                                                      AxiomId::sufficient, AxiomId::strongly_sufficient,
                                                      AxiomId::matthews};

inline std::string_view to_string(AxiomId a) {
    switch (a) {
        case AxiomId::triangular: return "triangular";
        case AxiomId::reflexive_triangular: return "reflexive_triangular";
        case AxiomId::sufficient: return "sufficient";
        case AxiomId::strongly_sufficient: return "strongly_sufficient";
        case AxiomId::matthews: return "matthews";
    }
    return "?";
}

/// The inequality an axiom stands for, quoted in text reports.
inline std::string_view clause(AxiomId a) {
    switch (a) {
        case AxiomId::triangular: return "triangular: d(x,z) <= d(x,y) + d(y,z)";
        case AxiomId::reflexive_triangular: return "reflexive triangular: d(x,z) + d(y,y) <= d(x,y) + d(y,z)";
        case AxiomId::sufficient: return "sufficient: d(x,y) = 0 implies x = y";
        case AxiomId::strongly_sufficient: return "strongly sufficient: d(x,x) = d(y,y) = d(x,y) implies x = y";
        case AxiomId::matthews: return "Matthews: max{d(x,x), d(y,y)} <= d(x,y)";
    }
    return "?";
}

/// A violating tuple and the distances that enter the violated inequality.
///
/// Tuple layout per axiom:
///   triangular, reflexive_triangular: (x, y, z) with y the middle point;
///     distances = d(x,z), d(x,y), d(y,z), d(y,y)
///   sufficient: (x, y); distances = d(x,y)
///   strongly_sufficient: (x, y); distances = d(x,x), d(y,y), d(x,y)
///   matthews: (x, y) where d(x,x) > d(y,x); distances = d(x,x), d(y,y), d(x,y)
struct Witness {
    std::vector<Point> points;
    std::vector<double> distances;
    double excess = 0.0;
};

struct AxiomReport {
    AxiomId axiom;
    bool holds = true;
    std::optional<Witness> witness;
    std::size_t checked_count = 0;
    std::size_t grid = 0;  // 0 for tabulated spaces
};

namespace detail {

// Keep the largest-excess violation; the strict comparison leaves the
// lexicographically first tuple in place on ties, since scans run in lexicographic order.
inline void offer(std::optional<Witness>& best, Witness&& w) {
    if (!best || w.excess > best->excess) best = std::move(w);
}

// Pairs of distinct analytic grid points that are too close to be told apart are not candidates.
inline bool distinguishable(const DistanceStructure& s, std::size_t i, std::size_t j) {
    if (i == j) return false;
    if (s.is_tabulated()) return true;
    return std::fabs(s.samples()[i] - s.samples()[j]) > kGridSeparation;
}

}  // namespace detail

/// Exhaustive scan of one axiom over all sample pairs or triples.
///
/// The reported witness is the violation with the largest excess, ties going
/// to the lexicographically smallest tuple, so the result does not depend on
/// how the scan is partitioned.
inline AxiomReport check_axiom(const DistanceStructure& s, AxiomId axiom) {
    const std::size_t n = s.size();
    const auto pts = s.samples();
    auto d = [&](std::size_t i, std::size_t j) { return s.sample_distance(i, j); };
    AxiomReport rep;
    rep.axiom = axiom;
    rep.grid = s.grid();
    std::optional<Witness> best;

    switch (axiom) {
        case AxiomId::triangular:
        case AxiomId::reflexive_triangular: {
            const bool reflexive = axiom == AxiomId::reflexive_triangular;
            for (std::size_t x = 0; x < n; ++x)
                for (std::size_t y = 0; y < n; ++y)
                    for (std::size_t z = 0; z < n; ++z) {
                        const double lhs = d(x, z) + (reflexive ? d(y, y) : 0.0);
                        const double excess = lhs - (d(x, y) + d(y, z));
                        if (excess > kSlack)
                            detail::offer(best, {{pts[x], pts[y], pts[z]}, {d(x, z), d(x, y), d(y, z), d(y, y)}, excess});
                    }
            rep.checked_count = n * n * n;
            break;
        }
        case AxiomId::sufficient:
            for (std::size_t x = 0; x < n; ++x)
                for (std::size_t y = 0; y < n; ++y) {
                    if (!detail::distinguishable(s, x, y)) continue;
                    if (d(x, y) <= kSlack) detail::offer(best, {{pts[x], pts[y]}, {d(x, y)}, kSlack - d(x, y)});
                }
            rep.checked_count = n * n;
            break;
        case AxiomId::strongly_sufficient:
            for (std::size_t x = 0; x < n; ++x)
                for (std::size_t y = 0; y < n; ++y) {
                    if (!detail::distinguishable(s, x, y)) continue;
                    const double gap = std::max(std::fabs(d(x, x) - d(x, y)), std::fabs(d(y, y) - d(x, y)));
                    if (gap <= kSlack)
                        detail::offer(best, {{pts[x], pts[y]}, {d(x, x), d(y, y), d(x, y)}, kSlack - gap});
                }
            rep.checked_count = n * n;
            break;
        case AxiomId::matthews:
            // max{d(x,x), d(y,y)} <= d(x,y) for all x, y is d(x,x) <= d(x,y) over ordered pairs.
            for (std::size_t x = 0; x < n; ++x)
                for (std::size_t y = 0; y < n; ++y) {
                    const double excess = d(x, x) - d(x, y);
                    if (excess > kSlack) detail::offer(best, {{pts[x], pts[y]}, {d(x, x), d(y, y), d(x, y)}, excess});
                }
            rep.checked_count = n * n;
            break;
    }
    rep.holds = !best.has_value();
    rep.witness = std::move(best);
    return rep;
}

/// Re-evaluates a witness against the live distance; true iff it still violates the axiom by more than the slack.
inline bool witness_violates(const DistanceStructure& s, AxiomId axiom, const Witness& w) {
    switch (axiom) {
        case AxiomId::triangular:
        case AxiomId::reflexive_triangular: {
            const Point x = w.points.at(0), y = w.points.at(1), z = w.points.at(2);
            const double lhs = s(x, z) + (axiom == AxiomId::reflexive_triangular ? s(y, y) : 0.0);
            return lhs - (s(x, y) + s(y, z)) > kSlack;
        }
        case AxiomId::sufficient: {
            const Point x = w.points.at(0), y = w.points.at(1);
            return x != y && s(x, y) <= kSlack;
        }
        case AxiomId::strongly_sufficient: {
            const Point x = w.points.at(0), y = w.points.at(1);
            const double dxy = s(x, y);
            return x != y && std::fabs(s(x, x) - dxy) <= kSlack && std::fabs(s(y, y) - dxy) <= kSlack;
        }
        case AxiomId::matthews: {
            const Point x = w.points.at(0), y = w.points.at(1);
            return std::max(s(x, x), s(y, y)) - s(x, y) > kSlack;
        }
    }
    return false;
}

enum class StructureLabel {
    standard_metric,
    partial_metric,
    almost_partial_metric,
    weak_almost_partial_metric,
    triangular_symmetric,
    symmetric_only,
};

inline std::string_view to_string(StructureLabel l) {
    switch (l) {
        case StructureLabel::standard_metric: return "standard_metric";
        case StructureLabel::partial_metric: return "partial_metric";
        case StructureLabel::almost_partial_metric: return "almost_partial_metric";
        case StructureLabel::weak_almost_partial_metric: return "weak_almost_partial_metric";
        case StructureLabel::triangular_symmetric: return "triangular_symmetric";
        case StructureLabel::symmetric_only: return "symmetric_only";
    }
    return "?";
}

struct StructureClass {
    StructureLabel label = StructureLabel::symmetric_only;
    std::vector<StructureLabel> applicable;  // every label the axiom vector supports, most specific first
    std::vector<AxiomReport> reports;        // in kAllAxioms order
    bool zero_self_distance = false;         // d(x,x) <= slack at every sample
    std::optional<Point> positive_self_distance_at;

    const AxiomReport& report(AxiomId a) const {
        for (const auto& r : reports)
            if (r.axiom == a) return r;
        throw Error("axiom report missing");
    }
    bool holds(AxiomId a) const { return report(a).holds; }
    bool has(StructureLabel l) const { return std::find(applicable.begin(), applicable.end(), l) != applicable.end(); }
};

inline StructureClass classify_structure(const DistanceStructure& s) {
    StructureClass c;
    for (AxiomId a : kAllAxioms) c.reports.push_back(check_axiom(s, a));

    c.zero_self_distance = true;
    for (std::size_t i = 0; i < s.size(); ++i)
        if (s.sample_distance(i, i) > kSlack) {
            c.zero_self_distance = false;
            c.positive_self_distance_at = s.samples()[i];
            break;
        }

    const bool tri = c.holds(AxiomId::triangular);
    const bool rtri = c.holds(AxiomId::reflexive_triangular);
    const bool suff = c.holds(AxiomId::sufficient);
    if (tri && suff && c.zero_self_distance) c.applicable.push_back(StructureLabel::standard_metric);
    if (rtri && c.holds(AxiomId::strongly_sufficient) && c.holds(AxiomId::matthews))
        c.applicable.push_back(StructureLabel::partial_metric);
    if (rtri && suff) c.applicable.push_back(StructureLabel::almost_partial_metric);
    if (tri && suff) c.applicable.push_back(StructureLabel::weak_almost_partial_metric);
    if (tri) c.applicable.push_back(StructureLabel::triangular_symmetric);
    c.applicable.push_back(StructureLabel::symmetric_only);
    c.label = c.applicable.front();
    return c;
}

}  // namespace fixlab
