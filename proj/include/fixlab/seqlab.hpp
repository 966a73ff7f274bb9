#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fixlab/errors.hpp"
#include "fixlab/phi.hpp"
#include "fixlab/space.hpp"
#include "fixlab/verdict.hpp"

namespace fixlab {

/// A descent sequence must come this close to s; it matches the finest limsup ladder rung.
inline constexpr double kDescentResolution = 1e-6;
inline constexpr double kLimsupTolerance = 1e-6;

/// A finite prefix x_0 .. x_{N-1} of a sequence, seen only through its pairwise distances.
class SequencePrefix {
public:
    using Distance = std::function<double(std::size_t, std::size_t)>;

    /// Points of the real line under |x - y|.
    static SequencePrefix real_line(std::vector<double> points) {
        auto pts = std::make_shared<const std::vector<double>>(std::move(points));
        return SequencePrefix(pts->size(), [pts](std::size_t m, std::size_t n) { return std::fabs((*pts)[m] - (*pts)[n]); });
    }

    /// Points of a distance structure; `space` must outlive the prefix.
    static SequencePrefix in_space(const DistanceStructure& space, std::vector<Point> points) {
        auto pts = std::make_shared<const std::vector<Point>>(std::move(points));
        return SequencePrefix(pts->size(), [pts, &space](std::size_t m, std::size_t n) { return space((*pts)[m], (*pts)[n]); });
    }

    /// An abstract sequence given by its raw distance table.
    static SequencePrefix table(std::vector<std::vector<double>> rows) {
        const std::size_t n = rows.size();
        for (std::size_t i = 0; i < n; ++i) {
            if (rows[i].size() != n) throw LoadError("distance table row " + std::to_string(i) + " is not of length " + std::to_string(n));
            for (std::size_t j = 0; j < n; ++j) {
                if (!(rows[i][j] >= 0.0) || !std::isfinite(rows[i][j]))
                    throw LoadError("distance table entry (" + std::to_string(i) + ", " + std::to_string(j) + ") is not a nonnegative real");
                if (j < i && rows[i][j] != rows[j][i])
                    throw LoadError("distance table is not symmetric at (" + std::to_string(j) + ", " + std::to_string(i) + ")");
            }
        }
        auto tbl = std::make_shared<const std::vector<std::vector<double>>>(std::move(rows));
        return SequencePrefix(n, [tbl](std::size_t m, std::size_t k) { return (*tbl)[m][k]; });
    }

    std::size_t size() const { return n_; }
    double operator()(std::size_t m, std::size_t n) const { return d_(m, n); }

private:
    SequencePrefix(std::size_t n, Distance d) : n_(n), d_(std::move(d)) {
        if (n_ < 3) throw LoadError("a sequence prefix needs at least 3 terms");
    }

    std::size_t n_;
    Distance d_;
};

struct SemiCauchyProfile {
    double tol = 0.0;
    double epsilon = 0.0;
    double final_gap = 0.0;
    bool semi_cauchy = false;             // consecutive distances are within tol from `onset` on
    std::optional<std::size_t> onset;
    bool cauchy_violation = false;        // some m < n past the onset has d(x_m, x_n) >= epsilon
    std::optional<std::pair<std::size_t, std::size_t>> violation;
    double violation_distance = 0.0;
};

/// Semi-Cauchy onset and a search for a Cauchy violation beyond it.
///
/// `epsilon` defaults to 10 tol: a geometric tail with gaps under tol can still
/// span about twice tol, which is not a violation.
inline SemiCauchyProfile semi_cauchy_profile(const SequencePrefix& x, double tol,
                                             std::optional<double> epsilon = std::nullopt) {
    if (!(tol > 0.0)) throw LoadError("tolerance must be positive");
    SemiCauchyProfile p;
    p.tol = tol;
    p.epsilon = epsilon.value_or(10.0 * tol);
    const std::size_t n = x.size();
    p.final_gap = x(n - 2, n - 1);
    std::size_t k = n - 1;
    while (k > 0 && x(k - 1, k) <= tol) --k;
    if (k == n - 1) return p;
    p.semi_cauchy = true;
    p.onset = k;
    for (std::size_t m = k; m < n && !p.cauchy_violation; ++m)
        for (std::size_t j = m + 1; j < n; ++j) {
            const double v = x(m, j);
            if (v >= p.epsilon) {
                p.cauchy_violation = true;
                p.violation = {m, j};
                p.violation_distance = v;
                break;
            }
        }
    return p;
}

/// One rank j of the (m(j), n(j)) construction.
struct WitnessRow {
    std::size_t j = 0;
    std::size_t m = 0;
    std::size_t n = 0;
    double d_mn = 0.0;        // d(x_m, x_n)
    double d_m_prev = 0.0;    // d(x_m, x_{n-1})
    double d_prev_n = 0.0;    // d(x_{n-1}, x_n)
    // d(x_{m+p}, x_{n+q}) for p, q in {0, 1}, indexed [p][q]; absent past the prefix end.
    std::array<std::array<std::optional<double>, 2>, 2> shifted{};
    bool separated = false;     // j <= m < n and d(x_m, x_n) >= eps
    bool first_crossing = false; // n - m >= 2 and d(x_m, x_{n-1}) < eps
};

struct WitnessReport {
    double epsilon = 0.0;
    std::optional<std::size_t> j_eps;  // least rank with d(x_k, x_{k+1}) < eps on the rest of the prefix
    std::vector<WitnessRow> rows;
    bool complete = true;               // false when some A(j), j <= j_max, is empty on the prefix
    std::optional<std::size_t> last_rank;
};

/// Half the largest distance between two terms of the second half of the prefix.
inline double auto_epsilon(const SequencePrefix& x) {
    double best = 0.0;
    for (std::size_t m = x.size() / 2; m < x.size(); ++m)
        for (std::size_t n = m + 1; n < x.size(); ++n) best = std::max(best, x(m, n));
    return 0.5 * best;
}

/// For each rank j <= j_max: A(j) = {(m, n) : j <= m < n, d(x_m, x_n) >= eps},
/// m(j) = the least first coordinate in A(j), n(j) = the least partner of m(j).
inline WitnessReport lemma1_witness(const SequencePrefix& x, double epsilon, std::size_t j_max) {
    if (!(epsilon > 0.0)) throw LoadError("epsilon must be positive");
    const std::size_t size = x.size();
    WitnessReport rep;
    rep.epsilon = epsilon;

    std::size_t k = size - 1;
    while (k > 0 && x(k - 1, k) < epsilon) --k;
    if (k < size - 1) rep.j_eps = k;

    // first_partner[m]: 0 = not computed, SIZE_MAX = none, else n + 1
    std::vector<std::size_t> first_partner(size, 0);
    auto partner = [&](std::size_t m) -> std::optional<std::size_t> {
        if (first_partner[m] == 0) {
            first_partner[m] = SIZE_MAX;
            for (std::size_t n = m + 1; n < size; ++n)
                if (x(m, n) >= epsilon) {
                    first_partner[m] = n + 1;
                    break;
                }
        }
        if (first_partner[m] == SIZE_MAX) return std::nullopt;
        return first_partner[m] - 1;
    };

    std::size_t m = 0;
    for (std::size_t j = 0; j <= j_max; ++j) {
        m = std::max(m, j);
        while (m < size && !partner(m)) ++m;
        if (m >= size) {
            rep.complete = false;
            break;
        }
        const std::size_t n = *partner(m);
        WitnessRow row;
        row.j = j;
        row.m = m;
        row.n = n;
        row.d_mn = x(m, n);
        row.d_m_prev = x(m, n - 1);
        row.d_prev_n = x(n - 1, n);
        for (std::size_t p = 0; p < 2; ++p)
            for (std::size_t q = 0; q < 2; ++q)
                if (n + q < size) row.shifted[p][q] = x(m + p, n + q);
        row.separated = j <= m && m < n && row.d_mn >= epsilon;
        row.first_crossing = n - m >= 2 && row.d_m_prev < epsilon;
        rep.rows.push_back(row);
        rep.last_rank = j;
    }
    return rep;
}

/// Empirical check that limsup phi(t_n) stays under L+phi(s) along t_n decreasing to s.
///
/// The tail is every term from the first index after which all terms lie in
/// [s, s + 1e-6]; its sup must not exceed the estimate by more than 1e-6.
inline Verdict lemma2_check(const ComparisonFunction& phi, double s, std::span<const double> descent) {
    if (!(s > 0.0)) throw LoadError("s must be positive");
    if (descent.empty()) throw LoadError("descent sequence is empty");
    for (double t : descent)
        if (!(t >= s)) throw LoadError("descent term " + format_number(t) + " lies below s = " + format_number(s));
    if (!(descent.back() - s <= kDescentResolution))
        throw LoadError("descent sequence ends " + format_number(descent.back() - s) + " above s; needs <= 1e-6");

    Verdict v;
    v.check = "lemma2";
    const LimsupEstimate est = estimate_L_plus(phi, s);
    std::size_t start = descent.size();
    while (start > 0 && descent[start - 1] - s <= kDescentResolution) --start;

    double sup = -std::numeric_limits<double>::infinity();
    double arg = descent[start];
    for (std::size_t i = start; i < descent.size(); ++i) {
        const double value = phi(descent[i]);
        if (value > sup) {
            sup = value;
            arg = descent[i];
        }
    }
    v.checked_count = descent.size() - start;
    v.holds = sup <= est.value + kLimsupTolerance;
    v.status = "tail sup " + format_number(sup) + " against L+phi(s) = " + format_number(est.value);
    v.witness = arg;
    v.witness_value = sup;
    v.notes.push_back("tail starts at index " + std::to_string(start));
    return v;
}

}  // namespace fixlab
