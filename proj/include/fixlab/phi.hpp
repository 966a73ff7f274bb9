#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fixlab/errors.hpp"
#include "fixlab/expr.hpp"
#include "fixlab/space.hpp"
#include "fixlab/verdict.hpp"

namespace fixlab {

/// Scan points closer than this to a declared exceptional point are skipped.
inline constexpr double kExceptionalRadius = 1e-9;

inline constexpr std::size_t kLimsupSamples = 128;
inline constexpr std::array<double, 6> kLimsupLadder = {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
inline constexpr double kLimsupConvergence = 1e-9;

inline constexpr std::size_t kDefaultSuborbits = 8;
inline constexpr std::uint64_t kDefaultSeed = 20130527;

/// A comparison function phi: R+ -> R+ with its declared exceptional set Q.
class ComparisonFunction {
public:
    ComparisonFunction(expr::Expression definition, std::vector<double> exceptional = {},
                       std::optional<bool> declared_monotone = std::nullopt)
        : def_(std::move(definition)), q_(std::move(exceptional)), monotone_(declared_monotone) {
        if (def_.variables() != std::vector<std::string>{"t"})
            throw LoadError("comparison function must be an expression in t");
        try {
            def_.at(0.0);
        } catch (const EvalError& e) {
            throw LoadError(std::string("comparison function is not finite at t=0: ") + e.what());
        }
        for (std::size_t i = 0; i < q_.size(); ++i) {
            if (!(q_[i] > 0.0) || !std::isfinite(q_[i]))
                throw LoadError("exceptional set entries must be positive reals, got " + format_number(q_[i]));
            for (std::size_t j = 0; j < i; ++j)
                if (q_[i] == q_[j]) throw LoadError("exceptional set lists " + format_number(q_[i]) + " twice");
        }
        std::sort(q_.begin(), q_.end());
    }

    ComparisonFunction(std::string_view source, std::vector<double> exceptional = {},
                       std::optional<bool> declared_monotone = std::nullopt)
        : ComparisonFunction(expr::parse(source, {"t"}), std::move(exceptional), declared_monotone) {}

    double operator()(double t) const { return def_.at(t); }

    const expr::Expression& definition() const { return def_; }
    const std::vector<double>& exceptional() const { return q_; }
    std::optional<bool> declared_monotone() const { return monotone_; }

    bool near_exceptional(double s) const {
        return std::any_of(q_.begin(), q_.end(), [s](double q) { return std::fabs(s - q) <= kExceptionalRadius; });
    }

private:
    expr::Expression def_;
    std::vector<double> q_;
    std::optional<bool> monotone_;
};

/// Logarithmically spaced positive scan points, endpoints included.
struct ScanPlan {
    double lo = 1e-6;
    double hi = 1e3;
    std::size_t count = 512;

    std::vector<double> points() const {
        if (!(lo > 0.0) || !(hi >= lo) || count == 0) throw LoadError("scan plan needs 0 < lo <= hi and count >= 1");
        std::vector<double> pts(count);
        if (count == 1) {
            pts[0] = lo;
            return pts;
        }
        const double span = std::log(hi / lo);
        for (std::size_t i = 0; i < count; ++i)
            pts[i] = lo * std::exp(span * static_cast<double>(i) / static_cast<double>(count - 1));
        pts.front() = lo;
        pts.back() = hi;
        return pts;
    }
};

/// Uniform variate on [0, 1) from the top 53 bits, identical on every platform.
inline double unit_uniform(std::mt19937_64& gen) { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }

/// phi(0) = 0 and phi(t) < t at every sample.
inline Verdict check_normal(const ComparisonFunction& phi, std::span<const double> samples) {
    if (samples.empty()) throw LoadError("normality check needs at least one sample");
    Verdict v;
    v.check = "normal";
    v.status = "sampled";
    const double at_zero = phi(0.0);
    if (std::fabs(at_zero) > kSlack) {
        v.holds = false;
        v.witness = 0.0;
        v.witness_value = at_zero;
        v.notes.push_back("phi(0) = " + format_number(at_zero) + " is not 0");
    }
    for (double t : samples) {
        if (!(t > 0.0)) throw LoadError("normality samples must be positive");
        const double value = phi(t);
        if (!(value < t)) v.bad_points.push_back(t);
    }
    v.checked_count = samples.size() + 1;
    std::sort(v.bad_points.begin(), v.bad_points.end());
    if (!v.bad_points.empty()) {
        v.holds = false;
        if (!v.witness) {
            v.witness = v.bad_points.front();
            v.witness_value = phi(*v.witness);
        }
    }
    return v;
}

/// Falsification search for a non-vanishing orbit r_{n+1} <= phi(r_n).
///
/// From each seed the equality orbit r_{n+1} = phi(r_n) runs together with
/// `suborbits` randomized orbits r_{n+1} = u_n phi(r_n), u_n uniform on [0, 1].
/// Every orbit must fall below `tol` within `max_iters` steps.
inline Verdict check_asymptotic_normal(const ComparisonFunction& phi, std::span<const double> seeds,
                                       std::size_t max_iters, double tol, std::uint64_t seed = kDefaultSeed,
                                       std::size_t suborbits = kDefaultSuborbits) {
    if (!(tol > 0.0)) throw LoadError("orbit tolerance must be positive");
    Verdict v;
    v.check = "asymptotic_normal";
    v.seed = seed;
    v.status = "no counterexample orbit found";
    std::mt19937_64 gen(seed);

    for (double r0 : seeds) {
        if (!(r0 > 0.0)) throw LoadError("orbit seeds must be positive");
        for (std::size_t orbit = 0; orbit <= suborbits; ++orbit) {
            double r = r0;
            bool vanished = false;
            for (std::size_t n = 0; n <= max_iters; ++n) {
                if (r < tol) {
                    vanished = true;
                    break;
                }
                const double next = phi(r);
                r = orbit == 0 ? next : unit_uniform(gen) * next;
            }
            ++v.checked_count;
            if (!vanished) {
                v.holds = false;
                v.bad_points.push_back(r0);
                v.notes.push_back((orbit == 0 ? std::string("equality orbit") : "randomized orbit " + std::to_string(orbit)) +
                                  " from " + format_number(r0) + " still at " + format_number(r) + " after " +
                                  std::to_string(max_iters) + " steps");
                break;
            }
        }
    }
    std::sort(v.bad_points.begin(), v.bad_points.end());
    v.bad_points.erase(std::unique(v.bad_points.begin(), v.bad_points.end()), v.bad_points.end());
    if (!v.holds) {
        v.witness = v.bad_points.front();
        v.status = "counterexample orbit";
    } else if (phi.declared_monotone().value_or(false)) {
        v.status = "no counterexample orbit found; declared monotone, so the equality orbit dominates";
    }
    return v;
}

/// The first `steps + 1` terms of r_{n+1} = phi(r_n).
inline std::vector<double> equality_orbit(const ComparisonFunction& phi, double r0, std::size_t steps) {
    std::vector<double> orbit{r0};
    orbit.reserve(steps + 1);
    for (std::size_t n = 0; n < steps; ++n) orbit.push_back(phi(orbit.back()));
    return orbit;
}

struct LadderRung {
    double epsilon;
    double sup;  // max of phi over the samples of [s, s + epsilon)
};

struct LimsupEstimate {
    double s = 0.0;
    double value = 0.0;
    std::vector<LadderRung> ladder;  // epsilon shrinking
    bool converged = false;
};

/// Right upper-limit envelope max{limsup_{t->s+} phi(t), phi(s)}, estimated on a shrinking ladder.
///
/// Each rung takes the max of phi over 128 uniform samples of [s, s + eps),
/// pooled with the samples of every narrower rung, so the rung sets are
/// nested and the ladder never increases.
inline LimsupEstimate estimate_L_plus(const ComparisonFunction& phi, double s) {
    if (!(s > 0.0)) throw LoadError("limsup estimate needs s > 0");
    LimsupEstimate est;
    est.s = s;
    std::array<double, kLimsupLadder.size()> sups{};
    double pooled = -std::numeric_limits<double>::infinity();
    for (std::size_t k = kLimsupLadder.size(); k-- > 0;) {
        const double eps = kLimsupLadder[k];
        for (std::size_t i = 0; i < kLimsupSamples; ++i)
            pooled = std::max(pooled, phi(s + eps * static_cast<double>(i) / static_cast<double>(kLimsupSamples)));
        sups[k] = pooled;
    }
    for (std::size_t k = 0; k < kLimsupLadder.size(); ++k) est.ladder.push_back({kLimsupLadder[k], sups[k]});
    est.value = std::max(sups.back(), phi(s));
    est.converged = std::fabs(sups[sups.size() - 2] - sups.back()) <= kLimsupConvergence;
    return est;
}

/// Narrowest rung used to settle admissibility where the standard ladder has not converged.
inline constexpr double kRefinedEpsilon = 1e-15;

/// max{sup phi([s, s + 1e-15)), phi(s)} on 128 samples.
///
/// The 1e-6 rung overestimates a continuous phi by about 1e-6 phi'(s), which
/// swamps the margin s - phi(s) of functions like t/(1+t) near 0.
inline double refined_L_plus(const ComparisonFunction& phi, double s) {
    double sup = phi(s);
    for (std::size_t i = 1; i < kLimsupSamples; ++i)
        sup = std::max(sup, phi(s + kRefinedEpsilon * static_cast<double>(i) / static_cast<double>(kLimsupSamples)));
    return sup;
}

/// L+phi(s) < s at every scan point off the declared exceptional set.
///
/// A point whose ladder has not converged and whose estimate reaches s is
/// decided again on the refined rung.
inline Verdict check_nearly_right_admissible(const ComparisonFunction& phi, std::span<const double> scan) {
    Verdict v;
    v.check = "nearly_right_admissible";
    std::vector<double> pts(scan.begin(), scan.end());
    std::sort(pts.begin(), pts.end());
    for (double s : pts)
        if (!(s > 0.0)) throw LoadError("scan points must be positive");

    if (phi.declared_monotone().value_or(false)) {
        bool nondecreasing = true;
        double prev = -std::numeric_limits<double>::infinity();
        for (double s : pts) {
            const double value = phi(s);
            if (value < prev) {
                nondecreasing = false;
                v.notes.push_back("declared monotone but phi decreases before " + format_number(s));
                break;
            }
            prev = value;
        }
        if (nondecreasing) {
            // Off its countably many jumps a nondecreasing phi has L+phi(s) = phi(s).
            for (double s : pts) {
                if (phi.near_exceptional(s)) continue;
                ++v.checked_count;
                const double value = phi(s);
                if (!(value < s)) {
                    if (v.bad_points.empty()) v.witness_value = value;
                    v.bad_points.push_back(s);
                }
            }
            v.status = "monotone: L+phi(s) = phi(s) off a countable set, checked phi(s) < s";
            if (!v.bad_points.empty()) {
                v.holds = false;
                v.witness = v.bad_points.front();
            }
            return v;
        }
    }

    std::size_t skipped = 0, refined = 0;
    double witness_value = 0.0;
    for (double s : pts) {
        if (phi.near_exceptional(s)) {
            ++skipped;
            continue;
        }
        ++v.checked_count;
        const LimsupEstimate est = estimate_L_plus(phi, s);
        double value = est.value;
        if (!(value < s) && !est.converged) {
            ++refined;
            value = refined_L_plus(phi, s);
        }
        if (!(value < s)) {
            if (v.bad_points.empty()) witness_value = value;
            v.bad_points.push_back(s);
        }
    }
    v.status = "limsup estimated at scan points";
    if (skipped) v.notes.push_back(std::to_string(skipped) + " scan point(s) skipped near the exceptional set");
    if (refined) v.notes.push_back(std::to_string(refined) + " scan point(s) decided on the 1e-15 rung");
    if (!v.bad_points.empty()) {
        v.holds = false;
        v.witness = v.bad_points.front();
        v.witness_value = witness_value;
    }
    return v;
}

}  // namespace fixlab
