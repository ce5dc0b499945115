#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "hitstats/dynamics.hpp"
#include "hitstats/errors.hpp"
#include "hitstats/measure.hpp"

namespace hitstats {

// ---------------------------------------------------------------------------
// TargetFamily: the shrinking target sets.
//
//   ball               B_rho(x), clipped to [0,1]; optional wraparound treats
//                      [0,1] as a circle (documented flag, off by default)
//   finite_union       union of balls around finitely many centers
//   product_strip      rho-neighbourhood of {x} x [a,b] in the sup metric
//   parabolic_level    U_n = [0, a_n]   (closed right endpoint)
//   parabolic_annulus  V_{n,K} = (a_{n+K}, a_n]
// ---------------------------------------------------------------------------

class TargetFamily {
  public:
    static TargetFamily ball(double center, double rho, bool wrap_at_endpoints = false);
    static TargetFamily finite_union(std::vector<double> centers, double rho,
                                     bool wrap_at_endpoints = false);
    static TargetFamily product_strip(double x, double a, double b, double rho);
    static TargetFamily parabolic_level(double alpha, int n);
    static TargetFamily parabolic_annulus(double alpha, int n, int K);

    int dimension() const { return kind_ == Kind::product_strip ? 2 : 1; }
    bool contains(const Point& p) const;
    // mu(target) under the given density model; FiniteUnion requires pairwise
    // disjoint balls (throws OverlappingUnion).
    double measure(const DensityModel& d) const;
    std::string describe() const;

    // 1-d membership reduced to half-open/closed intervals; kernels test
    // against these so they agree with contains() exactly.
    struct Interval {
        double lo, hi;
        bool lo_closed, hi_closed;

        bool contains(double v) const {
            return (lo_closed ? v >= lo : v > lo) && (hi_closed ? v <= hi : v < hi);
        }
    };
    std::vector<Interval> intervals() const; // 1-d targets
    struct StripBounds {
        Interval x, y;
    };
    StripBounds strip_bounds() const; // product_strip

    enum class Kind { ball, finite_union, product_strip, parabolic_level, parabolic_annulus };
    Kind kind() const { return kind_; }
    double rho() const { return rho_; }
    int level_n() const { return n_; }
    int level_K() const { return K_; }
    double a_n() const { return a_n_; }
    double a_nK() const { return a_nK_; }

  private:
    TargetFamily() = default;
    Kind kind_ = Kind::ball;
    std::vector<double> centers_;
    double rho_ = 0.0;
    double strip_a_ = 0.0, strip_b_ = 0.0;
    int n_ = 0, K_ = 0;
    double a_n_ = 0.0, a_nK_ = 0.0;
    bool wrap_ = false;
};

// ---------------------------------------------------------------------------
// ScalingRule: the two prescriptions for the observation horizon N.
// ---------------------------------------------------------------------------

struct ScalingRule {
    enum class Kind { kac, empirical };
    Kind kind = Kind::kac;
    double t = 1.0;
    std::int64_t L = 1; // block length, empirical scaling only

    static ScalingRule kac(double t);
    static ScalingRule empirical(double t, std::int64_t L);
};

// Kac: round(t / mu(target)).  Empirical: round(t L / p_hat) with
// p_hat = P(Z^L >= 1) estimated upstream.  Result is at least 1.
std::int64_t horizon(const ScalingRule& rule, const TargetFamily& target, const DensityModel& d,
                     std::optional<double> p_hat = std::nullopt);

} // namespace hitstats
