#include "hitstats/targets.hpp"

#include <algorithm>
#include <cmath>

namespace hitstats {

// ---------------------------------------------------------------------------
// Construction
// ---------------------------------------------------------------------------

TargetFamily TargetFamily::ball(double center, double rho, bool wrap_at_endpoints) {
    if (!(rho > 0.0))
        throw Error("TargetFamily::ball: rho must be positive");
    if (!(center >= 0.0 && center <= 1.0))
        throw Error("TargetFamily::ball: center must lie in [0,1]");
    TargetFamily t;
    t.kind_ = Kind::ball;
    t.centers_ = {center};
    t.rho_ = rho;
    t.wrap_ = wrap_at_endpoints;
    return t;
}

TargetFamily TargetFamily::finite_union(std::vector<double> centers, double rho,
                                        bool wrap_at_endpoints) {
    if (centers.empty())
        throw Error("TargetFamily::finite_union: need at least one center");
    if (!(rho > 0.0))
        throw Error("TargetFamily::finite_union: rho must be positive");
    for (double c : centers)
        if (!(c >= 0.0 && c <= 1.0))
            throw Error("TargetFamily::finite_union: centers must lie in [0,1]");
    TargetFamily t;
    t.kind_ = Kind::finite_union;
    t.centers_ = std::move(centers);
    t.rho_ = rho;
    t.wrap_ = wrap_at_endpoints;
    return t;
}

TargetFamily TargetFamily::product_strip(double x, double a, double b, double rho) {
    if (!(rho > 0.0))
        throw Error("TargetFamily::product_strip: rho must be positive");
    if (!(x >= 0.0 && x <= 1.0 && a >= 0.0 && a <= b && b <= 1.0))
        throw Error("TargetFamily::product_strip: need x in [0,1], 0 <= a <= b <= 1");
    TargetFamily t;
    t.kind_ = Kind::product_strip;
    t.centers_ = {x};
    t.strip_a_ = a;
    t.strip_b_ = b;
    t.rho_ = rho;
    return t;
}

TargetFamily TargetFamily::parabolic_level(double alpha, int n) {
    if (n < 0)
        throw Error("TargetFamily::parabolic_level: n must be >= 0");
    TargetFamily t;
    t.kind_ = Kind::parabolic_level;
    t.n_ = n;
    t.a_n_ = a_sequence(alpha, n).back();
    return t;
}

TargetFamily TargetFamily::parabolic_annulus(double alpha, int n, int K) {
    if (n < 0 || K < 1)
        throw Error("TargetFamily::parabolic_annulus: need n >= 0, K >= 1");
    TargetFamily t;
    t.kind_ = Kind::parabolic_annulus;
    t.n_ = n;
    t.K_ = K;
    const auto a = a_sequence(alpha, n + K);
    t.a_n_ = a[static_cast<std::size_t>(n)];
    t.a_nK_ = a.back();
    return t;
}

// ---------------------------------------------------------------------------
// Membership
// ---------------------------------------------------------------------------

std::vector<TargetFamily::Interval> TargetFamily::intervals() const {
    std::vector<Interval> out;
    auto add_ball = [&](double c) {
        const double lo = c - rho_, hi = c + rho_;
        if (!wrap_) {
            // |x-c| < rho on [0,1]: open ends unless clipped by the domain
            out.push_back(Interval{std::max(lo, 0.0), std::min(hi, 1.0), lo < 0.0, hi > 1.0});
            return;
        }
        // circle distance min(|x-c|, 1-|x-c|) < rho
        if (lo < 0.0) {
            out.push_back(Interval{0.0, hi, true, false});
            out.push_back(Interval{1.0 + lo, 1.0, false, true});
        } else if (hi > 1.0) {
            out.push_back(Interval{lo, 1.0, false, true});
            out.push_back(Interval{0.0, hi - 1.0, true, false});
        } else {
            out.push_back(Interval{lo, hi, false, false});
        }
    };
    switch (kind_) {
    case Kind::ball:
    case Kind::finite_union:
        for (double c : centers_)
            add_ball(c);
        return out;
    case Kind::parabolic_level:
        out.push_back(Interval{0.0, a_n_, true, true});
        return out;
    case Kind::parabolic_annulus:
        out.push_back(Interval{a_nK_, a_n_, false, true});
        return out;
    case Kind::product_strip:
        throw Error("intervals: target is two-dimensional");
    }
    return out;
}

TargetFamily::StripBounds TargetFamily::strip_bounds() const {
    if (kind_ != Kind::product_strip)
        throw Error("strip_bounds: not a product strip");
    const double c = centers_[0];
    StripBounds b;
    b.x = Interval{std::max(c - rho_, 0.0), std::min(c + rho_, 1.0), c - rho_ < 0.0,
                   c + rho_ > 1.0};
    b.y = Interval{std::max(strip_a_ - rho_, 0.0), std::min(strip_b_ + rho_, 1.0), true, true};
    return b;
}

bool TargetFamily::contains(const Point& p) const {
    if (kind_ == Kind::product_strip) {
        if (p.dim != 2)
            throw Error("contains: product strip needs a 2-d point");
        const auto b = strip_bounds();
        return b.x.contains(p.x) && b.y.contains(p.y);
    }
    if (p.dim != 1)
        throw Error("contains: 1-d target needs a 1-d point");
    for (const auto& iv : intervals())
        if (iv.contains(p.x))
            return true;
    return false;
}

// ---------------------------------------------------------------------------
// Measure
// ---------------------------------------------------------------------------

double TargetFamily::measure(const DensityModel& d) const {
    if (kind_ == Kind::product_strip) {
        const auto b = strip_bounds();
        if (d.is_product())
            return d.rect_measure(b.x.lo, b.x.hi, b.y.lo, b.y.hi);
        if (d.is_lebesgue()) // Lebesgue on the square
            return (b.x.hi - b.x.lo) * (b.y.hi - b.y.lo);
        throw Error("measure: product strip needs a product (or Lebesgue) model");
    }
    auto ivs = intervals();
    if (kind_ == Kind::finite_union && ivs.size() > 1) {
        auto sorted = ivs;
        std::sort(sorted.begin(), sorted.end(),
                  [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
        for (std::size_t i = 0; i + 1 < sorted.size(); ++i)
            if (sorted[i + 1].lo < sorted[i].hi)
                throw OverlappingUnion("finite_union: balls intersect at rho=" +
                                       std::to_string(rho_));
    }
    double total = 0.0;
    for (const auto& iv : ivs)
        total += d.interval_measure(iv.lo, iv.hi);
    return total;
}

std::string TargetFamily::describe() const {
    switch (kind_) {
    case Kind::ball:
        return "ball(center=" + std::to_string(centers_[0]) + ", rho=" + std::to_string(rho_) +
               (wrap_ ? ", wrap" : "") + ")";
    case Kind::finite_union: {
        std::string s = "union(centers={";
        for (std::size_t i = 0; i < centers_.size(); ++i)
            s += (i ? "," : "") + std::to_string(centers_[i]);
        return s + "}, rho=" + std::to_string(rho_) + (wrap_ ? ", wrap" : "") + ")";
    }
    case Kind::product_strip:
        return "strip(x=" + std::to_string(centers_[0]) + ", [" + std::to_string(strip_a_) +
               "," + std::to_string(strip_b_) + "], rho=" + std::to_string(rho_) + ")";
    case Kind::parabolic_level:
        return "parabolic_level(n=" + std::to_string(n_) + ", a_n=" + std::to_string(a_n_) + ")";
    case Kind::parabolic_annulus:
        return "parabolic_annulus(n=" + std::to_string(n_) + ", K=" + std::to_string(K_) + ")";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Horizon
// ---------------------------------------------------------------------------

ScalingRule ScalingRule::kac(double t) {
    if (!(t > 0.0))
        throw Error("ScalingRule::kac: t must be positive");
    return ScalingRule{Kind::kac, t, 1};
}

ScalingRule ScalingRule::empirical(double t, std::int64_t L) {
    if (!(t > 0.0))
        throw Error("ScalingRule::empirical: t must be positive");
    if (L < 1)
        throw Error("ScalingRule::empirical: L must be >= 1");
    return ScalingRule{Kind::empirical, t, L};
}

std::int64_t horizon(const ScalingRule& rule, const TargetFamily& target, const DensityModel& d,
                     std::optional<double> p_hat) {
    if (rule.kind == ScalingRule::Kind::kac) {
        const double mu = target.measure(d);
        if (!(mu > 0.0))
            throw ZeroMeasureTarget("horizon: target has zero measure under Kac scaling");
        return std::max<std::int64_t>(1, std::llround(rule.t / mu));
    }
    if (!p_hat || !(*p_hat > 0.0 && *p_hat < 1.0))
        throw Error("horizon: empirical scaling needs p_hat in (0,1)");
    return std::max<std::int64_t>(1,
                                  std::llround(rule.t * static_cast<double>(rule.L) / *p_hat));
}

} // namespace hitstats
