#include "hitstats/dynamics.hpp"

#include <cmath>
#include <numbers>

namespace hitstats {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double mod1(double x) {
    x -= std::floor(x);
    // floor can leave exactly 1.0 behind for tiny negative inputs
    return x >= 1.0 ? x - 1.0 : x;
}

} // namespace

// ---------------------------------------------------------------------------
// MapSystem
// ---------------------------------------------------------------------------

MapSystem MapSystem::doubling() {
    MapSystem m;
    m.family_ = MapFamily::doubling;
    return m;
}

MapSystem MapSystem::perturbed_expanding(double eps) {
    if (!(eps >= 0.0 && eps < 1.0 / kTwoPi))
        throw Error("perturbed_expanding: eps must lie in [0, 1/(2*pi))");
    MapSystem m;
    m.family_ = MapFamily::perturbed_expanding;
    m.param_ = eps;
    return m;
}

MapSystem MapSystem::pomeau_manneville(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw Error("pomeau_manneville: alpha must lie in (0,1)");
    MapSystem m;
    m.family_ = MapFamily::pomeau_manneville;
    m.param_ = alpha;
    return m;
}

MapSystem MapSystem::product(const MapSystem& left, const MapSystem& right) {
    if (left.dimension() != 1 || right.dimension() != 1)
        throw Error("product: components must be one-dimensional");
    MapSystem m;
    m.family_ = MapFamily::product;
    m.left_ = std::make_shared<const MapSystem>(left);
    m.right_ = std::make_shared<const MapSystem>(right);
    return m;
}

double MapSystem::alpha() const {
    if (family_ != MapFamily::pomeau_manneville)
        throw Error("alpha(): not a Pomeau-Manneville map");
    return param_;
}

double MapSystem::epsilon() const {
    if (family_ != MapFamily::perturbed_expanding)
        throw Error("epsilon(): not a perturbed expanding map");
    return param_;
}

const MapSystem& MapSystem::left() const {
    if (!left_)
        throw Error("left(): not a product map");
    return *left_;
}

const MapSystem& MapSystem::right() const {
    if (!right_)
        throw Error("right(): not a product map");
    return *right_;
}

std::string MapSystem::describe() const {
    switch (family_) {
    case MapFamily::doubling:
        return "doubling";
    case MapFamily::perturbed_expanding:
        return "perturbed_expanding(eps=" + std::to_string(param_) + ")";
    case MapFamily::pomeau_manneville:
        return "pomeau_manneville(alpha=" + std::to_string(param_) + ")";
    case MapFamily::product:
        return "product(" + left_->describe() + ", " + right_->describe() + ")";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Formula evaluation
// ---------------------------------------------------------------------------

double apply(const MapSystem& map, double x) {
    switch (map.family()) {
    case MapFamily::doubling:
        return mod1(2.0 * x);
    case MapFamily::perturbed_expanding:
        return mod1(2.0 * x + map.epsilon() * std::sin(kTwoPi * x));
    case MapFamily::pomeau_manneville: {
        if (x < 0.5) {
            const double a = map.alpha();
            return x + std::exp2(a) * std::pow(x, 1.0 + a);
        }
        return 2.0 * x - 1.0;
    }
    case MapFamily::product:
        throw Error("apply: product map needs a 2-d point");
    }
    return x;
}

Point apply(const MapSystem& map, const Point& p) {
    if (map.dimension() == 1)
        return Point::one(apply(map, p.x));
    return Point::two(apply(map.left(), p.x), apply(map.right(), p.y));
}

double derivative_magnitude(const MapSystem& map, double x) {
    switch (map.family()) {
    case MapFamily::doubling:
        return 2.0;
    case MapFamily::perturbed_expanding:
        // 2 + 2*pi*eps*cos(2*pi*x) > 0 since eps < 1/(2*pi)
        return 2.0 + kTwoPi * map.epsilon() * std::cos(kTwoPi * x);
    case MapFamily::pomeau_manneville: {
        if (x < 0.5) {
            const double a = map.alpha();
            return 1.0 + (1.0 + a) * std::exp2(a) * std::pow(x, a);
        }
        return 2.0;
    }
    case MapFamily::product:
        throw Error("derivative_magnitude: product map needs a 2-d point");
    }
    return 1.0;
}

double derivative_magnitude(const MapSystem& map, const Point& p) {
    if (map.dimension() == 1)
        return derivative_magnitude(map, p.x);
    return std::max(derivative_magnitude(map.left(), p.x),
                    derivative_magnitude(map.right(), p.y));
}

// ---------------------------------------------------------------------------
// Periodic orbits and Pitskel values
// ---------------------------------------------------------------------------

namespace {

double point_dist(const Point& a, const Point& b) {
    if (a.dim == 1)
        return std::abs(a.x - b.x);
    return std::max(std::abs(a.x - b.x), std::abs(a.y - b.y));
}

} // namespace

bool verify_periodic(const MapSystem& map, const Point& x, int period, double tol) {
    if (period < 1)
        throw Error("verify_periodic: period must be >= 1");
    Point p = x;
    for (int j = 1; j < period; ++j) {
        p = apply(map, p);
        if (point_dist(p, x) <= tol)
            return false; // true period divides j < period
    }
    p = apply(map, p);
    return point_dist(p, x) <= tol;
}

double pitskel_value(const MapSystem& map, const Point& x, int period, double tol) {
    if (!verify_periodic(map, x, period, tol))
        throw NotPeriodic("pitskel_value: point is not " + std::to_string(period) +
                          "-periodic within tol");
    double inv = 1.0;
    Point p = x;
    for (int j = 0; j < period; ++j) {
        inv /= derivative_magnitude(map, p);
        p = apply(map, p);
    }
    return inv;
}

// ---------------------------------------------------------------------------
// Parabolic inverse branch, a_n sequence
// ---------------------------------------------------------------------------

double parabolic_inverse(double alpha, double y) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw Error("parabolic_inverse: alpha must lie in (0,1)");
    if (y <= 0.0)
        return 0.0;
    const double c = std::exp2(alpha);
    // g(x) = x + c x^{1+a} - y is increasing and convex on [0, 1/2];
    // g(1/2) = 1 - y >= 0 exactly at the branch top.
    double lo = 0.0, hi = std::min(y, 0.5);
    double x = hi;
    for (int it = 0; it < 200; ++it) {
        const double xa = std::pow(x, alpha);
        const double g = x + c * x * xa - y;
        if (std::abs(g) <= 1e-14)
            return x;
        (g > 0.0 ? hi : lo) = x;
        const double dg = 1.0 + (1.0 + alpha) * c * xa;
        double nx = x - g / dg;
        if (!(nx > lo && nx < hi))
            nx = 0.5 * (lo + hi); // bisection fallback keeps the bracket
        x = nx;
    }
    return x;
}

std::vector<double> a_sequence(double alpha, int n_max) {
    if (n_max < 0)
        throw Error("a_sequence: n_max must be >= 0");
    std::vector<double> a(static_cast<std::size_t>(n_max) + 1);
    a[0] = 1.0;
    for (int k = 0; k < n_max; ++k)
        a[static_cast<std::size_t>(k) + 1] = parabolic_inverse(alpha, a[static_cast<std::size_t>(k)]);
    return a;
}

// ---------------------------------------------------------------------------
// BitTail / OrbitState
// ---------------------------------------------------------------------------

BitTail BitTail::random(Rng rng) {
    BitTail t;
    t.random_ = true;
    t.rng_ = rng;
    return t;
}

BitTail BitTail::periodic(std::vector<std::uint8_t> bits, std::size_t pre_period) {
    if (bits.empty() || pre_period >= bits.size())
        throw Error("BitTail::periodic: need at least one repeating bit");
    BitTail t;
    t.random_ = false;
    t.pattern_ = std::move(bits);
    t.restart_ = pre_period;
    return t;
}

bool BitTail::next() {
    if (random_) {
        if (bits_left_ == 0) {
            buffer_ = rng_.next_u64();
            bits_left_ = 64;
        }
        const bool b = (buffer_ >> 63) & 1u;
        buffer_ <<= 1;
        --bits_left_;
        return b;
    }
    const bool b = pattern_[pos_] != 0;
    if (++pos_ == pattern_.size())
        pos_ = restart_;
    return b;
}

OrbitState OrbitState::doubling_random(Rng rng) {
    OrbitState s;
    DoublingState d;
    d.window = rng.next_u64();
    d.tail = BitTail::random(rng);
    s.state_ = std::move(d);
    return s;
}

OrbitState OrbitState::doubling_rational(std::uint64_t num, std::uint64_t den) {
    if (den == 0 || num >= den)
        throw Error("doubling_rational: need 0 <= num < den");
    // Long division: digit_k = floor(2 r / den).  Remainders cycle within den
    // steps, which gives the eventually periodic tail after the 64-bit window.
    OrbitState s;
    DoublingState d;
    std::uint64_t r = num;
    for (int k = 0; k < 64; ++k) {
        r *= 2;
        const std::uint64_t bit = r / den;
        r %= den;
        d.window = (d.window << 1) | bit;
    }
    std::vector<std::uint8_t> bits;
    std::vector<std::uint64_t> remainders;
    std::size_t cycle_start = 0;
    for (;;) {
        bool seen = false;
        for (std::size_t i = 0; i < remainders.size(); ++i) {
            if (remainders[i] == r) {
                cycle_start = i;
                seen = true;
                break;
            }
        }
        if (seen)
            break;
        remainders.push_back(r);
        r *= 2;
        bits.push_back(static_cast<std::uint8_t>(r / den));
        r %= den;
    }
    d.tail = BitTail::periodic(std::move(bits), cycle_start);
    s.state_ = std::move(d);
    return s;
}

OrbitState OrbitState::doubling_from_value(double x, Rng rng) {
    if (!(x >= 0.0 && x < 1.0))
        throw Error("doubling_from_value: x must lie in [0,1)");
    OrbitState s;
    DoublingState d;
    // Top bits from x, low ~11 bits and the tail from the stream.
    const double scaled = std::ldexp(x, 64);
    const auto hi = static_cast<std::uint64_t>(scaled);
    d.window = hi | (rng.next_u64() & 0x7ffull);
    d.tail = BitTail::random(rng);
    s.state_ = std::move(d);
    return s;
}

OrbitState OrbitState::real(double x) {
    OrbitState s;
    s.state_ = x;
    return s;
}

OrbitState OrbitState::pair(OrbitState left, OrbitState right) {
    if (left.dimension() != 1 || right.dimension() != 1)
        throw Error("OrbitState::pair: components must be one-dimensional");
    OrbitState s;
    s.state_ = std::make_shared<Pair>(Pair{std::move(left), std::move(right)});
    return s;
}

int OrbitState::dimension() const {
    return std::holds_alternative<std::shared_ptr<Pair>>(state_) ? 2 : 1;
}

double OrbitState::coordinate() const {
    if (const auto* d = std::get_if<DoublingState>(&state_))
        return static_cast<double>(d->window) * 0x1.0p-64;
    if (const auto* x = std::get_if<double>(&state_))
        return *x;
    throw Error("coordinate(): state is two-dimensional");
}

Point OrbitState::value() const {
    if (const auto* p = std::get_if<std::shared_ptr<Pair>>(&state_))
        return Point::two((*p)->left.coordinate(), (*p)->right.coordinate());
    return Point::one(coordinate());
}

void advance(const MapSystem& map, OrbitState& s) {
    switch (map.family()) {
    case MapFamily::doubling: {
        auto* d = std::get_if<DoublingState>(&s.state_);
        if (!d)
            throw Error("advance: doubling map requires a bit-window state");
        d->window = (d->window << 1) | static_cast<std::uint64_t>(d->tail.next());
        return;
    }
    case MapFamily::perturbed_expanding:
    case MapFamily::pomeau_manneville: {
        auto* x = std::get_if<double>(&s.state_);
        if (!x)
            throw Error("advance: float state required");
        *x = apply(map, *x);
        return;
    }
    case MapFamily::product: {
        auto* p = std::get_if<std::shared_ptr<OrbitState::Pair>>(&s.state_);
        if (!p)
            throw Error("advance: product map requires a pair state");
        // shared_ptr gives cheap copies of states; clone before mutating
        if (p->use_count() > 1)
            *p = std::make_shared<OrbitState::Pair>(**p);
        advance(map.left(), (*p)->left);
        advance(map.right(), (*p)->right);
        return;
    }
    }
}

OrbitState step(const MapSystem& map, const OrbitState& s) {
    OrbitState out = s;
    advance(map, out);
    return out;
}

} // namespace hitstats
