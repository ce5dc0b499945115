#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "hitstats/errors.hpp"
#include "hitstats/rng.hpp"

namespace hitstats {

// ---------------------------------------------------------------------------
// Map families
//
// Four built-in self-maps of [0,1] (or [0,1]^2 for products):
//
//   doubling              T(x) = 2x mod 1
//   perturbed_expanding   T(x) = 2x + eps*sin(2*pi*x) mod 1,   0 <= eps < 1/(2*pi)
//   pomeau_manneville     T(x) = x + 2^a x^(1+a) on [0,1/2),  2x-1 on [1/2,1]
//   product               T(x,y) = (T1 x, T2 y) of two 1-d maps
//
// Branch boundaries are half-open with x = 1/2 on the right branch.
// ---------------------------------------------------------------------------

enum class MapFamily { doubling, perturbed_expanding, pomeau_manneville, product };

class MapSystem {
  public:
    static MapSystem doubling();
    static MapSystem perturbed_expanding(double eps);
    static MapSystem pomeau_manneville(double alpha);
    static MapSystem product(const MapSystem& left, const MapSystem& right);

    MapFamily family() const { return family_; }
    int dimension() const { return family_ == MapFamily::product ? 2 : 1; }
    bool is_doubling() const { return family_ == MapFamily::doubling; }

    double alpha() const;   // pomeau_manneville only
    double epsilon() const; // perturbed_expanding only
    const MapSystem& left() const;
    const MapSystem& right() const;

    std::string describe() const;

  private:
    MapSystem() = default;
    MapFamily family_ = MapFamily::doubling;
    double param_ = 0.0;
    std::shared_ptr<const MapSystem> left_, right_;
};

// ---------------------------------------------------------------------------
// Points: one or two coordinates in [0,1].
// ---------------------------------------------------------------------------

struct Point {
    double x = 0.0;
    double y = 0.0;
    int dim = 1;

    static Point one(double x) { return Point{x, 0.0, 1}; }
    static Point two(double x, double y) { return Point{x, y, 2}; }
};

// One application of the map formula in double precision.
double apply(const MapSystem& map, double x);
Point apply(const MapSystem& map, const Point& p);

// |DT(x)|; for products the componentwise maximum (used for expansion checks).
double derivative_magnitude(const MapSystem& map, double x);
double derivative_magnitude(const MapSystem& map, const Point& p);

// Minimal-period check: T^p x returns to x within tol and no earlier iterate
// does.
bool verify_periodic(const MapSystem& map, const Point& x, int period, double tol);

// theta = |DT^p(x)|^{-1} at a p-periodic point, via the chain-rule product
// along the orbit.  Throws NotPeriodic if the orbit fails to close.
double pitskel_value(const MapSystem& map, const Point& x, int period, double tol = 1e-9);

// The parabolic inverse branch of the Pomeau-Manneville map: the unique
// x in [0,1/2] with x + 2^a x^(1+a) = y, by safeguarded Newton iteration
// (residual <= 1e-14).
double parabolic_inverse(double alpha, double y);

// a_0 = 1, a_{k+1} = parabolic_inverse(alpha, a_k).  Strictly decreasing,
// a_n ~ n^{-1/alpha}.  Returns n_max+1 values.
std::vector<double> a_sequence(double alpha, int n_max);

// ---------------------------------------------------------------------------
// Orbit states
//
// Iterating 2x mod 1 in floating point sheds one bit per step and collapses
// to 0 after ~53 steps, so doubling-map orbits carry an exact 64-bit leading
// window plus a lazy tail of bits (random for Lebesgue-stationary starts,
// eventually periodic for rational starts).  One step is a shift plus one
// tail bit.  The other families iterate doubles directly.
// ---------------------------------------------------------------------------

class BitTail {
  public:
    static BitTail random(Rng rng);
    // bits[0] is consumed first; after pre_period bits the pattern repeats
    // from index pre_period.
    static BitTail periodic(std::vector<std::uint8_t> bits, std::size_t pre_period);

    bool next();

  private:
    BitTail() = default;
    bool random_ = true;
    Rng rng_{0};
    std::uint64_t buffer_ = 0;
    int bits_left_ = 0;
    std::vector<std::uint8_t> pattern_;
    std::size_t pos_ = 0;
    std::size_t restart_ = 0;
};

struct DoublingState {
    std::uint64_t window = 0; // leading 64 binary digits, MSB first
    BitTail tail;
};

class OrbitState {
  public:
    // Lebesgue-stationary start: 64 fresh bits plus a random tail.
    static OrbitState doubling_random(Rng rng);
    // Exact state of the rational num/den in [0,1); tail is the eventually
    // periodic binary expansion.
    static OrbitState doubling_rational(std::uint64_t num, std::uint64_t den);
    // Doubling state whose leading bits agree with x (to double precision);
    // deeper bits are random.  Used for conditional draws inside intervals.
    static OrbitState doubling_from_value(double x, Rng rng);
    static OrbitState real(double x);
    static OrbitState pair(OrbitState left, OrbitState right);

    int dimension() const;
    Point value() const;
    double coordinate() const; // 1-d value

    friend void advance(const MapSystem& map, OrbitState& s);

  private:
    OrbitState() = default;
    struct Pair;
    std::variant<DoublingState, double, std::shared_ptr<Pair>> state_;
};

struct OrbitState::Pair {
    OrbitState left, right;
};

// In-place orbit advancement: s <- T(s).
void advance(const MapSystem& map, OrbitState& s);

// Value-returning step.
OrbitState step(const MapSystem& map, const OrbitState& s);

} // namespace hitstats
