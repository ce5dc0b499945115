#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "hitstats/dynamics.hpp"
#include "hitstats/errors.hpp"
#include "hitstats/rng.hpp"

namespace hitstats {

// ---------------------------------------------------------------------------
// DensityModel: the invariant measure, either exact Lebesgue (doubling and
// products of doubling) or a long-orbit occupation histogram.
// ---------------------------------------------------------------------------

class DensityModel {
  public:
    static DensityModel lebesgue();
    // edges.size() == masses.size() + 1, edges increasing from 0 to 1,
    // masses nonnegative summing to 1 within 1e-9.
    static DensityModel histogram(std::vector<double> edges, std::vector<double> masses);
    static DensityModel product(DensityModel left, DensityModel right);

    bool is_lebesgue() const { return kind_ == Kind::lebesgue; }
    bool is_histogram() const { return kind_ == Kind::histogram; }
    bool is_product() const { return kind_ == Kind::product; }
    int dimension() const { return kind_ == Kind::product ? 2 : 1; }

    const DensityModel& left() const;
    const DensityModel& right() const;

    // mu([a,b]) for 1-d models; exact for Lebesgue, partial bins prorated
    // linearly for histograms.
    double interval_measure(double a, double b) const;
    // mu of an axis-aligned rectangle, 2-d models.
    double rect_measure(double ax, double bx, double ay, double by) const;
    // density estimate at a point (1-d models)
    double density_at(double x) const;

    const std::vector<double>& edges() const { return edges_; }
    const std::vector<double>& masses() const { return masses_; }

    // (bin_left, bin_right, mass) rows
    std::string to_csv() const;
    static DensityModel from_csv(const std::string& text);

  private:
    enum class Kind { lebesgue, histogram, product };
    Kind kind_ = Kind::lebesgue;
    std::vector<double> edges_, masses_;
    std::shared_ptr<const DensityModel> left_, right_;
};

// ---------------------------------------------------------------------------
// Density estimation
// ---------------------------------------------------------------------------

enum class BinLayout {
    uniform,
    // one underflow bin [0, 2^-40) plus uniform sub-bins within each binary
    // octave up to 1; resolves the invariant measure near a parabolic point
    octave,
};

struct DensityParams {
    int bins = 1024;
    std::int64_t orbit_length = 10'000'000;
    std::int64_t burn_in = 10'000;
    BinLayout layout = BinLayout::uniform;
    int shards = 64; // fixed shard count keeps results thread-count independent
};

// Occupation histogram of a long orbit after burn-in, normalized.
// Deterministic given (seed, params).  Throws DegenerateOrbit when more than
// 99% of the mass lands in a single bin.
DensityModel estimate_density(const MapSystem& map, const DensityParams& params,
                              std::uint64_t seed, int threads = 1);

// Defaults per family: uniform bins, except the octave layout for
// Pomeau-Manneville maps whose density blows up at 0.
DensityModel estimate_density(const MapSystem& map, int bins, std::int64_t orbit_length,
                              std::int64_t burn_in, std::uint64_t seed);

// The exact model where one is known (doubling, products of doubling);
// throws otherwise.
DensityModel exact_density(const MapSystem& map);

// x0 ~ mu: fresh uniform state under an exact Lebesgue model, otherwise a
// uniform start iterated burn_in times.
OrbitState sample_stationary(const MapSystem& map, const DensityModel& d, std::int64_t burn_in,
                             Rng& rng);

} // namespace hitstats
