#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hitstats/dynamics.hpp"
#include "hitstats/errors.hpp"
#include "hitstats/measure.hpp"
#include "hitstats/targets.hpp"

namespace hitstats {

// ---------------------------------------------------------------------------
// HitSeries: the counting data of a single orbit.
// ---------------------------------------------------------------------------

struct HitSeries {
    std::int64_t block_length = 0;        // L
    std::int64_t requested_horizon = 0;   // N as requested
    std::int64_t padded_horizon = 0;      // N rounded up to a multiple of L
    std::vector<std::int64_t> blocks;     // Z_j over the padded orbit
    std::int64_t total = 0;               // W = sum of blocks
    std::vector<std::int64_t> hit_times;  // strictly increasing absolute indices
};

// Exact indicator sums along the orbit of x0 (offsets 0..N-1, N padded up to
// a multiple of L).  Deterministic given x0's bit source.
HitSeries count_orbit(const MapSystem& map, const TargetFamily& target, OrbitState x0,
                      std::int64_t horizon, std::int64_t block_length);

// ---------------------------------------------------------------------------
// Estimators
// ---------------------------------------------------------------------------

struct TrialOptions {
    std::int64_t burn_in = 1024; // stationary-draw burn-in for histogram models
    int threads = 0;             // 0 = hardware concurrency
    std::int64_t chunk = 4096;   // trials per deterministic merge unit
};

struct BinomialEstimate {
    double value = 0.0;
    double se = 0.0;
    std::int64_t successes = 0;
    std::int64_t trials = 0;
};

// p-hat = P(Z^L >= 1): fraction of stationary starts whose first L steps
// (offsets 0..L-1) hit the target.  Throws AllZero when nothing hits.
BinomialEstimate estimate_hit_prob(const MapSystem& map, const DensityModel& d,
                                   const TargetFamily& target, std::int64_t L,
                                   std::int64_t trials, std::uint64_t seed,
                                   const TrialOptions& opts = {});

// Cluster-size and return-time statistics.
struct EstimatorReport {
    // lambda-hat_ell = #{Z^L = ell} / #{Z^L >= 1}, ell = 1..l_max, with the
    // remaining mass aggregated in tail
    std::vector<double> lambda_hat, lambda_se;
    double lambda_tail = 0.0;
    std::int64_t window_trials = 0; // stationary windows drawn
    std::int64_t hit_windows = 0;   // windows with Z^L >= 1

    // alpha-hat_ell = mu_U(tau^{ell-1} < L), ell = 1..l_max+1 (alpha_hat[0]=1)
    std::vector<double> alpha_hat, alpha_hat_se;
    std::vector<double> alpha; // alpha_ell = alpha-hat_ell - alpha-hat_{ell+1}
    double extremal_index = 0.0, extremal_se = 0.0;
    double conditional_trials = 0.0; // effective count (weighted when importance-sampled)

    // survival table for the entry-time identity: alpha1_partial[j-1] is the
    // estimate of mu_U(tau >= j) for j = 1..L (filled on request)
    std::vector<double> tau_survival;

    std::string to_csv() const;
};

// Distribution of the window count Z^L over stationary starts.
EstimatorReport estimate_lambdas(const MapSystem& map, const DensityModel& d,
                                 const TargetFamily& target, std::int64_t L,
                                 std::int64_t trials, std::uint64_t seed, int l_max = 12,
                                 const TrialOptions& opts = {});

// Return-time statistics from mu_U-conditioned starts.  Sampling is exact
// uniform under a Lebesgue model, rejection when mu(U) is large enough, and
// density-weighted importance sampling otherwise.
EstimatorReport estimate_alpha_hat(const MapSystem& map, const DensityModel& d,
                                   const TargetFamily& target, std::int64_t L,
                                   std::int64_t trials, std::uint64_t seed, int l_max = 12,
                                   bool record_tau_survival = false,
                                   const TrialOptions& opts = {});

// Empirical law of W = Z^N over independent stationary starts.
struct EmpiricalDistribution {
    std::vector<double> probs; // k = 0..k_max
    std::vector<double> se;
    double tail_prob = 0.0; // k > k_max
    std::vector<std::int64_t> counts;
    std::int64_t tail_count = 0;
    std::int64_t trials = 0;
    std::int64_t horizon = 0;

    double mean() const;
    std::string to_csv() const;
};

EmpiricalDistribution empirical_W_distribution(const MapSystem& map, const DensityModel& d,
                                               const TargetFamily& target,
                                               const ScalingRule& rule,
                                               std::optional<double> p_hat,
                                               std::int64_t trials, std::uint64_t seed,
                                               int k_max = 32, const TrialOptions& opts = {});

} // namespace hitstats
