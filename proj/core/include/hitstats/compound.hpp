#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "hitstats/dynamics.hpp"
#include "hitstats/errors.hpp"

namespace hitstats {

// ---------------------------------------------------------------------------
// Cluster-size spectra
//
// A probability vector (lambda_1, lambda_2, ...) over cluster sizes with an
// explicit truncation tail, so that sum(lambda) + tail == 1.
// ---------------------------------------------------------------------------

class ClusterSpectrum {
  public:
    // probs[0] is lambda_1.  Requires nonnegative entries and
    // sum + tail == 1 within 1e-9 (the vector is then renormalized exactly).
    explicit ClusterSpectrum(std::vector<double> probs, double tail = 0.0);

    // lambda_1 = 1: the pure Poisson case.
    static ClusterSpectrum single();
    // lambda_k = (1-theta) theta^(k-1) for k <= k_max, exact geometric tail.
    static ClusterSpectrum geometric(double theta, int k_max);

    // 1-based; zero beyond the recorded support.
    double lambda(int ell) const;
    int support() const { return static_cast<int>(probs_.size()); }
    double tail_mass() const { return tail_; }
    // sum of ell * lambda_ell over the recorded support
    double mean_recorded() const;
    const std::vector<double>& probabilities() const { return probs_; }

  private:
    std::vector<double> probs_;
    double tail_ = 0.0;
};

// ---------------------------------------------------------------------------
// Exact pmfs
// ---------------------------------------------------------------------------

double poisson_pmf(double t, int k);

// P(W=k) for the Polya-Aeppli law: e^{-t} sum_j theta^{k-j} (1-theta)^j
// t^j/j! C(k-1,j-1), evaluated in log space.  theta = 0 reduces to Poisson.
double polya_aeppli_pmf(double t, double theta, int k);

// Compound Poisson pmf by Panjer recursion with log-space accumulation.
double compound_poisson_pmf(double t, const ClusterSpectrum& spectrum, int k);
std::vector<double> compound_poisson_pmf_table(double t, const ClusterSpectrum& spectrum,
                                               int k_max);

// Compound binomial pmf (Q ~ Binomial(N', p) clusters) by Panjer recursion.
double compound_binomial_pmf(std::int64_t n_prime, double p, const ClusterSpectrum& spectrum,
                             int k);
std::vector<double> compound_binomial_pmf_table(std::int64_t n_prime, double p,
                                                const ClusterSpectrum& spectrum, int k_max);

// E(W) = t * E(Y) over the recorded support (Wald); the spectrum's tail mass
// is reported separately by ClusterSpectrum::tail_mass().
double wald_mean(double t, const ClusterSpectrum& spectrum);

// ---------------------------------------------------------------------------
// Spectra from return-time data
// ---------------------------------------------------------------------------

// lambda_k = (alpha_k - alpha_{k+1}) / alpha_1 with tail alpha_m / alpha_1.
// alpha[0] is alpha_1; the sequence must be nonincreasing with alpha_1 > 0.
ClusterSpectrum lambda_from_alpha(const std::vector<double>& alpha);

struct SpectrumResult {
    double alpha1 = 1.0;
    ClusterSpectrum spectrum;
    double truncation_bound = 0.0; // declared bound on what the table cannot see
};

// Finite set of periodic points with Pitskel values theta_i and invariant
// density h(x_i): normalized weights H_i = h_i / sum h, extremal index
// alpha_1 = sum (1-theta_i) H_i, and
// lambda_k = sum (1-theta_i)^2 theta_i^(k-1) H_i / alpha_1.
SpectrumResult finite_periodic_spectrum(const std::vector<double>& thetas,
                                        const std::vector<double>& densities, int k_max = 12);

// gamma_k(i) tables for the product-map cluster law.  rows[k-1][i] holds
// gamma_k(i) for i = 0..i_max; entries with i < k are structurally zero.
struct GammaTable {
    int i_max = 0;
    std::vector<std::vector<double>> rows;

    int k_rows() const { return static_cast<int>(rows.size()); }
    double at(int k, int i) const;
};

// Exact table for a second factor whose p-fold map has full uniform branches
// (e.g. doubling) and the interval [0, 1/2]: the k-th return time is negative
// binomial, gamma_k(i) = C(i-1, k-1) 2^{-i}.
GammaTable negative_binomial_gamma(int k_rows, int i_max);

// alpha-hat_{k+1} = sum_i theta^i gamma_k(i); cluster law via the alpha
// differences.  The declared truncation bound is theta^{i_max}/(1-theta).
SpectrumResult product_strip_spectrum(double theta, const GammaTable& gammas, int k_max = 12);

// Empirical gamma-hat_k(i): conditional law of the k-th return index of the
// p-fold second-factor map to [a,b].  Trials are child-seeded and the merge
// is deterministic.
GammaTable estimate_gamma(const MapSystem& map2, int p, double a, double b, int k_rows,
                          int i_max, std::int64_t trials, std::uint64_t seed, int threads = 1);

// ---------------------------------------------------------------------------
// Distribution distance
// ---------------------------------------------------------------------------

// Total variation between two pmfs over k = 0..k_max with the mass beyond
// k_max lumped into one bin on both sides.
double total_variation(const std::vector<double>& p, const std::vector<double>& q, int k_max);

// ---------------------------------------------------------------------------
// CompoundLaw: a tagged union over the four predicted limit laws
// ---------------------------------------------------------------------------

class CompoundLaw {
  public:
    struct Poisson {
        double t;
    };
    struct PolyaAeppli {
        double t, theta;
    };
    struct CompoundPoisson {
        double t;
        ClusterSpectrum spectrum;
    };
    struct CompoundBinomial {
        std::int64_t n_prime;
        double p;
        ClusterSpectrum spectrum;
    };

    static CompoundLaw poisson(double t);
    static CompoundLaw polya_aeppli(double t, double theta);
    static CompoundLaw compound_poisson(double t, ClusterSpectrum spectrum);
    static CompoundLaw compound_binomial(std::int64_t n_prime, double p, ClusterSpectrum spectrum);

    double pmf(int k) const;
    std::vector<double> pmf_table(int k_max) const;
    // predicted cluster probability lambda_ell
    double cluster_lambda(int ell) const;
    std::string describe() const;

  private:
    std::variant<Poisson, PolyaAeppli, CompoundPoisson, CompoundBinomial> law_{Poisson{1.0}};
};

} // namespace hitstats
