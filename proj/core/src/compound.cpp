#include "hitstats/compound.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hitstats/detail/parallel.hpp"

namespace hitstats {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_sum_exp(const std::vector<double>& logs) {
    double m = kNegInf;
    for (double v : logs)
        m = std::max(m, v);
    if (m == kNegInf)
        return kNegInf;
    double s = 0.0;
    for (double v : logs)
        s += std::exp(v - m);
    return m + std::log(s);
}

} // namespace

// ---------------------------------------------------------------------------
// ClusterSpectrum
// ---------------------------------------------------------------------------

ClusterSpectrum::ClusterSpectrum(std::vector<double> probs, double tail)
    : probs_(std::move(probs)), tail_(tail) {
    double sum = tail_;
    for (double p : probs_) {
        if (p < -1e-15)
            throw Error("ClusterSpectrum: negative probability");
        sum += p;
    }
    if (tail_ < -1e-15)
        throw Error("ClusterSpectrum: negative tail mass");
    if (std::abs(sum - 1.0) > 1e-9)
        throw Error("ClusterSpectrum: probabilities plus tail must sum to 1");
    for (double& p : probs_)
        p = std::max(0.0, p) / sum;
    tail_ = std::max(0.0, tail_) / sum;
}

ClusterSpectrum ClusterSpectrum::single() { return ClusterSpectrum({1.0}); }

ClusterSpectrum ClusterSpectrum::geometric(double theta, int k_max) {
    if (!(theta >= 0.0 && theta < 1.0))
        throw Error("ClusterSpectrum::geometric: theta must lie in [0,1)");
    if (k_max < 1)
        throw Error("ClusterSpectrum::geometric: k_max must be >= 1");
    std::vector<double> p(static_cast<std::size_t>(k_max));
    double pk = 1.0 - theta;
    for (int k = 0; k < k_max; ++k) {
        p[static_cast<std::size_t>(k)] = pk;
        pk *= theta;
    }
    // remaining geometric mass, exactly theta^k_max
    return ClusterSpectrum(std::move(p), std::pow(theta, k_max));
}

double ClusterSpectrum::lambda(int ell) const {
    if (ell < 1 || ell > support())
        return 0.0;
    return probs_[static_cast<std::size_t>(ell - 1)];
}

double ClusterSpectrum::mean_recorded() const {
    double m = 0.0;
    for (int ell = 1; ell <= support(); ++ell)
        m += ell * probs_[static_cast<std::size_t>(ell - 1)];
    return m;
}

// ---------------------------------------------------------------------------
// pmfs
// ---------------------------------------------------------------------------

double poisson_pmf(double t, int k) {
    if (!(t > 0.0))
        throw Error("poisson_pmf: t must be positive");
    if (k < 0)
        return 0.0;
    return std::exp(-t + k * std::log(t) - std::lgamma(k + 1.0));
}

double polya_aeppli_pmf(double t, double theta, int k) {
    if (!(t > 0.0))
        throw Error("polya_aeppli_pmf: t must be positive");
    if (!(theta >= 0.0 && theta < 1.0))
        throw Error("polya_aeppli_pmf: theta must lie in [0,1)");
    if (k < 0)
        return 0.0;
    if (k == 0)
        return std::exp(-t);
    if (theta == 0.0)
        return poisson_pmf(t, k);
    const double log_theta = std::log(theta);
    const double log_1mtheta = std::log1p(-theta);
    const double log_t = std::log(t);
    std::vector<double> terms;
    terms.reserve(static_cast<std::size_t>(k));
    for (int j = 1; j <= k; ++j) {
        double lw = -t + j * (log_1mtheta + log_t) - std::lgamma(j + 1.0);
        if (k - j > 0)
            lw += (k - j) * log_theta;
        // log C(k-1, j-1)
        lw += std::lgamma(static_cast<double>(k)) - std::lgamma(static_cast<double>(j)) -
              std::lgamma(static_cast<double>(k - j + 1));
        terms.push_back(lw);
    }
    return std::exp(log_sum_exp(terms));
}

std::vector<double> compound_poisson_pmf_table(double t, const ClusterSpectrum& spectrum,
                                               int k_max) {
    if (!(t > 0.0))
        throw Error("compound_poisson_pmf: t must be positive");
    if (k_max < 0)
        throw Error("compound_poisson_pmf: k_max must be >= 0");
    const int m = spectrum.support();
    std::vector<double> log_jl(static_cast<std::size_t>(m), kNegInf);
    for (int j = 1; j <= m; ++j) {
        const double lj = spectrum.lambda(j);
        if (lj > 0.0)
            log_jl[static_cast<std::size_t>(j - 1)] = std::log(j * lj);
    }
    // Panjer recursion for a Poisson(t) cluster count:
    //   P(0) = e^{-t},  P(k) = (t/k) sum_j j lambda_j P(k-j)
    std::vector<double> log_p(static_cast<std::size_t>(k_max) + 1, kNegInf);
    log_p[0] = -t;
    std::vector<double> terms;
    for (int k = 1; k <= k_max; ++k) {
        terms.clear();
        for (int j = 1; j <= std::min(k, m); ++j) {
            const double ljl = log_jl[static_cast<std::size_t>(j - 1)];
            if (ljl != kNegInf)
                terms.push_back(ljl + log_p[static_cast<std::size_t>(k - j)]);
        }
        log_p[static_cast<std::size_t>(k)] =
            terms.empty() ? kNegInf : std::log(t) - std::log(k) + log_sum_exp(terms);
    }
    std::vector<double> p(log_p.size());
    for (std::size_t i = 0; i < p.size(); ++i)
        p[i] = log_p[i] == kNegInf ? 0.0 : std::exp(log_p[i]);
    return p;
}

double compound_poisson_pmf(double t, const ClusterSpectrum& spectrum, int k) {
    if (k < 0)
        return 0.0;
    return compound_poisson_pmf_table(t, spectrum, k).back();
}

std::vector<double> compound_binomial_pmf_table(std::int64_t n_prime, double p,
                                                const ClusterSpectrum& spectrum, int k_max) {
    if (n_prime < 1)
        throw Error("compound_binomial_pmf: N' must be >= 1");
    if (!(p > 0.0 && p < 1.0))
        throw Error("compound_binomial_pmf: p must lie in (0,1)");
    if (k_max < 0)
        throw Error("compound_binomial_pmf: k_max must be >= 0");
    const int m = spectrum.support();
    // Panjer class (a,b,0) with a = -p/(1-p), b = (N'+1) p/(1-p)
    const double ratio = p / (1.0 - p);
    std::vector<double> out(static_cast<std::size_t>(k_max) + 1, 0.0);
    out[0] = std::exp(static_cast<double>(n_prime) * std::log1p(-p));
    for (int k = 1; k <= k_max; ++k) {
        double s = 0.0;
        for (int j = 1; j <= std::min(k, m); ++j) {
            const double lj = spectrum.lambda(j);
            if (lj == 0.0)
                continue;
            const double coef = (static_cast<double>(n_prime) + 1.0) * j / k - 1.0;
            s += coef * lj * out[static_cast<std::size_t>(k - j)];
        }
        out[static_cast<std::size_t>(k)] = std::max(0.0, ratio * s);
    }
    return out;
}

double compound_binomial_pmf(std::int64_t n_prime, double p, const ClusterSpectrum& spectrum,
                             int k) {
    if (k < 0)
        return 0.0;
    return compound_binomial_pmf_table(n_prime, p, spectrum, k).back();
}

double wald_mean(double t, const ClusterSpectrum& spectrum) {
    if (!(t > 0.0))
        throw Error("wald_mean: t must be positive");
    return t * spectrum.mean_recorded();
}

// ---------------------------------------------------------------------------
// Spectra
// ---------------------------------------------------------------------------

ClusterSpectrum lambda_from_alpha(const std::vector<double>& alpha) {
    if (alpha.empty())
        throw Error("lambda_from_alpha: empty alpha sequence");
    if (!(alpha.front() > 0.0))
        throw ZeroExtremalIndex("lambda_from_alpha: alpha_1 must be positive");
    for (std::size_t k = 0; k + 1 < alpha.size(); ++k) {
        if (alpha[k + 1] > alpha[k] + 1e-12)
            throw NotMonotone("lambda_from_alpha: alpha sequence must be nonincreasing");
    }
    const double a1 = alpha.front();
    std::vector<double> lam(alpha.size() - 1);
    for (std::size_t k = 0; k + 1 < alpha.size(); ++k)
        lam[k] = std::max(0.0, alpha[k] - alpha[k + 1]) / a1;
    return ClusterSpectrum(std::move(lam), std::max(0.0, alpha.back()) / a1);
}

SpectrumResult finite_periodic_spectrum(const std::vector<double>& thetas,
                                        const std::vector<double>& densities, int k_max) {
    if (thetas.empty() || thetas.size() != densities.size())
        throw Error("finite_periodic_spectrum: need matching nonempty theta/density lists");
    if (k_max < 1)
        throw Error("finite_periodic_spectrum: k_max must be >= 1");
    double hsum = 0.0;
    for (std::size_t i = 0; i < thetas.size(); ++i) {
        if (!(thetas[i] > 0.0 && thetas[i] < 1.0))
            throw Error("finite_periodic_spectrum: theta must lie in (0,1)");
        if (!(densities[i] > 0.0))
            throw Error("finite_periodic_spectrum: densities must be positive");
        hsum += densities[i];
    }
    double alpha1 = 0.0;
    for (std::size_t i = 0; i < thetas.size(); ++i)
        alpha1 += (1.0 - thetas[i]) * densities[i] / hsum;

    std::vector<double> lam(static_cast<std::size_t>(k_max), 0.0);
    double tail = 0.0;
    for (std::size_t i = 0; i < thetas.size(); ++i) {
        const double H = densities[i] / hsum;
        const double th = thetas[i];
        double pw = 1.0; // theta^(k-1)
        for (int k = 1; k <= k_max; ++k) {
            lam[static_cast<std::size_t>(k - 1)] += (1.0 - th) * (1.0 - th) * pw * H / alpha1;
            pw *= th;
        }
        tail += (1.0 - th) * pw * H / alpha1; // sum_{k>k_max} of the i-th branch
    }
    SpectrumResult r{alpha1, ClusterSpectrum(std::move(lam), tail), tail};
    return r;
}

double GammaTable::at(int k, int i) const {
    if (k < 1 || k > k_rows() || i < 0 || i > i_max)
        return 0.0;
    return rows[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(i)];
}

GammaTable negative_binomial_gamma(int k_rows, int i_max) {
    if (k_rows < 1 || i_max < k_rows)
        throw Error("negative_binomial_gamma: need i_max >= k_rows >= 1");
    GammaTable t;
    t.i_max = i_max;
    t.rows.assign(static_cast<std::size_t>(k_rows),
                  std::vector<double>(static_cast<std::size_t>(i_max) + 1, 0.0));
    for (int k = 1; k <= k_rows; ++k) {
        // gamma_k(k) = 2^{-k}; gamma_k(i+1)/gamma_k(i) = i / (2 (i-k+1))
        double g = std::exp2(static_cast<double>(-k));
        for (int i = k; i <= i_max; ++i) {
            t.rows[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(i)] = g;
            g *= 0.5 * static_cast<double>(i) / static_cast<double>(i - k + 1);
        }
    }
    return t;
}

SpectrumResult product_strip_spectrum(double theta, const GammaTable& gammas, int k_max) {
    if (!(theta >= 0.0 && theta < 1.0))
        throw Error("product_strip_spectrum: theta must lie in [0,1)");
    if (gammas.k_rows() < 2)
        throw Error("product_strip_spectrum: need gamma rows for k = 1..2 at least");
    const int rows = std::min(gammas.k_rows(), k_max + 1);

    // alpha-hat_{k+1} = sum_i theta^i gamma_k(i)
    std::vector<double> alpha_hat(static_cast<std::size_t>(rows) + 1, 0.0);
    alpha_hat[0] = 1.0;
    for (int k = 1; k <= rows; ++k) {
        double s = 0.0;
        double pw = 1.0; // theta^0, but gamma_k(0)=0 for k>=1
        for (int i = 0; i <= gammas.i_max; ++i) {
            s += pw * gammas.at(k, i);
            pw *= theta;
        }
        alpha_hat[static_cast<std::size_t>(k)] = s;
    }
    // Estimated tables can jitter out of monotone order; clamp before the
    // difference formulas.
    for (std::size_t k = 1; k < alpha_hat.size(); ++k)
        alpha_hat[k] = std::min(alpha_hat[k], alpha_hat[k - 1]);

    std::vector<double> alpha(static_cast<std::size_t>(rows));
    for (int k = 1; k <= rows; ++k)
        alpha[static_cast<std::size_t>(k - 1)] =
            alpha_hat[static_cast<std::size_t>(k - 1)] - alpha_hat[static_cast<std::size_t>(k)];

    SpectrumResult r{alpha.front(), lambda_from_alpha(alpha),
                     theta > 0.0 ? std::pow(theta, gammas.i_max) / (1.0 - theta) : 0.0};
    return r;
}

// ---------------------------------------------------------------------------
// estimate_gamma
// ---------------------------------------------------------------------------

namespace {

struct GammaCounts {
    std::vector<std::vector<std::int64_t>> counts;
    std::int64_t trials = 0;

    void init(int k_rows, int i_max) {
        if (counts.empty())
            counts.assign(static_cast<std::size_t>(k_rows),
                          std::vector<std::int64_t>(static_cast<std::size_t>(i_max) + 1, 0));
    }
    void merge(const GammaCounts& o) {
        if (o.counts.empty())
            return;
        init(static_cast<int>(o.counts.size()), static_cast<int>(o.counts[0].size()) - 1);
        for (std::size_t k = 0; k < counts.size(); ++k)
            for (std::size_t i = 0; i < counts[k].size(); ++i)
                counts[k][i] += o.counts[k][i];
        trials += o.trials;
    }
};

} // namespace

GammaTable estimate_gamma(const MapSystem& map2, int p, double a, double b, int k_rows,
                          int i_max, std::int64_t trials, std::uint64_t seed, int threads) {
    if (map2.dimension() != 1)
        throw Error("estimate_gamma: second factor must be one-dimensional");
    if (p < 1 || k_rows < 1 || i_max < k_rows)
        throw Error("estimate_gamma: need p >= 1 and i_max >= k_rows >= 1");
    if (!(a >= 0.0 && a < b && b <= 1.0))
        throw Error("estimate_gamma: need 0 <= a < b <= 1");

    auto acc = detail::run_chunked_trials<GammaCounts>(
        trials, detail::resolve_threads(threads), 4096, [&](GammaCounts& acc, std::int64_t i) {
            acc.init(k_rows, i_max);
            Rng rng(child_seed(seed, static_cast<std::uint64_t>(i)));
            OrbitState s = [&] {
                if (map2.is_doubling())
                    return OrbitState::doubling_from_value(rng.next_double(a, b), rng);
                // rejection from stationary-ish starts for the other families
                for (int attempt = 0; attempt < 100000; ++attempt) {
                    double x = rng.next_double();
                    for (int burn = 0; burn < 1024; ++burn)
                        x = apply(map2, x);
                    if (x >= a && x <= b)
                        return OrbitState::real(x);
                }
                throw EmptyConditional("estimate_gamma: no start found in [a,b]");
            }();
            int k = 0;
            for (int idx = 1; idx <= i_max && k < k_rows; ++idx) {
                for (int q = 0; q < p; ++q)
                    advance(map2, s);
                const double y = s.coordinate();
                if (y >= a && y <= b) {
                    ++k;
                    if (k <= k_rows)
                        ++acc.counts[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(idx)];
                }
            }
            ++acc.trials;
        });

    GammaTable t;
    t.i_max = i_max;
    t.rows.assign(static_cast<std::size_t>(k_rows),
                  std::vector<double>(static_cast<std::size_t>(i_max) + 1, 0.0));
    acc.init(k_rows, i_max);
    for (int k = 0; k < k_rows; ++k)
        for (int i = 0; i <= i_max; ++i)
            t.rows[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] =
                static_cast<double>(acc.counts[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)]) /
                static_cast<double>(std::max<std::int64_t>(1, acc.trials));
    return t;
}

// ---------------------------------------------------------------------------
// Total variation
// ---------------------------------------------------------------------------

double total_variation(const std::vector<double>& p, const std::vector<double>& q, int k_max) {
    if (k_max < 0)
        throw Error("total_variation: k_max must be >= 0");
    double d = 0.0, sp = 0.0, sq = 0.0;
    for (int k = 0; k <= k_max; ++k) {
        const double pk = k < static_cast<int>(p.size()) ? p[static_cast<std::size_t>(k)] : 0.0;
        const double qk = k < static_cast<int>(q.size()) ? q[static_cast<std::size_t>(k)] : 0.0;
        d += std::abs(pk - qk);
        sp += pk;
        sq += qk;
    }
    d += std::abs(std::max(0.0, 1.0 - sp) - std::max(0.0, 1.0 - sq));
    return 0.5 * d;
}

// ---------------------------------------------------------------------------
// CompoundLaw
// ---------------------------------------------------------------------------

CompoundLaw CompoundLaw::poisson(double t) {
    if (!(t > 0.0))
        throw Error("CompoundLaw::poisson: t must be positive");
    CompoundLaw c;
    c.law_ = Poisson{t};
    return c;
}

CompoundLaw CompoundLaw::polya_aeppli(double t, double theta) {
    if (!(t > 0.0))
        throw Error("CompoundLaw::polya_aeppli: t must be positive");
    if (!(theta >= 0.0 && theta < 1.0))
        throw Error("CompoundLaw::polya_aeppli: theta must lie in [0,1)");
    CompoundLaw c;
    c.law_ = PolyaAeppli{t, theta};
    return c;
}

CompoundLaw CompoundLaw::compound_poisson(double t, ClusterSpectrum spectrum) {
    if (!(t > 0.0))
        throw Error("CompoundLaw::compound_poisson: t must be positive");
    CompoundLaw c;
    c.law_ = CompoundPoisson{t, std::move(spectrum)};
    return c;
}

CompoundLaw CompoundLaw::compound_binomial(std::int64_t n_prime, double p,
                                           ClusterSpectrum spectrum) {
    if (n_prime < 1)
        throw Error("CompoundLaw::compound_binomial: N' must be >= 1");
    if (!(p > 0.0 && p < 1.0))
        throw Error("CompoundLaw::compound_binomial: p must lie in (0,1)");
    CompoundLaw c;
    c.law_ = CompoundBinomial{n_prime, p, std::move(spectrum)};
    return c;
}

double CompoundLaw::pmf(int k) const {
    return std::visit(
        [k](const auto& law) -> double {
            using T = std::decay_t<decltype(law)>;
            if constexpr (std::is_same_v<T, Poisson>)
                return poisson_pmf(law.t, k);
            else if constexpr (std::is_same_v<T, PolyaAeppli>)
                return polya_aeppli_pmf(law.t, law.theta, k);
            else if constexpr (std::is_same_v<T, CompoundPoisson>)
                return compound_poisson_pmf(law.t, law.spectrum, k);
            else
                return compound_binomial_pmf(law.n_prime, law.p, law.spectrum, k);
        },
        law_);
}

std::vector<double> CompoundLaw::pmf_table(int k_max) const {
    return std::visit(
        [k_max](const auto& law) -> std::vector<double> {
            using T = std::decay_t<decltype(law)>;
            if constexpr (std::is_same_v<T, CompoundPoisson>)
                return compound_poisson_pmf_table(law.t, law.spectrum, k_max);
            else if constexpr (std::is_same_v<T, CompoundBinomial>)
                return compound_binomial_pmf_table(law.n_prime, law.p, law.spectrum, k_max);
            else {
                std::vector<double> p(static_cast<std::size_t>(k_max) + 1);
                for (int k = 0; k <= k_max; ++k) {
                    if constexpr (std::is_same_v<T, Poisson>)
                        p[static_cast<std::size_t>(k)] = poisson_pmf(law.t, k);
                    else
                        p[static_cast<std::size_t>(k)] = polya_aeppli_pmf(law.t, law.theta, k);
                }
                return p;
            }
        },
        law_);
}

double CompoundLaw::cluster_lambda(int ell) const {
    if (ell < 1)
        return 0.0;
    return std::visit(
        [ell](const auto& law) -> double {
            using T = std::decay_t<decltype(law)>;
            if constexpr (std::is_same_v<T, Poisson>)
                return ell == 1 ? 1.0 : 0.0;
            else if constexpr (std::is_same_v<T, PolyaAeppli>)
                return (1.0 - law.theta) * std::pow(law.theta, ell - 1);
            else
                return law.spectrum.lambda(ell);
        },
        law_);
}

std::string CompoundLaw::describe() const {
    return std::visit(
        [](const auto& law) -> std::string {
            using T = std::decay_t<decltype(law)>;
            if constexpr (std::is_same_v<T, Poisson>)
                return "Poisson(t=" + std::to_string(law.t) + ")";
            else if constexpr (std::is_same_v<T, PolyaAeppli>)
                return "PolyaAeppli(t=" + std::to_string(law.t) +
                       ", theta=" + std::to_string(law.theta) + ")";
            else if constexpr (std::is_same_v<T, CompoundPoisson>)
                return "CompoundPoisson(t=" + std::to_string(law.t) + ", support=" +
                       std::to_string(law.spectrum.support()) + ")";
            else
                return "CompoundBinomial(N'=" + std::to_string(law.n_prime) +
                       ", p=" + std::to_string(law.p) + ")";
        },
        law_);
}

} // namespace hitstats
