#include "hitstats/measure.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "hitstats/detail/parallel.hpp"

namespace hitstats {

namespace {

constexpr int kOctaves = 40; // octave layout reaches down to 2^-40

struct OctaveLayout {
    int sub;  // bins per octave
    int bins; // 1 + kOctaves * sub

    explicit OctaveLayout(int requested_bins)
        : sub(std::max(1, (requested_bins - 1) / kOctaves)), bins(1 + kOctaves * sub) {}

    int bin_of(double x) const {
        if (x < 0x1.0p-40)
            return 0;
        if (x >= 1.0)
            return bins - 1;
        int e;
        const double m = std::frexp(x, &e); // x = m * 2^e, m in [0.5, 1)
        const int octave = e - 1 + kOctaves; // 0..kOctaves-1
        const int inner = static_cast<int>((m - 0.5) * 2.0 * sub);
        return 1 + octave * sub + std::min(inner, sub - 1);
    }

    std::vector<double> edges() const {
        std::vector<double> e;
        e.reserve(static_cast<std::size_t>(bins) + 1);
        e.push_back(0.0);
        for (int o = -kOctaves; o < 0; ++o) {
            const double lo = std::ldexp(1.0, o);
            for (int s = 0; s < sub; ++s)
                e.push_back(lo * (1.0 + static_cast<double>(s) / sub));
        }
        e.push_back(1.0);
        return e;
    }
};

} // namespace

// ---------------------------------------------------------------------------
// DensityModel
// ---------------------------------------------------------------------------

DensityModel DensityModel::lebesgue() { return DensityModel{}; }

DensityModel DensityModel::histogram(std::vector<double> edges, std::vector<double> masses) {
    if (edges.size() != masses.size() + 1 || masses.empty())
        throw Error("DensityModel::histogram: edges must bracket masses");
    if (edges.front() != 0.0 || edges.back() != 1.0)
        throw Error("DensityModel::histogram: edges must span [0,1]");
    double sum = 0.0;
    for (std::size_t i = 0; i < masses.size(); ++i) {
        if (masses[i] < 0.0)
            throw Error("DensityModel::histogram: negative mass");
        if (edges[i + 1] <= edges[i])
            throw Error("DensityModel::histogram: edges must increase");
        sum += masses[i];
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw Error("DensityModel::histogram: masses must sum to 1");
    for (double& m : masses)
        m /= sum;
    DensityModel d;
    d.kind_ = Kind::histogram;
    d.edges_ = std::move(edges);
    d.masses_ = std::move(masses);
    return d;
}

DensityModel DensityModel::product(DensityModel left, DensityModel right) {
    if (left.dimension() != 1 || right.dimension() != 1)
        throw Error("DensityModel::product: components must be one-dimensional");
    DensityModel d;
    d.kind_ = Kind::product;
    d.left_ = std::make_shared<const DensityModel>(std::move(left));
    d.right_ = std::make_shared<const DensityModel>(std::move(right));
    return d;
}

const DensityModel& DensityModel::left() const {
    if (!left_)
        throw Error("DensityModel::left: not a product model");
    return *left_;
}

const DensityModel& DensityModel::right() const {
    if (!right_)
        throw Error("DensityModel::right: not a product model");
    return *right_;
}

double DensityModel::interval_measure(double a, double b) const {
    if (!(a >= 0.0 && a <= b && b <= 1.0))
        throw Error("interval_measure: need 0 <= a <= b <= 1");
    switch (kind_) {
    case Kind::lebesgue:
        return b - a;
    case Kind::histogram: {
        if (a == b)
            return 0.0;
        // bins overlapping [a,b], partial bins prorated linearly
        const auto first =
            std::upper_bound(edges_.begin(), edges_.end(), a) - edges_.begin();
        double total = 0.0;
        for (std::size_t i = first > 0 ? static_cast<std::size_t>(first - 1) : 0;
             i < masses_.size(); ++i) {
            const double lo = edges_[i], hi = edges_[i + 1];
            if (lo >= b)
                break;
            const double overlap = std::min(b, hi) - std::max(a, lo);
            if (overlap > 0.0)
                total += masses_[i] * overlap / (hi - lo);
        }
        return total;
    }
    case Kind::product:
        throw Error("interval_measure: model is two-dimensional");
    }
    return 0.0;
}

double DensityModel::rect_measure(double ax, double bx, double ay, double by) const {
    if (kind_ == Kind::product)
        return left_->interval_measure(ax, bx) * right_->interval_measure(ay, by);
    throw Error("rect_measure: model is one-dimensional");
}

double DensityModel::density_at(double x) const {
    if (!(x >= 0.0 && x <= 1.0))
        throw Error("density_at: x must lie in [0,1]");
    switch (kind_) {
    case Kind::lebesgue:
        return 1.0;
    case Kind::histogram: {
        auto it = std::upper_bound(edges_.begin(), edges_.end(), x);
        std::size_t i = it == edges_.begin() ? 0 : static_cast<std::size_t>(it - edges_.begin()) - 1;
        i = std::min(i, masses_.size() - 1);
        return masses_[i] / (edges_[i + 1] - edges_[i]);
    }
    case Kind::product:
        throw Error("density_at: model is two-dimensional");
    }
    return 1.0;
}

std::string DensityModel::to_csv() const {
    if (kind_ != Kind::histogram)
        throw Error("to_csv: only histogram models serialize");
    std::ostringstream os;
    os << "bin_left,bin_right,mass\n";
    char buf[96];
    for (std::size_t i = 0; i < masses_.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", edges_[i], edges_[i + 1],
                      masses_[i]);
        os << buf;
    }
    return os.str();
}

DensityModel DensityModel::from_csv(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    std::vector<double> edges, masses;
    bool header = true;
    while (std::getline(is, line)) {
        if (line.empty())
            continue;
        if (header) {
            header = false;
            continue;
        }
        double lo, hi, m;
        if (std::sscanf(line.c_str(), "%lg,%lg,%lg", &lo, &hi, &m) != 3)
            throw Error("DensityModel::from_csv: malformed row: " + line);
        if (edges.empty())
            edges.push_back(lo);
        edges.push_back(hi);
        masses.push_back(m);
    }
    return histogram(std::move(edges), std::move(masses));
}

// ---------------------------------------------------------------------------
// Density estimation
// ---------------------------------------------------------------------------

namespace {

struct HistCounts {
    std::vector<std::int64_t> counts;

    void init(std::size_t bins) {
        if (counts.empty())
            counts.assign(bins, 0);
    }
    void merge(const HistCounts& o) {
        if (o.counts.empty())
            return;
        init(o.counts.size());
        for (std::size_t i = 0; i < counts.size(); ++i)
            counts[i] += o.counts[i];
    }
};

} // namespace

DensityModel estimate_density(const MapSystem& map, const DensityParams& params,
                              std::uint64_t seed, int threads) {
    if (map.dimension() != 1)
        throw Error("estimate_density: use per-factor estimates for product maps");
    if (params.bins < 16)
        throw Error("estimate_density: bins must be >= 16");
    if (params.orbit_length < 100'000)
        throw Error("estimate_density: orbit_length must be >= 1e5");
    const int shards = std::max(1, params.shards);
    const std::int64_t per_shard = (params.orbit_length + shards - 1) / shards;

    const bool octave = params.layout == BinLayout::octave;
    const OctaveLayout olay(params.bins);
    const std::size_t n_bins =
        octave ? static_cast<std::size_t>(olay.bins) : static_cast<std::size_t>(params.bins);
    const double n_bins_d = static_cast<double>(params.bins);

    auto acc = detail::run_chunked_trials<HistCounts>(
        shards, detail::resolve_threads(threads), 1, [&](HistCounts& acc, std::int64_t s) {
            acc.init(n_bins);
            Rng rng(child_seed(seed, static_cast<std::uint64_t>(s)));
            if (map.is_doubling()) {
                OrbitState st = OrbitState::doubling_random(rng);
                for (std::int64_t i = 0; i < params.burn_in; ++i)
                    advance(map, st);
                for (std::int64_t i = 0; i < per_shard; ++i) {
                    advance(map, st);
                    const double x = st.coordinate();
                    const std::size_t b =
                        octave ? static_cast<std::size_t>(olay.bin_of(x))
                               : std::min(n_bins - 1, static_cast<std::size_t>(x * n_bins_d));
                    ++acc.counts[b];
                }
            } else {
                double x = rng.next_double();
                for (std::int64_t i = 0; i < params.burn_in; ++i)
                    x = apply(map, x);
                for (std::int64_t i = 0; i < per_shard; ++i) {
                    x = apply(map, x);
                    const std::size_t b =
                        octave ? static_cast<std::size_t>(olay.bin_of(x))
                               : std::min(n_bins - 1, static_cast<std::size_t>(x * n_bins_d));
                    ++acc.counts[b];
                }
            }
        });

    acc.init(n_bins);
    std::int64_t total = 0, top = 0;
    for (auto c : acc.counts) {
        total += c;
        top = std::max(top, c);
    }
    if (top * 100 > total * 99)
        throw DegenerateOrbit("estimate_density: orbit collapsed into a single bin");

    std::vector<double> edges;
    if (octave) {
        edges = olay.edges();
    } else {
        edges.resize(n_bins + 1);
        for (std::size_t i = 0; i <= n_bins; ++i)
            edges[i] = static_cast<double>(i) / static_cast<double>(n_bins);
        edges.back() = 1.0;
    }
    std::vector<double> masses(n_bins);
    for (std::size_t i = 0; i < n_bins; ++i)
        masses[i] = static_cast<double>(acc.counts[i]) / static_cast<double>(total);
    return DensityModel::histogram(std::move(edges), std::move(masses));
}

DensityModel estimate_density(const MapSystem& map, int bins, std::int64_t orbit_length,
                              std::int64_t burn_in, std::uint64_t seed) {
    DensityParams p;
    p.bins = bins;
    p.orbit_length = orbit_length;
    p.burn_in = burn_in;
    p.layout = map.family() == MapFamily::pomeau_manneville ? BinLayout::octave
                                                            : BinLayout::uniform;
    return estimate_density(map, p, seed, 1);
}

DensityModel exact_density(const MapSystem& map) {
    if (map.is_doubling())
        return DensityModel::lebesgue();
    if (map.family() == MapFamily::product && map.left().is_doubling() &&
        map.right().is_doubling())
        return DensityModel::product(DensityModel::lebesgue(), DensityModel::lebesgue());
    throw Error("exact_density: known exactly only for doubling and its products");
}

// ---------------------------------------------------------------------------
// Stationary sampling
// ---------------------------------------------------------------------------

OrbitState sample_stationary(const MapSystem& map, const DensityModel& d, std::int64_t burn_in,
                             Rng& rng) {
    if (map.dimension() == 2) {
        const DensityModel& dl = d.is_product() ? d.left() : d;
        const DensityModel& dr = d.is_product() ? d.right() : d;
        OrbitState l = sample_stationary(map.left(), dl, burn_in, rng);
        OrbitState r = sample_stationary(map.right(), dr, burn_in, rng);
        return OrbitState::pair(std::move(l), std::move(r));
    }
    if (d.is_lebesgue()) {
        if (map.is_doubling())
            return OrbitState::doubling_random(Rng(rng.next_u64()));
        return OrbitState::real(rng.next_double());
    }
    // histogram model: uniform start iterated burn_in times
    if (map.is_doubling()) {
        OrbitState s = OrbitState::doubling_random(Rng(rng.next_u64()));
        for (std::int64_t i = 0; i < burn_in; ++i)
            advance(map, s);
        return s;
    }
    double x = rng.next_double();
    for (std::int64_t i = 0; i < burn_in; ++i)
        x = apply(map, x);
    return OrbitState::real(x);
}

} // namespace hitstats
