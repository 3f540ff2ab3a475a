// Test-only oracles, independent of the implementation paths they check.
#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace agc_test {

// Studentized two-sided permutation test: reshuffles group labels and counts
// how often the permuted Welch statistic is at least as extreme as the
// observed one. The p-value comes purely from resampling, with no reference
// to the t distribution.
inline double permutation_p(const std::vector<double>& a, const std::vector<double>& b,
                            int resamples, std::uint64_t seed) {
    std::vector<double> pool = a;
    pool.insert(pool.end(), b.begin(), b.end());
    const size_t na = a.size();

    auto welch_stat = [&](const std::vector<double>& p) {
        double ma = 0.0, mb = 0.0;
        for (size_t i = 0; i < na; ++i) ma += p[i];
        for (size_t i = na; i < p.size(); ++i) mb += p[i];
        const size_t nb = p.size() - na;
        ma /= na;
        mb /= nb;
        double va = 0.0, vb = 0.0;
        for (size_t i = 0; i < na; ++i) va += (p[i] - ma) * (p[i] - ma);
        for (size_t i = na; i < p.size(); ++i) vb += (p[i] - mb) * (p[i] - mb);
        va /= (na - 1);
        vb /= (nb - 1);
        const double se = std::sqrt(va / na + vb / nb);
        if (se == 0.0) return ma == mb ? 0.0 : std::numeric_limits<double>::infinity();
        return (ma - mb) / se;
    };

    const double observed = std::abs(welch_stat(pool));
    std::mt19937_64 rng(seed);
    int hits = 0;
    std::vector<double> perm = pool;
    for (int r = 0; r < resamples; ++r) {
        std::shuffle(perm.begin(), perm.end(), rng);
        if (std::abs(welch_stat(perm)) >= observed - 1e-12) ++hits;
    }
    return static_cast<double>(hits) / resamples;
}

}  // namespace agc_test
