#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "tvhom/errors.hpp"
#include "tvhom/pmf.hpp"
#include "tvhom/random.hpp"

namespace tvhom {

/// Seeded random-instance generator settings. Instance `index` of a corpus is
/// a pure function of (seed, index), independent of evaluation order.
struct GeneratorConfig {
    std::uint64_t seed = 42;
    int n_min = 1;
    int n_max = 6;
    int m_min = 2;
    int m_max = 4;
    double concentration = 1.0;  // Dirichlet sharpness of the random pmfs
    std::size_t count = 10'000;
    double prob_floor = 1e-6;  // keeps log-likelihood ratios bounded by ~6.9

    void validate() const {
        if (n_min < 1 || n_max < n_min) {
            throw Error("generator n range is empty or invalid");
        }
        if (m_min < 2 || m_max < m_min) {
            throw Error("generator m range is empty or invalid");
        }
        if (!(concentration > 0.0)) {
            throw Error("generator concentration must be positive");
        }
        if (!(prob_floor >= 0.0) || prob_floor * m_max >= 0.5) {
            throw Error("generator probability floor too large for the alphabet");
        }
    }
};

namespace detail {

// Dirichlet draw with every coordinate at least `floor`: offending gamma
// coordinates are resampled and the vector renormalized. The clamp fallback is
// unreachable in practice and only guards against adversarial parameters.
inline std::vector<double> sample_floored_pmf(SplitMix64& rng, double concentration,
                                              std::size_t m, double floor) {
    std::vector<double> g(m);
    for (std::size_t j = 0; j < m; ++j) {
        g[j] = sample_gamma(rng, concentration);
    }
    for (int round = 0; round < 64; ++round) {
        double sum = 0.0;
        for (double x : g) {
            sum += x;
        }
        bool ok = true;
        for (std::size_t j = 0; j < m; ++j) {
            if (g[j] < floor * sum) {
                g[j] = sample_gamma(rng, concentration);
                ok = false;
            }
        }
        if (ok) {
            std::vector<double> p(m);
            for (std::size_t j = 0; j < m; ++j) {
                p[j] = g[j] / sum;
            }
            return p;
        }
    }
    double sum = 0.0;
    for (double& x : g) {
        x = std::max(x, 2.0 * floor);
        sum += x;
    }
    for (double& x : g) {
        x /= sum;
    }
    return g;
}

}  // namespace detail

/// Deterministic instance `index` of the corpus described by `cfg`.
inline ProductInstance gen_instance(const GeneratorConfig& cfg, std::size_t index) {
    cfg.validate();
    SplitMix64 rng(mix_seed(cfg.seed, index));
    const int n = static_cast<int>(rng.next_in(cfg.n_min, cfg.n_max));
    const std::size_t m = rng.next_in(cfg.m_min, cfg.m_max);

    std::vector<Pmf> ps;
    std::vector<Pmf> qs;
    ps.reserve(n);
    qs.reserve(n);
    for (int i = 0; i < n; ++i) {
        ps.push_back(Pmf::from_probs(
            detail::sample_floored_pmf(rng, cfg.concentration, m, cfg.prob_floor), 1e-9));
    }
    for (int i = 0; i < n; ++i) {
        qs.push_back(Pmf::from_probs(
            detail::sample_floored_pmf(rng, cfg.concentration, m, cfg.prob_floor), 1e-9));
    }
    return ProductInstance::make(std::move(ps), std::move(qs));
}

}  // namespace tvhom
