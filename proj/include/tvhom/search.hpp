#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tvhom/errors.hpp"
#include "tvhom/generator.hpp"
#include "tvhom/pmf.hpp"
#include "tvhom/product_tv.hpp"
#include "tvhom/random.hpp"

namespace tvhom {

/// Proven upper bound on TV(homogenized) / TV(heterogeneous); any observed
/// ratio above it indicates an implementation bug.
inline constexpr double kHomVecBound = 6.7129;

/// Ratios are reported as 0 when the heterogeneous TV falls below this floor
/// (which, under strict positivity, happens only for P_i = Q_i instances).
inline constexpr double kRatioFloor = 1e-12;

/// TV(homogenized) / TV(heterogeneous) for one instance. Throws
/// TheoremViolation if the value contradicts the proven bound.
inline double hom_vec_ratio(const ProductInstance& inst, double bound = kHomVecBound) {
    const double vec = tv_product_exact(inst);
    const std::vector<Pmf>& ps = inst.ps;
    const std::vector<Pmf>& qs = inst.qs;
    const double hom = tv_homogenized_multinomial(homogenize(ps), homogenize(qs),
                                                  static_cast<int>(inst.n()));
    if (hom > bound * vec + 1e-9) {
        throw TheoremViolation("hom/vec ratio " + std::to_string(hom) + "/" +
                               std::to_string(vec) + " exceeds the proven bound " +
                               std::to_string(bound));
    }
    if (vec <= kRatioFloor) {
        return 0.0;
    }
    return hom / vec;
}

enum class SearchFamily {
    bernoulli,  // m = 2, exact convolution path, n up to SearchOptions::n_max
    general,    // m in [2, m_max], sizes kept brute-force compatible
};

struct SearchOptions {
    std::uint64_t seed = 42;
    int restarts = 50;
    int steps = 200;
    SearchFamily family = SearchFamily::bernoulli;
    int n_max = 16;
    int m_max = 4;
    double concentration = 1.0;
    double prob_floor = 1e-6;
    double bound = kHomVecBound;

    void validate() const {
        if (restarts < 1 || steps < 0) {
            throw Error("search needs restarts >= 1 and steps >= 0");
        }
        if (n_max < 2) {
            throw Error("search needs n_max >= 2");
        }
        if (family == SearchFamily::bernoulli) {
            if (n_max > 22) {
                throw Error("bernoulli search n_max too large for the convolution budget");
            }
        } else {
            if (m_max < 2) {
                throw Error("general search needs m_max >= 2");
            }
            double outcomes = std::pow(static_cast<double>(m_max), n_max);
            if (outcomes > 1e7) {
                throw Error("general search n_max/m_max exceed brute-force compatible sizes");
            }
        }
    }
};

struct SearchReport {
    double best_ratio = 0.0;
    ProductInstance witness;
    std::uint64_t evaluations = 0;
    std::uint64_t seed = 0;
};

namespace detail {

// Multiply one coordinate of one marginal by `factor` and renormalize.
// Returns nothing when the move leaves the probability floor.
inline std::optional<ProductInstance> perturb(const ProductInstance& inst, bool p_side,
                                              std::size_t coord, std::size_t symbol,
                                              double factor, double prob_floor) {
    std::vector<Pmf> ps = inst.ps;
    std::vector<Pmf> qs = inst.qs;
    std::vector<double> probs = (p_side ? ps : qs)[coord].probs();
    probs[symbol] *= factor;
    double sum = 0.0;
    for (double p : probs) {
        sum += p;
    }
    for (double& p : probs) {
        p /= sum;
        if (p < prob_floor) {
            return std::nullopt;
        }
    }
    (p_side ? ps : qs)[coord] = Pmf::from_probs(std::move(probs), 1e-9);
    return ProductInstance::make(std::move(ps), std::move(qs));
}

}  // namespace detail

/// Random-restart coordinatewise hill climb maximizing the hom/vec ratio.
/// Moves multiply one pmf entry by 0.9 or 1.1 (then renormalize) and are
/// accepted only when the ratio improves. Deterministic in the seed.
inline SearchReport search_worst_ratio(const SearchOptions& options) {
    options.validate();
    SearchReport report;
    report.seed = options.seed;

    GeneratorConfig gen;
    gen.seed = options.seed;
    gen.n_min = 2;
    gen.n_max = options.n_max;
    gen.m_min = 2;
    gen.m_max = options.family == SearchFamily::bernoulli ? 2 : options.m_max;
    gen.concentration = options.concentration;
    gen.count = static_cast<std::size_t>(options.restarts);
    gen.prob_floor = options.prob_floor;

    for (int restart = 0; restart < options.restarts; ++restart) {
        ProductInstance current = gen_instance(gen, static_cast<std::size_t>(restart));
        double current_ratio = hom_vec_ratio(current, options.bound);
        ++report.evaluations;

        SplitMix64 rng(mix_seed(options.seed ^ 0x5851f42d4c957f2dULL,
                                static_cast<std::uint64_t>(restart)));
        for (int step = 0; step < options.steps; ++step) {
            const bool p_side = (rng.next() & 1) != 0;
            const std::size_t coord = rng.next_in(0, current.n() - 1);
            const std::size_t symbol = rng.next_in(0, current.m() - 1);
            const double factor = (rng.next() & 1) != 0 ? 1.1 : 0.9;
            std::optional<ProductInstance> moved =
                detail::perturb(current, p_side, coord, symbol, factor, options.prob_floor);
            if (!moved) {
                continue;
            }
            const double moved_ratio = hom_vec_ratio(*moved, options.bound);
            ++report.evaluations;
            if (moved_ratio > current_ratio) {
                current = std::move(*moved);
                current_ratio = moved_ratio;
            }
        }
        if (current_ratio > report.best_ratio) {
            report.best_ratio = current_ratio;
            report.witness = std::move(current);
        }
    }
    return report;
}

struct GridSearchResult {
    double best_ratio = 0.0;
    ProductInstance witness;
    std::uint64_t evaluations = 0;
};

/// Exhaustive oracle over structured Bernoulli instances: every coordinate's
/// parameter pair (p_i, q_i) ranges over the grid {step, 2 step, ..., 1-step}^2,
/// coordinates unordered. TV quantities go through the brute-force enumeration
/// path, independent of the encoding used by the hill climb.
inline GridSearchResult bernoulli_grid_search(int n, double grid_step = 0.05,
                                              double bound = kHomVecBound) {
    if (n < 2 || !(grid_step > 0.0) || grid_step >= 0.5) {
        throw Error("bernoulli_grid_search needs n >= 2 and grid_step in (0, 0.5)");
    }
    std::vector<double> grid;
    for (double v = grid_step; v < 1.0 - 0.5 * grid_step; v += grid_step) {
        grid.push_back(v);
    }
    std::vector<std::pair<double, double>> pairs;
    pairs.reserve(grid.size() * grid.size());
    for (double p : grid) {
        for (double q : grid) {
            pairs.emplace_back(p, q);
        }
    }

    GridSearchResult result;
    std::vector<std::size_t> pick(n, 0);  // nondecreasing indices into `pairs`
    while (true) {
        std::vector<Pmf> ps;
        std::vector<Pmf> qs;
        ps.reserve(n);
        qs.reserve(n);
        for (int i = 0; i < n; ++i) {
            const auto& [p, q] = pairs[pick[i]];
            ps.push_back(Pmf::from_probs({p, 1.0 - p}));
            qs.push_back(Pmf::from_probs({q, 1.0 - q}));
        }
        ProductInstance inst = ProductInstance::make(std::move(ps), std::move(qs));
        const double vec = tv_product_bruteforce(inst);
        const double hom = tv_homogenized_multinomial(homogenize(inst.ps),
                                                      homogenize(inst.qs), n);
        ++result.evaluations;
        if (hom > bound * vec + 1e-9) {
            throw TheoremViolation("grid oracle found hom/vec above the proven bound");
        }
        if (vec > kRatioFloor && hom / vec > result.best_ratio) {
            result.best_ratio = hom / vec;
            result.witness = std::move(inst);
        }

        // next nondecreasing index tuple
        int i = n - 1;
        while (i >= 0 && pick[i] == pairs.size() - 1) {
            --i;
        }
        if (i < 0) {
            break;
        }
        const std::size_t next = pick[i] + 1;
        for (int j = i; j < n; ++j) {
            pick[j] = next;
        }
    }
    return result;
}

}  // namespace tvhom
