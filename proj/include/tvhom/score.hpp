#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "tvhom/errors.hpp"
#include "tvhom/measure.hpp"
#include "tvhom/numeric.hpp"

namespace tvhom {

struct ScoreAtom {
    double value = 0.0;  // in [-1, 1]
    double prob = 0.0;   // > 0
};

/// Finite probability law on [-1, 1]: the law of U = tanh(X) where X is drawn
/// from the cosh-tilted companion of an admissible measure. Zero mean by
/// construction (up to the admissibility slack of the source measure).
class ScoreLaw {
public:
    static ScoreLaw from_atoms(std::vector<ScoreAtom> atoms,
                               double merge_tol = kDefaultMergeTol) {
        std::vector<Atom> raw;
        raw.reserve(atoms.size());
        for (const ScoreAtom& a : atoms) {
            if (std::abs(a.value) > 1.0 + 1e-12) {
                throw Error("score value outside [-1, 1]");
            }
            raw.push_back({a.value, a.prob});
        }
        detail::canonicalize(raw, merge_tol);
        KahanSum total;
        for (const Atom& a : raw) {
            total.add(a.weight);
        }
        const double inv_total = 1.0 / total.value();
        std::vector<ScoreAtom> canonical;
        canonical.reserve(raw.size());
        for (const Atom& a : raw) {
            canonical.push_back({a.position, a.weight * inv_total});
        }
        return ScoreLaw(std::move(canonical));
    }

    const std::vector<ScoreAtom>& atoms() const { return atoms_; }
    std::size_t size() const { return atoms_.size(); }

    double mean() const {
        KahanSum s;
        for (const ScoreAtom& a : atoms_) {
            s.add(a.prob * a.value);
        }
        return s.value();
    }

    double second_moment() const {
        KahanSum s;
        for (const ScoreAtom& a : atoms_) {
            s.add(a.prob * a.value * a.value);
        }
        return s.value();
    }

private:
    explicit ScoreLaw(std::vector<ScoreAtom> atoms) : atoms_(std::move(atoms)) {}

    std::vector<ScoreAtom> atoms_;
};

/// Aggregate smallness parameters of an admissible family: alpha is the total
/// mass defect sum_i (1 - eta_i(R)), nu the total score variance sum_i E U_i^2.
/// The two are equivalent up to a factor of two: alpha <= nu <= 2 * alpha.
struct SignalStats {
    double alpha = 0.0;
    double nu = 0.0;
};

/// Law of tanh(X) with X drawn from cosh(x) * eta(dx). Atom (x, w) maps to
/// value tanh(x) with probability w * cosh(x); probabilities are normalized by
/// their total (which is 1 up to the admissibility slack of eta).
inline ScoreLaw score_law(const AtomicMeasure& eta, double admiss_tol = 1e-9,
                          double merge_tol = kDefaultMergeTol) {
    const AdmissibilityReport report = check_admissible(eta, admiss_tol);
    if (!report.admissible) {
        throw NotAdmissible("score_law needs an admissible measure; integrals (" +
                            std::to_string(report.integral_plus) + ", " +
                            std::to_string(report.integral_minus) + ")");
    }
    std::vector<ScoreAtom> atoms;
    atoms.reserve(eta.size());
    for (const Atom& a : eta.atoms()) {
        atoms.push_back({std::tanh(a.position), detail::weighted_cosh(a.weight, a.position)});
    }
    return ScoreLaw::from_atoms(std::move(atoms), merge_tol);
}

/// Uniform mixture of a family of score laws; this is the one-coordinate law
/// of the homogenized family (the score law of the averaged measure).
inline ScoreLaw mixture_law(std::span<const ScoreLaw> laws,
                            double merge_tol = kDefaultMergeTol) {
    if (laws.empty()) {
        throw Error("mixture_law requires a non-empty family");
    }
    const double inv_n = 1.0 / static_cast<double>(laws.size());
    std::vector<ScoreAtom> atoms;
    for (const ScoreLaw& law : laws) {
        for (const ScoreAtom& a : law.atoms()) {
            atoms.push_back({a.value, inv_n * a.prob});
        }
    }
    return ScoreLaw::from_atoms(std::move(atoms), merge_tol);
}

inline constexpr std::size_t kDefaultScoreBudget = 10'000'000;

namespace detail {

inline void check_support_budget(std::span<const ScoreLaw> laws, std::size_t budget) {
    if (laws.empty()) {
        throw Error("score expectation over an empty family");
    }
    std::size_t product = 1;
    for (const ScoreLaw& law : laws) {
        if (product > budget / law.size()) {
            throw EnumerationBudgetExceeded("product of score supports exceeds budget " +
                                            std::to_string(budget));
        }
        product *= law.size();
    }
}

// Law of sum_i f(U_i) as a canonical atom list, for f = identity or square.
// The budget caps each convolution step (merged accumulator times next
// support), which is what this algorithm actually materializes; the full
// product of supports is only enumerated by enumerate_support below.
template <typename Extract>
std::vector<Atom> convolve_transformed(std::span<const ScoreLaw> laws, Extract f,
                                       double merge_tol, std::size_t budget) {
    if (laws.empty()) {
        throw Error("score expectation over an empty family");
    }

    // An i.i.d. family (e.g. copies of the homogenized law) is enumerated
    // directly over multisets of the one-coordinate support.
    const bool identical =
        laws.size() > 1 &&
        std::all_of(laws.begin() + 1, laws.end(), [&](const ScoreLaw& law) {
            return law.atoms().size() == laws[0].atoms().size() &&
                   std::equal(law.atoms().begin(), law.atoms().end(),
                              laws[0].atoms().begin(), [](const ScoreAtom& a,
                                                          const ScoreAtom& b) {
                                  return a.value == b.value && a.prob == b.prob;
                              });
        });
    if (identical) {
        std::vector<Atom> base;
        base.reserve(laws[0].size());
        for (const ScoreAtom& a : laws[0].atoms()) {
            base.push_back({f(a.value), a.prob});
        }
        canonicalize(base, merge_tol);
        std::vector<Atom> out =
            iid_power_atoms(base, static_cast<int>(laws.size()), budget);
        canonicalize(out, merge_tol);
        return out;
    }

    std::vector<Atom> acc{{0.0, 1.0}};
    std::vector<double> values;
    for (const ScoreLaw& law : laws) {
        if (acc.size() > budget / law.size()) {
            throw EnumerationBudgetExceeded(
                "score-law convolution step exceeds budget " + std::to_string(budget));
        }
        // transformed values need not be sorted; sort them so each emitted run
        // is ascending and runs can be merged instead of re-sorted
        values.clear();
        std::vector<std::size_t> order(law.size());
        for (std::size_t j = 0; j < law.size(); ++j) {
            values.push_back(f(law.atoms()[j].value));
            order[j] = j;
        }
        std::sort(order.begin(), order.end(),
                  [&](std::size_t i, std::size_t j) { return values[i] < values[j]; });

        std::vector<Atom> next;
        next.reserve(acc.size() * law.size());
        for (std::size_t j : order) {
            const double value = values[j];
            const double prob = law.atoms()[j].prob;
            for (const Atom& a : acc) {
                next.push_back({a.position + value, a.weight * prob});
            }
        }
        merge_sorted_runs(next, acc.size());
        sweep_merge_sorted(next, merge_tol);
        acc = std::move(next);
    }
    return acc;
}

}  // namespace detail

/// E|S| with S = sum of one independent draw per law, by exact discrete
/// convolution of the laws.
inline double sum_abs_mean(std::span<const ScoreLaw> laws,
                           double merge_tol = kDefaultMergeTol,
                           std::size_t budget = kDefaultScoreBudget) {
    const std::vector<Atom> s = detail::convolve_transformed(
        laws, [](double u) { return u; }, merge_tol, budget);
    KahanSum sum;
    for (const Atom& a : s) {
        sum.add(a.weight * std::abs(a.position));
    }
    return sum.value();
}

/// E sqrt(V) with V = sum of squared draws, by exact convolution of the
/// squared laws.
inline double sqrt_quadratic_mean(std::span<const ScoreLaw> laws,
                                  double merge_tol = kDefaultMergeTol,
                                  std::size_t budget = kDefaultScoreBudget) {
    const std::vector<Atom> v = detail::convolve_transformed(
        laws, [](double u) { return u * u; }, merge_tol, budget);
    KahanSum sum;
    for (const Atom& a : v) {
        // merged positions of nonnegative values stay nonnegative; clamp for safety
        sum.add(a.weight * std::sqrt(std::max(0.0, a.position)));
    }
    return sum.value();
}

/// E e^{-lambda V}; factorizes over the independent coordinates.
inline double laplace_v(std::span<const ScoreLaw> laws, double lambda) {
    if (lambda < 0.0) {
        throw Error("laplace_v requires lambda >= 0");
    }
    double product = 1.0;
    for (const ScoreLaw& law : laws) {
        KahanSum factor;
        for (const ScoreAtom& a : law.atoms()) {
            factor.add(a.prob * std::exp(-lambda * a.value * a.value));
        }
        product *= factor.value();
    }
    return product;
}

/// Mass defect and score variance of an admissible family.
inline SignalStats signal_stats(std::span<const AtomicMeasure> etas,
                                double admiss_tol = 1e-9,
                                double merge_tol = kDefaultMergeTol) {
    KahanSum alpha;
    KahanSum nu;
    for (const AtomicMeasure& eta : etas) {
        alpha.add(1.0 - total_mass(eta));
        nu.add(score_law(eta, admiss_tol, merge_tol).second_moment());
    }
    return SignalStats{alpha.value(), nu.value()};
}

/// Exact second moment of the cubic-and-higher remainder of the multilinear
/// form: the sum of the odd elementary symmetric polynomials of order >= 3 in
/// the coordinate second moments. Computed by the coefficient recurrence for
/// prod_i (1 + a_i x); all terms are nonnegative, so there is no cancellation.
inline double remainder_l2(std::span<const double> second_moments) {
    for (double a : second_moments) {
        if (!(a >= 0.0 && a <= 1.0)) {
            throw Error("second moments must lie in [0, 1]");
        }
    }
    std::vector<double> coeff{1.0};
    coeff.reserve(second_moments.size() + 1);
    for (double a : second_moments) {
        coeff.push_back(0.0);
        for (std::size_t k = coeff.size() - 1; k >= 1; --k) {
            coeff[k] += a * coeff[k - 1];
        }
    }
    KahanSum sum;
    for (std::size_t k = 3; k < coeff.size(); k += 2) {
        sum.add(coeff[k]);
    }
    return sum.value();
}

inline double remainder_l2(std::initializer_list<double> second_moments) {
    return remainder_l2(std::span<const double>(second_moments.begin(), second_moments.size()));
}

namespace detail {

// Enumerate the product of score supports and accumulate f(values, joint prob).
template <typename Visit>
void enumerate_support(std::span<const ScoreLaw> laws, std::size_t budget, Visit visit) {
    check_support_budget(laws, budget);
    const std::size_t n = laws.size();
    std::vector<std::size_t> idx(n, 0);
    std::vector<double> values(n);
    while (true) {
        double prob = 1.0;
        for (std::size_t i = 0; i < n; ++i) {
            const ScoreAtom& a = laws[i].atoms()[idx[i]];
            values[i] = a.value;
            prob *= a.prob;
        }
        visit(values, prob);
        std::size_t i = 0;
        while (i < n && ++idx[i] == laws[i].size()) {
            idx[i] = 0;
            ++i;
        }
        if (i == n) {
            break;
        }
    }
}

inline double psi(std::span<const double> values) {
    double plus = 1.0;
    double minus = 1.0;
    for (double u : values) {
        plus *= 1.0 + u;
        minus *= 1.0 - u;
    }
    return 0.5 * (plus - minus);
}

}  // namespace detail

/// E|Psi(U_1, ..., U_n)| by full enumeration of the product support, where Psi
/// is the odd multilinear form whose expected absolute value equals T of the
/// convolved measures.
inline double mean_abs_psi(std::span<const ScoreLaw> laws,
                           std::size_t budget = kDefaultScoreBudget) {
    KahanSum sum;
    detail::enumerate_support(laws, budget, [&](std::span<const double> values, double prob) {
        sum.add(prob * std::abs(detail::psi(values)));
    });
    return sum.value();
}

/// E|Psi - S|: the expected absolute value of the cubic-and-higher remainder.
inline double mean_abs_remainder(std::span<const ScoreLaw> laws,
                                 std::size_t budget = kDefaultScoreBudget) {
    KahanSum sum;
    detail::enumerate_support(laws, budget, [&](std::span<const double> values, double prob) {
        double linear = 0.0;
        for (double u : values) {
            linear += u;
        }
        sum.add(prob * std::abs(detail::psi(values) - linear));
    });
    return sum.value();
}

}  // namespace tvhom
