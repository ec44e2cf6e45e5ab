#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tvhom/errors.hpp"
#include "tvhom/numeric.hpp"

namespace tvhom {

/// Absolute tolerance under which two atom positions are considered equal and
/// merged during canonicalization. Positions produced by identical likelihood
/// ratios coincide exactly; the tolerance only absorbs rounding. A position
/// perturbation of at most tau changes the T functional of an admissible
/// measure by at most tau (the derivative of |sinh| is bounded by cosh and
/// the cosh-integral of an admissible measure is 1).
inline constexpr double kDefaultMergeTol = 1e-12;

/// Cap on |a| * |b| for a single convolution step.
inline constexpr std::size_t kDefaultAtomBudget = 10'000'000;

/// One point mass: a location on the log-likelihood-ratio axis and its weight.
struct Atom {
    double position = 0.0;
    double weight = 0.0;  // > 0 in canonical form

    bool operator==(const Atom&) const = default;
};

namespace detail {

// Merge sweep over position-sorted atoms: drops zero weights, rejects
// non-finite entries, and fuses runs of atoms whose positions lie within
// merge_tol of the running merged position. A merged atom carries the weight
// sum and the weight-averaged position.
inline void sweep_merge_sorted(std::vector<Atom>& atoms, double merge_tol) {
    std::size_t out = 0;
    bool have = false;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        const Atom a = atoms[i];
        if (!std::isfinite(a.position) || !std::isfinite(a.weight)) {
            throw NonFiniteInput("atom position/weight must be finite");
        }
        if (a.weight < 0.0) {
            throw Error("negative atom weight");
        }
        if (a.weight == 0.0) {
            continue;
        }
        if (!have) {
            atoms[0] = a;
            have = true;
            continue;
        }
        Atom& cur = atoms[out];
        if (a.position - cur.position <= merge_tol) {
            const double w = cur.weight + a.weight;
            cur.position = (cur.weight * cur.position + a.weight * a.position) / w;
            cur.weight = w;
        } else {
            atoms[++out] = a;
        }
    }
    if (!have) {
        throw EmptyMeasure("measure has no atoms with positive weight");
    }
    atoms.resize(out + 1);
}

// Canonicalize arbitrary input: validate, sort ascending by position, then
// merge. Sorting after validation keeps NaN positions out of the comparator.
inline void canonicalize(std::vector<Atom>& atoms, double merge_tol) {
    for (const Atom& a : atoms) {
        if (!std::isfinite(a.position) || !std::isfinite(a.weight)) {
            throw NonFiniteInput("atom position/weight must be finite");
        }
    }
    std::sort(atoms.begin(), atoms.end(),
              [](const Atom& a, const Atom& b) { return a.position < b.position; });
    sweep_merge_sorted(atoms, merge_tol);
}

// Bottom-up merge of consecutive pre-sorted runs of length run_len (the last
// run may be shorter). Used by the convolution fast path, where the pair list
// arrives as one ascending run per atom of the smaller operand; merging runs
// beats re-sorting the whole list.
inline void merge_sorted_runs(std::vector<Atom>& atoms, std::size_t run_len) {
    if (run_len >= atoms.size()) {
        return;
    }
    const auto by_position = [](const Atom& a, const Atom& b) {
        return a.position < b.position;
    };
    std::vector<Atom> scratch(atoms.size());
    for (std::size_t width = run_len; width < atoms.size(); width *= 2) {
        for (std::size_t lo = 0; lo < atoms.size(); lo += 2 * width) {
            const std::size_t mid = std::min(lo + width, atoms.size());
            const std::size_t hi = std::min(lo + 2 * width, atoms.size());
            std::merge(atoms.begin() + lo, atoms.begin() + mid, atoms.begin() + mid,
                       atoms.begin() + hi, scratch.begin() + lo, by_position);
        }
        atoms.swap(scratch);
    }
}

// Advance a composition (c_0, ..., c_{k-1}) of a fixed total in
// colexicographic order, starting from (total, 0, ..., 0); returns false
// after the last one (0, ..., 0, total).
inline bool next_composition(std::vector<unsigned>& c) {
    const std::size_t k = c.size();
    if (k == 1) {
        return false;
    }
    if (c[0] > 0) {
        --c[0];
        ++c[1];
        return true;
    }
    std::size_t j = 1;
    while (j < k && c[j] == 0) {
        ++j;
    }
    if (j + 1 >= k) {
        return false;
    }
    const unsigned s = c[j];
    c[j] = 0;
    ++c[j + 1];
    c[0] = s - 1;
    return true;
}

// Number of compositions of n into k nonnegative parts, C(n+k-1, k-1),
// saturating at SIZE_MAX on overflow.
inline std::size_t composition_count(std::size_t n, std::size_t k) {
    std::size_t count = 1;
    for (std::size_t j = 1; j < k; ++j) {
        const std::size_t numer = n + j;
        if (count > static_cast<std::size_t>(-1) / numer) {
            return static_cast<std::size_t>(-1);
        }
        count = count * numer / j;
    }
    return count;
}

// n-fold self-convolution of a canonical atom list: one output atom per
// multiset of n draws from the support, with multinomial weight
// n!/(prod c_j!) * prod w_j^{c_j} evaluated in the log domain. Enumerates
// compositions in colex order with O(1) incremental updates of the position,
// the log-factorial sum, and the count-weighted log-weight sum; the running
// values are recomputed from scratch every 4096 steps to stop drift.
inline std::vector<Atom> iid_power_atoms(const std::vector<Atom>& base, int n,
                                         std::size_t atom_budget) {
    const std::size_t k = base.size();
    const std::size_t out_count = composition_count(static_cast<std::size_t>(n), k);
    if (out_count > atom_budget) {
        throw AtomBudgetExceeded("n-fold convolution support C(n+k-1, k-1) exceeds budget " +
                                 std::to_string(atom_budget));
    }

    std::vector<double> log_w(k);
    std::vector<double> pos(k);
    for (std::size_t j = 0; j < k; ++j) {
        log_w[j] = std::log(base[j].weight);
        pos[j] = base[j].position;
    }
    std::vector<double> lg(static_cast<std::size_t>(n) + 1);  // lgamma(c + 1)
    for (int c = 0; c <= n; ++c) {
        lg[static_cast<std::size_t>(c)] = std::lgamma(static_cast<double>(c) + 1.0);
    }
    const double log_n_fact = lg[static_cast<std::size_t>(n)];

    std::vector<unsigned> c(k, 0);
    c[0] = static_cast<unsigned>(n);
    double position = n * pos[0];
    double sum_lg = lg[static_cast<unsigned>(n)];
    double sum_clw = n * log_w[0];
    const auto refresh = [&] {
        position = 0.0;
        sum_lg = 0.0;
        sum_clw = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            position += c[j] * pos[j];
            sum_lg += lg[c[j]];
            sum_clw += c[j] * log_w[j];
        }
    };

    std::vector<Atom> out;
    out.reserve(out_count);
    std::size_t emitted = 0;
    while (true) {
        out.push_back({position, std::exp(log_n_fact - sum_lg + sum_clw)});
        if ((++emitted & 0xFFFU) == 0) {
            refresh();
        }
        if (k == 1) {
            break;
        }
        if (c[0] > 0) {
            sum_lg += lg[c[0] - 1] - lg[c[0]] + lg[c[1] + 1] - lg[c[1]];
            position += pos[1] - pos[0];
            sum_clw += log_w[1] - log_w[0];
            --c[0];
            ++c[1];
        } else {
            std::size_t j = 1;
            while (j < k && c[j] == 0) {
                ++j;
            }
            if (j + 1 >= k) {
                break;
            }
            const unsigned s = c[j];
            sum_lg += lg[s - 1] - lg[s] + lg[c[j + 1] + 1] - lg[c[j + 1]];
            position += (s - 1.0) * pos[0] - static_cast<double>(s) * pos[j] + pos[j + 1];
            sum_clw += (s - 1.0) * log_w[0] - static_cast<double>(s) * log_w[j] +
                       log_w[j + 1];
            c[j] = 0;
            ++c[j + 1];
            c[0] = s - 1;
        }
    }
    return out;
}

}  // namespace detail

/// Finitely supported positive measure on the real line, held in canonical
/// form: atoms sorted strictly ascending, all weights positive, no two
/// positions within the merge tolerance used at construction.
class AtomicMeasure {
public:
    static AtomicMeasure from_atoms(std::vector<Atom> atoms,
                                    double merge_tol = kDefaultMergeTol) {
        detail::canonicalize(atoms, merge_tol);
        return AtomicMeasure(std::move(atoms));
    }

    /// Wrap atoms that are already canonical (validated, sorted, merged).
    /// Fast path for operations that produce canonical output themselves.
    static AtomicMeasure from_sorted(std::vector<Atom> canonical) {
        return AtomicMeasure(std::move(canonical));
    }

    const std::vector<Atom>& atoms() const { return atoms_; }
    std::size_t size() const { return atoms_.size(); }

    bool operator==(const AtomicMeasure& other) const = default;

private:
    explicit AtomicMeasure(std::vector<Atom> canonical) : atoms_(std::move(canonical)) {}

    std::vector<Atom> atoms_;
};

/// Exponential integrals of a measure and the admissibility verdict: a measure
/// is admissible when both the e^x and e^{-x} integrals equal 1.
struct AdmissibilityReport {
    double integral_plus = 0.0;   // integral of e^x
    double integral_minus = 0.0;  // integral of e^{-x}
    bool admissible = false;
};

/// Build a canonical measure from raw (position, weight) pairs. Zero weights
/// are dropped; near-equal positions merge.
inline AtomicMeasure make_measure(std::span<const std::pair<double, double>> raw,
                                  double merge_tol = kDefaultMergeTol) {
    std::vector<Atom> atoms;
    atoms.reserve(raw.size());
    for (const auto& [position, weight] : raw) {
        atoms.push_back({position, weight});
    }
    return AtomicMeasure::from_atoms(std::move(atoms), merge_tol);
}

inline AtomicMeasure make_measure(std::initializer_list<std::pair<double, double>> raw,
                                  double merge_tol = kDefaultMergeTol) {
    return make_measure(std::span<const std::pair<double, double>>(raw.begin(), raw.size()),
                        merge_tol);
}

/// Point mass at `position` with mass `weight`.
inline AtomicMeasure dirac(double position, double weight = 1.0) {
    return AtomicMeasure::from_atoms({{position, weight}});
}

inline AdmissibilityReport check_admissible(const AtomicMeasure& eta, double tol = 1e-9) {
    KahanSum plus;
    KahanSum minus;
    for (const Atom& a : eta.atoms()) {
        plus.add(a.weight * std::exp(a.position));
        minus.add(a.weight * std::exp(-a.position));
    }
    AdmissibilityReport report;
    report.integral_plus = plus.value();
    report.integral_minus = minus.value();
    report.admissible = std::abs(report.integral_plus - 1.0) <= tol &&
                        std::abs(report.integral_minus - 1.0) <= tol;
    return report;
}

/// Convolution: the pushforward of the product measure under addition. Every
/// pair of atoms contributes (x + y, w_x * w_y); equal sums merge.
inline AtomicMeasure convolve(const AtomicMeasure& a, const AtomicMeasure& b,
                              double merge_tol = kDefaultMergeTol,
                              std::size_t atom_budget = kDefaultAtomBudget) {
    if (a.size() > atom_budget / b.size()) {
        throw AtomBudgetExceeded("convolution support " + std::to_string(a.size()) + " x " +
                                 std::to_string(b.size()) + " exceeds atom budget " +
                                 std::to_string(atom_budget));
    }
    // Emit one ascending run per atom of the smaller operand, then merge runs.
    const AtomicMeasure& big = a.size() >= b.size() ? a : b;
    const AtomicMeasure& small = a.size() >= b.size() ? b : a;
    std::vector<Atom> atoms;
    atoms.reserve(a.size() * b.size());
    for (const Atom& y : small.atoms()) {
        for (const Atom& x : big.atoms()) {
            atoms.push_back({x.position + y.position, x.weight * y.weight});
        }
    }
    detail::merge_sorted_runs(atoms, big.size());
    detail::sweep_merge_sorted(atoms, merge_tol);
    return AtomicMeasure::from_sorted(std::move(atoms));
}

/// Left fold of `convolve` over a non-empty family.
inline AtomicMeasure convolve_family(std::span<const AtomicMeasure> measures,
                                     double merge_tol = kDefaultMergeTol,
                                     std::size_t atom_budget = kDefaultAtomBudget) {
    if (measures.empty()) {
        throw Error("convolve_family requires a non-empty family");
    }
    AtomicMeasure acc = measures[0];
    for (std::size_t i = 1; i < measures.size(); ++i) {
        acc = convolve(acc, measures[i], merge_tol, atom_budget);
    }
    return acc;
}

/// n-fold convolution of a single measure, enumerated directly over multisets
/// of the support with multinomial weights rather than by repeated pairwise
/// convolution. Agrees with the fold of convolve atomwise to rounding.
inline AtomicMeasure power_convolve(const AtomicMeasure& eta, int n,
                                    double merge_tol = kDefaultMergeTol,
                                    std::size_t atom_budget = kDefaultAtomBudget) {
    if (n < 1) {
        throw Error("power_convolve requires n >= 1");
    }
    if (n == 1) {
        return eta;
    }
    std::vector<Atom> atoms = detail::iid_power_atoms(eta.atoms(), n, atom_budget);
    detail::canonicalize(atoms, merge_tol);
    return AtomicMeasure::from_sorted(std::move(atoms));
}

/// Convex-style combination sum_i weights[i] * measures[i]. Weights must be
/// nonnegative and sum to one; admissibility is preserved when every input is
/// admissible.
inline AtomicMeasure mixture(std::span<const AtomicMeasure> measures,
                             std::span<const double> weights,
                             double merge_tol = kDefaultMergeTol,
                             double weight_tol = 1e-9) {
    if (measures.size() != weights.size()) {
        throw WeightMismatch("mixture needs one weight per measure");
    }
    if (measures.empty()) {
        throw WeightMismatch("mixture of an empty family");
    }
    KahanSum total;
    for (double w : weights) {
        if (!std::isfinite(w) || w < 0.0) {
            throw WeightMismatch("mixture weights must be finite and nonnegative");
        }
        total.add(w);
    }
    if (std::abs(total.value() - 1.0) > weight_tol) {
        throw WeightMismatch("mixture weights sum to " + std::to_string(total.value()) +
                             ", expected 1");
    }
    std::vector<Atom> atoms;
    for (std::size_t i = 0; i < measures.size(); ++i) {
        if (weights[i] == 0.0) {
            continue;
        }
        for (const Atom& a : measures[i].atoms()) {
            atoms.push_back({a.position, weights[i] * a.weight});
        }
    }
    return AtomicMeasure::from_atoms(std::move(atoms), merge_tol);
}

/// T(eta) = 1/2 * integral of |e^x - e^{-x}| = integral of |sinh x|.
/// Recovers total variation when eta encodes a pair of product distributions.
inline double t_functional(const AtomicMeasure& eta) {
    KahanSum sum;
    for (const Atom& a : eta.atoms()) {
        sum.add(detail::weighted_abs_sinh(a.weight, a.position));
    }
    return sum.value();
}

inline double total_mass(const AtomicMeasure& eta) {
    KahanSum sum;
    for (const Atom& a : eta.atoms()) {
        sum.add(a.weight);
    }
    return sum.value();
}

}  // namespace tvhom
