#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "tvhom/errors.hpp"
#include "tvhom/measure.hpp"
#include "tvhom/numeric.hpp"
#include "tvhom/pmf.hpp"

namespace tvhom {

/// Encode a pair of strictly positive pmfs as the atomic measure that places
/// mass sqrt(P(w) Q(w)) at position (1/2) log(P(w) / Q(w)). The measure is
/// admissible, and T of it equals TV(P, Q); under convolution the encoding
/// turns products of distributions into sums of positions.
inline AtomicMeasure encode_pair(const Pmf& p, const Pmf& q,
                                 double merge_tol = kDefaultMergeTol) {
    if (p.alphabet_size() != q.alphabet_size()) {
        throw AlphabetMismatch("encode_pair: alphabets of size " +
                               std::to_string(p.alphabet_size()) + " and " +
                               std::to_string(q.alphabet_size()));
    }
    std::vector<Atom> atoms;
    atoms.reserve(p.alphabet_size());
    for (std::size_t w = 0; w < p.alphabet_size(); ++w) {
        atoms.push_back({0.5 * std::log(p(w) / q(w)), std::sqrt(p(w) * q(w))});
    }
    return AtomicMeasure::from_atoms(std::move(atoms), merge_tol);
}

/// Exact TV between the two product distributions of an instance, computed by
/// encoding every coordinate pair, convolving, and applying the T functional.
inline double tv_product_exact(const ProductInstance& inst,
                               double merge_tol = kDefaultMergeTol,
                               std::size_t atom_budget = kDefaultAtomBudget) {
    AtomicMeasure acc = encode_pair(inst.ps[0], inst.qs[0], merge_tol);
    for (std::size_t i = 1; i < inst.n(); ++i) {
        acc = convolve(acc, encode_pair(inst.ps[i], inst.qs[i], merge_tol), merge_tol,
                       atom_budget);
    }
    return t_functional(acc);
}

/// Independent oracle: TV between the products by full enumeration of the m^n
/// outcome space. Intentionally shares no code with the encoding path.
inline double tv_product_bruteforce(const ProductInstance& inst,
                                    std::size_t outcome_budget = 10'000'000) {
    const std::size_t n = inst.n();
    const std::size_t m = inst.m();
    std::size_t outcomes = 1;
    for (std::size_t i = 0; i < n; ++i) {
        if (outcomes > outcome_budget / m) {
            throw EnumerationBudgetExceeded("outcome space m^n exceeds budget " +
                                            std::to_string(outcome_budget));
        }
        outcomes *= m;
    }

    std::vector<std::size_t> word(n, 0);
    KahanSum sum;
    for (std::size_t step = 0; step < outcomes; ++step) {
        double pp = 1.0;
        double qq = 1.0;
        for (std::size_t i = 0; i < n; ++i) {
            pp *= inst.ps[i](word[i]);
            qq *= inst.qs[i](word[i]);
        }
        sum.add(std::abs(pp - qq));
        for (std::size_t i = 0; i < n; ++i) {
            if (++word[i] < m) {
                break;
            }
            word[i] = 0;
        }
    }
    return 0.5 * sum.value();
}

/// TV between the n-fold products of two pmfs, computed through their
/// multinomial count laws: TV(Pbar^n, Qbar^n) = TV(Mult(n, Pbar), Mult(n, Qbar)).
/// Enumeration runs over compositions of n into m parts in colexicographic
/// order; the multinomial pmf is evaluated in the log domain through lgamma and
/// the difference of two near-equal probabilities via e^hi * (-expm1(lo - hi)).
inline double tv_homogenized_multinomial(const Pmf& pbar, const Pmf& qbar, int n,
                                         std::size_t composition_budget = 10'000'000) {
    if (pbar.alphabet_size() != qbar.alphabet_size()) {
        throw AlphabetMismatch("tv_homogenized_multinomial: mismatched alphabets");
    }
    if (n < 1) {
        throw Error("tv_homogenized_multinomial requires n >= 1");
    }
    const std::size_t m = pbar.alphabet_size();
    if (detail::composition_count(static_cast<std::size_t>(n), m) > composition_budget) {
        throw EnumerationBudgetExceeded("composition count C(n+m-1, m-1) exceeds budget " +
                                        std::to_string(composition_budget));
    }

    std::vector<double> log_p(m);
    std::vector<double> log_q(m);
    for (std::size_t w = 0; w < m; ++w) {
        log_p[w] = std::log(pbar(w));
        log_q[w] = std::log(qbar(w));
    }
    const double log_n_fact = std::lgamma(static_cast<double>(n) + 1.0);

    std::vector<unsigned> k(m, 0);
    k[0] = static_cast<unsigned>(n);
    KahanSum sum;
    bool more = true;
    while (more) {
        double lp = log_n_fact;
        double lq = log_n_fact;
        for (std::size_t w = 0; w < m; ++w) {
            const double lg = std::lgamma(static_cast<double>(k[w]) + 1.0);
            lp += static_cast<double>(k[w]) * log_p[w] - lg;
            lq += static_cast<double>(k[w]) * log_q[w] - lg;
        }
        const double hi = std::max(lp, lq);
        const double lo = std::min(lp, lq);
        sum.add(-std::exp(hi) * std::expm1(lo - hi));
        more = detail::next_composition(k);
    }
    return 0.5 * sum.value();
}

}  // namespace tvhom
