#pragma once

/**
 * \file   mjsr/kstep.hpp
 * \brief  Order-k admissibility constraints and their recoding into a
 *         1-step transition matrix over k-tuples.
 *
 * A word is admissible under an order-k constraint when every window of
 * k+1 consecutive letters is an allowed tuple and the last k letters can be
 * continued by some letter. Such words of length n >= k correspond one to
 * one to Markov words of length n-k+1 over the tuple alphabet.
 */

#include <mjsr/radius.hpp>

#include <map>
#include <set>

namespace mjsr {

using Tuple = std::vector<std::size_t>;

class KStepConstraint {
  public:
    /// `allowed` holds 0-based (k+1)-tuples.
    KStepConstraint(std::size_t alphabet, std::size_t k, const std::vector<Tuple>& allowed)
        : alphabet_(alphabet), k_(k) {
        if (k == 0) throw ValidationError(ErrorKind::DimensionMismatch, "kstep.k", "k must be at least 1");
        if (allowed.empty()) throw ValidationError(ErrorKind::EmptyConstraint, "kstep.allowed");
        for (std::size_t t = 0; t < allowed.size(); ++t) {
            const std::string loc = "kstep.allowed[" + std::to_string(t + 1) + "]";
            if (allowed[t].size() != k + 1)
                throw ValidationError(ErrorKind::DimensionMismatch, loc,
                                      "expected a tuple of length " + std::to_string(k + 1));
            for (std::size_t j = 0; j < allowed[t].size(); ++j)
                if (allowed[t][j] >= alphabet)
                    throw ValidationError(ErrorKind::IndexOutOfRange, loc + "[" + std::to_string(j + 1) + "]",
                                          "letter not in 1.." + std::to_string(alphabet));
            allowed_.insert(allowed[t]);
        }
        for (const auto& t : allowed_)
            for (std::size_t len = 1; len <= k_ + 1; ++len) prefixes_.insert(Tuple(t.begin(), t.begin() + len));
    }

    std::size_t alphabet() const noexcept { return alphabet_; }
    std::size_t order() const noexcept { return k_; }
    const std::set<Tuple>& allowed() const noexcept { return allowed_; }

    bool allows(const Tuple& window) const { return allowed_.contains(window); }

    /// Some allowed tuple starts with `prefix` (length 1..k+1).
    bool is_prefix(const Tuple& prefix) const { return prefixes_.contains(prefix); }

    /// Admissibility of a word of length >= k.
    bool admits(const std::vector<std::size_t>& w) const {
        if (w.size() < k_) return false;
        for (std::size_t s = 0; s + k_ < w.size(); ++s)
            if (!allows(Tuple(w.begin() + s, w.begin() + s + k_ + 1))) return false;
        return is_prefix(Tuple(w.end() - k_, w.end()));
    }

    /// Every window of the periodic word w w w ... is allowed.
    bool admits_cyclically(const std::vector<std::size_t>& w) const {
        const std::size_t m = w.size();
        Tuple window(k_ + 1);
        for (std::size_t s = 0; s < m; ++s) {
            for (std::size_t j = 0; j <= k_; ++j) window[j] = w[(s + j) % m];
            if (!allows(window)) return false;
        }
        return true;
    }

  private:
    std::size_t alphabet_;
    std::size_t k_;
    std::set<Tuple> allowed_;
    std::set<Tuple> prefixes_;
};

template <FieldScalar T>
struct RecodedInstance {
    std::vector<Tuple> states; ///< the tuple alphabet, lexicographic
    MatrixSet<T> set;          ///< A_{u_k} for state u
    TransitionMatrix omega;

    /// State index of a k-tuple, if it is a state.
    std::optional<std::size_t> state_of(const Tuple& u) const {
        auto it = std::lower_bound(states.begin(), states.end(), u);
        if (it == states.end() || *it != u) return std::nullopt;
        return static_cast<std::size_t>(it - states.begin());
    }

    /// Recoded word of an admissible original word of length n >= k.
    Word recode_word(const std::vector<std::size_t>& w, std::size_t k) const {
        Word out;
        for (std::size_t s = 0; s + k <= w.size(); ++s) {
            auto idx = state_of(Tuple(w.begin() + s, w.begin() + s + k));
            if (!idx) throw ValidationError(ErrorKind::IndexOutOfRange, "recode_word", "window is not a state");
            out.letters.push_back(*idx);
        }
        return out;
    }
};

/// States are the k-tuples occurring as prefix or suffix of an allowed
/// tuple. omega'(v, u) = 1 iff v continues u (v_j = u_{j+1}) and
/// (u_1, ..., u_k, v_k) is allowed.
template <FieldScalar T>
RecodedInstance<T> recode(const KStepConstraint& c, const MatrixSet<T>& set) {
    if (set.size() != c.alphabet())
        throw ValidationError(ErrorKind::DimensionMismatch, "matrices",
                              std::to_string(set.size()) + " matrices for an alphabet of " +
                                  std::to_string(c.alphabet()));
    const std::size_t k = c.order();
    std::set<Tuple> states;
    for (const auto& t : c.allowed()) {
        states.insert(Tuple(t.begin(), t.begin() + k));
        states.insert(Tuple(t.begin() + 1, t.end()));
    }
    RecodedInstance<T> out;
    out.states.assign(states.begin(), states.end());
    const std::size_t m = out.states.size();

    std::vector<int> entries(m * m, 0);
    for (const auto& t : c.allowed()) {
        const auto u = *out.state_of(Tuple(t.begin(), t.begin() + k));
        const auto v = *out.state_of(Tuple(t.begin() + 1, t.end()));
        entries[v * m + u] = 1;
    }
    out.omega = TransitionMatrix(m, std::move(entries));

    std::vector<Matrix<T>> members;
    for (const auto& u : out.states) members.push_back(set[u.back()]);
    out.set = MatrixSet<T>(std::move(members));
    return out;
}

namespace detail {

/// Depth-first walk over words of the original alphabet, keeping the
/// running product. `keep(prefix)` prunes, `leaf(word, product)` sees every
/// word of length n that survives pruning.
template <FieldScalar T, typename Keep, typename Leaf>
void walk_words(const MatrixSet<T>& set, std::size_t n, Keep keep, Leaf leaf) {
    std::vector<std::size_t> w(n);
    std::vector<Matrix<T>> products(n);
    auto visit = [&](auto&& self, std::size_t depth) -> void {
        for (std::size_t a = 0; a < set.size(); ++a) {
            w[depth] = a;
            if (!keep(std::span<const std::size_t>(w.data(), depth + 1))) continue;
            products[depth] = depth == 0 ? set[a] : mat_mul(set[a], products[depth - 1]);
            if (depth + 1 == n) leaf(w, products[depth]);
            else self(self, depth + 1);
        }
    };
    visit(visit, 0);
}

} // namespace detail

/// Admissible words of the original constraint, lexicographic.
inline std::vector<std::vector<std::size_t>> kstep_words(const KStepConstraint& c, std::size_t n) {
    std::vector<std::vector<std::size_t>> out;
    if (n < c.order()) return out;
    const MatrixSet<double> dummy(std::vector<RealMatrix>(c.alphabet(), RealMatrix(1, 1, 0.0)));
    const std::size_t k = c.order();
    detail::walk_words(
        dummy, n,
        [&](std::span<const std::size_t> p) {
            if (p.size() <= k + 1) return c.is_prefix(Tuple(p.begin(), p.end()));
            return c.allows(Tuple(p.end() - static_cast<std::ptrdiff_t>(k + 1), p.end()));
        },
        [&](const std::vector<std::size_t>& w, const RealMatrix&) {
            if (c.admits(w)) out.push_back(w);
        });
    return out;
}

/// rho_n^orig <= (alpha^(k-1) * rho_{n-k+1}^recoded ^ (n-k+1))^(1/n), since an
/// original product is the recoded one times its first k-1 factors.
struct PrefixShiftCheck {
    std::size_t n = 0;
    double direct = 0;
    double bound = 0;
    bool holds = false;
};

template <FieldScalar T>
struct KStepEquivalenceReport {
    std::size_t k = 0;
    std::size_t n_max = 0;
    std::vector<BoundPoint> direct_upper; ///< n = k..n_max, original words
    std::vector<BoundPoint> direct_lower; ///< m = 1..n_max-k+1, cyclic original words
    SandwichReport recoded;               ///< m = 1..n_max-k+1
    double direct_best_upper = 0;
    double direct_best_lower = 0;
    double lower_diff = 0;                ///< max over m of |direct - recoded| lower bound
    std::vector<PrefixShiftCheck> shift_checks;
    bool passed = false;
};

/// Bounds of the original order-k instance by direct enumeration against
/// the sandwich of its recoding. Periodic words match length for length, so
/// the lower bounds must agree at every m; upper bounds are tied together by
/// the prefix-shift inequality, whose slack alpha^((k-1)/n) shrinks with n.
template <FieldScalar T>
KStepEquivalenceReport<T> radius_equivalence_check(const KStepConstraint& c, const MatrixSet<T>& set,
                                                   std::size_t n_max, NormKind norm = NormKind::RowSumMax,
                                                   double rel_tol = default_rel_tol, double tol = 1e-9) {
    const std::size_t k = c.order();
    if (n_max < k) throw std::invalid_argument("radius_equivalence_check: n_max must be at least k");
    const auto rec = recode(c, set);
    const std::size_t m_max = n_max - k + 1;

    KStepEquivalenceReport<T> rep;
    rep.k = k;
    rep.n_max = n_max;
    rep.recoded = sandwich(rec.set, rec.omega, m_max, norm, rel_tol);
    const double alpha = max_member_norm(set, norm);

    for (std::size_t n = k; n <= n_max; ++n) {
        double sup = 0.0;
        bool any = false;
        detail::walk_words(
            set, n,
            [&](std::span<const std::size_t> p) {
                if (p.size() <= k + 1) return c.is_prefix(Tuple(p.begin(), p.end()));
                return c.allows(Tuple(p.end() - static_cast<std::ptrdiff_t>(k + 1), p.end()));
            },
            [&](const std::vector<std::size_t>& w, const Matrix<T>& prod) {
                if (!c.admits(w)) return;
                any = true;
                sup = std::max(sup, operator_norm(prod, norm));
            });
        rep.direct_upper.push_back(detail::make_point(n, sup, BoundKind::NormBound, WordClass::Markov, false, any));

        const auto& rp = rep.recoded.at(n - k + 1, BoundKind::NormBound, WordClass::Markov);
        PrefixShiftCheck sc;
        sc.n = n;
        sc.direct = rep.direct_upper.back().value;
        sc.bound = detail::root(std::pow(alpha, static_cast<double>(k - 1)) * rp.power, n);
        sc.holds = sc.direct <= sc.bound * (1.0 + 1e-12) + 1e-300;
        rep.shift_checks.push_back(sc);
    }

    for (std::size_t m = 1; m <= m_max; ++m) {
        double sup = 0.0;
        bool any = false;
        detail::walk_words(
            set, m,
            [&](std::span<const std::size_t> p) {
                if (p.size() < k + 1) return true;
                return c.allows(Tuple(p.end() - static_cast<std::ptrdiff_t>(k + 1), p.end()));
            },
            [&](const std::vector<std::size_t>& w, const Matrix<T>& prod) {
                if (!c.admits_cyclically(w)) return;
                any = true;
                sup = std::max(sup, spectral_radius(prod, rel_tol));
            });
        rep.direct_lower.push_back(detail::make_point(m, sup, BoundKind::SpectralBound,
                                                      WordClass::PeriodicallyExtendable, false, any));
        const auto& rl = rep.recoded.at(m, BoundKind::SpectralBound, WordClass::PeriodicallyExtendable);
        rep.lower_diff = std::max(rep.lower_diff, std::abs(rl.value - rep.direct_lower.back().value));
    }

    rep.direct_best_upper = rep.direct_upper.front().value;
    for (const auto& p : rep.direct_upper) rep.direct_best_upper = std::min(rep.direct_best_upper, p.value);
    for (const auto& p : rep.direct_lower) rep.direct_best_lower = std::max(rep.direct_best_lower, p.value);

    const bool lower_ok = rep.lower_diff <= tol * (1.0 + rep.direct_best_lower);
    const bool shift_ok = std::all_of(rep.shift_checks.begin(), rep.shift_checks.end(),
                                      [](const PrefixShiftCheck& s) { return s.holds; });
    rep.passed = lower_ok && shift_ok;
    return rep;
}

} // namespace mjsr
