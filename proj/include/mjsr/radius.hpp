#pragma once

/**
 * \file   mjsr/radius.hpp
 * \brief  Finite-n bounds on the Markovian joint spectral radius.
 *
 * For a length-n word (i_1, ..., i_n) the product is A_{i_n} ... A_{i_1}:
 * i_1 acts first and every new letter multiplies on the left.
 *
 *  - rho_n      sup ||product||^(1/n) over a word class (upper bound for
 *               the Markov class, for every n)
 *  - rho_hat_n  sup rho(product)^(1/n) (lower bound, periodic class)
 *  - the same two quantities for the lifted set over all N^n words, which
 *    coincide with the Markov / periodic values
 *
 * A supremum over an empty word set is 0; `empty_word_set` records that case.
 */

#include <mjsr/lift.hpp>
#include <mjsr/words.hpp>

#include <array>
#include <thread>

namespace mjsr {

enum class BoundKind { NormBound, SpectralBound };

inline std::string_view to_string(BoundKind k) { return k == BoundKind::NormBound ? "norm" : "spectral"; }

struct BoundPoint {
    std::size_t n = 0;
    double value = 0.0;      ///< sup(...)^(1/n)
    double power = 0.0;      ///< sup(...) itself, i.e. value^n
    BoundKind kind = BoundKind::NormBound;
    WordClass cls = WordClass::Markov;
    bool lifted = false;
    bool empty_word_set = false;
};

/// How products of lifted members are formed.
enum class LiftEngine {
    Structured, ///< block-sparse: base product plus factor structure
    Dense,      ///< explicit (Nd) x (Nd) products over all N^n words
};

namespace detail {

inline constexpr std::size_t class_count = 4;

/// Per-length suprema of ||P|| and rho(P) per word class (not yet rooted).
struct LengthStats {
    std::array<double, class_count> norm_sup{};
    std::array<double, class_count> spec_sup{};
    std::array<bool, class_count> nonempty{};

    void merge(const LengthStats& o) {
        for (std::size_t c = 0; c < class_count; ++c) {
            norm_sup[c] = std::max(norm_sup[c], o.norm_sup[c]);
            spec_sup[c] = std::max(spec_sup[c], o.spec_sup[c]);
            nonempty[c] = nonempty[c] || o.nonempty[c];
        }
    }
};

struct Request {
    std::array<bool, class_count> norm{};
    std::array<bool, class_count> spectral{};

    bool only_cycle_classes() const {
        for (std::size_t c = 0; c < 2; ++c)
            if (norm[c] || spectral[c]) return false;
        return true;
    }
};

inline std::size_t idx(WordClass c) { return static_cast<std::size_t>(c); }

/// Runs `work(first_letter) -> std::vector<LengthStats>` for every first
/// letter, on up to `threads` workers, and merges the results. Merging is a
/// max, so the outcome does not depend on the schedule.
template <typename Work>
std::vector<LengthStats> partitioned(std::size_t alphabet, std::size_t lengths, unsigned threads, Work work) {
    std::vector<std::vector<LengthStats>> parts(alphabet);
    if (threads <= 1 || alphabet <= 1) {
        for (std::size_t f = 0; f < alphabet; ++f) parts[f] = work(f);
    } else {
        std::vector<std::jthread> pool;
        const unsigned workers = std::min<unsigned>(threads, static_cast<unsigned>(alphabet));
        for (unsigned t = 0; t < workers; ++t)
            pool.emplace_back([&, t] {
                for (std::size_t f = t; f < alphabet; f += workers) parts[f] = work(f);
            });
    }
    std::vector<LengthStats> out(lengths + 1);
    for (const auto& p : parts)
        for (std::size_t n = 0; n < p.size() && n < out.size(); ++n) out[n].merge(p[n]);
    return out;
}

/// Depth-first walk over chain words starting with `first`, carrying the
/// running products. Lengths in [n_min, n_max] are evaluated.
template <FieldScalar T>
class ChainWalker {
  public:
    ChainWalker(const MatrixSet<T>& set, const TransitionDigraph& g, std::size_t n_min, std::size_t n_max,
                const Request& req, NormKind norm, double rel_tol)
        : set_(set), g_(g), n_min_(n_min), n_max_(n_max), req_(req), norm_(norm), rel_tol_(rel_tol),
          prune_(req.only_cycle_classes()), products_(n_max), letters_(n_max), stats_(n_max + 1) {}

    std::vector<LengthStats> run(std::size_t first) {
        if (prune_ && !g_.can_reach_cycle(first)) return stats_;
        visit(0, first);
        return stats_;
    }

  private:
    void visit(std::size_t depth, std::size_t letter) {
        letters_[depth] = letter;
        products_[depth] = depth == 0 ? set_[letter] : mat_mul(set_[letter], products_[depth - 1]);
        const std::size_t n = depth + 1;
        if (n >= n_min_) evaluate(n);
        if (n == n_max_) return;
        for (auto next : g_.successors(letter)) {
            if (prune_ && !g_.can_reach_cycle(next)) continue;
            visit(depth + 1, next);
        }
    }

    void evaluate(std::size_t n) {
        const auto& p = products_[n - 1];
        auto& st = stats_[n];
        double norm = -1.0, spec = -1.0;
        for (auto cls : all_word_classes) {
            const std::size_t c = idx(cls);
            if (!req_.norm[c] && !req_.spectral[c]) continue;
            if (!g_.chain_word_in(cls, letters_[0], letters_[n - 1])) continue;
            st.nonempty[c] = true;
            if (req_.norm[c]) {
                if (norm < 0) norm = operator_norm(p, norm_);
                st.norm_sup[c] = std::max(st.norm_sup[c], norm);
            }
            if (req_.spectral[c]) {
                if (spec < 0) spec = spectral_radius(p, rel_tol_);
                st.spec_sup[c] = std::max(st.spec_sup[c], spec);
            }
        }
    }

    const MatrixSet<T>& set_;
    const TransitionDigraph& g_;
    std::size_t n_min_, n_max_;
    Request req_;
    NormKind norm_;
    double rel_tol_;
    bool prune_;
    std::vector<Matrix<T>> products_;
    std::vector<std::size_t> letters_;
    std::vector<LengthStats> stats_;
};

template <FieldScalar T>
std::vector<LengthStats> collect(const MatrixSet<T>& set, const TransitionDigraph& g, std::size_t n_min,
                                 std::size_t n_max, const Request& req, NormKind norm, double rel_tol,
                                 unsigned threads) {
    if (n_min == 0 || n_max < n_min) throw std::invalid_argument("word lengths must satisfy 1 <= n_min <= n_max");
    if (g.size() != set.size())
        throw ValidationError(ErrorKind::DimensionMismatch, "omega", "size does not match the matrix set");
    return partitioned(set.size(), n_max, threads, [&](std::size_t first) {
        ChainWalker<T> walker(set, g, n_min, n_max, req, norm, rel_tol);
        return walker.run(first);
    });
}

/// Every one of the N^n words over an arbitrary set of block matrices,
/// with explicit dense products. Stats are stored under the Chain slot.
/// A zero prefix product only has zero extensions, so its subtree is
/// credited with zeros without being multiplied out.
template <FieldScalar T>
std::vector<LengthStats> collect_all_words_dense(const std::vector<Matrix<T>>& members, std::size_t blocks,
                                                 std::size_t block_dim, std::size_t n, NormKind norm,
                                                 double rel_tol, bool want_spectral, unsigned threads) {
    if (n == 0) throw std::invalid_argument("word length must be positive");
    const std::size_t alphabet = members.size();
    const std::size_t c = idx(WordClass::Chain);
    return partitioned(alphabet, n, threads, [&](std::size_t first) {
        std::vector<LengthStats> stats(n + 1);
        stats[n].nonempty[c] = true;
        std::vector<Matrix<T>> products(n);
        auto visit = [&](auto&& self, std::size_t depth, std::size_t letter) -> void {
            products[depth] = depth == 0 ? members[letter] : mat_mul(members[letter], products[depth - 1]);
            if (depth + 1 == n) {
                const auto& p = products[depth];
                stats[n].norm_sup[c] = std::max(stats[n].norm_sup[c], block_norm(p, blocks, block_dim, norm));
                if (want_spectral) stats[n].spec_sup[c] = std::max(stats[n].spec_sup[c], spectral_radius(p, rel_tol));
                return;
            }
            if (products[depth].is_zero()) return;
            for (std::size_t next = 0; next < alphabet; ++next) self(self, depth + 1, next);
        };
        visit(visit, 0, first);
        return stats;
    });
}

inline double root(double power, std::size_t n) {
    return power <= 0.0 ? 0.0 : std::pow(power, 1.0 / static_cast<double>(n));
}

inline BoundPoint make_point(std::size_t n, double power, BoundKind kind, WordClass cls, bool lifted, bool nonempty) {
    return BoundPoint{n, nonempty ? root(power, n) : 0.0, nonempty ? power : 0.0, kind, cls, lifted, !nonempty};
}

inline void require_spectral_class(WordClass cls) {
    if (cls != WordClass::Markov && cls != WordClass::PeriodicallyExtendable)
        throw std::invalid_argument("spectral bounds are defined for the markov and periodic classes only");
}

} // namespace detail

//---------------------------------------------------------------------------
// Unlifted bounds
//---------------------------------------------------------------------------
template <FieldScalar T>
BoundPoint rho_n(const MatrixSet<T>& set, const TransitionMatrix& omega, std::size_t n,
                 WordClass cls = WordClass::Markov, NormKind norm = NormKind::RowSumMax, unsigned threads = 1) {
    detail::Request req;
    req.norm[detail::idx(cls)] = true;
    const auto stats = detail::collect(set, TransitionDigraph(omega), n, n, req, norm, default_rel_tol, threads);
    const auto c = detail::idx(cls);
    return detail::make_point(n, stats[n].norm_sup[c], BoundKind::NormBound, cls, false, stats[n].nonempty[c]);
}

template <FieldScalar T>
BoundPoint rho_hat_n(const MatrixSet<T>& set, const TransitionMatrix& omega, std::size_t n,
                     WordClass cls = WordClass::PeriodicallyExtendable, double rel_tol = default_rel_tol,
                     unsigned threads = 1) {
    detail::require_spectral_class(cls);
    detail::Request req;
    req.spectral[detail::idx(cls)] = true;
    const auto stats =
        detail::collect(set, TransitionDigraph(omega), n, n, req, NormKind::RowSumMax, rel_tol, threads);
    const auto c = detail::idx(cls);
    return detail::make_point(n, stats[n].spec_sup[c], BoundKind::SpectralBound, cls, false, stats[n].nonempty[c]);
}

//---------------------------------------------------------------------------
// Lifted bounds (all N^n words, no admissibility filter)
//---------------------------------------------------------------------------
namespace detail {

/// Structured engine: walks letter sequences over the lifted alphabet but
/// stops a branch as soon as the factor scalar becomes 0, since the lifted
/// product is zero from then on. Each surviving word is evaluated through
/// its StructuredLiftProduct.
template <FieldScalar T>
LengthStats lifted_structured(const LiftedSet<T>& lifted, std::size_t n, NormKind norm, double rel_tol,
                              bool want_spectral) {
    if (n == 0) throw std::invalid_argument("word length must be positive");
    const auto& omega = lifted.omega();
    const auto& base = lifted.base();
    const std::size_t alphabet = base.size();
    const std::size_t c = idx(WordClass::Chain);
    LengthStats st;
    st.nonempty[c] = true;

    std::vector<Matrix<T>> products(n);
    Word w;
    w.letters.resize(n);
    auto visit = [&](auto&& self, std::size_t depth, std::size_t letter) -> void {
        w.letters[depth] = letter;
        products[depth] = depth == 0 ? base[letter] : mat_mul(base[letter], products[depth - 1]);
        if (depth + 1 == n) {
            StructuredLiftProduct<T> prod{factor_product_structure(omega, w), products[depth]};
            st.norm_sup[c] = std::max(st.norm_sup[c], prod.block_norm(norm));
            if (want_spectral) st.spec_sup[c] = std::max(st.spec_sup[c], prod.spectral_radius(rel_tol));
            return;
        }
        for (std::size_t next = 0; next < alphabet; ++next)
            if (omega(next, letter)) self(self, depth + 1, next);
    };
    for (std::size_t first = 0; first < alphabet; ++first) visit(visit, 0, first);
    return st;
}

template <FieldScalar T>
LengthStats lifted_stats(const LiftedSet<T>& lifted, std::size_t n, NormKind norm, double rel_tol,
                         bool want_spectral, LiftEngine engine, unsigned threads) {
    if (engine == LiftEngine::Structured) return lifted_structured(lifted, n, norm, rel_tol, want_spectral);
    return collect_all_words_dense(lifted.members().members(), lifted.blocks(), lifted.block_dim(), n, norm,
                                   rel_tol, want_spectral, threads)[n];
}

} // namespace detail

template <FieldScalar T>
BoundPoint rho_n_lifted(const LiftedSet<T>& lifted, std::size_t n, NormKind norm = NormKind::RowSumMax,
                        LiftEngine engine = LiftEngine::Structured, unsigned threads = 1) {
    const auto st = detail::lifted_stats(lifted, n, norm, default_rel_tol, false, engine, threads);
    const auto c = detail::idx(WordClass::Chain);
    return detail::make_point(n, st.norm_sup[c], BoundKind::NormBound, WordClass::Chain, true, true);
}

template <FieldScalar T>
BoundPoint rho_hat_n_lifted(const LiftedSet<T>& lifted, std::size_t n, double rel_tol = default_rel_tol,
                            LiftEngine engine = LiftEngine::Structured, unsigned threads = 1) {
    const auto st = detail::lifted_stats(lifted, n, NormKind::RowSumMax, rel_tol, true, engine, threads);
    const auto c = detail::idx(WordClass::Chain);
    return detail::make_point(n, st.spec_sup[c], BoundKind::SpectralBound, WordClass::Chain, true, true);
}

/// Norm and spectral bounds of an arbitrary block-matrix family over all
/// N^n words, with the block norm as the matrix norm. Used for lifts given
/// as plain matrices (e.g. read back from a file).
template <FieldScalar T>
std::pair<BoundPoint, BoundPoint> block_family_bounds(const MatrixSet<T>& members, std::size_t blocks,
                                                      std::size_t block_dim, std::size_t n, NormKind norm,
                                                      double rel_tol = default_rel_tol, unsigned threads = 1) {
    const auto st =
        detail::collect_all_words_dense(members.members(), blocks, block_dim, n, norm, rel_tol, true, threads)[n];
    const auto c = detail::idx(WordClass::Chain);
    return {detail::make_point(n, st.norm_sup[c], BoundKind::NormBound, WordClass::Chain, true, true),
            detail::make_point(n, st.spec_sup[c], BoundKind::SpectralBound, WordClass::Chain, true, true)};
}

//---------------------------------------------------------------------------
// Lifted = unlifted
//---------------------------------------------------------------------------
struct LiftEqualityCheck {
    std::size_t n = 0;
    double lhs_norm = 0; ///< rho_n of the lift
    double rhs_norm = 0; ///< rho_n, Markov class
    double lhs_spec = 0; ///< rho_hat_n of the lift
    double rhs_spec = 0; ///< rho_hat_n, periodic class
    double norm_diff = 0;
    double spec_diff = 0;
    double max_abs_diff = 0;
    bool passed = false;
};

/// Computes both sides independently: the lift through explicit dense
/// products over all N^n words, the original through class-filtered
/// enumeration. Passes when each difference is within tol * (1 + value).
template <FieldScalar T>
LiftEqualityCheck verify_theorem_main(const MatrixSet<T>& set, const TransitionMatrix& omega, std::size_t n,
                                 NormKind norm = NormKind::RowSumMax, double rel_tol = default_rel_tol,
                                 double tol = 1e-9, unsigned threads = 1) {
    const LiftedSet<T> lifted(set, omega);
    const auto lhs_n = rho_n_lifted(lifted, n, norm, LiftEngine::Dense, threads);
    const auto lhs_s = rho_hat_n_lifted(lifted, n, rel_tol, LiftEngine::Dense, threads);
    const auto rhs_n = rho_n(set, omega, n, WordClass::Markov, norm, threads);
    const auto rhs_s = rho_hat_n(set, omega, n, WordClass::PeriodicallyExtendable, rel_tol, threads);

    LiftEqualityCheck r;
    r.n = n;
    r.lhs_norm = lhs_n.value;
    r.rhs_norm = rhs_n.value;
    r.lhs_spec = lhs_s.value;
    r.rhs_spec = rhs_s.value;
    r.norm_diff = std::abs(r.lhs_norm - r.rhs_norm);
    r.spec_diff = std::abs(r.lhs_spec - r.rhs_spec);
    r.max_abs_diff = std::max(r.norm_diff, r.spec_diff);
    r.passed = r.norm_diff <= tol * (1.0 + std::max(r.lhs_norm, r.rhs_norm)) &&
               r.spec_diff <= tol * (1.0 + std::max(r.lhs_spec, r.rhs_spec));
    return r;
}

//---------------------------------------------------------------------------
// Sandwich
//---------------------------------------------------------------------------
/// rho^(0)_n <= alpha^(1/n) rho_{n-1}^((n-1)/n) at one n.
struct CrossBoundCheck {
    std::size_t n = 0;
    double lhs = 0;    ///< rho^(0)_n
    double rhs = 0;    ///< alpha^(1/n) rho_{n-1}^((n-1)/n)
    double margin = 0; ///< rhs - lhs
    bool holds = false;
};

struct SandwichReport {
    std::vector<BoundPoint> points; ///< per n: Markov and upper-class norm bounds, periodic spectral, chain norm
    double best_lower = 0;          ///< max_n rho_hat_n, periodic class
    double best_upper = 0;          ///< min_n rho_n over the upper-bound class (Markov by default)
    double gap = 0;
    double alpha = 0;               ///< max_i ||A_i||
    std::vector<CrossBoundCheck> cross_bounds;

    const BoundPoint& at(std::size_t n, BoundKind kind, WordClass cls) const {
        for (const auto& p : points)
            if (p.n == n && p.kind == kind && p.cls == cls) return p;
        throw std::out_of_range("no bound point for n = " + std::to_string(n));
    }
};

/// Raised when a computed lower bound exceeds a computed upper bound.
class InvariantViolation : public std::logic_error {
  public:
    using std::logic_error::logic_error;
};

template <FieldScalar T>
double max_member_norm(const MatrixSet<T>& set, NormKind norm) {
    double alpha = 0.0;
    for (const auto& m : set.members()) alpha = std::max(alpha, operator_norm(m, norm));
    return alpha;
}

template <FieldScalar T>
SandwichReport sandwich(const MatrixSet<T>& set, const TransitionMatrix& omega, std::size_t n_max,
                        NormKind norm = NormKind::RowSumMax, double rel_tol = default_rel_tol,
                        WordClass upper_class = WordClass::Markov, unsigned threads = 1) {
    if (n_max == 0) throw std::invalid_argument("sandwich: n_max must be at least 1");
    if (upper_class == WordClass::PeriodicallyExtendable)
        throw std::invalid_argument("sandwich: the periodic class gives no upper bound");
    using detail::idx;
    detail::Request req;
    req.norm[idx(WordClass::Markov)] = true;
    req.norm[idx(upper_class)] = true;
    req.norm[idx(WordClass::Chain)] = true;
    req.spectral[idx(WordClass::PeriodicallyExtendable)] = true;
    const auto stats = detail::collect(set, TransitionDigraph(omega), 1, n_max, req, norm, rel_tol, threads);

    SandwichReport rep;
    rep.alpha = max_member_norm(set, norm);
    const auto m = idx(WordClass::Markov), p = idx(WordClass::PeriodicallyExtendable), c = idx(WordClass::Chain);
    const auto u = idx(upper_class);
    for (std::size_t n = 1; n <= n_max; ++n) {
        const auto& st = stats[n];
        const auto upper = detail::make_point(n, st.norm_sup[u], BoundKind::NormBound, upper_class, false,
                                              st.nonempty[u]);
        const auto lower = detail::make_point(n, st.spec_sup[p], BoundKind::SpectralBound,
                                              WordClass::PeriodicallyExtendable, false, st.nonempty[p]);
        const auto chain = detail::make_point(n, st.norm_sup[c], BoundKind::NormBound, WordClass::Chain, false,
                                              st.nonempty[c]);
        if (upper_class != WordClass::Markov)
            rep.points.push_back(detail::make_point(n, st.norm_sup[m], BoundKind::NormBound, WordClass::Markov,
                                                    false, st.nonempty[m]));
        if (upper_class != WordClass::Chain) rep.points.push_back(upper);
        rep.points.push_back(lower);
        rep.points.push_back(chain);
        rep.best_upper = n == 1 ? upper.value : std::min(rep.best_upper, upper.value);
        rep.best_lower = std::max(rep.best_lower, lower.value);
        if (n >= 2) {
            const double prev_power = stats[n - 1].nonempty[m] ? stats[n - 1].norm_sup[m] : 0.0;
            CrossBoundCheck cb;
            cb.n = n;
            cb.lhs = chain.value;
            cb.rhs = detail::root(rep.alpha * prev_power, n);
            cb.margin = cb.rhs - cb.lhs;
            cb.holds = cb.lhs <= cb.rhs * (1.0 + 1e-12) + 1e-300;
            rep.cross_bounds.push_back(cb);
        }
    }
    rep.gap = rep.best_upper - rep.best_lower;
    if (rep.best_lower > rep.best_upper + 1e-9)
        throw InvariantViolation("lower bound " + std::to_string(rep.best_lower) + " exceeds upper bound " +
                                 std::to_string(rep.best_upper));
    return rep;
}

/// Unconstrained bounds: the sandwich with every transition allowed.
template <FieldScalar T>
SandwichReport classical_bounds(const MatrixSet<T>& set, std::size_t n_max, NormKind norm = NormKind::RowSumMax,
                                double rel_tol = default_rel_tol, unsigned threads = 1) {
    return sandwich(set, TransitionMatrix::all_ones(set.size()), n_max, norm, rel_tol, WordClass::Markov, threads);
}

/// The four norm bounds rho^(per)_n <= rho^(inf)_n <= rho_n <= rho^(0)_n.
struct ClassChain {
    BoundPoint periodic, infinite, markov, chain;

    bool monotone(double tol = 1e-12) const {
        auto le = [tol](double a, double b) { return a <= b * (1.0 + tol) + tol; };
        return le(periodic.value, infinite.value) && le(infinite.value, markov.value) && le(markov.value, chain.value);
    }
};

template <FieldScalar T>
ClassChain alternative_class_chain(const MatrixSet<T>& set, const TransitionMatrix& omega, std::size_t n,
                                   NormKind norm = NormKind::RowSumMax, unsigned threads = 1) {
    detail::Request req;
    for (auto cls : all_word_classes) req.norm[detail::idx(cls)] = true;
    const auto stats = detail::collect(set, TransitionDigraph(omega), n, n, req, norm, default_rel_tol, threads);
    auto point = [&](WordClass cls) {
        const auto c = detail::idx(cls);
        return detail::make_point(n, stats[n].norm_sup[c], BoundKind::NormBound, cls, false, stats[n].nonempty[c]);
    };
    return ClassChain{point(WordClass::PeriodicallyExtendable), point(WordClass::InfinitelyExtendable),
                      point(WordClass::Markov), point(WordClass::Chain)};
}

/// Work estimate for bounds up to n_max: sum over n of (#chain words) * n.
inline std::uint64_t estimated_products(const TransitionMatrix& omega, std::size_t n_max) {
    const TransitionDigraph g(omega);
    std::uint64_t total = 0;
    for (std::size_t n = 1; n <= n_max; ++n)
        total = detail::sat_add(total, detail::sat_mul(count(g, n, WordClass::Chain), n));
    return total;
}

} // namespace mjsr
