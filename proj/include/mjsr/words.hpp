#pragma once

/**
 * \file   mjsr/words.hpp
 * \brief  Admissibility of index words over the transition digraph:
 *         classification, lazy lexicographic enumeration and counting.
 */

#include <mjsr/core.hpp>

#include <cstdint>
#include <iterator>
#include <limits>

namespace mjsr {

/// Transition digraph of Omega: edge j -> i iff omega_ij = 1, plus the
/// per-node flags used for O(1) class tests.
class TransitionDigraph {
  public:
    explicit TransitionDigraph(TransitionMatrix omega)
        : omega_(std::move(omega)), successors_(omega_.size()), has_out_edge_(omega_.size(), false) {
        const std::size_t n = omega_.size();
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t i = 0; i < n; ++i)
                if (omega_(i, j)) {
                    successors_[j].push_back(i); // ascending, so DFS order is lexicographic
                    has_out_edge_[j] = true;
                }
        can_reach_cycle_ = detail::nodes_reaching_cycle(omega_);
    }

    std::size_t size() const noexcept { return omega_.size(); }
    const TransitionMatrix& omega() const noexcept { return omega_; }
    bool edge(std::size_t from, std::size_t to) const { return omega_(to, from); }
    const std::vector<std::size_t>& successors(std::size_t j) const { return successors_[j]; }
    bool has_out_edge(std::size_t j) const { return has_out_edge_[j]; }
    bool can_reach_cycle(std::size_t j) const { return can_reach_cycle_[j]; }

    bool has_cycle() const {
        return std::find(can_reach_cycle_.begin(), can_reach_cycle_.end(), true) != can_reach_cycle_.end();
    }

    /// Class test for a word already known to be a chain word.
    bool chain_word_in(WordClass cls, std::size_t first, std::size_t last) const {
        switch (cls) {
            case WordClass::Chain:                  return true;
            case WordClass::Markov:                 return has_out_edge_[last];
            case WordClass::InfinitelyExtendable:   return can_reach_cycle_[last];
            case WordClass::PeriodicallyExtendable: return omega_(first, last);
        }
        return false;
    }

  private:
    TransitionMatrix omega_;
    std::vector<std::vector<std::size_t>> successors_;
    std::vector<bool> has_out_edge_;
    std::vector<bool> can_reach_cycle_;
};

inline void check_word(const Word& w, std::size_t alphabet) {
    if (w.letters.empty()) throw ValidationError(ErrorKind::IndexOutOfRange, "word", "empty word");
    for (std::size_t k = 0; k < w.letters.size(); ++k)
        if (w.letters[k] >= alphabet)
            throw ValidationError(ErrorKind::IndexOutOfRange, "word[" + std::to_string(k + 1) + "]",
                                  "letter " + std::to_string(w.letters[k] + 1) + " not in 1.." +
                                      std::to_string(alphabet));
}

inline WordClassSet classify(const Word& w, const TransitionDigraph& g) {
    check_word(w, g.size());
    WordClassSet out;
    for (std::size_t k = 0; k + 1 < w.letters.size(); ++k)
        if (!g.edge(w.letters[k], w.letters[k + 1])) return out;
    for (auto cls : all_word_classes)
        if (g.chain_word_in(cls, w.front(), w.back())) out.insert(cls);
    return out;
}

inline WordClassSet classify(const Word& w, const TransitionMatrix& omega) {
    return classify(w, TransitionDigraph(omega));
}

/// Lazy depth-first enumeration of the length-n words of a class, in
/// lexicographic order. Only transitions allowed by Omega are followed, so
/// the work is proportional to the number of chain words of length <= n.
class WordStream {
  public:
    WordStream(const TransitionDigraph& g, std::size_t n, WordClass cls)
        : g_(&g), n_(n), cls_(cls), letters_(n), next_idx_(n, 0) {
        if (n == 0) throw std::invalid_argument("WordStream: word length must be positive");
        // every prefix of an infinitely extendable word is one as well
        prune_ = implies(cls, WordClass::InfinitelyExtendable);
    }

    /// Advances to the next word; false once the stream is exhausted.
    bool next() {
        if (done_) return false;
        std::size_t k = started_ ? n_ - 1 : 0;
        started_ = true;
        for (;;) {
            if (advance(k)) {
                if (k + 1 == n_) {
                    if (g_->chain_word_in(cls_, letters_.front(), letters_.back())) return true;
                    continue;
                }
                next_idx_[++k] = 0;
                continue;
            }
            if (k == 0) {
                done_ = true;
                return false;
            }
            --k;
        }
    }

    Word current() const { return Word{letters_}; }
    const std::vector<std::size_t>& letters() const noexcept { return letters_; }

    class iterator {
      public:
        using iterator_category = std::input_iterator_tag;
        using value_type = Word;
        using difference_type = std::ptrdiff_t;

        iterator() = default;
        explicit iterator(WordStream* s) : s_(s) { ++*this; }

        Word operator*() const { return s_->current(); }
        iterator& operator++() {
            if (!s_->next()) s_ = nullptr;
            return *this;
        }
        void operator++(int) { ++*this; }
        friend bool operator==(const iterator& a, const iterator& b) { return a.s_ == b.s_; }

      private:
        WordStream* s_ = nullptr;
    };

    iterator begin() { return iterator(this); }
    iterator end() { return iterator(); }

  private:
    bool advance(std::size_t k) {
        const std::size_t alphabet = g_->size();
        for (;;) {
            std::size_t cand;
            if (k == 0) {
                if (next_idx_[0] >= alphabet) return false;
                cand = next_idx_[0]++;
            } else {
                const auto& succ = g_->successors(letters_[k - 1]);
                if (next_idx_[k] >= succ.size()) return false;
                cand = succ[next_idx_[k]++];
            }
            if (prune_ && !g_->can_reach_cycle(cand)) continue;
            letters_[k] = cand;
            return true;
        }
    }

    const TransitionDigraph* g_;
    std::size_t n_;
    WordClass cls_;
    bool prune_ = false;
    bool started_ = false;
    bool done_ = false;
    std::vector<std::size_t> letters_;
    std::vector<std::size_t> next_idx_;
};

/// Materialises a stream; convenient for tests and small listings.
inline std::vector<Word> enumerate(const TransitionDigraph& g, std::size_t n, WordClass cls) {
    std::vector<Word> out;
    WordStream s(g, n, cls);
    while (s.next()) out.push_back(s.current());
    return out;
}

inline std::vector<Word> enumerate(const TransitionMatrix& omega, std::size_t n, WordClass cls) {
    return enumerate(TransitionDigraph(omega), n, cls);
}

namespace detail {

inline std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) {
    const std::uint64_t s = a + b;
    return s < a ? std::numeric_limits<std::uint64_t>::max() : s;
}

inline std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
    if (a == 0 || b == 0) return 0;
    if (a > std::numeric_limits<std::uint64_t>::max() / b) return std::numeric_limits<std::uint64_t>::max();
    return a * b;
}

} // namespace detail

/// Number of length-n words in a class, by transfer-matrix counting
/// (saturates at 2^64 - 1). ends[i] counts chain words ending in letter i.
inline std::uint64_t count(const TransitionDigraph& g, std::size_t n, WordClass cls) {
    if (n == 0) throw std::invalid_argument("count: word length must be positive");
    const std::size_t alphabet = g.size();
    const auto& omega = g.omega();

    if (cls == WordClass::PeriodicallyExtendable) {
        // closed walks of length n: trace(Omega^n)
        std::uint64_t total = 0;
        for (std::size_t start = 0; start < alphabet; ++start) {
            std::vector<std::uint64_t> ends(alphabet, 0);
            ends[start] = 1;
            for (std::size_t step = 1; step < n; ++step) {
                std::vector<std::uint64_t> nxt(alphabet, 0);
                for (std::size_t j = 0; j < alphabet; ++j)
                    if (ends[j])
                        for (auto i : g.successors(j)) nxt[i] = detail::sat_add(nxt[i], ends[j]);
                ends = std::move(nxt);
            }
            for (std::size_t j = 0; j < alphabet; ++j)
                if (omega(start, j)) total = detail::sat_add(total, ends[j]);
        }
        return total;
    }

    std::vector<std::uint64_t> ends(alphabet, 1);
    for (std::size_t step = 1; step < n; ++step) {
        std::vector<std::uint64_t> nxt(alphabet, 0);
        for (std::size_t j = 0; j < alphabet; ++j)
            if (ends[j])
                for (auto i : g.successors(j)) nxt[i] = detail::sat_add(nxt[i], ends[j]);
        ends = std::move(nxt);
    }
    std::uint64_t total = 0;
    for (std::size_t j = 0; j < alphabet; ++j)
        if (g.chain_word_in(cls, j, j)) total = detail::sat_add(total, ends[j]);
    return total;
}

inline std::uint64_t count(const TransitionMatrix& omega, std::size_t n, WordClass cls) {
    return count(TransitionDigraph(omega), n, cls);
}

} // namespace mjsr
