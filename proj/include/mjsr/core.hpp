#pragma once

/**
 * \file   mjsr/core.hpp
 * \brief  Domain model: matrices, matrix sets, transition matrices, words
 *         and the word-class taxonomy.
 *
 * Letters are stored 0-based. Everything that faces a user (file formats,
 * printed words, error locations) is 1-based.
 */

#include <algorithm>
#include <cmath>
#include <complex>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <vector>

namespace mjsr {

//---------------------------------------------------------------------------
// Errors
//---------------------------------------------------------------------------
enum class ErrorKind {
    DimensionMismatch,
    NonBinary,
    NonSquare,
    NonFinite,
    IndexOutOfRange,
    EmptyConstraint,
};

inline std::string_view to_string(ErrorKind k) {
    switch (k) {
        case ErrorKind::DimensionMismatch: return "dimension mismatch";
        case ErrorKind::NonBinary:         return "non-binary transition entry";
        case ErrorKind::NonSquare:         return "non-square matrix";
        case ErrorKind::NonFinite:         return "non-finite entry";
        case ErrorKind::IndexOutOfRange:   return "index out of range";
        case ErrorKind::EmptyConstraint:   return "empty constraint";
    }
    return "unknown error";
}

/// Raised for every malformed input. `location()` names the offending item
/// in user-facing (1-based) terms, e.g. "omega[2,3]" or "matrices[1]".
class ValidationError : public std::runtime_error {
  public:
    ValidationError(ErrorKind kind, std::string location, const std::string& detail = {})
        : std::runtime_error(compose(kind, location, detail)),
          kind_(kind), location_(std::move(location)) {}

    ErrorKind kind() const noexcept { return kind_; }
    const std::string& location() const noexcept { return location_; }

  private:
    static std::string compose(ErrorKind kind, const std::string& loc, const std::string& detail) {
        std::string msg(to_string(kind));
        if (!loc.empty()) msg += " at " + loc;
        if (!detail.empty()) msg += ": " + detail;
        return msg;
    }

    ErrorKind kind_;
    std::string location_;
};

//---------------------------------------------------------------------------
// Scalars
//---------------------------------------------------------------------------
using Complex = std::complex<double>;

template <typename T> struct is_complex : std::false_type {};
template <typename T> struct is_complex<std::complex<T>> : std::true_type {};
template <typename T> inline constexpr bool is_complex_v = is_complex<T>::value;

/// Scalar types the numeric kernels accept: the real and complex fields.
template <typename T>
concept FieldScalar = std::same_as<T, double> || std::same_as<T, Complex>;

/// Anything a dense matrix may hold; integers are used for exact 0/1 algebra.
template <typename T>
concept MatrixScalar = FieldScalar<T> || std::same_as<T, std::int64_t>;

enum class FieldTag { Real, Complex };

template <typename T>
bool is_finite(const T& x) {
    if constexpr (is_complex_v<T>) return std::isfinite(x.real()) && std::isfinite(x.imag());
    else if constexpr (std::is_floating_point_v<T>) return std::isfinite(x);
    else return true;
}

//---------------------------------------------------------------------------
// Matrix
//---------------------------------------------------------------------------
/// Dense row-major matrix.
template <MatrixScalar T>
class Matrix {
  public:
    using value_type = T;

    Matrix() = default;

    Matrix(std::size_t rows, std::size_t cols, T fill = T{})
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    Matrix(std::size_t rows, std::size_t cols, std::vector<T> entries)
        : rows_(rows), cols_(cols), data_(std::move(entries)) {
        if (data_.size() != rows_ * cols_)
            throw ValidationError(ErrorKind::DimensionMismatch, "entries",
                                  "expected " + std::to_string(rows_ * cols_) + " entries, got " +
                                      std::to_string(data_.size()));
    }

    Matrix(std::initializer_list<std::initializer_list<T>> rows) {
        rows_ = rows.size();
        cols_ = rows_ ? rows.begin()->size() : 0;
        data_.reserve(rows_ * cols_);
        std::size_t r = 0;
        for (const auto& row : rows) {
            ++r;
            if (row.size() != cols_)
                throw ValidationError(ErrorKind::DimensionMismatch, "row " + std::to_string(r));
            data_.insert(data_.end(), row.begin(), row.end());
        }
    }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = T{1};
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool is_square() const noexcept { return rows_ == cols_; }
    bool empty() const noexcept { return data_.empty(); }

    T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<T> entries() noexcept { return data_; }
    std::span<const T> entries() const noexcept { return data_; }

    bool is_zero() const {
        return std::all_of(data_.begin(), data_.end(), [](const T& x) { return x == T{}; });
    }

    Matrix& operator*=(const T& s) {
        for (auto& x : data_) x *= s;
        return *this;
    }

    friend Matrix operator*(const T& s, Matrix m) { return m *= s; }

    friend bool operator==(const Matrix&, const Matrix&) = default;

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

using RealMatrix = Matrix<double>;
using ComplexMatrix = Matrix<Complex>;
using IntMatrix = Matrix<std::int64_t>;

/// Element-wise conversion, e.g. exact 0/1 factors into a field.
template <MatrixScalar To, MatrixScalar From>
Matrix<To> matrix_cast(const Matrix<From>& m) {
    std::vector<To> out;
    out.reserve(m.entries().size());
    for (const auto& x : m.entries()) {
        if constexpr (std::same_as<From, std::int64_t>) out.push_back(To(static_cast<double>(x)));
        else out.push_back(To(x));
    }
    return Matrix<To>(m.rows(), m.cols(), std::move(out));
}

//---------------------------------------------------------------------------
// MatrixSet
//---------------------------------------------------------------------------
/// The finite family {A_1, ..., A_N} of d x d matrices.
template <FieldScalar T>
class MatrixSet {
  public:
    MatrixSet() = default;

    explicit MatrixSet(std::vector<Matrix<T>> members) : members_(std::move(members)) {
        if (members_.empty())
            throw ValidationError(ErrorKind::DimensionMismatch, "matrices", "at least one matrix required");
        dim_ = members_.front().rows();
        if (dim_ == 0) throw ValidationError(ErrorKind::DimensionMismatch, "matrices[1]", "empty matrix");
        for (std::size_t i = 0; i < members_.size(); ++i) {
            const auto& m = members_[i];
            const std::string loc = "matrices[" + std::to_string(i + 1) + "]";
            if (!m.is_square()) throw ValidationError(ErrorKind::NonSquare, loc);
            if (m.rows() != dim_)
                throw ValidationError(ErrorKind::DimensionMismatch, loc,
                                      "expected " + std::to_string(dim_) + "x" + std::to_string(dim_));
            for (std::size_t r = 0; r < dim_; ++r)
                for (std::size_t c = 0; c < dim_; ++c)
                    if (!is_finite(m(r, c)))
                        throw ValidationError(ErrorKind::NonFinite, loc + "[" + std::to_string(r + 1) + "," +
                                                                        std::to_string(c + 1) + "]");
        }
    }

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return members_.size(); }
    const Matrix<T>& operator[](std::size_t i) const { return members_[i]; }
    const std::vector<Matrix<T>>& members() const noexcept { return members_; }

    FieldTag field() const noexcept { return is_complex_v<T> ? FieldTag::Complex : FieldTag::Real; }

    /// True when every entry has zero imaginary part.
    bool is_real_valued() const {
        if constexpr (is_complex_v<T>) {
            for (const auto& m : members_)
                for (const auto& x : m.entries())
                    if (x.imag() != 0.0) return false;
        }
        return true;
    }

    MatrixSet scaled(const T& c) const {
        std::vector<Matrix<T>> out = members_;
        for (auto& m : out) m *= c;
        return MatrixSet(std::move(out));
    }

  private:
    std::size_t dim_ = 0;
    std::vector<Matrix<T>> members_;
};

//---------------------------------------------------------------------------
// TransitionMatrix
//---------------------------------------------------------------------------
/// The N x N 0/1 matrix of admissible transitions. Entry (i, j) = 1 allows
/// letter i to follow letter j, i.e. the digraph edge j -> i.
class TransitionMatrix {
  public:
    TransitionMatrix() = default;

    TransitionMatrix(std::size_t n, std::vector<int> entries) : n_(n) {
        if (n == 0) throw ValidationError(ErrorKind::DimensionMismatch, "omega", "empty transition matrix");
        if (entries.size() != n * n)
            throw ValidationError(ErrorKind::DimensionMismatch, "omega",
                                  "expected " + std::to_string(n * n) + " entries");
        bits_.resize(n * n);
        for (std::size_t k = 0; k < entries.size(); ++k) {
            if (entries[k] != 0 && entries[k] != 1)
                throw ValidationError(ErrorKind::NonBinary,
                                      "omega[" + std::to_string(k / n + 1) + "," + std::to_string(k % n + 1) + "]",
                                      "value " + std::to_string(entries[k]));
            bits_[k] = static_cast<std::uint8_t>(entries[k]);
        }
    }

    TransitionMatrix(std::initializer_list<std::initializer_list<int>> rows)
        : TransitionMatrix(rows.size(), flatten(rows)) {}

    static TransitionMatrix all_ones(std::size_t n) { return TransitionMatrix(n, std::vector<int>(n * n, 1)); }
    static TransitionMatrix zeros(std::size_t n) { return TransitionMatrix(n, std::vector<int>(n * n, 0)); }

    std::size_t size() const noexcept { return n_; }

    /// omega_ij, 0-based.
    bool operator()(std::size_t i, std::size_t j) const { return bits_[i * n_ + j] != 0; }

    /// Column j is nonzero, i.e. letter j has some successor.
    bool has_successor(std::size_t j) const {
        for (std::size_t i = 0; i < n_; ++i)
            if ((*this)(i, j)) return true;
        return false;
    }

    IntMatrix to_int_matrix() const {
        IntMatrix m(n_, n_);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j) m(i, j) = (*this)(i, j) ? 1 : 0;
        return m;
    }

    friend bool operator==(const TransitionMatrix&, const TransitionMatrix&) = default;

  private:
    static std::vector<int> flatten(std::initializer_list<std::initializer_list<int>> rows) {
        std::vector<int> out;
        for (const auto& r : rows) {
            if (r.size() != rows.size()) throw ValidationError(ErrorKind::DimensionMismatch, "omega", "not square");
            out.insert(out.end(), r.begin(), r.end());
        }
        return out;
    }

    std::size_t n_ = 0;
    std::vector<std::uint8_t> bits_;
};

//---------------------------------------------------------------------------
// Words and word classes
//---------------------------------------------------------------------------
/// Admissibility notions, from weakest to strongest:
/// PeriodicallyExtendable ⊆ InfinitelyExtendable ⊆ Markov ⊆ Chain.
enum class WordClass { Chain = 0, Markov = 1, InfinitelyExtendable = 2, PeriodicallyExtendable = 3 };

inline constexpr WordClass all_word_classes[] = {WordClass::Chain, WordClass::Markov,
                                                 WordClass::InfinitelyExtendable,
                                                 WordClass::PeriodicallyExtendable};

/// Membership in `stronger` implies membership in `weaker`.
constexpr bool implies(WordClass stronger, WordClass weaker) {
    return static_cast<int>(stronger) >= static_cast<int>(weaker);
}

inline std::string_view to_string(WordClass c) {
    switch (c) {
        case WordClass::Chain:                  return "chain";
        case WordClass::Markov:                 return "markov";
        case WordClass::InfinitelyExtendable:   return "infinite";
        case WordClass::PeriodicallyExtendable: return "periodic";
    }
    return "?";
}

/// Set of word classes a given word belongs to.
class WordClassSet {
  public:
    constexpr void insert(WordClass c) noexcept { bits_ |= bit(c); }
    constexpr bool contains(WordClass c) const noexcept { return (bits_ & bit(c)) != 0; }
    constexpr bool empty() const noexcept { return bits_ == 0; }
    friend constexpr bool operator==(WordClassSet, WordClassSet) = default;

  private:
    static constexpr unsigned bit(WordClass c) noexcept { return 1u << static_cast<unsigned>(c); }
    unsigned bits_ = 0;
};

/// Finite index sequence (i_1, ..., i_n), 0-based letters.
struct Word {
    std::vector<std::size_t> letters;

    static Word from_one_based(std::initializer_list<std::size_t> idx) {
        Word w;
        for (auto i : idx) w.letters.push_back(i - 1);
        return w;
    }

    std::size_t length() const noexcept { return letters.size(); }
    std::size_t front() const { return letters.front(); }
    std::size_t back() const { return letters.back(); }

    /// "(1,3,4)", 1-based.
    std::string to_string() const {
        std::string s = "(";
        for (std::size_t k = 0; k < letters.size(); ++k) {
            if (k) s += ',';
            s += std::to_string(letters[k] + 1);
        }
        return s + ')';
    }

    friend auto operator<=>(const Word&, const Word&) = default;
};

//---------------------------------------------------------------------------
// Instances
//---------------------------------------------------------------------------
template <FieldScalar T>
struct Instance {
    MatrixSet<T> set;
    TransitionMatrix omega;
};

/// Checks that the transition matrix matches the matrix set. The set and
/// the transition matrix validate their own entries on construction.
template <FieldScalar T>
Instance<T> validate_instance(MatrixSet<T> set, TransitionMatrix omega) {
    if (set.size() == 0 || omega.size() == 0)
        throw ValidationError(ErrorKind::DimensionMismatch, "instance", "empty instance");
    if (omega.size() != set.size())
        throw ValidationError(ErrorKind::DimensionMismatch, "omega",
                              std::to_string(set.size()) + " matrices but omega is " +
                                  std::to_string(omega.size()) + "x" + std::to_string(omega.size()));
    return Instance<T>{std::move(set), std::move(omega)};
}

namespace detail {

/// Flags the nodes of the transition digraph from which a directed cycle is
/// reachable (nodes on a cycle included). Sinks are peeled off repeatedly;
/// whatever survives has a successor that also survives, hence reaches a cycle.
inline std::vector<bool> nodes_reaching_cycle(const TransitionMatrix& omega) {
    const std::size_t n = omega.size();
    std::vector<std::size_t> out_degree(n, 0);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) out_degree[j] += omega(i, j) ? 1 : 0;

    std::vector<bool> alive(n, true);
    std::vector<std::size_t> stack;
    for (std::size_t j = 0; j < n; ++j)
        if (out_degree[j] == 0) stack.push_back(j);
    while (!stack.empty()) {
        const std::size_t v = stack.back();
        stack.pop_back();
        alive[v] = false;
        for (std::size_t j = 0; j < n; ++j) // predecessors of v: edges j -> v
            if (omega(v, j) && alive[j] && --out_degree[j] == 0) stack.push_back(j);
    }
    return alive;
}

} // namespace detail

/// True iff words of every length exist in the given class. A directed cycle
/// yields words of every length in all four classes; without one, walks are
/// shorter than N, so the answer does not depend on the class.
inline bool has_arbitrarily_long_words(const TransitionMatrix& omega, WordClass = WordClass::Markov) {
    const auto reach = detail::nodes_reaching_cycle(omega);
    return std::find(reach.begin(), reach.end(), true) != reach.end();
}

} // namespace mjsr
