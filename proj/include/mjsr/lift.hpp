#pragma once

/**
 * \file   mjsr/lift.hpp
 * \brief  The Omega-lift {Omega_i (x) A_i} of a matrix set and the structure
 *         of products of the 0/1 factors Omega_i.
 *
 * Omega_i keeps column i of Omega and zeroes the rest. A product
 * Omega_{i_n} ... Omega_{i_1} equals (prod_k omega_{i_{k+1} i_k}) times the
 * rank-one matrix with column i_1 equal to column i_n of Omega, so it is
 * nonzero exactly for Markov words and has a nonzero diagonal entry, at
 * (i_1, i_1), exactly for periodically extendable ones.
 */

#include <mjsr/linalg.hpp>
#include <mjsr/words.hpp>

#include <optional>

namespace mjsr {

/// Omega_i as an exact 0/1 matrix (0-based i).
inline IntMatrix omega_factor(const TransitionMatrix& omega, std::size_t i) {
    const std::size_t n = omega.size();
    if (i >= n)
        throw ValidationError(ErrorKind::IndexOutOfRange, "factor index",
                              std::to_string(i + 1) + " not in 1.." + std::to_string(n));
    IntMatrix f(n, n);
    for (std::size_t k = 0; k < n; ++k) f(k, i) = omega(k, i) ? 1 : 0;
    return f;
}

/// Explicit integer product Omega_{i_n} ... Omega_{i_1}.
inline IntMatrix factor_product(const TransitionMatrix& omega, const Word& w) {
    check_word(w, omega.size());
    IntMatrix p = omega_factor(omega, w.letters.front());
    for (std::size_t k = 1; k < w.letters.size(); ++k) p = mat_mul(omega_factor(omega, w.letters[k]), p);
    return p;
}

/// Closed form of Omega_{i_n} ... Omega_{i_1}.
struct FactorStructure {
    bool is_zero = true;
    int scalar = 0;                       ///< prod_k omega_{i_{k+1} i_k}
    std::size_t col = 0;                  ///< i_1, the only nonzero column
    std::vector<std::size_t> nonzero_rows; ///< {k : omega_{k i_n} = 1}
    std::optional<std::size_t> diag_nonzero_at;

    /// Reassembles the N x N matrix the structure describes.
    IntMatrix to_matrix(std::size_t n) const {
        IntMatrix m(n, n);
        if (!is_zero)
            for (auto r : nonzero_rows) m(r, col) = scalar;
        return m;
    }
};

inline FactorStructure factor_product_structure(const TransitionMatrix& omega, const Word& w) {
    check_word(w, omega.size());
    FactorStructure s;
    s.scalar = 1;
    for (std::size_t k = 0; k + 1 < w.letters.size(); ++k)
        if (!omega(w.letters[k + 1], w.letters[k])) {
            s.scalar = 0;
            break;
        }
    const std::size_t first = w.front(), last = w.back();
    for (std::size_t r = 0; r < omega.size(); ++r)
        if (omega(r, last)) s.nonzero_rows.push_back(r);
    s.is_zero = s.scalar == 0 || s.nonzero_rows.empty();
    if (s.is_zero) {
        s.nonzero_rows.clear();
        return s;
    }
    s.col = first;
    if (omega(first, last)) s.diag_nonzero_at = first;
    return s;
}

/// The lifted set A^(i) = Omega_i (x) A_i, stored densely, together with
/// the data it was built from.
template <FieldScalar T>
class LiftedSet {
  public:
    LiftedSet(MatrixSet<T> base, TransitionMatrix omega) {
        auto inst = validate_instance(std::move(base), std::move(omega));
        base_ = std::move(inst.set);
        omega_ = std::move(inst.omega);
        std::vector<Matrix<T>> members;
        for (std::size_t i = 0; i < base_.size(); ++i) {
            factors_.push_back(omega_factor(omega_, i));
            members.push_back(kronecker(matrix_cast<T>(factors_.back()), base_[i]));
        }
        members_ = MatrixSet<T>(std::move(members));
    }

    const MatrixSet<T>& base() const noexcept { return base_; }
    const TransitionMatrix& omega() const noexcept { return omega_; }
    const std::vector<IntMatrix>& factors() const noexcept { return factors_; }
    const MatrixSet<T>& members() const noexcept { return members_; }
    std::size_t blocks() const noexcept { return base_.size(); }
    std::size_t block_dim() const noexcept { return base_.dim(); }

  private:
    MatrixSet<T> base_;
    TransitionMatrix omega_;
    std::vector<IntMatrix> factors_;
    MatrixSet<T> members_;
};

template <FieldScalar T>
LiftedSet<T> lift_set(MatrixSet<T> set, TransitionMatrix omega) {
    return LiftedSet<T>(std::move(set), std::move(omega));
}

/// A product of lifted members kept in block-sparse form: the factor
/// structure plus the d x d product of base matrices. Every nonzero block
/// sits in block column `structure.col` and equals `base`.
template <FieldScalar T>
struct StructuredLiftProduct {
    FactorStructure structure;
    Matrix<T> base;

    double block_norm(NormKind inner) const {
        return structure.is_zero ? 0.0 : operator_norm(base, inner);
    }

    /// A single nonzero block column is nilpotent unless it hits the diagonal.
    double spectral_radius(double rel_tol) const {
        if (structure.is_zero || !structure.diag_nonzero_at) return 0.0;
        return mjsr::spectral_radius(base, rel_tol);
    }

    Matrix<T> to_dense(std::size_t blocks) const {
        const std::size_t d = base.rows();
        Matrix<T> out(blocks * d, blocks * d);
        if (structure.is_zero) return out;
        for (auto r : structure.nonzero_rows)
            for (std::size_t a = 0; a < d; ++a)
                for (std::size_t b = 0; b < d; ++b) out(r * d + a, structure.col * d + b) = base(a, b);
        return out;
    }
};

} // namespace mjsr
