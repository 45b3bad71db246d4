#pragma once

/**
 * \file   mjsr/linalg.hpp
 * \brief  Dense kernels: products, Kronecker products, submultiplicative
 *         norms (including the block norm of lifted matrices) and the
 *         spectral radius.
 */

#include <mjsr/core.hpp>

#include <cmath>
#include <limits>
#include <string>

namespace mjsr {

enum class NormKind {
    RowSumMax, ///< l-infinity operator norm
    ColSumMax, ///< l-1 operator norm
    Frobenius,
};

inline std::string_view to_string(NormKind k) {
    switch (k) {
        case NormKind::RowSumMax: return "rowsum";
        case NormKind::ColSumMax: return "colsum";
        case NormKind::Frobenius: return "frobenius";
    }
    return "?";
}

inline constexpr double default_rel_tol = 1e-9;

template <MatrixScalar T>
double magnitude(const T& x) {
    if constexpr (std::same_as<T, std::int64_t>) return static_cast<double>(x < 0 ? -x : x);
    else return std::abs(x);
}

template <MatrixScalar T>
Matrix<T> mat_mul(const Matrix<T>& a, const Matrix<T>& b) {
    if (a.cols() != b.rows())
        throw ValidationError(ErrorKind::DimensionMismatch, "mat_mul",
                              std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + " times " +
                                  std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
    Matrix<T> c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const T aik = a(i, k);
            if (aik == T{}) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

template <MatrixScalar T>
Matrix<T> operator*(const Matrix<T>& a, const Matrix<T>& b) {
    return mat_mul(a, b);
}

/// Block (i, j) of the result is p(i, j) * q.
template <MatrixScalar T>
Matrix<T> kronecker(const Matrix<T>& p, const Matrix<T>& q) {
    Matrix<T> out(p.rows() * q.rows(), p.cols() * q.cols());
    for (std::size_t i = 0; i < p.rows(); ++i)
        for (std::size_t j = 0; j < p.cols(); ++j) {
            const T pij = p(i, j);
            if (pij == T{}) continue;
            for (std::size_t r = 0; r < q.rows(); ++r)
                for (std::size_t c = 0; c < q.cols(); ++c)
                    out(i * q.rows() + r, j * q.cols() + c) = pij * q(r, c);
        }
    return out;
}

template <MatrixScalar T>
double operator_norm(const Matrix<T>& m, NormKind kind = NormKind::RowSumMax) {
    double result = 0.0;
    switch (kind) {
        case NormKind::RowSumMax:
            for (std::size_t r = 0; r < m.rows(); ++r) {
                double s = 0.0;
                for (std::size_t c = 0; c < m.cols(); ++c) s += magnitude(m(r, c));
                result = std::max(result, s);
            }
            break;
        case NormKind::ColSumMax:
            for (std::size_t c = 0; c < m.cols(); ++c) {
                double s = 0.0;
                for (std::size_t r = 0; r < m.rows(); ++r) s += magnitude(m(r, c));
                result = std::max(result, s);
            }
            break;
        case NormKind::Frobenius: {
            // scaled sum of squares, no overflow for large entries
            double scale = 0.0, ssq = 1.0;
            for (const auto& x : m.entries()) {
                const double a = magnitude(x);
                if (a == 0.0) continue;
                if (scale < a) {
                    ssq = 1.0 + ssq * (scale / a) * (scale / a);
                    scale = a;
                } else {
                    ssq += (a / scale) * (a / scale);
                }
            }
            result = scale * std::sqrt(ssq);
            break;
        }
    }
    return result;
}

/// Block norm of an (N*d) x (N*d) matrix viewed as N x N blocks of size d:
/// the largest block-row sum of inner norms of the blocks.
template <MatrixScalar T>
double block_norm(const Matrix<T>& m, std::size_t blocks, std::size_t block_dim,
                  NormKind inner = NormKind::RowSumMax) {
    if (blocks == 0 || block_dim == 0 || m.rows() != blocks * block_dim || m.cols() != blocks * block_dim)
        throw ValidationError(ErrorKind::DimensionMismatch, "block_norm",
                              std::to_string(m.rows()) + "x" + std::to_string(m.cols()) + " is not " +
                                  std::to_string(blocks) + "x" + std::to_string(blocks) + " blocks of size " +
                                  std::to_string(block_dim));
    Matrix<T> block(block_dim, block_dim);
    double result = 0.0;
    for (std::size_t bi = 0; bi < blocks; ++bi) {
        double row_sum = 0.0;
        for (std::size_t bj = 0; bj < blocks; ++bj) {
            for (std::size_t r = 0; r < block_dim; ++r)
                for (std::size_t c = 0; c < block_dim; ++c)
                    block(r, c) = m(bi * block_dim + r, bj * block_dim + c);
            row_sum += operator_norm(block, inner);
        }
        result = std::max(result, row_sum);
    }
    return result;
}

/// Spectral radius by repeated squaring with per-step normalisation.
///
/// After k squarings the scaled matrix X_k satisfies M^(2^k) = e^(S_k) X_k with
/// ||X_k|| = 1, so ||M^(2^k)||^(1/2^k) = exp(S_k / 2^k). The error of that
/// estimate decays like c / 2^k in the log, which the returned value removes
/// by one step of Richardson extrapolation. Iteration stops once successive
/// estimates agree to `rel_tol` twice in a row (or after 64 squarings). Results below
/// 1e-12 * ||M|| are reported as exactly 0.
template <FieldScalar T>
double spectral_radius(const Matrix<T>& m, double rel_tol = default_rel_tol) {
    if (!m.is_square())
        throw ValidationError(ErrorKind::NonSquare, "spectral_radius",
                              std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    if (!(rel_tol > 0.0)) throw std::invalid_argument("spectral_radius: rel_tol must be positive");
    if (m.rows() == 0) return 0.0;

    const double norm0 = operator_norm(m, NormKind::RowSumMax);
    if (norm0 == 0.0) return 0.0;
    if (m.rows() == 1) return magnitude(m(0, 0));

    const double zero_floor = 1e-12 * norm0;
    Matrix<T> x = m;
    x *= T(1.0 / norm0);
    double log_scale = std::log(norm0); // S_k
    double prev_log_est = log_scale;    // S_k / 2^k
    double weight = 1.0;                // 2^-k
    // Stop a little tighter than asked; the estimate's error is of the order
    // of the last step before extrapolation.
    const double stop_tol = 0.01 * rel_tol;
    int small_steps = 0;

    for (int k = 1; k <= 64; ++k) {
        x = mat_mul(x, x);
        const double nx = operator_norm(x, NormKind::RowSumMax);
        if (nx == 0.0 || !std::isfinite(nx)) return 0.0; // nilpotent (or underflowed to zero)
        x *= T(1.0 / nx);
        log_scale = 2.0 * log_scale + std::log(nx);
        weight *= 0.5;
        const double log_est = log_scale * weight;
        const double step = log_est - prev_log_est;
        small_steps = std::abs(step) < stop_tol ? small_steps + 1 : 0;
        // two quiet steps in a row, so a coincidental ||M^2|| = ||M||^2 cannot stop early
        if (small_steps >= 2 || k == 64) {
            const double rho = std::exp(log_est + step);
            return rho < zero_floor ? 0.0 : rho;
        }
        if (std::exp(log_est) < zero_floor) return 0.0;
        prev_log_est = log_est;
    }
    return 0.0; // unreachable
}

} // namespace mjsr
