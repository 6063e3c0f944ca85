// Small dense matrices for the multiconductor machinery: row-major square
// storage, Gauss-Jordan inversion with partial pivoting, and a cyclic Jacobi
// eigensolver for symmetric matrices. Network dimensions stay small (a few
// dozen conductors at most), so robustness beats asymptotics here.

#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace lossyline {

class Matrix {
  public:
    Matrix() = default;
    explicit Matrix(int n) : n_(n), a_(static_cast<std::size_t>(n) * n, 0.0) {
        if (n <= 0) throw std::invalid_argument("Matrix: dimension must be positive");
    }

    static Matrix identity(int n) {
        Matrix m(n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    int size() const { return n_; }
    double& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * n_ + j]; }
    double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * n_ + j]; }

    double max_abs() const {
        double m = 0.0;
        for (double v : a_) m = std::max(m, std::abs(v));
        return m;
    }

  private:
    int n_ = 0;
    std::vector<double> a_;
};

inline Matrix operator*(const Matrix& a, const Matrix& b) {
    const int n = a.size();
    if (b.size() != n) throw std::invalid_argument("Matrix multiply: size mismatch");
    Matrix c(n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (int j = 0; j < n; ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

inline std::vector<double> matvec(const Matrix& a, const std::vector<double>& x) {
    const int n = a.size();
    if (static_cast<int>(x.size()) != n) throw std::invalid_argument("matvec: size mismatch");
    std::vector<double> y(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int j = 0; j < n; ++j) s += a(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

inline bool is_symmetric(const Matrix& a, double rel_tol = 1e-12) {
    const double scale = std::max(a.max_abs(), 1e-300);
    for (int i = 0; i < a.size(); ++i)
        for (int j = i + 1; j < a.size(); ++j)
            if (std::abs(a(i, j) - a(j, i)) > rel_tol * scale) return false;
    return true;
}

/// Gauss-Jordan inverse with partial pivoting.
inline Matrix inverse(const Matrix& a) {
    const int n = a.size();
    Matrix work = a;
    Matrix inv = Matrix::identity(n);
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(work(r, col)) > std::abs(work(pivot, col))) pivot = r;
        if (work(pivot, col) == 0.0) throw std::invalid_argument("inverse: singular matrix");
        if (pivot != col)
            for (int j = 0; j < n; ++j) {
                std::swap(work(pivot, j), work(col, j));
                std::swap(inv(pivot, j), inv(col, j));
            }
        const double d = work(col, col);
        for (int j = 0; j < n; ++j) {
            work(col, j) /= d;
            inv(col, j) /= d;
        }
        for (int r = 0; r < n; ++r) {
            if (r == col) continue;
            const double f = work(r, col);
            if (f == 0.0) continue;
            for (int j = 0; j < n; ++j) {
                work(r, j) -= f * work(col, j);
                inv(r, j) -= f * inv(col, j);
            }
        }
    }
    return inv;
}

struct EigenSym {
    std::vector<double> values;  // ascending
    Matrix vectors;              // column i pairs with values[i]; orthonormal
};

/// Cyclic Jacobi rotations for a symmetric matrix. Eigenvalues ascending;
/// each eigenvector's largest-magnitude component is made positive, and
/// degenerate eigenvalues are ordered by lexicographic comparison of their
/// vectors, so the decomposition is deterministic.
inline EigenSym jacobi_eigen(const Matrix& a, int max_sweeps = 100) {
    if (!is_symmetric(a, 1e-10))
        throw std::invalid_argument("jacobi_eigen: matrix must be symmetric");
    const int n = a.size();
    Matrix d = a;
    Matrix v = Matrix::identity(n);

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += d(p, q) * d(p, q);
        if (off <= 1e-30 * std::max(1.0, d.max_abs() * d.max_abs())) break;

        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) {
                const double apq = d(p, q);
                if (apq == 0.0) continue;
                const double theta = (d(q, q) - d(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double dkp = d(k, p), dkq = d(k, q);
                    d(k, p) = c * dkp - s * dkq;
                    d(k, q) = s * dkp + c * dkq;
                }
                for (int k = 0; k < n; ++k) {
                    const double dpk = d(p, k), dqk = d(q, k);
                    d(p, k) = c * dpk - s * dqk;
                    d(q, k) = s * dpk + c * dqk;
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
    }

    // deterministic ordering and sign convention
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    auto column_less = [&](int i, int j) {
        if (d(i, i) != d(j, j)) return d(i, i) < d(j, j);
        for (int k = 0; k < n; ++k)
            if (v(k, i) != v(k, j)) return v(k, i) < v(k, j);
        return false;
    };
    std::sort(order.begin(), order.end(), column_less);

    EigenSym out;
    out.values.resize(n);
    out.vectors = Matrix(n);
    for (int i = 0; i < n; ++i) {
        const int src = order[i];
        out.values[i] = d(src, src);
        int imax = 0;
        for (int k = 1; k < n; ++k)
            if (std::abs(v(k, src)) > std::abs(v(imax, src))) imax = k;
        const double flip = v(imax, src) < 0.0 ? -1.0 : 1.0;
        for (int k = 0; k < n; ++k) out.vectors(k, i) = flip * v(k, src);
    }
    return out;
}

}  // namespace lossyline
