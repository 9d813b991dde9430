#include "jumpgop/linalg.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "jumpgop/errors.hpp"

namespace jumpgop::linalg {

SquareMatrix SquareMatrix::identity(int n) {
    SquareMatrix m(n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

SquareMatrix SquareMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
    const int n = static_cast<int>(rows.size());
    SquareMatrix m(n);
    for (int i = 0; i < n; ++i) {
        if (static_cast<int>(rows[i].size()) != n)
            throw std::invalid_argument("from_rows: ragged matrix");
        for (int j = 0; j < n; ++j) m(i, j) = rows[i][j];
    }
    return m;
}

SquareMatrix SquareMatrix::transposed() const {
    SquareMatrix t(n_);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

std::vector<double> SquareMatrix::apply(const std::vector<double>& x) const {
    std::vector<double> y(n_, 0.0);
    for (int i = 0; i < n_; ++i) {
        double s = 0.0;
        for (int j = 0; j < n_; ++j) s += (*this)(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

LuFactorization::LuFactorization(SquareMatrix a) : lu_(a), perm_(a.size()) {
    const int n = lu_.size();
    for (int i = 0; i < n; ++i) perm_[i] = i;
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        double best = std::fabs(lu_(col, col));
        for (int r = col + 1; r < n; ++r) {
            const double v = std::fabs(lu_(r, col));
            if (v > best) {
                best = v;
                pivot = r;
            }
        }
        if (best == 0.0) {
            singular_ = true;
            return;
        }
        if (pivot != col) {
            std::swap(perm_[pivot], perm_[col]);
            for (int j = 0; j < n; ++j) std::swap(lu_(pivot, j), lu_(col, j));
        }
        for (int r = col + 1; r < n; ++r) {
            const double f = lu_(r, col) / lu_(col, col);
            lu_(r, col) = f;
            for (int j = col + 1; j < n; ++j) lu_(r, j) -= f * lu_(col, j);
        }
    }
}

std::vector<double> LuFactorization::solve(std::vector<double> rhs) const {
    if (singular_) throw std::domain_error("LU solve on singular matrix");
    const int n = lu_.size();
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) x[i] = rhs[perm_[i]];
    for (int i = 1; i < n; ++i) {
        double s = x[i];
        for (int j = 0; j < i; ++j) s -= lu_(i, j) * x[j];
        x[i] = s;
    }
    for (int i = n - 1; i >= 0; --i) {
        double s = x[i];
        for (int j = i + 1; j < n; ++j) s -= lu_(i, j) * x[j];
        x[i] = s / lu_(i, i);
    }
    return x;
}

SquareMatrix LuFactorization::inverse() const {
    const int n = lu_.size();
    SquareMatrix inv(n);
    std::vector<double> e(n, 0.0);
    for (int j = 0; j < n; ++j) {
        e[j] = 1.0;
        const auto col = solve(e);
        for (int i = 0; i < n; ++i) inv(i, j) = col[i];
        e[j] = 0.0;
    }
    return inv;
}

double norm1(const SquareMatrix& a) {
    double best = 0.0;
    for (int j = 0; j < a.size(); ++j) {
        double s = 0.0;
        for (int i = 0; i < a.size(); ++i) s += std::fabs(a(i, j));
        best = std::max(best, s);
    }
    return best;
}

double norm_inf(const std::vector<double>& x) {
    double best = 0.0;
    for (double v : x) best = std::max(best, std::fabs(v));
    return best;
}

double condition_number(const SquareMatrix& a) {
    LuFactorization lu(a);
    if (lu.singular()) return std::numeric_limits<double>::infinity();
    return norm1(a) * norm1(lu.inverse());
}

std::vector<double> solve_checked(const SquareMatrix& a, const std::vector<double>& rhs,
                                  double cond_limit, int piece) {
    const double cond = condition_number(a);
    if (!(cond <= cond_limit)) throw IllConditionedError(cond, piece);
    return LuFactorization(a).solve(rhs);
}

std::vector<double> solve_transposed_checked(const SquareMatrix& a, const std::vector<double>& rhs,
                                             double cond_limit, int piece) {
    const double cond = condition_number(a);
    if (!(cond <= cond_limit)) throw IllConditionedError(cond, piece);
    return LuFactorization(a.transposed()).solve(rhs);
}

}  // namespace jumpgop::linalg
