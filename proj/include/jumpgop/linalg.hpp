#pragma once

#include <vector>

namespace jumpgop::linalg {

// Dense square matrix, row-major. Market dimensions are tiny (d rarely
// above 4), so everything here is plain O(n^3) with partial pivoting.
class SquareMatrix {
  public:
    explicit SquareMatrix(int n) : n_(n), a_(static_cast<size_t>(n) * n, 0.0) {}
    static SquareMatrix identity(int n);
    static SquareMatrix from_rows(const std::vector<std::vector<double>>& rows);

    double& operator()(int i, int j) { return a_[static_cast<size_t>(i) * n_ + j]; }
    double operator()(int i, int j) const { return a_[static_cast<size_t>(i) * n_ + j]; }
    int size() const { return n_; }

    SquareMatrix transposed() const;
    std::vector<double> apply(const std::vector<double>& x) const;

  private:
    int n_;
    std::vector<double> a_;
};

// LU factorization with partial pivoting. singular() reports exact
// breakdown; near-singularity is the caller's business via condition_number.
class LuFactorization {
  public:
    explicit LuFactorization(SquareMatrix a);

    bool singular() const { return singular_; }
    std::vector<double> solve(std::vector<double> rhs) const;
    SquareMatrix inverse() const;

  private:
    SquareMatrix lu_;
    std::vector<int> perm_;
    bool singular_ = false;
};

double norm1(const SquareMatrix& a);
double norm_inf(const std::vector<double>& x);

// 1-norm condition estimate via the explicit inverse; +inf when singular.
double condition_number(const SquareMatrix& a);

// Solve a x = rhs / a^T x = rhs, refusing matrices with condition number
// above `cond_limit` (throws IllConditionedError tagged with `piece`).
std::vector<double> solve_checked(const SquareMatrix& a, const std::vector<double>& rhs,
                                  double cond_limit, int piece);
std::vector<double> solve_transposed_checked(const SquareMatrix& a, const std::vector<double>& rhs,
                                             double cond_limit, int piece);

}  // namespace jumpgop::linalg
