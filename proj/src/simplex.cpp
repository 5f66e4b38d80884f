#include "dinc/simplex.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "dinc/error.hpp"

namespace dinc {

namespace {

class Tableau {
public:
    Tableau(std::size_t rows, std::size_t cols) : m_(rows), n_(cols), t_((rows + 1) * (cols + 1), 0.0), basis_(rows) {}

    double& at(std::size_t i, std::size_t j) { return t_[i * (n_ + 1) + j]; }
    double& rhs(std::size_t i) { return at(i, n_); }
    double& cost(std::size_t j) { return at(m_, j); }
    std::size_t& basis(std::size_t i) { return basis_[i]; }

    void pivot(std::size_t r, std::size_t c) {
        const double p = at(r, c);
        for (std::size_t j = 0; j <= n_; ++j) at(r, j) /= p;
        for (std::size_t i = 0; i <= m_; ++i) {
            if (i == r) continue;
            const double f = at(i, c);
            if (f == 0.0) continue;
            for (std::size_t j = 0; j <= n_; ++j) at(i, j) -= f * at(r, j);
        }
        basis_[r] = c;
    }

    // Bland's rule over columns [0, allowed). Returns false when unbounded.
    bool run(std::size_t allowed, int& pivots, int max_pivots) {
        const double eps = 1e-11;
        for (;;) {
            std::size_t enter = allowed;
            for (std::size_t j = 0; j < allowed; ++j) {
                if (cost(j) < -eps) {
                    enter = j;
                    break;
                }
            }
            if (enter == allowed) return true;
            std::size_t leave = m_;
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < m_; ++i) {
                const double a = at(i, enter);
                if (a <= eps) continue;
                const double ratio = rhs(i) / a;
                if (ratio < best - 1e-14 || (ratio <= best + 1e-14 && leave < m_ && basis_[i] < basis_[leave])) {
                    best = ratio;
                    leave = i;
                }
            }
            if (leave == m_) return false;
            pivot(leave, enter);
            if (++pivots > max_pivots) throw NumericalError("simplex: pivot limit reached");
        }
    }

private:
    std::size_t m_, n_;
    std::vector<double> t_;
    std::vector<std::size_t> basis_;
};

}  // namespace

LPResult simplex_solve(const std::vector<std::vector<double>>& A, const std::vector<double>& b,
                       const std::vector<double>& c, double feas_tol, int max_pivots) {
    const std::size_t m = A.size();
    if (b.size() != m) throw PreconditionError("simplex: row count mismatch");
    const std::size_t n = c.size();
    for (const auto& row : A) {
        if (row.size() != n) throw PreconditionError("simplex: column count mismatch");
    }
    // Columns: n structural, then m artificials.
    Tableau T(m, n + m);
    for (std::size_t i = 0; i < m; ++i) {
        const double s = b[i] < 0 ? -1.0 : 1.0;
        for (std::size_t j = 0; j < n; ++j) T.at(i, j) = s * A[i][j];
        T.at(i, n + i) = 1.0;
        T.rhs(i) = s * b[i];
        T.basis(i) = n + i;
    }
    // Phase one: minimise the sum of artificials.
    for (std::size_t j = 0; j < n; ++j) {
        double sum = 0.0;
        for (std::size_t i = 0; i < m; ++i) sum += T.at(i, j);
        T.cost(j) = -sum;
    }
    double z = 0.0;
    for (std::size_t i = 0; i < m; ++i) z += T.rhs(i);
    T.rhs(m) = -z;

    LPResult res;
    T.run(n + m, res.pivots, max_pivots);
    res.infeasibility = std::max(0.0, -T.rhs(m));
    res.x.assign(n, 0.0);
    auto read_x = [&] {
        std::fill(res.x.begin(), res.x.end(), 0.0);
        for (std::size_t i = 0; i < m; ++i) {
            if (T.basis(i) < n) res.x[T.basis(i)] = T.rhs(i);
        }
    };
    if (res.infeasibility > feas_tol) {
        read_x();
        res.status = LPResult::Status::Infeasible;
        return res;
    }
    // Drive remaining artificials out of the basis where possible.
    for (std::size_t i = 0; i < m; ++i) {
        if (T.basis(i) < n) continue;
        for (std::size_t j = 0; j < n; ++j) {
            if (std::abs(T.at(i, j)) > 1e-9) {
                T.pivot(i, j);
                ++res.pivots;
                break;
            }
        }
    }
    // Phase two.
    for (std::size_t j = 0; j <= n + m; ++j) T.cost(j) = 0.0;
    for (std::size_t j = 0; j < n; ++j) T.cost(j) = c[j];
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t bj = T.basis(i);
        if (bj >= n) continue;
        const double cb = c[bj];
        if (cb == 0.0) continue;
        for (std::size_t j = 0; j <= n + m; ++j) T.cost(j) -= cb * T.at(i, j);
    }
    const bool bounded = T.run(n, res.pivots, max_pivots);
    read_x();
    res.objective = 0.0;
    for (std::size_t j = 0; j < n; ++j) res.objective += c[j] * res.x[j];
    res.status = bounded ? LPResult::Status::Optimal : LPResult::Status::Unbounded;
    return res;
}

}  // namespace dinc
