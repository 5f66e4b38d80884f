#pragma once

#include <vector>

namespace dinc {

struct LPResult {
    enum class Status { Optimal, Infeasible, Unbounded };
    Status status = Status::Infeasible;
    std::vector<double> x;
    double objective = 0.0;
    /// Phase-one optimum: the least L1 violation of A x = b over x >= 0
    /// (rows scaled so that b >= 0).
    double infeasibility = 0.0;
    int pivots = 0;
};

/// min c·x subject to A x = b, x >= 0, by the two-phase tableau method with
/// Bland's rule. A is row-major m×n. The problem counts as feasible when the
/// phase-one optimum is at most feas_tol. Throws NumericalError when the
/// pivot limit is hit.
LPResult simplex_solve(const std::vector<std::vector<double>>& A, const std::vector<double>& b,
                       const std::vector<double>& c, double feas_tol = 1e-9, int max_pivots = 100000);

}  // namespace dinc
