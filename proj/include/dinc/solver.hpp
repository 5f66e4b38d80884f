#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dinc/inapprox.hpp"
#include "dinc/laminate.hpp"
#include "dinc/mesh.hpp"
#include "dinc/refine.hpp"

namespace dinc {

enum class Feasibility { Feasible, Infeasible, BoundaryCase };

const char* to_string(Feasibility f);

/// Feasible: ξ0 ∈ E or in the interior of the hull. Infeasible: outside
/// the hull, where no Lipschitz solution exists. BoundaryCase: on the hull
/// boundary but not in E; not covered by the existence theorem.
Feasibility check_feasibility(const Mat2& xi0, const IsoSet& K);

struct SolveOptions {
    double tol = 0.05;
    double eta = 0.05;
    /// 0 selects diam(Ω)/16.
    double mesh_h = 0.0;
    std::uint64_t seed = 0;
    std::size_t max_triangles = 4'000'000;
    int max_depth = 4;
    double amp_frac = 0.5;
};

/// Area fractions of dist_to_E over bins [edges[i], edges[i+1]).
struct DistHistogram {
    std::vector<double> edges;
    std::vector<double> area_fraction;
};

struct StageRecord {
    int n = 0;
    double eps = 0.0;
    /// Largest dist_to_E among triangles whose gradient lies in the level's
    /// closed rectangles; bounded by the level's corner distance.
    double max_phase_dist = 0.0;
    double dist_bound = 0.0;
    double bad_area_fraction = 0.0;
    double transition_area_fraction = 0.0;
    double lipschitz_bound = 0.0;
    std::size_t triangles = 0;
    /// sup |u − u_base| over the vertices created in this stage.
    double displacement = 0.0;
    double min_period = 0.0;
    double min_band_width = 0.0;
    DistHistogram histogram;
};

struct SolveReport {
    double tol = 0.0;
    double eta = 0.0;
    std::uint64_t seed = 0;
    std::string feasibility;
    double bad_area_fraction = 0.0;
    double lipschitz_bound = 0.0;
    double lipschitz_limit = 0.0;
    int stages_run = 0;
    double frozen_area_fraction = 0.0;
    double boundary_residual = 0.0;
    double area_error = 0.0;
    double continuity_defect = 0.0;
    std::size_t nonpositive_triangles = 0;
    std::size_t triangles = 0;
    std::size_t vertices = 0;
    DistHistogram histogram;
    std::vector<StageRecord> stages;
    /// bad_area_fraction ≤ eta.
    bool success = false;
    /// "ok", "tolerance_unmet" or "budget_exhausted".
    std::string status;
    std::string message;
};

struct SolveResult {
    PAField field;
    SolveReport report;
    /// Laminate used on the first refined patch of the last stage, if any.
    std::vector<LaminateNode> trees;
};

/// Staged convex integration: reduce φ to a piecewise-affine field, keep
/// the triangles already in E, and replace the rest by planar laminates onto
/// the in-approximation levels n = N, N+1, ... until the bad area drops to
/// eta·|Ω| and every phase is within tol of E.
///
/// Throws InfeasibleError when φ is affine and check_feasibility fails, or
/// when piecewise data leaves the hull.
SolveResult solve(const BoundaryData& phi, const Domain2& dom, const IsoSet& K, const Schedule& sched,
                  const SolveOptions& opt);

/// Recompute the report fields from vertex values alone.
SolveReport verify_field(const PAField& field, const Domain2& dom, const BoundaryData& phi, const IsoSet& K,
                         double tol, double eta);

/// Bin edges used by the reports, in multiples of tol.
DistHistogram dist_histogram(const std::vector<double>& dist, const std::vector<double>& area, double tol);

}  // namespace dinc
