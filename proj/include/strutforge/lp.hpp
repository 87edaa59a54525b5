#pragma once

#include <span>
#include <string>
#include <vector>

#include "strutforge/errors.hpp"

namespace strutforge {

struct LinTerm {
    int var = 0;
    double coef = 0.0;
};

// One linear row a.x (= | <=) rhs, sparse.
struct LinRow {
    std::vector<LinTerm> terms;
    double rhs = 0.0;
};

struct LinProgram {
    int num_vars = 0;
    std::vector<LinRow> equalities;    // a.x == rhs
    std::vector<LinRow> inequalities;  // a.x <= rhs
    std::vector<double> objective;     // minimize c.x; empty = feasibility only
    // Optional box bounds (empty = all variables free). Entries may be
    // +-infinity for one-sided bounds.
    std::vector<double> lower;
    std::vector<double> upper;
};

enum class LpStatus { Feasible, Infeasible, Unbounded };

struct LpOutcome {
    LpStatus status = LpStatus::Infeasible;
    std::vector<double> x;       // verified witness when Feasible
    double objective = 0.0;      // c.x when an objective was given
    double max_violation = 0.0;  // over the full constraint system
    long iterations = 0;
    int activation_rounds = 1;
};

// Supplier of inequality rows too numerous to materialize up front. The
// solver activates them on demand and calls violated() once more on the final
// witness, so a Feasible outcome is verified against the whole family.
// Implementations must be deterministic.
class LazyRows {
  public:
    virtual ~LazyRows() = default;

    // Rows violated at x by more than tol, worst violation first.
    virtual std::vector<LinRow> violated(std::span<const double> x, double tol,
                                         int max_rows) = 0;

    // Rows whose left-hand side grows along the ray (a.ray > tol); used to cut
    // off a spurious unbounded direction. Default: no cuts.
    virtual std::vector<LinRow> ray_cuts(std::span<const double> x,
                                         std::span<const double> ray, double tol,
                                         int max_rows);
};

// Feasibility tolerance: 1e-8 * (1 + max |rhs|), unless overridden.
double lp_tolerance(const LinProgram& lp);

// Process-wide absolute tolerance override (CLI --tol); negative restores the
// default rule. Set before solving starts.
void set_lp_tolerance_override(double tol);

double row_violation(const LinRow& row, std::span<const double> x, bool equality);
double max_violation(const LinProgram& lp, std::span<const double> x);

// Two-phase primal simplex (Dantzig pricing with Bland's rule as the
// anti-cycling fallback). Free variables are split into differences of
// nonnegative parts. Throws SolverFailure on a stalled pivot sequence.
LpOutcome solve_feasibility(const LinProgram& lp, LazyRows* lazy = nullptr);
LpOutcome solve_min(const LinProgram& lp, LazyRows* lazy = nullptr);

// Plain-text dump of the constraint system for external cross-checking.
std::string dump_lp(const LinProgram& lp);

}  // namespace strutforge
