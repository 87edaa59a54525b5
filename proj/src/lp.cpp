#include "strutforge/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "strutforge/log.hpp"

namespace strutforge {

namespace {

constexpr double kPivotTol = 1e-10;
constexpr int kMaxActivationRounds = 400;
constexpr int kActivationBatch = 400;

double eval_row(const LinRow& row, std::span<const double> x) {
    double s = 0.0;
    for (const auto& t : row.terms) s += t.coef * x[static_cast<size_t>(t.var)];
    return s;
}

// Dense two-phase simplex over
//   min c.z   s.t.  A z = b, z >= 0
// with columns [x+ | x- | slacks | artificials].
class Simplex {
  public:
    Simplex(const LinProgram& lp) : nv_(lp.num_vars) {
        rows_.reserve(lp.equalities.size() + lp.inequalities.size());
        for (const auto& r : lp.equalities) rows_.push_back({r, true});
        for (const auto& r : lp.inequalities) rows_.push_back({r, false});
        m_ = static_cast<int>(rows_.size());
        n_slack_ = static_cast<int>(lp.inequalities.size());
        build();
        if (!lp.objective.empty()) {
            cost_.assign(static_cast<size_t>(lp.num_vars), 0.0);
            std::copy(lp.objective.begin(), lp.objective.end(), cost_.begin());
        }
    }

    // Returns status; fills x (original variables) and, on Unbounded, ray.
    LpStatus run(bool minimize, std::vector<double>& x, std::vector<double>& ray,
                 double feas_tol, long& iterations) {
        if (!phase1(feas_tol, iterations)) return LpStatus::Infeasible;
        if (minimize && !cost_.empty()) {
            int status = phase2(iterations);
            if (status == 1) {
                extract(x);
                extract_ray(ray);
                return LpStatus::Unbounded;
            }
        }
        extract(x);
        return LpStatus::Feasible;
    }

  private:
    struct RowSpec {
        LinRow row;
        bool equality;
    };

    int nv_ = 0;         // original variables
    int m_ = 0;          // constraint rows
    int n_slack_ = 0;    // slack columns (one per inequality)
    int n_art_ = 0;      // artificial columns
    int ncols_ = 0;      // total structural columns (excl. rhs)
    int width_ = 0;      // ncols_ + 1
    std::vector<RowSpec> rows_;
    std::vector<double> tab_;    // m_ rows, row-major, width_ each
    std::vector<double> c1_;     // phase-1 reduced cost row (width_)
    std::vector<double> c2_;     // phase-2 reduced cost row (width_)
    std::vector<int> basis_;     // basic column per row
    std::vector<char> art_col_;  // per column: is artificial
    std::vector<double> cost_;   // original objective on x
    bool bland_ = false;
    int unbounded_col_ = -1;

    double& at(int r, int c) { return tab_[static_cast<size_t>(r) * width_ + c]; }

    int col_xp(int j) const { return j; }
    int col_xm(int j) const { return nv_ + j; }

    void build() {
        // Count artificials: inequality rows with rhs >= 0 start with their
        // slack basic; everything else needs an artificial.
        int slack_id = 0;
        std::vector<int> row_slack(static_cast<size_t>(m_), -1);
        std::vector<double> row_sign(static_cast<size_t>(m_), 1.0);
        n_art_ = 0;
        for (int i = 0; i < m_; ++i) {
            if (!rows_[i].equality) row_slack[i] = slack_id++;
            if (rows_[i].row.rhs < 0.0) row_sign[i] = -1.0;
            bool slack_basic = !rows_[i].equality && rows_[i].row.rhs >= 0.0;
            if (!slack_basic) ++n_art_;
        }
        ncols_ = 2 * nv_ + n_slack_ + n_art_;
        width_ = ncols_ + 1;
        tab_.assign(static_cast<size_t>(m_) * width_, 0.0);
        basis_.assign(static_cast<size_t>(m_), -1);
        art_col_.assign(static_cast<size_t>(ncols_), 0);

        int art_id = 0;
        for (int i = 0; i < m_; ++i) {
            const double sg = row_sign[i];
            for (const auto& t : rows_[i].row.terms) {
                at(i, col_xp(t.var)) += sg * t.coef;
                at(i, col_xm(t.var)) -= sg * t.coef;
            }
            if (row_slack[i] >= 0) at(i, 2 * nv_ + row_slack[i]) = sg;
            at(i, ncols_) = sg * rows_[i].row.rhs;
            bool slack_basic = !rows_[i].equality && rows_[i].row.rhs >= 0.0;
            if (slack_basic) {
                basis_[i] = 2 * nv_ + row_slack[i];
            } else {
                int c = 2 * nv_ + n_slack_ + art_id++;
                at(i, c) = 1.0;
                basis_[i] = c;
                art_col_[static_cast<size_t>(c)] = 1;
            }
        }
    }

    void init_cost_rows() {
        c1_.assign(static_cast<size_t>(width_), 0.0);
        c2_.assign(static_cast<size_t>(width_), 0.0);
        for (int c = 0; c < ncols_; ++c)
            if (art_col_[static_cast<size_t>(c)]) c1_[static_cast<size_t>(c)] = 1.0;
        if (!cost_.empty()) {
            for (int j = 0; j < nv_; ++j) {
                c2_[static_cast<size_t>(col_xp(j))] = cost_[static_cast<size_t>(j)];
                c2_[static_cast<size_t>(col_xm(j))] = -cost_[static_cast<size_t>(j)];
            }
        }
        // eliminate basic columns from both cost rows
        for (int i = 0; i < m_; ++i) {
            reduce_cost_row(c1_, i);
            reduce_cost_row(c2_, i);
        }
    }

    void reduce_cost_row(std::vector<double>& cr, int row) {
        double f = cr[static_cast<size_t>(basis_[row])];
        if (f == 0.0) return;
        for (int c = 0; c < width_; ++c) cr[static_cast<size_t>(c)] -= f * at(row, c);
    }

    void pivot(int r, int s) {
        const double inv = 1.0 / at(r, s);
        for (int c = 0; c < width_; ++c) at(r, c) *= inv;
        at(r, s) = 1.0;
        for (int i = 0; i < m_; ++i) {
            if (i == r) continue;
            double f = at(i, s);
            if (std::abs(f) < 1e-14) continue;
            double* ri = &tab_[static_cast<size_t>(i) * width_];
            const double* rp = &tab_[static_cast<size_t>(r) * width_];
            for (int c = 0; c < width_; ++c) ri[c] -= f * rp[c];
            ri[s] = 0.0;
        }
        for (auto* cr : {&c1_, &c2_}) {
            double f = (*cr)[static_cast<size_t>(s)];
            if (f == 0.0) continue;
            const double* rp = &tab_[static_cast<size_t>(r) * width_];
            for (int c = 0; c < width_; ++c) (*cr)[static_cast<size_t>(c)] -= f * rp[c];
            (*cr)[static_cast<size_t>(s)] = 0.0;
        }
        basis_[r] = s;
    }

    // Entering column for the given cost row, or -1 at optimality.
    int choose_entering(const std::vector<double>& cr, bool allow_art,
                        double eps) const {
        int best = -1;
        double best_val = -eps;
        for (int c = 0; c < ncols_; ++c) {
            if (!allow_art && art_col_[static_cast<size_t>(c)]) continue;
            double v = cr[static_cast<size_t>(c)];
            if (v < best_val - 1e-300) {
                if (bland_) {
                    if (v < -eps) return c;  // lowest index wins in Bland mode
                } else if (v < best_val) {
                    best_val = v;
                    best = c;
                }
            } else if (bland_ && v < -eps) {
                return c;
            }
        }
        return best;
    }

    // Ratio test; -1 when the column is unbounded. Lowest basic index breaks
    // ties, which together with Bland entering guarantees termination.
    int choose_leaving(int s) const {
        int r = -1;
        double best = std::numeric_limits<double>::infinity();
        for (int i = 0; i < m_; ++i) {
            double a = tab_[static_cast<size_t>(i) * width_ + s];
            if (a <= kPivotTol) continue;
            double ratio = tab_[static_cast<size_t>(i) * width_ + ncols_] / a;
            if (ratio < best - 1e-12 ||
                (ratio < best + 1e-12 && (r < 0 || basis_[i] < basis_[r]))) {
                if (ratio < best) best = ratio;
                r = i;
            }
        }
        return r;
    }

    bool iterate(std::vector<double>& cr, bool allow_art, long& iterations,
                 bool& unbounded) {
        unbounded = false;
        const long cap = 20000 + 50L * (m_ + ncols_);
        long stall = 0;
        double last_obj = cr[static_cast<size_t>(ncols_)];
        const double eps = 1e-9;
        long it = 0;
        bland_ = false;
        for (;;) {
            int s = choose_entering(cr, allow_art, eps);
            if (s < 0) return true;  // optimal
            int r = choose_leaving(s);
            if (r < 0) {
                unbounded_col_ = s;
                unbounded = true;
                return true;
            }
            pivot(r, s);
            ++iterations;
            if (++it > cap) throw SolverFailure("simplex: pivot limit exceeded");
            double obj = cr[static_cast<size_t>(ncols_)];
            if (obj > last_obj - 1e-12 * (1.0 + std::abs(last_obj))) {
                if (++stall > 2L * m_ + 200 && !bland_) {
                    bland_ = true;  // degenerate stall: switch to Bland's rule
                    stall = 0;
                }
            } else {
                stall = 0;
                last_obj = obj;
            }
        }
    }

    bool phase1(double feas_tol, long& iterations) {
        init_cost_rows();
        if (n_art_ > 0) {
            bool unb = false;
            iterate(c1_, true, iterations, unb);
            if (unb) throw SolverFailure("simplex: phase-1 unbounded column");
            double obj = -c1_[static_cast<size_t>(ncols_)];
            if (obj > feas_tol) return false;
            // pivot remaining artificials out of the basis where possible
            for (int i = 0; i < m_; ++i) {
                if (!art_col_[static_cast<size_t>(basis_[i])]) continue;
                for (int c = 0; c < ncols_; ++c) {
                    if (art_col_[static_cast<size_t>(c)]) continue;
                    if (std::abs(at(i, c)) > kPivotTol) {
                        pivot(i, c);
                        ++iterations;
                        break;
                    }
                }
                // an all-zero row is redundant; its artificial stays pinned at 0
            }
        }
        return true;
    }

    // 0 = optimal, 1 = unbounded
    int phase2(long& iterations) {
        bool unb = false;
        iterate(c2_, false, iterations, unb);
        return unb ? 1 : 0;
    }

    void extract(std::vector<double>& x) const {
        std::vector<double> z(static_cast<size_t>(ncols_), 0.0);
        for (int i = 0; i < m_; ++i)
            z[static_cast<size_t>(basis_[i])] =
                tab_[static_cast<size_t>(i) * width_ + ncols_];
        x.assign(static_cast<size_t>(nv_), 0.0);
        for (int j = 0; j < nv_; ++j)
            x[static_cast<size_t>(j)] =
                z[static_cast<size_t>(col_xp(j))] - z[static_cast<size_t>(col_xm(j))];
    }

    void extract_ray(std::vector<double>& ray) const {
        // direction of the unbounded entering column in original variables
        std::vector<double> dz(static_cast<size_t>(ncols_), 0.0);
        dz[static_cast<size_t>(unbounded_col_)] = 1.0;
        for (int i = 0; i < m_; ++i)
            dz[static_cast<size_t>(basis_[i])] =
                -tab_[static_cast<size_t>(i) * width_ + unbounded_col_];
        ray.assign(static_cast<size_t>(nv_), 0.0);
        for (int j = 0; j < nv_; ++j)
            ray[static_cast<size_t>(j)] =
                dz[static_cast<size_t>(col_xp(j))] - dz[static_cast<size_t>(col_xm(j))];
    }
};

// Translates box bounds into explicit inequality rows.
LinProgram with_bound_rows(const LinProgram& lp) {
    LinProgram out = lp;
    const double inf = std::numeric_limits<double>::infinity();
    for (int j = 0; j < lp.num_vars; ++j) {
        if (!lp.lower.empty() && lp.lower[static_cast<size_t>(j)] > -inf)
            out.inequalities.push_back({{{j, -1.0}}, -lp.lower[static_cast<size_t>(j)]});
        if (!lp.upper.empty() && lp.upper[static_cast<size_t>(j)] < inf)
            out.inequalities.push_back({{{j, 1.0}}, lp.upper[static_cast<size_t>(j)]});
    }
    out.lower.clear();
    out.upper.clear();
    return out;
}

LpOutcome solve_impl(const LinProgram& input, bool minimize, LazyRows* lazy) {
    LinProgram active = with_bound_rows(input);
    for (const auto& r : active.equalities)
        for (const auto& t : r.terms)
            if (t.var < 0 || t.var >= active.num_vars || !std::isfinite(t.coef))
                throw InputError("lp: bad coefficient in equality row");
    for (const auto& r : active.inequalities)
        for (const auto& t : r.terms)
            if (t.var < 0 || t.var >= active.num_vars || !std::isfinite(t.coef))
                throw InputError("lp: bad coefficient in inequality row");
    if (minimize && active.objective.empty())
        throw InputError("lp: solve_min requires an objective");

    const double tol = lp_tolerance(input);
    LpOutcome out;
    for (int round = 1; round <= kMaxActivationRounds; ++round) {
        Simplex spx(minimize ? active
                             : [&] {
                                   LinProgram f = active;
                                   f.objective.clear();
                                   return f;
                               }());
        std::vector<double> x, ray;
        long iters = out.iterations;
        LpStatus st = spx.run(minimize, x, ray, tol, iters);
        out.iterations = iters;
        out.activation_rounds = round;

        if (st == LpStatus::Infeasible) {
            out.status = LpStatus::Infeasible;
            return out;  // infeasible subset => infeasible whole
        }
        if (lazy) {
            auto extra = lazy->violated(x, tol, kActivationBatch);
            if (!extra.empty()) {
                SFLOG_DEBUG("lp: round " << round << " adds " << extra.size()
                                         << " lazy rows");
                for (auto& r : extra) active.inequalities.push_back(std::move(r));
                continue;
            }
            if (st == LpStatus::Unbounded) {
                auto cuts = lazy->ray_cuts(x, ray, tol, kActivationBatch);
                if (!cuts.empty()) {
                    SFLOG_DEBUG("lp: round " << round << " cuts unbounded ray with "
                                             << cuts.size() << " rows");
                    for (auto& r : cuts) active.inequalities.push_back(std::move(r));
                    continue;
                }
            }
        }
        if (st == LpStatus::Unbounded) {
            out.status = LpStatus::Unbounded;
            out.x = std::move(x);
            return out;
        }
        // verify the witness against every materialized constraint
        double viol = max_violation(active, x);
        if (viol > tol)
            throw SolverFailure("lp: witness verification failed (violation " +
                                std::to_string(viol) + ")");
        out.status = LpStatus::Feasible;
        out.x = std::move(x);
        out.max_violation = viol;
        if (!input.objective.empty()) {
            out.objective = 0.0;
            for (int j = 0; j < input.num_vars; ++j)
                out.objective +=
                    input.objective[static_cast<size_t>(j)] * out.x[static_cast<size_t>(j)];
        }
        return out;
    }
    throw SolverFailure("lp: activation rounds exhausted");
}

}  // namespace

std::vector<LinRow> LazyRows::ray_cuts(std::span<const double>,
                                       std::span<const double>, double, int) {
    return {};
}

namespace {
double g_lp_tol_override = -1.0;
}

void set_lp_tolerance_override(double tol) { g_lp_tol_override = tol; }

double lp_tolerance(const LinProgram& lp) {
    if (g_lp_tol_override > 0.0) return g_lp_tol_override;
    double mx = 0.0;
    for (const auto& r : lp.equalities) mx = std::max(mx, std::abs(r.rhs));
    for (const auto& r : lp.inequalities) mx = std::max(mx, std::abs(r.rhs));
    return 1e-8 * (1.0 + mx);
}

double row_violation(const LinRow& row, std::span<const double> x, bool equality) {
    double v = eval_row(row, x) - row.rhs;
    return equality ? std::abs(v) : std::max(0.0, v);
}

double max_violation(const LinProgram& lp, std::span<const double> x) {
    double m = 0.0;
    for (const auto& r : lp.equalities) m = std::max(m, row_violation(r, x, true));
    for (const auto& r : lp.inequalities) m = std::max(m, row_violation(r, x, false));
    return m;
}

LpOutcome solve_feasibility(const LinProgram& lp, LazyRows* lazy) {
    return solve_impl(lp, false, lazy);
}

LpOutcome solve_min(const LinProgram& lp, LazyRows* lazy) {
    return solve_impl(lp, true, lazy);
}

std::string dump_lp(const LinProgram& lp) {
    std::ostringstream os;
    os.precision(17);
    auto write_row = [&](const LinRow& r, const char* rel, int idx, char tag) {
        os << " " << tag << idx << ":";
        for (const auto& t : r.terms)
            os << (t.coef >= 0 ? " + " : " - ") << std::abs(t.coef) << " x" << t.var;
        os << " " << rel << " " << r.rhs << "\n";
    };
    if (!lp.objective.empty()) {
        os << "Minimize\n obj:";
        for (int j = 0; j < lp.num_vars; ++j) {
            double c = lp.objective[static_cast<size_t>(j)];
            if (c != 0.0) os << (c >= 0 ? " + " : " - ") << std::abs(c) << " x" << j;
        }
        os << "\n";
    }
    os << "Subject To\n";
    for (size_t i = 0; i < lp.equalities.size(); ++i)
        write_row(lp.equalities[i], "=", static_cast<int>(i), 'e');
    for (size_t i = 0; i < lp.inequalities.size(); ++i)
        write_row(lp.inequalities[i], "<=", static_cast<int>(i), 'c');
    os << "Bounds\n";
    for (int j = 0; j < lp.num_vars; ++j) {
        bool lo = !lp.lower.empty() && std::isfinite(lp.lower[static_cast<size_t>(j)]);
        bool hi = !lp.upper.empty() && std::isfinite(lp.upper[static_cast<size_t>(j)]);
        if (!lo && !hi)
            os << " x" << j << " free\n";
        else {
            if (lo) os << " x" << j << " >= " << lp.lower[static_cast<size_t>(j)] << "\n";
            if (hi) os << " x" << j << " <= " << lp.upper[static_cast<size_t>(j)] << "\n";
        }
    }
    os << "End\n";
    return os.str();
}

}  // namespace strutforge
