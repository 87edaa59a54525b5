#include "strutforge/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <set>

#include "strutforge/log.hpp"

namespace strutforge {

namespace {

int wrap(int i, int n) { return ((i % n) + n) % n; }

Point2 tangent_intersection(Point2 c, double sa, double sb, double t1, double t2) {
    // intersection of the ellipse tangents at parameters t1, t2
    // (x-c)/sa * cos t + (y-c)/sb * sin t = 1
    double a11 = std::cos(t1) / sa, a12 = std::sin(t1) / sb;
    double a21 = std::cos(t2) / sa, a22 = std::sin(t2) / sb;
    double det = a11 * a22 - a12 * a21;
    double x = (a22 - a12) / det;
    double y = (a11 - a21) / det;
    return {c.x + x, c.y + y};
}

}  // namespace

Obstacle approximate_circle(Point2 center, double radius, int sides,
                            std::string label) {
    return approximate_ellipse(center, radius, radius, sides, std::move(label));
}

Obstacle approximate_ellipse(Point2 center, double semi_x, double semi_y,
                             int sides, std::string label) {
    if (sides < 3) throw InputError("approximate_ellipse: need at least 3 sides");
    if (!(semi_x > 0.0) || !(semi_y > 0.0))
        throw InputError("approximate_ellipse: semi-axes must be positive");
    std::vector<Point2> verts;
    verts.reserve(static_cast<size_t>(sides));
    for (int j = 0; j < sides; ++j) {
        double t1 = 2.0 * M_PI * j / sides;
        double t2 = 2.0 * M_PI * (j + 1) / sides;
        verts.push_back(tangent_intersection(center, semi_x, semi_y, t1, t2));
    }
    return {ConvexPolygonCCW::from_ccw_vertices(std::move(verts)), std::move(label),
            false};
}

Obstacle approximate_halfdisk(Point2 center, double radius, int sides,
                              std::string label) {
    if (sides < 3) throw InputError("approximate_halfdisk: need at least 3 sides");
    if (!(radius > 0.0)) throw InputError("approximate_halfdisk: radius must be positive");
    const int m = sides - 1;  // tangent lines over the arc; flat edge is exact
    auto theta = [&](int j) { return M_PI * (j + 0.5) / m; };
    std::vector<Point2> verts;
    verts.reserve(static_cast<size_t>(sides));
    verts.push_back({center.x + radius / std::cos(theta(0)), center.y});
    for (int j = 0; j + 1 < m; ++j) {
        double t1 = theta(j), t2 = theta(j + 1);
        // x cos t + y sin t = r at both angles
        double det = std::cos(t1) * std::sin(t2) - std::sin(t1) * std::cos(t2);
        double x = radius * (std::sin(t2) - std::sin(t1)) / det;
        double y = radius * (std::cos(t1) - std::cos(t2)) / det;
        verts.push_back({center.x + x, center.y + y});
    }
    verts.push_back({center.x - radius / std::cos(theta(0)), center.y});
    return {ConvexPolygonCCW::from_ccw_vertices(std::move(verts)), std::move(label),
            false};
}

Obstacle obstacle_from_polygon(std::vector<Point2> verts, std::string label) {
    bool ok = verts.size() >= 3 && is_ccw_convex(verts);
    if (ok)
        return {ConvexPolygonCCW::from_ccw_vertices(std::move(verts)),
                std::move(label), false};
    return {convex_hull(verts), std::move(label), true};
}

ForceSystem discretize_supports(const ForceSystem& fs,
                                std::span<const SupportSegment> supports) {
    struct Entry {
        Point2 p;
        Vec2 f;
        bool reactive;
    };
    std::vector<Entry> entries;
    for (int i = 0; i < fs.size(); ++i)
        entries.push_back({fs.point(i), fs.force(i), fs.is_reactive(i)});
    std::vector<std::pair<Point2, int>> generated;  // point, segment index
    for (size_t s = 0; s < supports.size(); ++s) {
        const auto& seg = supports[s];
        if (seg.count < 2)
            throw InputError("discretize_supports: segment " + std::to_string(s) +
                             " needs count >= 2");
        if ((seg.segment.b - seg.segment.a).norm() <= 0.0)
            throw InputError("discretize_supports: segment " + std::to_string(s) +
                             " is degenerate");
        for (int j = 0; j < seg.count; ++j) {
            double t = static_cast<double>(j) / (seg.count - 1);
            generated.push_back(
                {seg.segment.a + (seg.segment.b - seg.segment.a) * t,
                 static_cast<int>(s)});
        }
    }
    std::vector<Point2> all;
    for (const auto& e : entries) all.push_back(e.p);
    for (const auto& [p, s] : generated) all.push_back(p);

    ConvexPolygonCCW hull = convex_hull(all);
    const double tol = std::max(hull.tol(), 1e-12 * bbox_diagonal(all));
    auto on_hull_boundary = [&](Point2 p) {
        const auto& v = hull.vertices();
        const int n = hull.size();
        for (int i = 0; i < n; ++i) {
            Point2 a = v[static_cast<size_t>(i)];
            Vec2 d = v[static_cast<size_t>((i + 1) % n)] - a;
            double t = std::clamp((p - a).dot(d) / d.dot(d), 0.0, 1.0);
            if ((p - (a + d * t)).norm() <= tol * 10.0) return true;
        }
        return false;
    };
    for (const auto& e : entries)
        if (!on_hull_boundary(e.p))
            throw InputError("discretize_supports: original point falls inside the "
                             "hull after insertion");
    for (const auto& [p, s] : generated)
        if (!on_hull_boundary(p))
            throw InputError("discretize_supports: support segment " +
                             std::to_string(s) + " breaks convex position");

    // order all points CCW along the boundary: angular sort around an interior
    // point, starting from the lexicographically smallest
    std::vector<Entry> merged = entries;
    for (const auto& [p, s] : generated) merged.push_back({p, {0, 0}, true});
    Point2 c{0, 0};
    for (const auto& v : hull.vertices()) c += v;
    c = c / hull.size();
    std::stable_sort(merged.begin(), merged.end(), [&](const Entry& a, const Entry& b) {
        double aa = std::atan2(a.p.y - c.y, a.p.x - c.x);
        double ab = std::atan2(b.p.y - c.y, b.p.x - c.x);
        if (aa != ab) return aa < ab;
        return a.p.x != b.p.x ? a.p.x < b.p.x : a.p.y < b.p.y;
    });
    size_t start = 0;
    for (size_t i = 1; i < merged.size(); ++i) {
        if (merged[i].p.y < merged[start].p.y ||
            (merged[i].p.y == merged[start].p.y && merged[i].p.x < merged[start].p.x))
            start = i;
    }
    std::rotate(merged.begin(), merged.begin() + static_cast<long>(start), merged.end());

    ForceSystem out;
    out.bal_tol = fs.bal_tol;
    for (size_t i = 0; i < merged.size(); ++i) {
        out.points.push_back(merged[i].p);
        out.forces.push_back(merged[i].reactive ? Vec2{0, 0} : merged[i].f);
        if (merged[i].reactive) out.reactive.push_back(static_cast<int>(i));
    }
    out.validate();
    return out;
}

bool quick_infeasibility(const ForceSystem& fs, const Obstacle& obs) {
    ConvexPolygonCCW hull = convex_hull(fs.points);
    bool outside = false;
    for (const auto& v : obs.polygon.vertices())
        if (!hull.contains(v)) {
            outside = true;
            break;
        }
    if (!outside) return false;
    StrutNet net = open_net(fs);
    for (const auto& s : net.struts) {
        Segment seg{net.nodes[static_cast<size_t>(s.a)],
                    net.nodes[static_cast<size_t>(s.b)]};
        if (segment_crosses_interior(seg, obs.polygon)) return true;
    }
    return false;
}

// ---------------------------------------------------------------------------
// ReactiveProgram
// ---------------------------------------------------------------------------

ReactiveProgram::ReactiveProgram(const ForceSystem& fs,
                                 std::span<const Obstacle> obstacles)
    : fs_(fs), n_(fs.size()) {
    fs_.validate();
    jump_var_.assign(static_cast<size_t>(n_), -1);
    int slot = 0;
    for (int r : fs_.reactive) {
        jump_var_[static_cast<size_t>(r)] = slot;
        slot += 2;
    }
    nu_ = slot + 3 * static_cast<int>(obstacles.size());
    for (const auto& o : obstacles) {
        obs_verts_.emplace_back(o.polygon.vertices().begin(),
                                o.polygon.vertices().end());
        obs_centroid_.push_back(o.polygon.centroid());
    }
    // constants of the substitution chain w_0 = 0, d_0 = 0,
    // w_{k+1} = w_k + jump_k, d_{k+1} = d_k - jump_k . p_k
    w0_.assign(static_cast<size_t>(n_), Vec2{0, 0});
    d0_.assign(static_cast<size_t>(n_), 0.0);
    for (int k = 0; k + 1 < n_; ++k) {
        Vec2 jump = fs_.is_reactive(k) ? Vec2{0, 0} : rot90(fs_.force(k));
        w0_[static_cast<size_t>(k + 1)] = w0_[static_cast<size_t>(k)] + jump;
        d0_[static_cast<size_t>(k + 1)] =
            d0_[static_cast<size_t>(k)] - jump.dot(fs_.point(k));
    }
}

LinRow ReactiveProgram::make_row(std::span<const WdTerm> wd,
                                 std::span<const LinTerm> cleave_terms,
                                 double rhs) const {
    std::vector<double> dense(static_cast<size_t>(nu_), 0.0);
    double constant = 0.0;
    for (const auto& t : wd) {
        constant += t.alpha.dot(w0_[static_cast<size_t>(t.k)]) +
                    t.beta * d0_[static_cast<size_t>(t.k)];
        for (int r : fs_.reactive) {
            if (r >= t.k) break;
            int s = jump_var_[static_cast<size_t>(r)];
            dense[static_cast<size_t>(s)] += t.alpha.x - t.beta * fs_.point(r).x;
            dense[static_cast<size_t>(s + 1)] += t.alpha.y - t.beta * fs_.point(r).y;
        }
    }
    for (const auto& t : cleave_terms) dense[static_cast<size_t>(t.var)] += t.coef;
    LinRow row;
    row.rhs = rhs - constant;
    for (int j = 0; j < nu_; ++j)
        if (dense[static_cast<size_t>(j)] != 0.0)
            row.terms.push_back({j, dense[static_cast<size_t>(j)]});
    return row;
}

LinProgram ReactiveProgram::base_program(const Objective& objective) const {
    LinProgram lp;
    lp.num_vars = nu_;
    // cycle closure: sum of jumps vanishes (force balance), and the offset
    // chain returns to zero (torque balance)
    Vec2 wsum{0, 0};
    double dsum = 0.0;
    for (int k = 0; k < n_; ++k) {
        if (fs_.is_reactive(k)) continue;
        Vec2 jump = rot90(fs_.force(k));
        wsum += jump;
        dsum += jump.dot(fs_.point(k));
    }
    LinRow cx, cy, ct;
    for (int r : fs_.reactive) {
        int s = jump_var_[static_cast<size_t>(r)];
        cx.terms.push_back({s, 1.0});
        cy.terms.push_back({s + 1, 1.0});
        ct.terms.push_back({s, fs_.point(r).x});
        ct.terms.push_back({s + 1, fs_.point(r).y});
    }
    cx.rhs = -wsum.x;
    cy.rhs = -wsum.y;
    ct.rhs = -dsum;
    lp.equalities = {cx, cy, ct};

    // seed concavity rows for near neighbours; the rest arrive lazily
    for (int i = 0; i < n_; ++i) {
        for (int off : {-2, -1, 2}) {
            int j = wrap(i + off, n_);
            if (j == i) continue;
            WdTerm wd[2] = {{i, fs_.point(i), 1.0}, {j, -fs_.point(i), -1.0}};
            LinRow row = make_row(wd, {}, 0.0);
            if (!row.terms.empty() || row.rhs < 0.0) lp.inequalities.push_back(row);
        }
    }
    switch (objective.kind) {
        case ObjectiveKind::None:
            break;
        case ObjectiveKind::TotalWeight:
            lp.objective = objective_total_weight();
            break;
        case ObjectiveKind::CleaveHeight:
            lp.objective = objective_cleave_height(objective.obstacle);
            break;
    }
    return lp;
}

std::vector<PlaneFunc> ReactiveProgram::planes_at(std::span<const double> g) const {
    std::vector<PlaneFunc> planes(static_cast<size_t>(n_));
    Vec2 w{0, 0};
    double d = 0.0;
    for (int k = 0; k < n_; ++k) {
        planes[static_cast<size_t>(k)] = PlaneFunc{w, d};
        Vec2 jump;
        if (fs_.is_reactive(k)) {
            int s = jump_var_[static_cast<size_t>(k)];
            jump = {g[static_cast<size_t>(s)], g[static_cast<size_t>(s + 1)]};
        } else {
            jump = rot90(fs_.force(k));
        }
        w += jump;
        d -= jump.dot(fs_.point(k));
    }
    return planes;
}

std::vector<PlaneFunc> ReactiveProgram::cleaves_at(std::span<const double> g) const {
    std::vector<PlaneFunc> out;
    int base = 2 * static_cast<int>(fs_.reactive.size());
    for (size_t q = 0; q < obs_verts_.size(); ++q) {
        int s = base + 3 * static_cast<int>(q);
        out.push_back(PlaneFunc{{g[static_cast<size_t>(s)], g[static_cast<size_t>(s + 1)]},
                                g[static_cast<size_t>(s + 2)]});
    }
    return out;
}

std::vector<double> ReactiveProgram::objective_total_weight() const {
    // -sum over boundary edges of (w_k . outward normal) * length, i.e.
    // sum_k w_k . rot90(p_k - p_{k-1}); only the unknown jumps survive.
    std::vector<double> c(static_cast<size_t>(nu_), 0.0);
    Vec2 suffix{0, 0};  // sum of edge rotations for k > r
    std::vector<Vec2> alpha(static_cast<size_t>(n_));
    for (int k = 0; k < n_; ++k)
        alpha[static_cast<size_t>(k)] = rot90(fs_.point(k) - fs_.point(k - 1));
    for (int r = n_ - 1; r >= 0; --r) {
        if (fs_.is_reactive(r)) {
            int s = jump_var_[static_cast<size_t>(r)];
            c[static_cast<size_t>(s)] = suffix.x;
            c[static_cast<size_t>(s + 1)] = suffix.y;
        }
        suffix += alpha[static_cast<size_t>(r)];
    }
    return c;
}

std::vector<double> ReactiveProgram::objective_cleave_height(int q) const {
    if (q < 0 || q >= num_obstacles())
        throw InputError("objective_cleave_height: obstacle index out of range");
    std::vector<double> c(static_cast<size_t>(nu_), 0.0);
    int s = 2 * static_cast<int>(fs_.reactive.size()) + 3 * q;
    c[static_cast<size_t>(s)] = obs_centroid_[static_cast<size_t>(q)].x;
    c[static_cast<size_t>(s + 1)] = obs_centroid_[static_cast<size_t>(q)].y;
    c[static_cast<size_t>(s + 2)] = 1.0;
    return c;
}

double ReactiveProgram::objective_constant(const Objective& objective) const {
    if (objective.kind != ObjectiveKind::TotalWeight) return 0.0;
    double c = 0.0;
    for (int k = 0; k < n_; ++k)
        c += w0_[static_cast<size_t>(k)].dot(rot90(fs_.point(k) - fs_.point(k - 1)));
    return c;
}

// Lazy generator for the four big inequality families: vertex concavity (all
// ordered pairs), cleave-above-support, tangent-above-obstacle and the
// cross-obstacle block.
class ReactiveProgram::Rows : public LazyRows {
  public:
    explicit Rows(const ReactiveProgram& rp) : rp_(rp) {
        n_ = rp_.n_;
        s_ = rp_.num_obstacles();
        max_m_ = 1;
        for (const auto& ov : rp_.obs_verts_)
            max_m_ = std::max(max_m_, static_cast<int>(ov.size()));
        base_e_ = static_cast<uint64_t>(n_) * n_;
        base_f_ = base_e_ + static_cast<uint64_t>(s_) * n_;
        base_g_ = base_f_ + static_cast<uint64_t>(s_) * max_m_ * n_;
    }

    std::vector<LinRow> violated(std::span<const double> x, double tol,
                                 int max_rows) override {
        return collect(x, tol, max_rows, false);
    }

    std::vector<LinRow> ray_cuts(std::span<const double> x,
                                 std::span<const double> ray, double tol,
                                 int max_rows) override {
        (void)x;  // rows are homogeneous, so growth along the ray is what counts
        return collect(ray, tol, max_rows, true);
    }

  private:
    std::vector<LinRow> collect(std::span<const double> g, double tol,
                                int max_rows, bool ray_mode) {
        auto planes = rp_.planes_at(g);
        auto cleaves = rp_.cleaves_at(g);
        std::vector<std::pair<double, uint64_t>> cand;
        auto consider = [&](double v, uint64_t id) {
            if (v > tol && !active_.count(id)) cand.push_back({v, id});
        };
        for (int i = 0; i < n_; ++i) {
            Point2 p = rp_.fs_.point(i);
            double own = planes[static_cast<size_t>(i)](p);
            for (int j = 0; j < n_; ++j) {
                if (j == i) continue;
                consider(own - planes[static_cast<size_t>(j)](p),
                         static_cast<uint64_t>(i) * n_ + j);
            }
            for (int q = 0; q < s_; ++q)
                consider(own - cleaves[static_cast<size_t>(q)](p),
                         base_e_ + static_cast<uint64_t>(q) * n_ + i);
        }
        for (int q = 0; q < s_; ++q) {
            const auto& ov = rp_.obs_verts_[static_cast<size_t>(q)];
            for (size_t p = 0; p < ov.size(); ++p) {
                double lq = cleaves[static_cast<size_t>(q)](ov[p]);
                for (int i = 0; i < n_; ++i)
                    consider(lq - planes[static_cast<size_t>(i)](ov[p]),
                             base_f_ + (static_cast<uint64_t>(q) * max_m_ + p) *
                                           static_cast<uint64_t>(n_) +
                                 i);
                for (int r = 0; r < s_; ++r) {
                    if (r == q) continue;
                    consider(lq - cleaves[static_cast<size_t>(r)](ov[p]),
                             base_g_ + (static_cast<uint64_t>(q) * s_ + r) * max_m_ + p);
                }
            }
        }
        std::sort(cand.begin(), cand.end(), [](const auto& a, const auto& b) {
            if (a.first != b.first) return a.first > b.first;
            return a.second < b.second;
        });
        if (static_cast<int>(cand.size()) > max_rows) cand.resize(static_cast<size_t>(max_rows));
        std::vector<LinRow> rows;
        for (const auto& [v, id] : cand) {
            rows.push_back(build(id));
            if (!ray_mode) active_.insert(id);
            else active_.insert(id);
        }
        return rows;
    }

    LinRow build(uint64_t id) const {
        const auto& fs = rp_.fs_;
        int base_slot = 2 * static_cast<int>(fs.reactive.size());
        if (id < base_e_) {
            int i = static_cast<int>(id / n_), j = static_cast<int>(id % n_);
            WdTerm wd[2] = {{i, fs.point(i), 1.0}, {j, -fs.point(i), -1.0}};
            return rp_.make_row(wd, {}, 0.0);
        }
        if (id < base_f_) {
            uint64_t rel = id - base_e_;
            int q = static_cast<int>(rel / n_), i = static_cast<int>(rel % n_);
            Point2 p = fs.point(i);
            WdTerm wd[1] = {{i, p, 1.0}};
            LinTerm ct[3] = {{base_slot + 3 * q, -p.x},
                             {base_slot + 3 * q + 1, -p.y},
                             {base_slot + 3 * q + 2, -1.0}};
            return rp_.make_row(wd, ct, 0.0);
        }
        if (id < base_g_) {
            uint64_t rel = id - base_f_;
            int i = static_cast<int>(rel % n_);
            uint64_t qp = rel / n_;
            int q = static_cast<int>(qp / max_m_), p = static_cast<int>(qp % max_m_);
            Point2 y = rp_.obs_verts_[static_cast<size_t>(q)][static_cast<size_t>(p)];
            WdTerm wd[1] = {{i, -y, -1.0}};
            LinTerm ct[3] = {{base_slot + 3 * q, y.x},
                             {base_slot + 3 * q + 1, y.y},
                             {base_slot + 3 * q + 2, 1.0}};
            return rp_.make_row(wd, ct, 0.0);
        }
        uint64_t rel = id - base_g_;
        int p = static_cast<int>(rel % max_m_);
        uint64_t qr = rel / max_m_;
        int q = static_cast<int>(qr / s_), r = static_cast<int>(qr % s_);
        Point2 y = rp_.obs_verts_[static_cast<size_t>(q)][static_cast<size_t>(p)];
        LinRow row;
        row.rhs = 0.0;
        row.terms = {{base_slot + 3 * q, y.x},      {base_slot + 3 * q + 1, y.y},
                     {base_slot + 3 * q + 2, 1.0},  {base_slot + 3 * r, -y.x},
                     {base_slot + 3 * r + 1, -y.y}, {base_slot + 3 * r + 2, -1.0}};
        return row;
    }

    const ReactiveProgram& rp_;
    int n_ = 0, s_ = 0, max_m_ = 0;
    uint64_t base_e_ = 0, base_f_ = 0, base_g_ = 0;
    std::set<uint64_t> active_;
};

// ---------------------------------------------------------------------------
// result assembly and verification
// ---------------------------------------------------------------------------

namespace {

SynthesisResult finalize_result(const ForceSystem& fs,
                                std::vector<PlaneFunc> tangent,
                                std::vector<PlaneFunc> cleaving,
                                std::span<const Obstacle> obstacles,
                                std::optional<double> objective_value,
                                long iterations) {
    SynthesisResult res;
    res.status = LpStatus::Feasible;
    res.tangent = std::move(tangent);
    res.cleaving = std::move(cleaving);
    res.objective_value = objective_value;
    res.lp_iterations = iterations;

    const int n = fs.size();
    std::vector<PlaneFunc> all = res.tangent;
    all.insert(all.end(), res.cleaving.begin(), res.cleaving.end());
    ConcaveEnvelope env = min_envelope(all, convex_hull(fs.points));

    // recover reactive forces from the gradient jumps
    std::vector<AppliedForce> applied;
    double fscale = 1.0;
    for (int i = 0; i < n; ++i) {
        Vec2 f;
        if (fs.is_reactive(i)) {
            f = -rot90(res.tangent[static_cast<size_t>(wrap(i + 1, n))].v -
                       res.tangent[static_cast<size_t>(i)].v);
            res.reactive_forces.push_back({i, f});
        } else {
            f = fs.force(i);
        }
        fscale = std::max(fscale, f.norm());
        applied.push_back({fs.point(i), f});
    }
    const double tol_abs = fs.bal_tol * fscale;
    res.net = extract_net(env, applied, tol_abs, fs.points, res.tangent);

    // per-obstacle region and avoidance checks; the region boundary carries
    // the LP witness slack, so containment is checked at a matching tolerance
    const double gap_tol = 1e-6 * bbox_diagonal(env.domain.vertices());
    const double contact_tol = env.domain.tol() * 10.0;
    for (size_t q = 0; q < obstacles.size(); ++q) {
        ConvexPolygonCCW gamma = gamma_region(env, res.cleaving[q]);
        for (const auto& y : obstacles[q].polygon.vertices())
            if (polygon_exceed(gamma, y) > gap_tol)
                throw InternalError("synthesis: obstacle escapes its loop region");
        res.gamma.push_back(std::move(gamma));
    }
    for (const auto& s : res.net->struts) {
        Segment seg{res.net->nodes[static_cast<size_t>(s.a)],
                    res.net->nodes[static_cast<size_t>(s.b)]};
        for (const auto& o : obstacles) {
            if (segment_crosses_interior(seg, o.polygon))
                throw InternalError("synthesis: strut crosses an obstacle");
            for (const auto& y : o.polygon.vertices()) {
                Vec2 d = seg.b - seg.a;
                double t = std::clamp((y - seg.a).dot(d) / d.dot(d), 0.0, 1.0);
                if ((y - (seg.a + d * t)).norm() <= contact_tol)
                    res.boundary_contact = true;
            }
        }
    }
    res.envelope = std::move(env);
    return res;
}

// Shared z-system assembly: cleaving-plane unknowns over fixed tangent planes.
SynthesisResult avoid_fixed_planes(const ForceSystem& fs,
                                   std::span<const Obstacle> obstacles,
                                   const Objective& objective) {
    fs.validate();
    if (!fs.reactive.empty())
        throw InputError("avoid: reactive systems go through solve_reactive");
    if (!check_compressibility(fs))
        throw InputError("avoid: force system is not compressible");
    if (obstacles.empty()) throw InputError("avoid: need at least one obstacle");

    TangentPlanes tp = tangent_planes(fs);
    ConcaveEnvelope phi0 = min_envelope(tp.planes, convex_hull(fs.points));
    const int n = fs.size();
    const int s = static_cast<int>(obstacles.size());

    LinProgram lp;
    lp.num_vars = 3 * s;
    for (int q = 0; q < s; ++q) {
        // support side: v.x_i + c >= a_i
        for (int i = 0; i < n; ++i) {
            Point2 p = fs.point(i);
            lp.inequalities.push_back(
                {{{3 * q, -p.x}, {3 * q + 1, -p.y}, {3 * q + 2, -1.0}},
                 -tp.support[static_cast<size_t>(i)]});
        }
        // obstacle side: v.y_p + c <= phi0(y_p), plus cross rows
        for (const auto& y : obstacles[static_cast<size_t>(q)].polygon.vertices()) {
            lp.inequalities.push_back(
                {{{3 * q, y.x}, {3 * q + 1, y.y}, {3 * q + 2, 1.0}}, phi0.value(y)});
            for (int r = 0; r < s; ++r) {
                if (r == q) continue;
                lp.inequalities.push_back({{{3 * q, y.x},
                                            {3 * q + 1, y.y},
                                            {3 * q + 2, 1.0},
                                            {3 * r, -y.x},
                                            {3 * r + 1, -y.y},
                                            {3 * r + 2, -1.0}},
                                           0.0});
            }
        }
    }
    LpOutcome out;
    std::optional<double> objective_value;
    if (objective.kind == ObjectiveKind::CleaveHeight) {
        if (objective.obstacle < 0 || objective.obstacle >= s)
            throw InputError("avoid: cleave-height obstacle index out of range");
        Point2 yc = obstacles[static_cast<size_t>(objective.obstacle)].polygon.centroid();
        lp.objective.assign(static_cast<size_t>(lp.num_vars), 0.0);
        lp.objective[static_cast<size_t>(3 * objective.obstacle)] = yc.x;
        lp.objective[static_cast<size_t>(3 * objective.obstacle + 1)] = yc.y;
        lp.objective[static_cast<size_t>(3 * objective.obstacle + 2)] = 1.0;
        out = solve_min(lp);
        if (out.status == LpStatus::Feasible) objective_value = out.objective;
    } else {
        // total weight does not involve the cleaving planes; feasibility decides
        out = solve_feasibility(lp);
    }
    if (out.status != LpStatus::Feasible) {
        SynthesisResult res;
        res.status = out.status;
        res.tangent = tp.planes;
        res.lp_iterations = out.iterations;
        return res;
    }
    std::vector<PlaneFunc> cleaving;
    for (int q = 0; q < s; ++q)
        cleaving.push_back(PlaneFunc{{out.x[static_cast<size_t>(3 * q)],
                                      out.x[static_cast<size_t>(3 * q + 1)]},
                                     out.x[static_cast<size_t>(3 * q + 2)]});
    SynthesisResult res = finalize_result(fs, tp.planes, std::move(cleaving),
                                          obstacles, objective_value, out.iterations);
    return res;
}

}  // namespace

SynthesisResult avoid_single(const ForceSystem& fs, const Obstacle& obs) {
    return avoid_fixed_planes(fs, std::span<const Obstacle>(&obs, 1), {ObjectiveKind::None, -1});
}

SynthesisResult avoid_multi(const ForceSystem& fs,
                            std::span<const Obstacle> obstacles) {
    return avoid_fixed_planes(fs, obstacles, {ObjectiveKind::None, -1});
}

SynthesisResult solve_reactive(const ForceSystem& fs,
                               std::span<const Obstacle> obstacles,
                               Objective objective) {
    fs.validate();
    if (objective.kind == ObjectiveKind::CleaveHeight &&
        (objective.obstacle < 0 ||
         objective.obstacle >= static_cast<int>(obstacles.size())))
        throw InputError("solve_reactive: cleave-height obstacle index out of range");

    if (fs.reactive.empty()) {
        // all forces given: the tangent planes are fixed, only cleaving planes
        // (if any) remain
        if (obstacles.empty()) {
            if (!check_compressibility(fs))
                return SynthesisResult{};  // Infeasible
            TangentPlanes tp = tangent_planes(fs);
            return finalize_result(fs, tp.planes, {}, obstacles, std::nullopt, 0);
        }
        return avoid_fixed_planes(fs, obstacles, objective);
    }

    ReactiveProgram rp(fs, obstacles);
    LinProgram lp = rp.base_program(objective);
    ReactiveProgram::Rows lazy(rp);
    LpOutcome out = objective.kind == ObjectiveKind::None
                        ? solve_feasibility(lp, &lazy)
                        : solve_min(lp, &lazy);
    SFLOG_INFO("solve_reactive: status " << static_cast<int>(out.status) << " after "
                                         << out.iterations << " pivots, "
                                         << out.activation_rounds << " rounds");
    if (out.status != LpStatus::Feasible) {
        SynthesisResult res;
        res.status = out.status;
        res.lp_iterations = out.iterations;
        return res;
    }
    std::optional<double> objective_value;
    if (objective.kind != ObjectiveKind::None)
        objective_value = out.objective + rp.objective_constant(objective);
    return finalize_result(fs, rp.planes_at(out.x), rp.cleaves_at(out.x), obstacles,
                           objective_value, out.iterations);
}

}  // namespace strutforge
