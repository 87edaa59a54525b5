#include "strutforge/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "strutforge/errors.hpp"

namespace strutforge {

namespace {

double plane_scale(std::span<const PlaneFunc> planes, double diag) {
    double s = 1.0;
    for (const auto& p : planes) s = std::max(s, p.v.norm() * diag + std::abs(p.c));
    return s;
}

// Planes that coincide within solver noise act as one; the lowest index owns
// the shared cell.
std::vector<int> dedup_planes(std::span<const PlaneFunc> planes, double diag) {
    const double tol = 1e-7 * plane_scale(planes, diag);
    std::vector<int> rep(planes.size());
    for (size_t i = 0; i < planes.size(); ++i) {
        rep[i] = static_cast<int>(i);
        for (size_t j = 0; j < i; ++j) {
            if (rep[j] != static_cast<int>(j)) continue;
            double d = (planes[i].v - planes[j].v).norm() * diag +
                       std::abs(planes[i].c - planes[j].c);
            if (d <= tol) {
                rep[i] = static_cast<int>(j);
                break;
            }
        }
    }
    return rep;
}

}  // namespace

double ConcaveEnvelope::value(Point2 p) const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& pl : planes) m = std::min(m, pl(p));
    return m;
}

int ConcaveEnvelope::active_plane(Point2 p) const {
    int best = 0;
    double m = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < planes.size(); ++i) {
        double v = planes[i](p);
        if (v < m) {
            m = v;
            best = static_cast<int>(i);
        }
    }
    return best;
}

const EnvelopeCell* ConcaveEnvelope::cell_of_plane(int plane_idx) const {
    for (const auto& c : cells)
        if (c.plane == plane_idx) return &c;
    return nullptr;
}

ConcaveEnvelope min_envelope(std::vector<PlaneFunc> planes, ConvexPolygonCCW domain) {
    if (planes.empty()) throw InputError("min_envelope: need at least one plane");
    for (const auto& p : planes)
        if (!p.finite()) throw InputError("min_envelope: non-finite plane");
    const double diag = bbox_diagonal(domain.vertices());
    const double tol = domain.tol();
    auto rep = dedup_planes(planes, diag);

    ConcaveEnvelope env{std::move(planes), std::move(domain), {}};
    const int m = static_cast<int>(env.planes.size());
    for (int i = 0; i < m; ++i) {
        if (rep[static_cast<size_t>(i)] != i) continue;  // duplicate of a lower index
        std::vector<Point2> poly(env.domain.vertices().begin(),
                                 env.domain.vertices().end());
        for (int j = 0; j < m && !poly.empty(); ++j) {
            if (j == i || rep[static_cast<size_t>(j)] != j) continue;
            // keep L_i <= L_j : (v_i - v_j) . x <= c_j - c_i
            poly = clip_halfplane(poly, env.planes[static_cast<size_t>(i)].v -
                                            env.planes[static_cast<size_t>(j)].v,
                                  env.planes[static_cast<size_t>(j)].c -
                                      env.planes[static_cast<size_t>(i)].c);
        }
        auto cell = ConvexPolygonCCW::sanitize(std::move(poly), tol);
        if (cell) env.cells.push_back({i, std::move(*cell)});
    }
    if (env.cells.empty())
        throw InternalError("min_envelope: no surviving cells");
    return env;
}

ConcaveEnvelope cleave(const ConcaveEnvelope& env, std::span<const PlaneFunc> extra) {
    std::vector<PlaneFunc> all = env.planes;
    all.insert(all.end(), extra.begin(), extra.end());
    return min_envelope(std::move(all), env.domain);
}

ConvexPolygonCCW gamma_region(const ConcaveEnvelope& env, const PlaneFunc& L) {
    std::vector<Point2> poly(env.domain.vertices().begin(),
                             env.domain.vertices().end());
    for (const auto& pl : env.planes) {
        // keep L <= pl
        poly = clip_halfplane(poly, L.v - pl.v, pl.c - L.c);
        if (poly.empty()) break;
    }
    auto region = ConvexPolygonCCW::sanitize(std::move(poly), env.domain.tol());
    if (!region) throw InputError("gamma_region: region is empty");
    return *region;
}

Vec2 StrutNet::residual(int node) const {
    Vec2 r = applied[static_cast<size_t>(node)];
    for (const auto& s : struts) {
        if (s.a != node && s.b != node) continue;
        int other = s.a == node ? s.b : s.a;
        Vec2 d = nodes[static_cast<size_t>(node)] - nodes[static_cast<size_t>(other)];
        double len = d.norm();
        if (len > 0.0) r += d * (s.force / len);
    }
    return r;
}

double StrutNet::max_residual() const {
    double m = 0.0;
    for (size_t i = 0; i < nodes.size(); ++i)
        m = std::max(m, residual(static_cast<int>(i)).norm());
    return m;
}

double StrutNet::min_strut_force() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& s : struts) m = std::min(m, s.force);
    return struts.empty() ? 0.0 : m;
}

double StrutNet::max_strut_force() const {
    double m = 0.0;
    for (const auto& s : struts) m = std::max(m, s.force);
    return m;
}

StrutNet extract_net(const ConcaveEnvelope& env,
                     std::span<const AppliedForce> applied, double bal_tol_abs,
                     std::span<const Point2> boundary_points,
                     std::span<const PlaneFunc> tangent) {
    const double tol = env.domain.tol();
    StrutNet net;

    auto node_id = [&](Point2 p) -> int {
        for (size_t i = 0; i < net.nodes.size(); ++i)
            if ((net.nodes[i] - p).norm() <= tol) return static_cast<int>(i);
        net.nodes.push_back(p);
        return static_cast<int>(net.nodes.size() - 1);
    };

    // register applied-force points first so they always exist as nodes
    for (const auto& af : applied) node_id(af.at);

    std::vector<std::vector<int>> cell_nodes(env.cells.size());
    for (size_t c = 0; c < env.cells.size(); ++c)
        for (const auto& v : env.cells[c].region.vertices())
            cell_nodes[c].push_back(node_id(v));

    // Split cell edges at nodes sitting in their interior so neighbouring
    // cells agree on the subdivision, then match directed sub-edges.
    struct EdgeOwners {
        std::vector<int> planes;
    };
    std::map<std::pair<int, int>, EdgeOwners> edges;
    for (size_t c = 0; c < env.cells.size(); ++c) {
        const auto& ids = cell_nodes[c];
        const int k = static_cast<int>(ids.size());
        for (int e = 0; e < k; ++e) {
            int ia = ids[static_cast<size_t>(e)];
            int ib = ids[static_cast<size_t>((e + 1) % k)];
            if (ia == ib) continue;
            Point2 a = net.nodes[static_cast<size_t>(ia)];
            Point2 b = net.nodes[static_cast<size_t>(ib)];
            Vec2 d = b - a;
            double len = d.norm();
            std::vector<std::pair<double, int>> chain{{0.0, ia}, {1.0, ib}};
            for (size_t w = 0; w < net.nodes.size(); ++w) {
                int iw = static_cast<int>(w);
                if (iw == ia || iw == ib) continue;
                Vec2 ap = net.nodes[w] - a;
                double t = ap.dot(d) / (len * len);
                if (t <= 0.0 || t >= 1.0) continue;
                if (std::abs(cross(d, ap)) / len <= tol)
                    chain.push_back({t, iw});
            }
            std::sort(chain.begin(), chain.end());
            for (size_t s = 0; s + 1 < chain.size(); ++s) {
                int u = chain[s].second, v = chain[s + 1].second;
                if (u == v) continue;
                auto key = std::minmax(u, v);
                edges[{key.first, key.second}].planes.push_back(env.cells[c].plane);
            }
        }
    }

    // tangent plane of the boundary sub-segment containing (a, b), or null
    auto edge_plane = [&](Point2 a, Point2 b) -> const PlaneFunc* {
        const int n = static_cast<int>(boundary_points.size());
        for (int k = 0; k < n; ++k) {
            Point2 s0 = boundary_points[static_cast<size_t>((k + n - 1) % n)];
            Point2 s1 = boundary_points[static_cast<size_t>(k)];
            Vec2 d = s1 - s0;
            double len2 = d.dot(d);
            if (len2 <= tol * tol) continue;
            bool on = true;
            for (Point2 p : {a, b}) {
                double t = (p - s0).dot(d) / len2;
                if (t < -1e-9 || t > 1.0 + 1e-9 ||
                    (p - (s0 + d * t)).norm() > tol) {
                    on = false;
                    break;
                }
            }
            if (on) return &tangent[static_cast<size_t>(k)];
        }
        return nullptr;
    };

    for (const auto& [key, own] : edges) {
        if (own.planes.size() > 2)
            throw InternalError("extract_net: edge shared by more than two cells");
        double f = 0.0;
        if (own.planes.size() == 2) {
            int pa = own.planes[0], pb = own.planes[1];
            if (pa == pb) continue;
            f = (env.planes[static_cast<size_t>(pa)].v -
                 env.planes[static_cast<size_t>(pb)].v)
                    .norm();
        } else if (!tangent.empty()) {
            // boundary edge: a strut appears where the interior cell carries a
            // different plane than the edge itself
            const PlaneFunc* ep = edge_plane(net.nodes[static_cast<size_t>(key.first)],
                                             net.nodes[static_cast<size_t>(key.second)]);
            if (!ep) continue;
            f = (ep->v - env.planes[static_cast<size_t>(own.planes[0])].v).norm();
        } else {
            continue;
        }
        net.struts.push_back({key.first, key.second, f});
    }

    // combine parallel struts that collapsed onto one node pair
    {
        std::map<std::pair<int, int>, double> combined;
        for (const auto& s : net.struts) combined[{s.a, s.b}] += s.force;
        net.struts.clear();
        for (const auto& [k, f] : combined) net.struts.push_back({k.first, k.second, f});
    }

    // prune negligible struts
    double fmax = net.max_strut_force();
    std::erase_if(net.struts,
                  [&](const Strut& s) { return s.force < kStrutPruneRel * fmax; });

    net.applied.assign(net.nodes.size(), Vec2{0, 0});
    for (const auto& af : applied) {
        // registered up front, so this lookup cannot append
        int id = -1;
        for (size_t i = 0; i < net.nodes.size(); ++i)
            if ((net.nodes[i] - af.at).norm() <= tol) {
                id = static_cast<int>(i);
                break;
            }
        if (id < 0) throw InternalError("extract_net: applied force lost its node");
        net.applied[static_cast<size_t>(id)] += af.force;
    }

    // drop isolated nodes carrying no force
    {
        std::vector<char> used(net.nodes.size(), 0);
        for (const auto& s : net.struts)
            used[static_cast<size_t>(s.a)] = used[static_cast<size_t>(s.b)] = 1;
        for (size_t i = 0; i < net.nodes.size(); ++i)
            if (net.applied[i].norm() > bal_tol_abs) used[i] = 1;
        std::vector<int> remap(net.nodes.size(), -1);
        StrutNet out;
        for (size_t i = 0; i < net.nodes.size(); ++i) {
            if (!used[i]) continue;
            remap[i] = static_cast<int>(out.nodes.size());
            out.nodes.push_back(net.nodes[i]);
            out.applied.push_back(net.applied[i]);
        }
        for (auto& s : net.struts)
            out.struts.push_back(
                {remap[static_cast<size_t>(s.a)], remap[static_cast<size_t>(s.b)], s.force});
        net = std::move(out);
    }

    double res = net.max_residual();
    if (res > bal_tol_abs)
        throw InternalError("extract_net: node residual " + std::to_string(res) +
                            " exceeds tolerance");
    return net;
}

ConcaveEnvelope open_envelope(const ForceSystem& fs) {
    TangentPlanes tp = tangent_planes(fs);
    return min_envelope(tp.planes, convex_hull(fs.points));
}

StrutNet open_net(const ForceSystem& fs) {
    TangentPlanes tp = tangent_planes(fs);
    ConcaveEnvelope env = min_envelope(tp.planes, convex_hull(fs.points));
    std::vector<AppliedForce> af;
    for (int i = 0; i < fs.size(); ++i) af.push_back({fs.point(i), fs.force(i)});
    double scale = std::max(fs.force_scale(), 1.0);
    return extract_net(env, af, fs.bal_tol * scale, fs.points, tp.planes);
}

double total_weight(const StrutNet& net) {
    double w = 0.0;
    for (const auto& s : net.struts)
        w += s.force *
             (net.nodes[static_cast<size_t>(s.a)] - net.nodes[static_cast<size_t>(s.b)]).norm();
    return w;
}

double boundary_weight(std::span<const Point2> boundary_points,
                       std::span<const PlaneFunc> tangent) {
    // -sum over boundary edges of (grad L_k . outward normal) * length,
    // written as rot90(edge) . grad over CCW edges
    const int n = static_cast<int>(boundary_points.size());
    double w = 0.0;
    for (int k = 0; k < n; ++k) {
        Point2 a = boundary_points[static_cast<size_t>((k + n - 1) % n)];
        Point2 b = boundary_points[static_cast<size_t>(k)];
        w += tangent[static_cast<size_t>(k)].v.dot(rot90(b - a));
    }
    return w;
}

}  // namespace strutforge
