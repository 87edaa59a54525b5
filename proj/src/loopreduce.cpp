#include "strutforge/loopreduce.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "strutforge/equilibrium.hpp"
#include "strutforge/log.hpp"

namespace strutforge {

namespace {

Vec2 residual_at(const GeneralNet& net, int v) {
    Vec2 r = net.applied[static_cast<size_t>(v)];
    for (const auto& s : net.struts) {
        if (s.a != v && s.b != v) continue;
        int other = s.a == v ? s.b : s.a;
        Vec2 d = net.nodes[static_cast<size_t>(v)] - net.nodes[static_cast<size_t>(other)];
        double len = d.norm();
        if (len > 0.0) r += d * (s.force / len);
    }
    return r;
}

// Proper interior crossing of two struts that share no endpoint; returns the
// parameters along both segments.
bool proper_crossing(Point2 a, Point2 b, Point2 c, Point2 d, double tol,
                     double& t1, double& t2) {
    Vec2 r = b - a, s = d - c;
    double den = cross(r, s);
    double scale = r.norm() * s.norm();
    if (std::abs(den) <= 1e-12 * scale) return false;  // parallel
    t1 = cross(c - a, s) / den;
    t2 = cross(c - a, r) / den;
    double e1 = tol / std::max(r.norm(), 1e-300);
    double e2 = tol / std::max(s.norm(), 1e-300);
    return t1 > e1 && t1 < 1.0 - e1 && t2 > e2 && t2 < 1.0 - e2;
}

double geom_tol_of(const GeneralNet& net) {
    return std::max(geom_tol(net.nodes), 1e-12);
}

}  // namespace

double GeneralNet::force_scale() const {
    double s = 1.0;
    for (const auto& f : applied) s = std::max(s, f.norm());
    for (const auto& st : struts) s = std::max(s, st.force);
    return s;
}

double GeneralNet::bal_tol_abs() const { return bal_tol * force_scale(); }

void GeneralNet::validate() const {
    if (applied.size() != nodes.size())
        throw InputError("net: nodes/applied length mismatch");
    const int n = static_cast<int>(nodes.size());
    for (const auto& p : nodes)
        if (!p.finite()) throw InputError("net: non-finite node");
    const double tol = bal_tol_abs();
    for (const auto& s : struts) {
        if (s.a < 0 || s.a >= n || s.b < 0 || s.b >= n || s.a == s.b)
            throw InputError("net: bad strut endpoints");
        if (s.force < -tol) throw InputError("net: tensile strut");
    }
    for (int v = 0; v < n; ++v)
        if (residual_at(*this, v).norm() > tol)
            throw InputError("net: node " + std::to_string(v) +
                             " is not in equilibrium");
    const double gt = geom_tol_of(*this);
    for (size_t i = 0; i < struts.size(); ++i)
        for (size_t j = i + 1; j < struts.size(); ++j) {
            const auto& s1 = struts[i];
            const auto& s2 = struts[j];
            if (s1.a == s2.a || s1.a == s2.b || s1.b == s2.a || s1.b == s2.b)
                continue;
            double t1, t2;
            if (proper_crossing(nodes[static_cast<size_t>(s1.a)],
                                nodes[static_cast<size_t>(s1.b)],
                                nodes[static_cast<size_t>(s2.a)],
                                nodes[static_cast<size_t>(s2.b)], gt, t1, t2))
                throw InputError("net: struts cross away from shared nodes");
        }
}

GeneralNet planarize(const GeneralNet& net) {
    GeneralNet out = net;
    const double gt = geom_tol_of(net);
    auto node_at = [&](Point2 p) -> int {
        for (size_t i = 0; i < out.nodes.size(); ++i)
            if ((out.nodes[i] - p).norm() <= gt) return static_cast<int>(i);
        out.nodes.push_back(p);
        out.applied.push_back({0, 0});
        return static_cast<int>(out.nodes.size() - 1);
    };
    // collect split points per strut
    std::vector<std::vector<std::pair<double, int>>> splits(net.struts.size());
    for (size_t i = 0; i < net.struts.size(); ++i)
        for (size_t j = i + 1; j < net.struts.size(); ++j) {
            const auto& s1 = net.struts[i];
            const auto& s2 = net.struts[j];
            if (s1.a == s2.a || s1.a == s2.b || s1.b == s2.a || s1.b == s2.b)
                continue;
            double t1, t2;
            if (!proper_crossing(net.nodes[static_cast<size_t>(s1.a)],
                                 net.nodes[static_cast<size_t>(s1.b)],
                                 net.nodes[static_cast<size_t>(s2.a)],
                                 net.nodes[static_cast<size_t>(s2.b)], gt, t1, t2))
                continue;
            Point2 p = net.nodes[static_cast<size_t>(s1.a)] +
                       (net.nodes[static_cast<size_t>(s1.b)] -
                        net.nodes[static_cast<size_t>(s1.a)]) *
                           t1;
            int id = node_at(p);
            splits[i].push_back({t1, id});
            splits[j].push_back({t2, id});
        }
    std::vector<Strut> struts;
    for (size_t i = 0; i < net.struts.size(); ++i) {
        const auto& s = net.struts[i];
        auto& sp = splits[i];
        std::sort(sp.begin(), sp.end());
        int prev = s.a;
        for (const auto& [t, id] : sp) {
            if (id != prev) struts.push_back({prev, id, s.force});
            prev = id;
        }
        if (prev != s.b) struts.push_back({prev, s.b, s.force});
    }
    out.struts = std::move(struts);
    return out;
}

namespace {

struct HalfEdges {
    // outgoing neighbours per node, CCW by angle: (angle, other node, strut)
    std::vector<std::vector<std::pair<int, int>>> adj;  // (other, strut idx)
};

HalfEdges build_adjacency(const GeneralNet& net) {
    HalfEdges he;
    he.adj.resize(net.nodes.size());
    for (size_t si = 0; si < net.struts.size(); ++si) {
        const auto& s = net.struts[si];
        he.adj[static_cast<size_t>(s.a)].push_back({s.b, static_cast<int>(si)});
        he.adj[static_cast<size_t>(s.b)].push_back({s.a, static_cast<int>(si)});
    }
    for (size_t v = 0; v < he.adj.size(); ++v) {
        auto& lst = he.adj[v];
        std::sort(lst.begin(), lst.end(), [&](const auto& x, const auto& y) {
            Point2 p = net.nodes[v];
            double ax = std::atan2(net.nodes[static_cast<size_t>(x.first)].y - p.y,
                                   net.nodes[static_cast<size_t>(x.first)].x - p.x);
            double ay = std::atan2(net.nodes[static_cast<size_t>(y.first)].y - p.y,
                                   net.nodes[static_cast<size_t>(y.first)].x - p.x);
            if (ax != ay) return ax < ay;
            return x.first < y.first;
        });
    }
    return he;
}

double walk_area(const GeneralNet& net, const std::vector<int>& cycle) {
    double a = 0.0;
    for (size_t i = 0; i < cycle.size(); ++i) {
        Point2 p = net.nodes[static_cast<size_t>(cycle[i])];
        Point2 q = net.nodes[static_cast<size_t>(cycle[(i + 1) % cycle.size()])];
        a += cross(p, q);
    }
    return 0.5 * a;
}

// crossing-number point-in-polygon for possibly non-convex walks
bool point_in_walk(const GeneralNet& net, const std::vector<int>& cycle, Point2 p) {
    bool in = false;
    for (size_t i = 0; i < cycle.size(); ++i) {
        Point2 a = net.nodes[static_cast<size_t>(cycle[i])];
        Point2 b = net.nodes[static_cast<size_t>(cycle[(i + 1) % cycle.size()])];
        if ((a.y > p.y) != (b.y > p.y)) {
            double xint = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if (p.x < xint) in = !in;
        }
    }
    return in;
}

bool walk_touches_obstacle(const GeneralNet& net, const std::vector<int>& cycle,
                           const Obstacle& obs) {
    const double gt = geom_tol_of(net);
    for (const auto& y : obs.polygon.vertices())
        if (point_in_walk(net, cycle, y)) return true;
    for (int v : cycle)
        if (obs.polygon.contains(net.nodes[static_cast<size_t>(v)])) return true;
    const auto& ov = obs.polygon.vertices();
    for (size_t i = 0; i < cycle.size(); ++i) {
        Point2 a = net.nodes[static_cast<size_t>(cycle[i])];
        Point2 b = net.nodes[static_cast<size_t>(cycle[(i + 1) % cycle.size()])];
        for (size_t j = 0; j < ov.size(); ++j)
            if (segments_intersect(a, b, ov[j], ov[(j + 1) % ov.size()], gt))
                return true;
    }
    return false;
}

}  // namespace

std::vector<LoopInfo> find_elementary_loops(const GeneralNet& net) {
    net.validate();
    HalfEdges he = build_adjacency(net);
    const double gt = geom_tol_of(net);
    const double area_tol = gt * std::max(bbox_diagonal(net.nodes), 1.0);

    std::set<std::pair<int, int>> visited;  // directed edges
    std::vector<LoopInfo> out;
    for (size_t v0 = 0; v0 < net.nodes.size(); ++v0) {
        for (const auto& [w0, s0] : he.adj[v0]) {
            if (visited.count({static_cast<int>(v0), w0})) continue;
            std::vector<int> cycle;
            int u = static_cast<int>(v0), v = w0;
            // trace the face keeping its interior on the left
            do {
                visited.insert({u, v});
                cycle.push_back(u);
                const auto& lst = he.adj[static_cast<size_t>(v)];
                int idx = -1;
                for (size_t i = 0; i < lst.size(); ++i)
                    if (lst[i].first == u) {
                        idx = static_cast<int>(i);
                        break;
                    }
                int nxt = (idx - 1 + static_cast<int>(lst.size())) %
                          static_cast<int>(lst.size());
                u = v;
                v = lst[static_cast<size_t>(nxt)].first;
            } while (!(u == static_cast<int>(v0) && v == w0));

            double area = walk_area(net, cycle);
            if (area <= area_tol) continue;  // outer face or degenerate sliver

            LoopInfo info;
            info.cycle = cycle;
            info.area = area;
            std::set<int> uniq(cycle.begin(), cycle.end());
            info.simple = uniq.size() == cycle.size();
            std::set<std::pair<int, int>> loop_edges;
            for (size_t i = 0; i < cycle.size(); ++i) {
                auto mm = std::minmax(cycle[i], cycle[(i + 1) % cycle.size()]);
                loop_edges.insert({mm.first, mm.second});
            }
            for (int node : cycle) {
                Vec2 g = net.applied[static_cast<size_t>(node)];
                for (const auto& s : net.struts) {
                    if (s.a != node && s.b != node) continue;
                    auto mm = std::minmax(s.a, s.b);
                    if (loop_edges.count({mm.first, mm.second})) continue;
                    int other = s.a == node ? s.b : s.a;
                    Vec2 d = net.nodes[static_cast<size_t>(node)] -
                             net.nodes[static_cast<size_t>(other)];
                    double len = d.norm();
                    if (len > 0.0) g += d * (s.force / len);
                }
                info.net_forces.push_back(g);
            }
            if (info.simple) {
                std::vector<Point2> pts;
                for (int node : cycle) pts.push_back(net.nodes[static_cast<size_t>(node)]);
                info.convex = is_ccw_convex_weak(pts);
            }
            for (const auto& obs : net.obstacles)
                if (walk_touches_obstacle(net, cycle, obs)) {
                    info.contains_obstacle = true;
                    break;
                }
            out.push_back(std::move(info));
        }
    }
    std::sort(out.begin(), out.end(),
              [](const LoopInfo& a, const LoopInfo& b) { return a.area < b.area; });
    return out;
}

int count_elementary_loops(const GeneralNet& net) {
    return static_cast<int>(find_elementary_loops(net).size());
}

int loop_bound(const GeneralNet& net) {
    const double tol = net.bal_tol_abs();
    std::vector<Point2> loaded;
    for (size_t v = 0; v < net.nodes.size(); ++v)
        if (net.applied[v].norm() > tol) loaded.push_back(net.nodes[v]);
    int q = 0, p0 = 0;
    const int p = static_cast<int>(net.obstacles.size());
    if (loaded.size() >= 3) {
        ConvexPolygonCCW hull = convex_hull(loaded);
        for (size_t v = 0; v < net.nodes.size(); ++v)
            if (net.applied[v].norm() > tol && hull.contains(net.nodes[v], true)) ++q;
        const auto& hv = hull.vertices();
        for (const auto& obs : net.obstacles) {
            for (size_t i = 0; i < hv.size(); ++i) {
                Segment edge{hv[i], hv[(i + 1) % hv.size()]};
                if (segment_intersects_polygon(edge, obs.polygon)) {
                    ++p0;
                    break;
                }
            }
        }
    }
    return q + p - p0;
}

GeneralNet replace_loop(const GeneralNet& net, const LoopInfo& loop) {
    if (!loop.simple) throw InputError("replace_loop: loop walk is not simple");
    if (!loop.convex) throw InputError("replace_loop: loop is not convex");
    if (loop.contains_obstacle)
        throw InputError("replace_loop: loop contains an obstacle");

    const double gt = geom_tol_of(net);
    const double ftol = net.bal_tol_abs();
    // drop flat vertices (subdivision points along a straight run); they may
    // not carry external force
    std::vector<Point2> pts;
    std::vector<Vec2> forces;
    const int m = static_cast<int>(loop.cycle.size());
    for (int i = 0; i < m; ++i) {
        Point2 prev = net.nodes[static_cast<size_t>(loop.cycle[static_cast<size_t>((i + m - 1) % m)])];
        Point2 cur = net.nodes[static_cast<size_t>(loop.cycle[static_cast<size_t>(i)])];
        Point2 nxt = net.nodes[static_cast<size_t>(loop.cycle[static_cast<size_t>((i + 1) % m)])];
        Vec2 e1 = cur - prev, e2 = nxt - cur;
        bool flat = std::abs(cross(e1, e2)) <= gt * (e1.norm() + e2.norm());
        if (flat) {
            if (loop.net_forces[static_cast<size_t>(i)].norm() > ftol)
                throw InputError("replace_loop: flat loop vertex carries external force");
            continue;
        }
        pts.push_back(cur);
        forces.push_back(loop.net_forces[static_cast<size_t>(i)]);
    }
    if (pts.size() < 3 || !is_ccw_convex(pts))
        throw InputError("replace_loop: loop vertices are not strictly convex");

    ForceSystem sub;
    sub.points = std::move(pts);
    sub.forces = std::move(forces);
    sub.bal_tol = net.bal_tol;
    if (!check_balance(sub))
        throw InputError("replace_loop: loop vertex forces do not balance");
    if (!check_compressibility(sub))
        throw InputError("replace_loop: loop forces are not compression-supportable");
    StrutNet subnet = open_net(sub);

    GeneralNet out = net;
    std::set<std::pair<int, int>> loop_edges;
    for (int i = 0; i < m; ++i) {
        auto mm = std::minmax(loop.cycle[static_cast<size_t>(i)],
                              loop.cycle[static_cast<size_t>((i + 1) % m)]);
        loop_edges.insert({mm.first, mm.second});
    }
    std::erase_if(out.struts, [&](const Strut& s) {
        auto mm = std::minmax(s.a, s.b);
        return loop_edges.count({mm.first, mm.second}) > 0;
    });
    // splice the sub-net in, merging coincident nodes
    std::vector<int> remap(subnet.nodes.size(), -1);
    for (size_t i = 0; i < subnet.nodes.size(); ++i) {
        int found = -1;
        for (size_t j = 0; j < out.nodes.size(); ++j)
            if ((out.nodes[j] - subnet.nodes[i]).norm() <= gt) {
                found = static_cast<int>(j);
                break;
            }
        if (found < 0) {
            out.nodes.push_back(subnet.nodes[i]);
            out.applied.push_back({0, 0});
            found = static_cast<int>(out.nodes.size() - 1);
        }
        remap[i] = found;
    }
    for (const auto& s : subnet.struts)
        out.struts.push_back(
            {remap[static_cast<size_t>(s.a)], remap[static_cast<size_t>(s.b)], s.force});
    return out;
}

GeneralNet reduce(const GeneralNet& net, std::vector<GeneralNet>* frames) {
    GeneralNet work = net;
    work.validate();
    if (frames) frames->push_back(work);
    int count = count_elementary_loops(work);
    const int initial = count;
    for (int step = 0; step <= initial + 1; ++step) {
        auto loops = find_elementary_loops(work);  // sorted by area
        bool replaced = false;
        for (const auto& loop : loops) {
            if (!loop.simple || !loop.convex || loop.contains_obstacle) continue;
            try {
                GeneralNet next = replace_loop(work, loop);
                int next_count = count_elementary_loops(next);
                if (next_count != count - 1)
                    throw InternalError("reduce: loop count did not drop by one");
                work = std::move(next);
                count = next_count;
                replaced = true;
                if (frames) frames->push_back(work);
                break;
            } catch (const InputError& e) {
                SFLOG_DEBUG("reduce: skipping loop: " << e.what());
                continue;  // try the next face
            }
        }
        if (!replaced) break;
    }
    SFLOG_INFO("reduce: " << initial << " -> " << count << " elementary loops");
    return work;
}

}  // namespace strutforge
