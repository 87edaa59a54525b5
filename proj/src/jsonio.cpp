#include "strutforge/jsonio.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace strutforge {

using json = nlohmann::ordered_json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw InputError(path + ": " + what);
}

Point2 parse_point(const json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        fail(path, "expected [x, y]");
    return {j[0].get<double>(), j[1].get<double>()};
}

std::vector<Point2> parse_points(const json& j, const std::string& path) {
    if (!j.is_array()) fail(path, "expected an array of [x, y] pairs");
    std::vector<Point2> out;
    for (size_t i = 0; i < j.size(); ++i)
        out.push_back(parse_point(j[i], path + "/" + std::to_string(i)));
    return out;
}

Obstacle parse_obstacle(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an obstacle object");
    std::string type = j.value("type", "polygon");
    std::string label = j.value("label", "");
    int sides = j.value("sides", 20);
    if (type == "polygon") {
        if (!j.contains("vertices")) fail(path, "polygon obstacle needs vertices");
        return obstacle_from_polygon(parse_points(j["vertices"], path + "/vertices"),
                                     label);
    }
    if (!j.contains("center")) fail(path, type + " obstacle needs center");
    Point2 c = parse_point(j["center"], path + "/center");
    if (type == "circle") {
        if (!j.contains("radius")) fail(path, "circle obstacle needs radius");
        return approximate_circle(c, j["radius"].get<double>(), sides, label);
    }
    if (type == "ellipse") {
        if (!j.contains("semi_axes")) fail(path, "ellipse obstacle needs semi_axes");
        Point2 ax = parse_point(j["semi_axes"], path + "/semi_axes");
        return approximate_ellipse(c, ax.x, ax.y, sides, label);
    }
    if (type == "halfdisk") {
        if (!j.contains("radius")) fail(path, "halfdisk obstacle needs radius");
        return approximate_halfdisk(c, j["radius"].get<double>(), sides, label);
    }
    fail(path + "/type", "unknown obstacle type '" + type + "'");
}

json point_json(Point2 p) { return json::array({p.x, p.y}); }

json plane_json(const PlaneFunc& p) {
    return json{{"v", point_json(p.v)}, {"c", p.c}};
}

}  // namespace

ProblemFile parse_problem(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw InputError(std::string("problem file is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) fail("/", "expected a JSON object");
    ProblemFile pf;
    pf.description = j.value("description", "");
    if (j.contains("tolerances")) {
        const auto& t = j["tolerances"];
        if (!t.is_object()) fail("/tolerances", "expected an object");
        if (t.contains("bal_tol")) pf.bal_tol = t["bal_tol"].get<double>();
        if (t.contains("lp_tol")) pf.lp_tol = t["lp_tol"].get<double>();
    }

    if (j.contains("points")) {
        ForceSystem fs;
        fs.points = parse_points(j["points"], "/points");
        if (!j.contains("forces")) fail("/forces", "missing (required with points)");
        const auto& fj = j["forces"];
        if (!fj.is_array() || fj.size() != fs.points.size())
            fail("/forces", "expected one entry per point");
        if (j.contains("reactive")) {
            const auto& rj = j["reactive"];
            if (!rj.is_array()) fail("/reactive", "expected an array of indices");
            for (size_t i = 0; i < rj.size(); ++i) {
                if (!rj[i].is_number_integer())
                    fail("/reactive/" + std::to_string(i), "expected an integer");
                int r = rj[i].get<int>();
                if (r < 0 || r >= static_cast<int>(fs.points.size()))
                    fail("/reactive/" + std::to_string(i), "index out of range");
                fs.reactive.push_back(r);
            }
            std::sort(fs.reactive.begin(), fs.reactive.end());
        }
        for (size_t i = 0; i < fj.size(); ++i) {
            std::string p = "/forces/" + std::to_string(i);
            bool reactive = std::binary_search(fs.reactive.begin(), fs.reactive.end(),
                                               static_cast<int>(i));
            if (fj[i].is_null()) {
                if (!reactive)
                    fail(p, "null force at a non-reactive index (missing force entry)");
                fs.forces.push_back({0, 0});
            } else {
                fs.forces.push_back(parse_point(fj[i], p));
            }
        }
        if (pf.bal_tol) fs.bal_tol = *pf.bal_tol;
        pf.system = std::move(fs);
    }

    if (j.contains("supports")) {
        const auto& sj = j["supports"];
        if (!sj.is_array()) fail("/supports", "expected an array");
        for (size_t i = 0; i < sj.size(); ++i) {
            std::string p = "/supports/" + std::to_string(i);
            if (!sj[i].is_object() || !sj[i].contains("a") || !sj[i].contains("b") ||
                !sj[i].contains("count"))
                fail(p, "expected {a, b, count}");
            SupportSegment seg;
            seg.segment.a = parse_point(sj[i]["a"], p + "/a");
            seg.segment.b = parse_point(sj[i]["b"], p + "/b");
            seg.count = sj[i]["count"].get<int>();
            if (seg.count < 2) fail(p + "/count", "count must be >= 2");
            pf.supports.push_back(seg);
        }
    }

    if (j.contains("obstacles")) {
        const auto& oj = j["obstacles"];
        if (!oj.is_array()) fail("/obstacles", "expected an array");
        for (size_t i = 0; i < oj.size(); ++i)
            pf.obstacles.push_back(
                parse_obstacle(oj[i], "/obstacles/" + std::to_string(i)));
    }

    if (j.contains("objective")) {
        const auto& obj = j["objective"];
        if (!obj.is_object() || !obj.contains("kind"))
            fail("/objective", "expected {kind, ...}");
        std::string kind = obj["kind"].get<std::string>();
        if (kind == "total_weight") {
            pf.objective = {ObjectiveKind::TotalWeight, -1};
        } else if (kind == "cleave_height") {
            if (!obj.contains("obstacle"))
                fail("/objective", "cleave_height needs an obstacle index");
            int q = obj["obstacle"].get<int>();
            if (q < 0 || q >= static_cast<int>(pf.obstacles.size()))
                fail("/objective/obstacle", "index out of range");
            pf.objective = {ObjectiveKind::CleaveHeight, q};
        } else {
            fail("/objective/kind", "unknown objective '" + kind + "'");
        }
        pf.objective_given = true;
    }

    if (j.contains("net")) {
        const auto& nj = j["net"];
        if (!nj.is_object() || !nj.contains("nodes") || !nj.contains("struts"))
            fail("/net", "expected {nodes, struts, applied}");
        GeneralNet net;
        net.nodes = parse_points(nj["nodes"], "/net/nodes");
        const auto& stj = nj["struts"];
        if (!stj.is_array()) fail("/net/struts", "expected an array of [a, b, force]");
        for (size_t i = 0; i < stj.size(); ++i) {
            std::string p = "/net/struts/" + std::to_string(i);
            const auto& s = stj[i];
            if (!s.is_array() || s.size() != 3) fail(p, "expected [a, b, force]");
            Strut st{s[0].get<int>(), s[1].get<int>(), s[2].get<double>()};
            if (st.a < 0 || st.a >= static_cast<int>(net.nodes.size()) || st.b < 0 ||
                st.b >= static_cast<int>(net.nodes.size()))
                fail(p, "node index out of range");
            net.struts.push_back(st);
        }
        net.applied.assign(net.nodes.size(), {0, 0});
        if (nj.contains("applied")) {
            const auto& aj = nj["applied"];
            if (!aj.is_array() || aj.size() != net.nodes.size())
                fail("/net/applied", "expected one entry per node");
            for (size_t i = 0; i < aj.size(); ++i)
                if (!aj[i].is_null())
                    net.applied[i] =
                        parse_point(aj[i], "/net/applied/" + std::to_string(i));
        }
        net.obstacles = pf.obstacles;
        if (pf.bal_tol) net.bal_tol = *pf.bal_tol;
        pf.net = std::move(net);
    }
    return pf;
}

ProblemFile load_problem(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open input file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_problem(ss.str());
}

std::string report_to_json(const Report& r) {
    json j;
    j["tool"] = "strutforge";
    j["command"] = r.command;
    j["status"] = r.status;
    if (!r.reason.empty()) j["reason"] = r.reason;
    if (r.balanced) j["balanced"] = *r.balanced;
    if (r.compressible) j["compressible"] = *r.compressible;
    if (!r.tangent.empty() || !r.cleaving.empty()) {
        json planes;
        planes["tangent"] = json::array();
        for (const auto& p : r.tangent) planes["tangent"].push_back(plane_json(p));
        planes["cleaving"] = json::array();
        for (const auto& p : r.cleaving) planes["cleaving"].push_back(plane_json(p));
        j["planes"] = std::move(planes);
    }
    if (r.net) {
        json net;
        net["nodes"] = json::array();
        for (const auto& p : r.net->nodes) net["nodes"].push_back(point_json(p));
        net["struts"] = json::array();
        for (const auto& s : r.net->struts)
            net["struts"].push_back(json{{"a", s.a}, {"b", s.b}, {"f", s.force}});
        net["applied"] = json::array();
        for (const auto& f : r.net->applied) net["applied"].push_back(point_json(f));
        j["net"] = std::move(net);
    }
    if (!r.reactive_forces.empty()) {
        json rf = json::array();
        for (const auto& [i, f] : r.reactive_forces)
            rf.push_back(json{{"index", i}, {"force", point_json(f)}});
        j["reactive_forces"] = std::move(rf);
    }
    if (r.objective_value) j["objective_value"] = *r.objective_value;
    if (!r.gamma.empty()) {
        json g = json::array();
        for (const auto& poly : r.gamma) {
            json pv = json::array();
            for (const auto& v : poly.vertices()) pv.push_back(point_json(v));
            g.push_back(std::move(pv));
        }
        j["gamma"] = std::move(g);
    }
    json diag;
    if (!r.touching_sets.empty()) {
        json ts = json::array();
        for (const auto& t : r.touching_sets) ts.push_back(t);
        diag["touching_sets"] = std::move(ts);
    }
    if (r.loop_count_initial) diag["loop_count_initial"] = *r.loop_count_initial;
    if (r.loop_count_final) diag["loop_count_final"] = *r.loop_count_final;
    if (r.loop_bound_value) diag["loop_bound"] = *r.loop_bound_value;
    if (r.max_residual) diag["max_residual"] = *r.max_residual;
    if (r.boundary_contact) diag["boundary_contact"] = *r.boundary_contact;
    if (r.lp_iterations) diag["lp_iterations"] = *r.lp_iterations;
    if (!diag.empty()) j["diagnostics"] = std::move(diag);
    return j.dump(2) + "\n";
}

StrutNet net_from_report_json(const std::string& text) {
    json j = json::parse(text);
    if (!j.contains("net")) throw InputError("report has no net block");
    const auto& nj = j["net"];
    StrutNet net;
    for (const auto& p : nj["nodes"])
        net.nodes.push_back({p[0].get<double>(), p[1].get<double>()});
    for (const auto& s : nj["struts"])
        net.struts.push_back(
            {s["a"].get<int>(), s["b"].get<int>(), s["f"].get<double>()});
    for (const auto& f : nj["applied"])
        net.applied.push_back({f[0].get<double>(), f[1].get<double>()});
    return net;
}

}  // namespace strutforge
