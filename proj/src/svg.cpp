#include "strutforge/svg.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace strutforge {

namespace {

struct Box {
    double xmin = 1e300, ymin = 1e300, xmax = -1e300, ymax = -1e300;
    void add(Point2 p) {
        xmin = std::min(xmin, p.x);
        xmax = std::max(xmax, p.x);
        ymin = std::min(ymin, p.y);
        ymax = std::max(ymax, p.y);
    }
    bool empty() const { return xmin > xmax; }
};

void poly_path(std::ostringstream& os, const std::vector<Point2>& pts) {
    for (size_t i = 0; i < pts.size(); ++i)
        os << (i == 0 ? "M " : "L ") << pts[i].x << " " << pts[i].y << " ";
    os << "Z";
}

}  // namespace

std::string render_svg(const SvgScene& scene) {
    Box box;
    if (scene.hull)
        for (const auto& p : scene.hull->vertices()) box.add(p);
    for (const auto& o : scene.obstacles)
        for (const auto& p : o.polygon.vertices()) box.add(p);
    if (scene.net)
        for (const auto& p : scene.net->nodes) box.add(p);
    for (const auto& [at, f] : scene.arrows) {
        box.add(at);
        box.add(at + f * scene.force_scale);
    }
    for (const auto& p : scene.reactive_points) box.add(p);
    if (box.empty()) box = {0, 0, 1, 1};

    double w = box.xmax - box.xmin, h = box.ymax - box.ymin;
    double pad = 0.05 * std::max({w, h, 1e-9});
    box.xmin -= pad;
    box.ymin -= pad;
    box.xmax += pad;
    box.ymax += pad;
    w = box.xmax - box.xmin;
    h = box.ymax - box.ymin;
    const double diag = std::sqrt(w * w + h * h);
    const double thin = 0.0015 * diag;

    std::ostringstream os;
    os.precision(8);
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\""
       << static_cast<int>(800.0 * h / w) << "\" viewBox=\"" << box.xmin << " "
       << box.ymin << " " << w << " " << h << "\">\n";
    os << "<!-- strutforge svg 1 -->\n";
    // y grows upward in the model; flip the canvas
    os << "<g transform=\"matrix(1 0 0 -1 0 " << (box.ymin + box.ymax) << ")\">\n";

    if (scene.hull) {
        os << "<path d=\"";
        poly_path(os, scene.hull->vertices());
        os << "\" fill=\"#f3f6fa\" stroke=\"#b0bcc9\" stroke-width=\"" << thin
           << "\"/>\n";
    }
    for (const auto& g : scene.gamma) {
        os << "<path d=\"";
        poly_path(os, g.vertices());
        os << "\" fill=\"none\" stroke=\"#d0a000\" stroke-width=\"" << thin
           << "\" stroke-dasharray=\"" << 4 * thin << " " << 2 * thin << "\"/>\n";
    }
    for (const auto& o : scene.obstacles) {
        os << "<path d=\"";
        poly_path(os, o.polygon.vertices());
        os << "\" fill=\"#9a9a9a\" stroke=\"none\"/>\n";
    }
    if (scene.net) {
        double fmax = std::max(scene.net->max_strut_force(), 1e-300);
        for (const auto& s : scene.net->struts) {
            Point2 a = scene.net->nodes[static_cast<size_t>(s.a)];
            Point2 b = scene.net->nodes[static_cast<size_t>(s.b)];
            double width = std::max(thin, 0.01 * diag * s.force / fmax);
            os << "<line x1=\"" << a.x << "\" y1=\"" << a.y << "\" x2=\"" << b.x
               << "\" y2=\"" << b.y << "\" stroke=\"#1b3f8f\" stroke-width=\""
               << width << "\" stroke-linecap=\"round\"/>\n";
        }
    }
    for (const auto& [at, f] : scene.arrows) {
        Point2 tip = at + f * scene.force_scale;
        Vec2 d = tip - at;
        double len = d.norm();
        if (len <= 0.0) continue;
        Vec2 u = d / len;
        Vec2 n = rot90(u);
        double hsz = std::min(0.25 * len, 0.02 * diag);
        Point2 h1 = tip - u * hsz + n * (0.5 * hsz);
        Point2 h2 = tip - u * hsz - n * (0.5 * hsz);
        os << "<line x1=\"" << at.x << "\" y1=\"" << at.y << "\" x2=\"" << tip.x
           << "\" y2=\"" << tip.y << "\" stroke=\"#1f8f3a\" stroke-width=\""
           << 1.5 * thin << "\"/>\n";
        os << "<path d=\"M " << tip.x << " " << tip.y << " L " << h1.x << " " << h1.y
           << " L " << h2.x << " " << h2.y << " Z\" fill=\"#1f8f3a\"/>\n";
    }
    for (const auto& p : scene.reactive_points)
        os << "<circle cx=\"" << p.x << "\" cy=\"" << p.y << "\" r=\"" << 2 * thin
           << "\" fill=\"#c02020\"/>\n";
    os << "</g>\n</svg>\n";
    return os.str();
}

void write_svg(const std::string& path, const SvgScene& scene) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot open svg output: " + path);
    out << render_svg(scene);
}

}  // namespace strutforge
