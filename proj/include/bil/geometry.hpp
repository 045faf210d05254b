#pragma once

#include <vector>
#include <string>
#include <cmath>
#include <algorithm>
#include <stdexcept>
#include <optional>

#include "bil/constants.hpp"
#include "bil/quadrature.hpp"

namespace bil {

struct Error : std::runtime_error {
    std::string code;
    Error(std::string c, const std::string& msg)
        : std::runtime_error(c + ": " + msg), code(std::move(c)) {}
};

struct Vec2 {
    double x = 0.0, y = 0.0;
    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double c) const { return {x * c, y * c}; }
    double dot(Vec2 o) const { return x * o.x + y * o.y; }
    double cross(Vec2 o) const { return x * o.y - y * o.x; }
    double norm() const { return std::hypot(x, y); }
    Vec2 normalized() const {
        const double n = norm();
        return {x / n, y / n};
    }
    // rotate by -90 degrees: tangent -> outward normal for CCW boundaries
    Vec2 rot_minus90() const { return {y, -x}; }
    Vec2 rot_plus90() const { return {-y, x}; }
};

enum class EdgeKind { Segment, Arc, PolyParam };

// One boundary edge. Parametrized CCW; arclength runs 0..length within the edge.
struct Edge {
    EdgeKind kind = EdgeKind::Segment;
    bool flat = false;
    double length = 0.0;

    // Segment
    Vec2 p0, p1;

    // Arc (CCW, convex side out): center, radius, angles ang0 < ang1
    Vec2 center;
    double radius = 0.0, ang0 = 0.0, ang1 = 0.0;

    // PolyParam: power-basis coefficients about tmid, parameter range [t0, t1]
    std::vector<double> cx, cy;
    double t0 = 0.0, t1 = 0.0, tmid = 0.0;
    std::vector<double> s_table, t_table;  // cumulative arclength lookup

    Vec2 start() const { return point_at_param(param_lo()); }
    Vec2 end() const { return point_at_param(param_hi()); }

    double param_lo() const {
        switch (kind) {
            case EdgeKind::Segment: return 0.0;
            case EdgeKind::Arc: return ang0;
            default: return t0;
        }
    }
    double param_hi() const {
        switch (kind) {
            case EdgeKind::Segment: return 1.0;
            case EdgeKind::Arc: return ang1;
            default: return t1;
        }
    }

    Vec2 point_at_param(double t) const {
        switch (kind) {
            case EdgeKind::Segment:
                return p0 + (p1 - p0) * t;
            case EdgeKind::Arc:
                return center + Vec2{std::cos(t), std::sin(t)} * radius;
            default: {
                double px = 0.0, py = 0.0;
                const double u = t - tmid;
                for (int j = static_cast<int>(cx.size()) - 1; j >= 0; --j) px = px * u + cx[j];
                for (int j = static_cast<int>(cy.size()) - 1; j >= 0; --j) py = py * u + cy[j];
                return {px, py};
            }
        }
    }

    Vec2 deriv_at_param(double t, int order = 1) const {
        switch (kind) {
            case EdgeKind::Segment:
                return order == 1 ? (p1 - p0) : Vec2{0.0, 0.0};
            case EdgeKind::Arc: {
                const double r = radius;
                if (order == 1) return {-r * std::sin(t), r * std::cos(t)};
                return {-r * std::cos(t), -r * std::sin(t)};
            }
            default: {
                const double u = t - tmid;
                double vx = 0.0, vy = 0.0;
                for (int j = static_cast<int>(cx.size()) - 1; j >= order; --j) {
                    double f = 1.0;
                    for (int l = 0; l < order; ++l) f *= (j - l);
                    vx = vx * u + f * cx[j];
                    vy = vy * u + f * cy[j];
                }
                return {vx, vy};
            }
        }
    }
};

namespace geo_detail {

inline void build_arclength_table(Edge& e, int nseg = 2048) {
    e.t_table.resize(nseg + 1);
    e.s_table.resize(nseg + 1);
    const QuadRule& gl = gauss_legendre(8);
    double s = 0.0;
    e.t_table[0] = e.t0;
    e.s_table[0] = 0.0;
    for (int i = 0; i < nseg; ++i) {
        const double ta = e.t0 + (e.t1 - e.t0) * i / nseg;
        const double tb = e.t0 + (e.t1 - e.t0) * (i + 1) / nseg;
        double ds = 0.0;
        for (size_t g = 0; g < gl.x.size(); ++g) {
            const double t = 0.5 * (ta + tb) + 0.5 * (tb - ta) * gl.x[g];
            ds += 0.5 * (tb - ta) * gl.w[g] * e.deriv_at_param(t, 1).norm();
        }
        s += ds;
        e.t_table[i + 1] = tb;
        e.s_table[i + 1] = s;
    }
    e.length = s;
}

// invert s -> t on a PolyParam edge
inline double param_from_arclength(const Edge& e, double s) {
    const auto& st = e.s_table;
    const auto it = std::upper_bound(st.begin(), st.end(), s);
    size_t i = (it == st.begin()) ? 0 : (it - st.begin() - 1);
    i = std::min(i, st.size() - 2);
    double t = e.t_table[i] + (e.t_table[i + 1] - e.t_table[i]) *
                                  (s - st[i]) / std::max(st[i + 1] - st[i], 1e-300);
    const QuadRule& gl = gauss_legendre(8);
    for (int it2 = 0; it2 < 4; ++it2) {
        // s(t) via panel integral from t_table[i]
        double sp = st[i];
        const double ta = e.t_table[i];
        for (size_t g = 0; g < gl.x.size(); ++g) {
            const double tt = 0.5 * (ta + t) + 0.5 * (t - ta) * gl.x[g];
            sp += 0.5 * (t - ta) * gl.w[g] * e.deriv_at_param(tt, 1).norm();
        }
        const double speed = e.deriv_at_param(t, 1).norm();
        t -= (sp - s) / speed;
    }
    return t;
}

} // namespace geo_detail

// Edge factories
inline Edge make_segment(Vec2 a, Vec2 b) {
    Edge e;
    e.kind = EdgeKind::Segment;
    e.flat = true;
    e.p0 = a;
    e.p1 = b;
    e.length = (b - a).norm();
    if (e.length <= 0.0) throw Error("BadEdgeData", "zero-length segment");
    return e;
}

inline Edge make_arc(Vec2 center, double radius, double ang0, double ang1) {
    if (radius <= 0.0 || ang1 <= ang0) throw Error("BadEdgeData", "arc needs radius > 0, ang1 > ang0");
    Edge e;
    e.kind = EdgeKind::Arc;
    e.flat = false;
    e.center = center;
    e.radius = radius;
    e.ang0 = ang0;
    e.ang1 = ang1;
    e.length = radius * (ang1 - ang0);
    return e;
}

inline Edge make_polyparam(std::vector<double> cx, std::vector<double> cy,
                           double t0, double t1, double tmid) {
    if (cx.size() < 2 || cx.size() != cy.size() || t1 <= t0)
        throw Error("BadEdgeData", "polynomial edge needs matching coefficient arrays and t1 > t0");
    Edge e;
    e.kind = EdgeKind::PolyParam;
    e.flat = false;
    e.cx = std::move(cx);
    e.cy = std::move(cy);
    e.t0 = t0;
    e.t1 = t1;
    e.tmid = tmid;
    geo_detail::build_arclength_table(e);
    if (e.deriv_at_param(0.5 * (t0 + t1), 1).norm() < 1e-14)
        throw Error("BadEdgeData", "vanishing tangent");
    return e;
}

struct Corner {
    Vec2 pos;
    double angle = 0.0;  // interior angle in (0, pi)
    int edge_in = -1, edge_out = -1;
};

struct BoundaryPointInfo {
    Vec2 pos, tangent, normal;
    double curvature = 0.0;
    int edge = -1;
    double s_local = 0.0;
};

struct PhaseSpacePoint {
    int edge = 0;
    double s = 0.0;   // arclength within edge
    double xi = 0.0;  // tangential frequency, |xi| <= 1
};

struct BilliardOutcome {
    bool corner_hit = false;
    int corner_index = -1;
    PhaseSpacePoint point;
    Vec2 hit_position;
    double chord_length = 0.0;
};

// Piecewise-smooth convex planar domain, counterclockwise boundary.
struct DomainSpec {
    std::vector<Edge> edges;
    std::vector<Corner> corners;
    std::vector<double> edge_offset;  // global arclength of each edge start
    double L = 0.0;
    std::string name;

    int num_edges() const { return static_cast<int>(edges.size()); }

    double global_offset(int edge) const { return edge_offset[edge]; }

    // position/tangent/normal/curvature at arclength s within edge e
    BoundaryPointInfo at(int ei, double s_local) const {
        const Edge& e = edges[ei];
        BoundaryPointInfo out;
        out.edge = ei;
        out.s_local = s_local;
        switch (e.kind) {
            case EdgeKind::Segment: {
                const Vec2 dir = (e.p1 - e.p0).normalized();
                out.pos = e.p0 + dir * s_local;
                out.tangent = dir;
                out.curvature = 0.0;
                break;
            }
            case EdgeKind::Arc: {
                const double th = e.ang0 + s_local / e.radius;
                out.pos = e.center + Vec2{std::cos(th), std::sin(th)} * e.radius;
                out.tangent = {-std::sin(th), std::cos(th)};
                out.curvature = 1.0 / e.radius;
                break;
            }
            case EdgeKind::PolyParam: {
                const double t = geo_detail::param_from_arclength(e, s_local);
                const Vec2 d1 = e.deriv_at_param(t, 1);
                const Vec2 d2 = e.deriv_at_param(t, 2);
                const double sp = d1.norm();
                out.pos = e.point_at_param(t);
                out.tangent = d1 * (1.0 / sp);
                out.curvature = d1.cross(d2) / (sp * sp * sp);
                break;
            }
        }
        out.normal = out.tangent.rot_minus90();
        return out;
    }

    // side: 0 = reject corner hits, -1 = limit from the incoming edge, +1 = outgoing edge
    BoundaryPointInfo at_global(double y, int side = 0) const {
        y = std::fmod(y, L);
        if (y < 0) y += L;
        const double ctol = 1e-12 * std::max(1.0, L);
        for (const Corner& c : corners) {
            const double yc = edge_offset[c.edge_out];
            if (std::abs(y - yc) < ctol || std::abs(y - yc - L) < ctol ||
                std::abs(y - yc + L) < ctol) {
                if (side == 0) throw Error("AtCorner", "arclength lands on a corner; pass a side flag");
                if (side < 0) return at(c.edge_in, edges[c.edge_in].length);
                return at(c.edge_out, 0.0);
            }
        }
        int ei = static_cast<int>(std::upper_bound(edge_offset.begin(), edge_offset.end(), y) -
                                  edge_offset.begin()) - 1;
        ei = std::clamp(ei, 0, num_edges() - 1);
        double s = y - edge_offset[ei];
        if (s > edges[ei].length) {
            s = edges[ei].length;
        }
        return at(ei, s);
    }

    bool contains(Vec2 p, double shrink_tol = 0.0) const;
};

namespace geo_detail {

inline double interior_angle(Vec2 t_in, Vec2 t_out) {
    // turn angle from incoming to outgoing tangent, CCW positive
    const double turn = std::atan2(t_in.cross(t_out), t_in.dot(t_out));
    return PI - turn;
}

} // namespace geo_detail

// Assemble a validated domain from an ordered CCW edge chain.
inline DomainSpec build_domain(std::vector<Edge> edges, std::string name = "",
                               bool require_min_edges = false) {
    if (edges.empty()) throw Error("BadEdgeData", "no edges");
    if (require_min_edges && edges.size() < 3) throw Error("BadEdgeData", "need at least 3 edges");
    DomainSpec d;
    d.name = std::move(name);
    d.edges = std::move(edges);
    const double close_tol = 1e-9;

    double L = 0.0;
    for (auto& e : d.edges) {
        d.edge_offset.push_back(L);
        L += e.length;
    }
    d.L = L;

    const int n = d.num_edges();
    for (int i = 0; i < n; ++i) {
        const Edge& a = d.edges[i];
        const Edge& b = d.edges[(i + 1) % n];
        const Vec2 pa = a.end(), pb = b.start();
        if ((pa - pb).norm() > close_tol * std::max(1.0, L))
            throw Error("NotClosed", "edge chain gap at junction " + std::to_string(i));
        // one-sided tangents
        const Vec2 t_in = a.deriv_at_param(a.param_hi(), 1).normalized();
        const Vec2 t_out = b.deriv_at_param(b.param_lo(), 1).normalized();
        const double ang = geo_detail::interior_angle(t_in, t_out);
        if (std::abs(ang - PI) < 1e-9) continue;  // smooth join, no corner
        if (ang <= 1e-9 || ang >= PI - 1e-9)
            throw Error("DegenerateCorner", "interior angle outside (0, pi) at junction " +
                                                std::to_string(i));
        Corner c;
        c.pos = pa;
        c.angle = ang;
        c.edge_in = i;
        c.edge_out = (i + 1) % n;
        d.corners.push_back(c);
    }

    // convexity: signed curvature >= 0 sampled along every edge, every corner < pi
    for (int i = 0; i < n; ++i) {
        for (int q = 0; q <= 16; ++q) {
            const double s = d.edges[i].length * (q + 0.5) / 17.5;
            if (d.at(i, s).curvature < -1e-9) throw Error("NotConvex", "negative curvature on edge " + std::to_string(i));
        }
    }
    // global convexity: cross products of consecutive coarse hull samples
    {
        std::vector<Vec2> pts;
        for (int i = 0; i < n; ++i)
            for (int q = 0; q < 8; ++q) pts.push_back(d.at(i, d.edges[i].length * (q + 0.25) / 8.0).pos);
        const int m = static_cast<int>(pts.size());
        for (int i = 0; i < m; ++i) {
            const Vec2 u = pts[(i + 1) % m] - pts[i];
            const Vec2 v = pts[(i + 2) % m] - pts[(i + 1) % m];
            if (u.cross(v) < -1e-9 * std::max(1.0, L * L))
                throw Error("NotConvex", "boundary turns clockwise");
        }
    }
    return d;
}

inline bool DomainSpec::contains(Vec2 p, double shrink_tol) const {
    // winding test on a dense polyline; adequate for convex domains
    double winding = 0.0;
    const int per_edge = 64;
    Vec2 prev = at(0, 0.0).pos;
    for (int i = 0; i < num_edges(); ++i) {
        for (int q = 1; q <= per_edge; ++q) {
            const Vec2 cur = (q == per_edge && i == num_edges() - 1)
                                 ? at(0, 0.0).pos
                                 : at(i, edges[i].length * q / per_edge).pos;
            winding += std::atan2((prev - p).cross(cur - p), (prev - p).dot(cur - p));
            prev = cur;
        }
    }
    if (std::abs(winding) < PI) return false;
    if (shrink_tol > 0.0) {
        // require distance to boundary >= shrink_tol (coarse sample)
        for (int i = 0; i < num_edges(); ++i)
            for (int q = 0; q <= 32; ++q) {
                const Vec2 b = at(i, edges[i].length * q / 32.0).pos;
                if ((b - p).norm() < shrink_tol) return false;
            }
    }
    return true;
}

// Shoelace area over a fine boundary polyline; the midpoint offset keeps the
// samples clear of corner parameters.
inline double domain_area(const DomainSpec& dom, int samples = 4096) {
    double twice = 0.0;
    Vec2 prev = dom.at_global(dom.L * 0.5 / samples).pos;
    const Vec2 first = prev;
    for (int i = 1; i < samples; ++i) {
        const Vec2 cur = dom.at_global(dom.L * (i + 0.5) / samples).pos;
        twice += prev.cross(cur);
        prev = cur;
    }
    twice += prev.cross(first);
    return 0.5 * twice;
}

// --- canonical domains ---

inline DomainSpec make_rectangle(double a, double b) {
    std::vector<Edge> e;
    e.push_back(make_segment({0, 0}, {a, 0}));
    e.push_back(make_segment({a, 0}, {a, b}));
    e.push_back(make_segment({a, b}, {0, b}));
    e.push_back(make_segment({0, b}, {0, 0}));
    return build_domain(std::move(e), "rectangle");
}

inline DomainSpec make_unit_square() {
    auto d = make_rectangle(1.0, 1.0);
    d.name = "unit-square";
    return d;
}

inline DomainSpec make_disc(double r = 1.0) {
    std::vector<Edge> e;
    e.push_back(make_arc({0, 0}, r, 0.0, 2.0 * PI));
    auto d = build_domain(std::move(e), "disc");
    return d;
}

// Flat major-axis diameter plus upper elliptical arc; corners at (+-a, 0).
inline DomainSpec make_semi_ellipse(double a, double b) {
    std::vector<Edge> e;
    e.push_back(make_segment({-a, 0}, {a, 0}));
    // arc (a cos t, b sin t), t in [0, pi], expanded about pi/2:
    // x = -a sin(u), y = b cos(u), u = t - pi/2 in [-pi/2, pi/2]
    const int deg = 25;
    std::vector<double> cx(deg + 1, 0.0), cy(deg + 1, 0.0);
    double fact = 1.0;
    for (int j = 0; j <= deg; ++j) {
        if (j > 0) fact *= j;
        // sin(u) = sum u^(2l+1) (-1)^l/(2l+1)!, cos(u) = sum u^(2l) (-1)^l/(2l)!
        if (j % 2 == 1) cx[j] = -a * ((j / 2) % 2 == 0 ? 1.0 : -1.0) / fact;
        else cy[j] = b * ((j / 2) % 2 == 0 ? 1.0 : -1.0) / fact;
    }
    e.push_back(make_polyparam(std::move(cx), std::move(cy), 0.0, PI, 0.5 * PI));
    auto d = build_domain(std::move(e), "semi-ellipse");
    return d;
}

inline DomainSpec make_regular_polygon(int nsides, double circumradius = 1.0) {
    if (nsides < 3) throw Error("BadEdgeData", "polygon needs >= 3 sides");
    std::vector<Edge> e;
    for (int i = 0; i < nsides; ++i) {
        const double a0 = 2.0 * PI * i / nsides, a1 = 2.0 * PI * (i + 1) / nsides;
        e.push_back(make_segment({circumradius * std::cos(a0), circumradius * std::sin(a0)},
                                 {circumradius * std::cos(a1), circumradius * std::sin(a1)}));
    }
    return build_domain(std::move(e), "regular-polygon");
}

// --- billiard dynamics ---

namespace geo_detail {

struct RayHit {
    double ray_t = 0.0;   // distance along the ray
    int edge = -1;
    double s_local = 0.0;
};

// all forward intersections of ray p + t*dir with one edge
inline void ray_edge_hits(const DomainSpec& dom, int ei, Vec2 p, Vec2 dir,
                          std::vector<RayHit>& hits) {
    const Edge& e = dom.edges[ei];
    const double tmin = 1e-10 * std::max(1.0, dom.L);
    switch (e.kind) {
        case EdgeKind::Segment: {
            const Vec2 q = e.p0, v = e.p1 - e.p0;
            const double den = dir.cross(v);
            if (std::abs(den) < 1e-15) return;
            const Vec2 w = q - p;
            const double t = w.cross(v) / den;       // along ray
            const double u = w.cross(dir) / den;     // along segment [0,1]
            if (t > tmin && u >= -1e-12 && u <= 1.0 + 1e-12)
                hits.push_back({t, ei, std::clamp(u, 0.0, 1.0) * e.length});
            return;
        }
        case EdgeKind::Arc: {
            const Vec2 w = p - e.center;
            const double bq = w.dot(dir);
            const double cq = w.dot(w) - e.radius * e.radius;
            const double disc = bq * bq - cq;
            if (disc < 0.0) return;
            const double sq = std::sqrt(disc);
            for (const double t : {-bq - sq, -bq + sq}) {
                if (t <= tmin) continue;
                const Vec2 h = p + dir * t;
                double th = std::atan2(h.y - e.center.y, h.x - e.center.x);
                while (th < e.ang0 - 1e-12) th += 2.0 * PI;
                if (th <= e.ang1 + 1e-12) {
                    const double s = std::clamp((th - e.ang0) * e.radius, 0.0, e.length);
                    hits.push_back({t, ei, s});
                }
            }
            return;
        }
        case EdgeKind::PolyParam: {
            // sample the signed cross of (gamma(t)-p) with dir; refine sign changes
            const int ns = 256;
            auto g = [&](double tt) {
                return (e.point_at_param(tt) - p).cross(dir);
            };
            double tp = e.t0, gp = g(tp);
            for (int i = 1; i <= ns; ++i) {
                const double tt = e.t0 + (e.t1 - e.t0) * i / ns;
                const double gc = g(tt);
                if (gp == 0.0 || gp * gc < 0.0) {
                    double lo = tp, hi = tt, flo = gp;
                    for (int it = 0; it < 80; ++it) {
                        const double mid = 0.5 * (lo + hi), fm = g(mid);
                        if (flo * fm <= 0.0) hi = mid;
                        else { lo = mid; flo = fm; }
                    }
                    const double tstar = 0.5 * (lo + hi);
                    const Vec2 h = e.point_at_param(tstar);
                    const double t = (h - p).dot(dir);
                    if (t > tmin) {
                        // arclength at tstar from table
                        const auto& tt2 = e.t_table;
                        const auto it2 = std::upper_bound(tt2.begin(), tt2.end(), tstar);
                        size_t i2 = (it2 == tt2.begin()) ? 0 : (it2 - tt2.begin() - 1);
                        i2 = std::min(i2, tt2.size() - 2);
                        const double frac = (tstar - tt2[i2]) / (tt2[i2 + 1] - tt2[i2]);
                        const double s = e.s_table[i2] + frac * (e.s_table[i2 + 1] - e.s_table[i2]);
                        hits.push_back({t, ei, std::clamp(s, 0.0, e.length)});
                    }
                }
                tp = tt; gp = gc;
            }
            return;
        }
    }
}

} // namespace geo_detail

// One bounce of the billiard map. xi is the cosine of the angle between the
// outgoing ray and the (oriented) tangent.
inline BilliardOutcome billiard_step(const DomainSpec& dom, const PhaseSpacePoint& p,
                                     double glancing_tol = 1e-9) {
    if (std::abs(p.xi) >= 1.0 - glancing_tol) throw Error("GlancingLaunch", "|xi| too close to 1");
    const BoundaryPointInfo bp = dom.at(p.edge, p.s);
    const Vec2 inward = bp.normal * (-1.0);
    const Vec2 dir = bp.tangent * p.xi + inward * std::sqrt(1.0 - p.xi * p.xi);

    std::vector<geo_detail::RayHit> hits;
    for (int ei = 0; ei < dom.num_edges(); ++ei)
        geo_detail::ray_edge_hits(dom, ei, bp.pos, dir, hits);
    if (hits.empty()) throw Error("BadEdgeData", "billiard ray found no boundary intersection");
    const auto best = *std::min_element(hits.begin(), hits.end(),
                                        [](const auto& a, const auto& b) { return a.ray_t < b.ray_t; });

    BilliardOutcome out;
    out.hit_position = bp.pos + dir * best.ray_t;
    out.chord_length = best.ray_t;

    const double corner_tol = 1e-9 * dom.L;
    for (size_t ci = 0; ci < dom.corners.size(); ++ci) {
        if ((dom.corners[ci].pos - out.hit_position).norm() < corner_tol) {
            out.corner_hit = true;
            out.corner_index = static_cast<int>(ci);
            return out;
        }
    }

    const BoundaryPointInfo hq = dom.at(best.edge, best.s_local);
    out.point.edge = best.edge;
    out.point.s = best.s_local;
    out.point.xi = dir.dot(hq.tangent);  // tangential component survives reflection
    return out;
}

// --- admissibility ---

struct AdmissibilityEntry {
    int corner = -1;
    double angle = 0.0;
    bool admissible = true;
    std::vector<int> incident_corners;  // corners lying on the test line (excluding the base)
};

struct AdmissibilityReport {
    int edge = -1;
    bool admissible = true;
    std::vector<AdmissibilityEntry> per_corner;
};

// Test line through an adjacent corner of flat edge j at the doubled reflection
// angle; the domain is admissible at that corner iff no other corner lies on it.
inline AdmissibilityReport check_admissible(const DomainSpec& dom, int edge_j,
                                            double tol = 1e-9) {
    if (!dom.edges[edge_j].flat) throw Error("NotFlat", "admissibility needs a flat edge");
    AdmissibilityReport rep;
    rep.edge = edge_j;
    const Vec2 a = dom.edges[edge_j].start(), b = dom.edges[edge_j].end();

    for (size_t ci = 0; ci < dom.corners.size(); ++ci) {
        const Corner& c = dom.corners[ci];
        if ((c.pos - a).norm() > tol && (c.pos - b).norm() > tol) continue;
        AdmissibilityEntry ent;
        ent.corner = static_cast<int>(ci);
        ent.angle = c.angle;
        // local frame: real axis along the edge away from the corner, interior above
        const Vec2 other = ((c.pos - a).norm() <= tol) ? b : a;
        const Vec2 ex = (other - c.pos).normalized();
        const Vec2 ey_raw = dom.at(edge_j, 0.5 * dom.edges[edge_j].length).normal * (-1.0);
        const Vec2 ey = ey_raw;  // inward normal of the flat edge = "above"
        const double th = (c.angle > 0.5 * PI + 1e-12) ? 2.0 * (PI - c.angle) : 2.0 * c.angle;
        const Vec2 dir = ex * std::cos(th) + ey * std::sin(th);
        for (size_t cj = 0; cj < dom.corners.size(); ++cj) {
            if (cj == ci) continue;
            const Vec2 w = dom.corners[cj].pos - c.pos;
            const double dist = std::abs(w.cross(dir));
            if (dist < tol) {
                ent.incident_corners.push_back(static_cast<int>(cj));
                ent.admissible = false;
            }
        }
        rep.admissible = rep.admissible && ent.admissible;
        rep.per_corner.push_back(ent);
    }
    return rep;
}

struct CornerClass {
    int index = -1;
    Vec2 pos;
    double angle = 0.0;
    bool obtuse = false;  // obtuse: angle > pi/2; otherwise the acute/right case
};

inline std::vector<CornerClass> corner_report(const DomainSpec& dom) {
    std::vector<CornerClass> out;
    for (size_t i = 0; i < dom.corners.size(); ++i) {
        out.push_back({static_cast<int>(i), dom.corners[i].pos, dom.corners[i].angle,
                       dom.corners[i].angle > 0.5 * PI + 1e-12});
    }
    return out;
}

} // namespace bil
