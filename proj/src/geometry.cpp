#include "femtoprop/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "crossing_detail.hpp"
#include "femtoprop/sitemodel.hpp"

namespace femtoprop::geom {

double distance(Point p, Point q) {
    const double dx = q.x - p.x;
    const double dy = q.y - p.y;
    return std::sqrt(dx * dx + dy * dy);
}

double length(const Segment& s) { return distance(s.a, s.b); }

std::optional<Point> segment_intersection(const Segment& s1, const Segment& s2) {
    const double rx = s1.b.x - s1.a.x;
    const double ry = s1.b.y - s1.a.y;
    const double sx = s2.b.x - s2.a.x;
    const double sy = s2.b.y - s2.a.y;
    const double l1 = std::sqrt(rx * rx + ry * ry);
    const double l2 = std::sqrt(sx * sx + sy * sy);
    if (l1 <= kCoordTolerance || l2 <= kCoordTolerance)
        throw std::invalid_argument("segment_intersection: degenerate segment");

    const double qx = s2.a.x - s1.a.x;
    const double qy = s2.a.y - s1.a.y;
    const double denom = rx * sy - ry * sx;
    const double tol_t = kCoordTolerance / l1;
    const double tol_u = kCoordTolerance / l2;

    if (std::fabs(denom) > kCoordTolerance * l1 * l2) {
        const double t = (qx * sy - qy * sx) / denom;
        const double u = (qx * ry - qy * rx) / denom;
        if (t >= -tol_t && t < 1.0 - tol_t && u >= -tol_u && u < 1.0 - tol_u)
            return Point{s1.a.x + t * rx, s1.a.y + t * ry};
        return std::nullopt;
    }

    // parallel: reject unless s2 lies on s1's line
    const double ha = std::fabs(qx * ry - qy * rx);
    const double hb = std::fabs((s2.b.x - s1.a.x) * ry - (s2.b.y - s1.a.y) * rx);
    if (std::max(ha, hb) / l1 > kCoordTolerance) return std::nullopt;

    const double inv = 1.0 / (l1 * l1);
    const double ta = (qx * rx + qy * ry) * inv;
    const double tb = ((s2.b.x - s1.a.x) * rx + (s2.b.y - s1.a.y) * ry) * inv;
    const double lo = std::max(std::min(ta, tb), 0.0);
    const double hi = std::min(std::max(ta, tb), 1.0);
    if (hi < lo - tol_t) return std::nullopt;

    const double mid = 0.5 * (lo + hi);
    if (hi - lo <= tol_t) {
        // single-point contact is excluded at either segment's open b end
        if (std::fabs(mid - 1.0) <= tol_t) return std::nullopt;
        if (std::fabs(mid - tb) <= tol_t) return std::nullopt;
    }
    return Point{s1.a.x + mid * rx, s1.a.y + mid * ry};
}

std::map<std::string, int> crossing_counts(const SiteModel& site, Point tx, Point rx) {
    if (distance(tx, rx) <= kCoordTolerance)
        throw std::domain_error("crossing_counts: tx and rx coincide");
    const detail::RayContext ray = detail::make_ray(tx, rx);

    std::map<std::string, int> counts;
    // collinear overlap intervals per material, merged into connected runs
    // so subdividing a wall never changes the count
    std::map<std::string, std::vector<std::pair<double, double>>> runs;
    for (const Wall& w : site.walls) {
        const double wlen = length(w.geometry);
        const std::uint8_t code = detail::scan_wall(ray, w.geometry.a.x, w.geometry.a.y,
                                                    w.geometry.b.x, w.geometry.b.y, wlen);
        if (code == detail::kScanCross) {
            ++counts[w.material];
        } else if (code == detail::kScanExact) {
            const detail::CollinearOverlap ov = detail::classify_exact(
                ray, w.geometry.a.x, w.geometry.a.y, w.geometry.b.x, w.geometry.b.y);
            if (ov.hit) runs[w.material].emplace_back(ov.t0, ov.t1);
        }
    }
    for (auto& [material, intervals] : runs) {
        std::sort(intervals.begin(), intervals.end());
        double end = -2.0 * ray.tol_t - 1.0;
        for (const auto& [t0, t1] : intervals) {
            if (t0 > end + ray.tol_t) ++counts[material];
            end = std::max(end, t1);
        }
    }
    return counts;
}

double fresnel_radius(double wavelength_m, double d1_m, double d2_m) {
    if (wavelength_m <= 0.0 || d1_m < 0.0 || d2_m < 0.0 || d1_m + d2_m <= 0.0)
        throw std::domain_error("fresnel_radius: invalid geometry");
    return std::sqrt(wavelength_m * d1_m * d2_m / (d1_m + d2_m));
}

double point_segment_distance(Point p, const Segment& s) {
    const double rx = s.b.x - s.a.x;
    const double ry = s.b.y - s.a.y;
    const double rr = rx * rx + ry * ry;
    if (rr == 0.0) return distance(p, s.a);
    const double t = std::clamp(((p.x - s.a.x) * rx + (p.y - s.a.y) * ry) / rr, 0.0, 1.0);
    return distance(p, Point{s.a.x + t * rx, s.a.y + t * ry});
}

double point_ellipse_distance(double a, double b, double px, double py) {
    if (!(a >= b) || !(b > 0.0))
        throw std::domain_error("point_ellipse_distance: need a >= b > 0");
    px = std::fabs(px);
    py = std::fabs(py);
    if ((px / a) * (px / a) + (py / b) * (py / b) <= 1.0) return 0.0;

    // closest boundary point is (a^2 px/(t+a^2), b^2 py/(t+b^2)) at the root
    // of f; f is strictly decreasing for t > 0 and f(0) > 0 outside
    const auto f = [&](double t) {
        const double fx = a * px / (t + a * a);
        const double fy = b * py / (t + b * b);
        return fx * fx + fy * fy - 1.0;
    };
    double lo = 0.0;
    double hi = std::max(a * px, b * py) + a * a;
    while (f(hi) > 0.0) hi *= 2.0;
    for (int i = 0; i < 200 && hi - lo > 1e-15 * (hi + 1.0); ++i) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) > 0.0 ? lo : hi) = mid;
    }
    const double t = 0.5 * (lo + hi);
    const double dx = px - a * a * px / (t + a * a);
    const double dy = py - b * b * py / (t + b * b);
    return std::sqrt(dx * dx + dy * dy);
}

bool clutter_encroaches(Point tx, Point rx, double wavelength_m, Point center, double radius_m) {
    const double d = distance(tx, rx);
    if (d <= kCoordTolerance) throw std::domain_error("clutter_encroaches: tx and rx coincide");
    if (radius_m <= 0.0) return false;

    // touching the direct path makes it a blocker, not clutter
    if (point_segment_distance(center, Segment{tx, rx}) <= radius_m) return false;

    const double b = fresnel_radius(wavelength_m, 0.5 * d, 0.5 * d);
    const double c = 0.5 * d;
    const double a = std::sqrt(b * b + c * c);

    // disk center in the ellipse frame: origin mid-path, x along the ray
    const double mx = 0.5 * (tx.x + rx.x);
    const double my = 0.5 * (tx.y + rx.y);
    const double ux = (rx.x - tx.x) / d;
    const double uy = (rx.y - tx.y) / d;
    const double ex = (center.x - mx) * ux + (center.y - my) * uy;
    const double ey = (center.y - my) * ux - (center.x - mx) * uy;
    return point_ellipse_distance(a, b, ex, ey) <= radius_m;
}

std::map<std::string, int> clutter_counts(const SiteModel& site, Point tx, Point rx,
                                          double wavelength_m) {
    std::map<std::string, int> counts;
    for (const ClutterObject& c : site.clutter) {
        if (clutter_encroaches(tx, rx, wavelength_m, c.center, c.radius_m)) ++counts[c.material];
    }
    return counts;
}

int clutter_count(const SiteModel& site, Point tx, Point rx, double wavelength_m) {
    int total = 0;
    for (const auto& [material, n] : clutter_counts(site, tx, rx, wavelength_m)) {
        (void)material;
        total += n;
    }
    return total;
}

}  // namespace femtoprop::geom
