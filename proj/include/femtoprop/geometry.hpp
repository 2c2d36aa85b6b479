#pragma once

#include <map>
#include <optional>
#include <string>

namespace femtoprop {

class SiteModel;

struct Point {
    double x = 0.0;
    double y = 0.0;
};

struct Segment {
    Point a;
    Point b;
};

namespace geom {

/// Tolerance for all intersection predicates, in meters.
inline constexpr double kCoordTolerance = 1e-9;

double distance(Point p, Point q);
double length(const Segment& s);

/// Proper or endpoint-grazing intersection of two segments, each treated
/// half-open: includes its own a endpoint, excludes b. Collinear overlap
/// yields the midpoint of the shared stretch. Symmetric in its arguments.
std::optional<Point> segment_intersection(const Segment& s1, const Segment& s2);

/// Number of walls of each material whose segment crosses the tx-rx segment.
/// The tx-rx segment is closed at both ends; walls are half-open so chained
/// walls sharing an endpoint count once. Collinear overlap runs of one
/// material count one crossing per connected run. Materials with zero
/// crossings are omitted.
std::map<std::string, int> crossing_counts(const SiteModel& site, Point tx, Point rx);

/// First Fresnel zone radius at the point dividing the path into d1 and d2.
double fresnel_radius(double wavelength_m, double d1_m, double d2_m);

/// Clutter objects whose disk reaches the first Fresnel ellipse of the tx-rx
/// path without touching the line-of-sight segment itself, grouped by material.
std::map<std::string, int> clutter_counts(const SiteModel& site, Point tx, Point rx,
                                          double wavelength_m);

/// Total over clutter_counts.
int clutter_count(const SiteModel& site, Point tx, Point rx, double wavelength_m);

/// Single-disk version of the clutter predicate.
bool clutter_encroaches(Point tx, Point rx, double wavelength_m, Point center, double radius_m);

/// Distance from (px, py) to the filled ellipse x^2/a^2 + y^2/b^2 <= 1 with
/// a >= b > 0; zero for interior points.
double point_ellipse_distance(double a, double b, double px, double py);

double point_segment_distance(Point p, const Segment& s);

}  // namespace geom
}  // namespace femtoprop
