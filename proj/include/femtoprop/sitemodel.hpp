#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "femtoprop/geometry.hpp"

namespace femtoprop {

/// One partition or clutter material. Bands are identified by their center
/// frequency in GHz; lookups match within ±0.1 GHz, never interpolated
/// (losses are not monotone across bands).
struct Material {
    std::string id;
    std::optional<double> thickness_cm;  // absent for clutter-style materials
    std::map<double, double> loss_db;    // band GHz -> one-traversal loss, dB
};

struct Wall {
    std::string material;
    Segment geometry;
};

struct ClutterObject {
    std::string material;
    Point center;
    double radius_m = 0.0;
};

struct RadioNode {
    std::string id;
    Point position;
    double tx_power_dbm = 0.0;
    double antenna_gain_dbi = 0.0;
};

/// Floor description: materials, wall segments, clutter disks, radio nodes.
/// Treat as immutable once built; every operation takes it by const
/// reference and it is safe to share across threads.
class SiteModel {
  public:
    std::vector<Material> materials;
    std::vector<Wall> walls;
    std::vector<ClutterObject> clutter;
    std::vector<RadioNode> nodes;

    const Material* find_material(const std::string& id) const;
    const RadioNode* find_node(const std::string& id) const;

    /// One-traversal loss for the material at the band. Throws DataError on
    /// unknown material or missing band entry.
    double loss_at(const std::string& material_id, double freq_ghz) const;
};

/// Loss entry within ±0.1 GHz of freq_ghz, if the material declares one.
std::optional<double> band_loss(const Material& m, double freq_ghz);

/// Line-oriented site file:
///   material <id> <thickness_cm | -> <band_GHz>:<loss_dB> [more pairs]
///   wall <material_id> <x1> <y1> <x2> <y2>
///   clutter <material_id> <x> <y> <radius_m>
///   node <id> <x> <y> <tx_power_dBm> <gain_dBi>
/// '#' starts a comment. Throws ParseError (syntax, unknown material,
/// duplicate id) with source:line:column context.
SiteModel parse_site(const std::string& text, const std::string& source = "<site>");
SiteModel load_site(const std::string& path);

/// Value-invariant violations (degenerate walls, nonpositive thickness or
/// radius, empty loss tables, non-finite numbers). Empty means valid.
std::vector<std::string> validate_site(const SiteModel& site);

/// Inverse of parse_site up to comments and field spacing.
std::string serialize_site(const SiteModel& site);

}  // namespace femtoprop
