#include "femtoprop/sitemodel.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "femtoprop/error.hpp"
#include "femtoprop/util.hpp"
#include "textio.hpp"

namespace femtoprop {

namespace {

constexpr double kBandMatchGhz = 0.1;

bool finite_point(Point p) { return std::isfinite(p.x) && std::isfinite(p.y); }

}  // namespace

const Material* SiteModel::find_material(const std::string& id) const {
    for (const Material& m : materials) {
        if (m.id == id) return &m;
    }
    return nullptr;
}

const RadioNode* SiteModel::find_node(const std::string& id) const {
    for (const RadioNode& n : nodes) {
        if (n.id == id) return &n;
    }
    return nullptr;
}

std::optional<double> band_loss(const Material& m, double freq_ghz) {
    const double tol = kBandMatchGhz + 1e-12;
    double best_gap = tol;
    std::optional<double> best;
    for (const auto& [band, loss] : m.loss_db) {
        const double gap = std::fabs(band - freq_ghz);
        if (gap <= best_gap) {  // later = closer or equally close lower band wins ties upward
            if (!best || gap < best_gap) {
                best = loss;
                best_gap = gap;
            }
        }
    }
    return best;
}

double SiteModel::loss_at(const std::string& material_id, double freq_ghz) const {
    const Material* m = find_material(material_id);
    if (m == nullptr) throw DataError("unknown material '" + material_id + "'");
    const std::optional<double> loss = band_loss(*m, freq_ghz);
    if (!loss)
        throw DataError("material '" + material_id + "' declares no loss at " +
                        fmt_double(freq_ghz) + " GHz");
    return *loss;
}

SiteModel parse_site(const std::string& text, const std::string& source) {
    using textio::Field;
    const std::vector<std::string_view> lines = textio::split_lines(text);

    SiteModel site;
    struct PendingWall {
        Wall wall;
        int line;
        int column;
    };
    struct PendingClutter {
        ClutterObject object;
        int line;
        int column;
    };
    std::vector<PendingWall> walls;
    std::vector<PendingClutter> clutter;

    for (std::size_t li = 0; li < lines.size(); ++li) {
        const int ln = int(li) + 1;
        const std::vector<Field> f = textio::split_ws(lines[li]);
        if (f.empty()) continue;
        const std::string& kind = f[0].text;

        if (kind == "material") {
            if (f.size() < 4)
                throw ParseError(source, ln, f[0].column,
                                 "material needs: material <id> <thickness_cm|-> <band:loss>...");
            Material m;
            m.id = f[1].text;
            if (site.find_material(m.id) != nullptr)
                throw ParseError(source, ln, f[1].column, "duplicate material '" + m.id + "'");
            if (f[2].text != "-") {
                const double th = textio::parse_double(f[2], source, ln);
                m.thickness_cm = th;
            }
            for (std::size_t i = 3; i < f.size(); ++i) {
                const std::size_t colon = f[i].text.find(':');
                if (colon == std::string::npos)
                    throw ParseError(source, ln, f[i].column,
                                     "expected <band_GHz>:<loss_dB>, got '" + f[i].text + "'");
                const Field band_f{f[i].text.substr(0, colon), f[i].column};
                const Field loss_f{f[i].text.substr(colon + 1), f[i].column + int(colon) + 1};
                const double band = textio::parse_double(band_f, source, ln);
                const double loss = textio::parse_double(loss_f, source, ln);
                if (!m.loss_db.emplace(band, loss).second)
                    throw ParseError(source, ln, f[i].column,
                                     "duplicate band " + band_f.text + " for material '" + m.id +
                                         "'");
            }
            site.materials.push_back(std::move(m));
        } else if (kind == "wall") {
            if (f.size() != 6)
                throw ParseError(source, ln, f[0].column,
                                 "wall needs: wall <material_id> <x1> <y1> <x2> <y2>");
            Wall w;
            w.material = f[1].text;
            w.geometry.a.x = textio::parse_double(f[2], source, ln);
            w.geometry.a.y = textio::parse_double(f[3], source, ln);
            w.geometry.b.x = textio::parse_double(f[4], source, ln);
            w.geometry.b.y = textio::parse_double(f[5], source, ln);
            walls.push_back({std::move(w), ln, f[1].column});
        } else if (kind == "clutter") {
            if (f.size() != 5)
                throw ParseError(source, ln, f[0].column,
                                 "clutter needs: clutter <material_id> <x> <y> <radius_m>");
            ClutterObject c;
            c.material = f[1].text;
            c.center.x = textio::parse_double(f[2], source, ln);
            c.center.y = textio::parse_double(f[3], source, ln);
            c.radius_m = textio::parse_double(f[4], source, ln);
            clutter.push_back({std::move(c), ln, f[1].column});
        } else if (kind == "node") {
            if (f.size() != 6)
                throw ParseError(source, ln, f[0].column,
                                 "node needs: node <id> <x> <y> <tx_power_dBm> <gain_dBi>");
            RadioNode n;
            n.id = f[1].text;
            if (site.find_node(n.id) != nullptr)
                throw ParseError(source, ln, f[1].column, "duplicate node '" + n.id + "'");
            n.position.x = textio::parse_double(f[2], source, ln);
            n.position.y = textio::parse_double(f[3], source, ln);
            n.tx_power_dbm = textio::parse_double(f[4], source, ln);
            n.antenna_gain_dbi = textio::parse_double(f[5], source, ln);
            site.nodes.push_back(std::move(n));
        } else {
            throw ParseError(source, ln, f[0].column, "unknown directive '" + kind + "'");
        }
    }

    // materials may be declared anywhere in the file, so resolve references last
    for (PendingWall& pw : walls) {
        if (site.find_material(pw.wall.material) == nullptr)
            throw ParseError(source, pw.line, pw.column,
                             "wall references undeclared material '" + pw.wall.material + "'");
        site.walls.push_back(std::move(pw.wall));
    }
    for (PendingClutter& pc : clutter) {
        if (site.find_material(pc.object.material) == nullptr)
            throw ParseError(source, pc.line, pc.column,
                             "clutter references undeclared material '" + pc.object.material +
                                 "'");
        site.clutter.push_back(std::move(pc.object));
    }
    return site;
}

SiteModel load_site(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open site file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_site(buf.str(), path);
}

std::vector<std::string> validate_site(const SiteModel& site) {
    std::vector<std::string> out;
    std::set<std::string> material_ids;
    for (const Material& m : site.materials) {
        const std::string who = "material " + m.id;
        if (m.id.empty()) out.push_back("material with empty id");
        if (!material_ids.insert(m.id).second) out.push_back(who + ": duplicate id");
        if (m.thickness_cm) {
            if (!std::isfinite(*m.thickness_cm) || *m.thickness_cm <= 0.0)
                out.push_back(who + ": nonpositive thickness");
        }
        if (m.loss_db.empty()) out.push_back(who + ": no band entries");
        for (const auto& [band, loss] : m.loss_db) {
            if (!std::isfinite(band) || band <= 0.0) out.push_back(who + ": invalid band");
            if (!std::isfinite(loss)) out.push_back(who + ": non-finite loss");
        }
    }
    for (std::size_t i = 0; i < site.walls.size(); ++i) {
        const Wall& w = site.walls[i];
        const std::string who = "wall " + std::to_string(i + 1) + " (" + w.material + ")";
        const Material* m = site.find_material(w.material);
        if (m == nullptr) {
            out.push_back(who + ": unknown material");
        } else if (!m->thickness_cm) {
            out.push_back(who + ": material has no thickness");
        }
        if (!finite_point(w.geometry.a) || !finite_point(w.geometry.b)) {
            out.push_back(who + ": non-finite coordinates");
        } else if (geom::length(w.geometry) <= geom::kCoordTolerance) {
            out.push_back(who + ": degenerate wall geometry");
        }
    }
    for (std::size_t i = 0; i < site.clutter.size(); ++i) {
        const ClutterObject& c = site.clutter[i];
        const std::string who = "clutter " + std::to_string(i + 1) + " (" + c.material + ")";
        if (site.find_material(c.material) == nullptr) out.push_back(who + ": unknown material");
        if (!finite_point(c.center) || !std::isfinite(c.radius_m))
            out.push_back(who + ": non-finite values");
        else if (c.radius_m <= 0.0)
            out.push_back(who + ": nonpositive radius");
    }
    std::set<std::string> node_ids;
    for (const RadioNode& n : site.nodes) {
        const std::string who = "node " + n.id;
        if (n.id.empty()) out.push_back("node with empty id");
        if (!node_ids.insert(n.id).second) out.push_back(who + ": duplicate id");
        if (!finite_point(n.position) || !std::isfinite(n.tx_power_dbm) ||
            !std::isfinite(n.antenna_gain_dbi))
            out.push_back(who + ": non-finite values");
    }
    return out;
}

std::string serialize_site(const SiteModel& site) {
    std::string out;
    for (const Material& m : site.materials) {
        out += "material " + m.id + " ";
        out += m.thickness_cm ? fmt_double(*m.thickness_cm) : "-";
        for (const auto& [band, loss] : m.loss_db)
            out += " " + fmt_double(band) + ":" + fmt_double(loss);
        out += "\n";
    }
    for (const Wall& w : site.walls) {
        out += "wall " + w.material + " " + fmt_double(w.geometry.a.x) + " " +
               fmt_double(w.geometry.a.y) + " " + fmt_double(w.geometry.b.x) + " " +
               fmt_double(w.geometry.b.y) + "\n";
    }
    for (const ClutterObject& c : site.clutter) {
        out += "clutter " + c.material + " " + fmt_double(c.center.x) + " " +
               fmt_double(c.center.y) + " " + fmt_double(c.radius_m) + "\n";
    }
    for (const RadioNode& n : site.nodes) {
        out += "node " + n.id + " " + fmt_double(n.position.x) + " " + fmt_double(n.position.y) +
               " " + fmt_double(n.tx_power_dbm) + " " + fmt_double(n.antenna_gain_dbi) + "\n";
    }
    return out;
}

}  // namespace femtoprop
