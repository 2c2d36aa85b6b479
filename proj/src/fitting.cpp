#include "femtoprop/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include "femtoprop/error.hpp"
#include "femtoprop/util.hpp"
#include "textio.hpp"

namespace femtoprop {

double fit_exponent(std::span<const DistancePl> points, double d0, double pl_d0) {
    if (points.empty()) throw DataError("fit_exponent: no observations");
    if (d0 <= 0.0) throw std::domain_error("fit_exponent: reference distance must be positive");
    double sxx = 0.0;
    double sxy = 0.0;
    for (const auto& [d, pl] : points) {
        if (d <= 0.0) throw std::domain_error("fit_exponent: nonpositive distance");
        const double x = 10.0 * std::log10(d / d0);
        const double y = pl - pl_d0;
        sxx += x * x;
        sxy += x * y;
    }
    if (sxx == 0.0) throw DataError("fit_exponent: every distance equals d0");
    return sxy / sxx;
}

double estimate_sigma(std::span<const DistancePl> points, double d0, double pl_d0, double n) {
    if (points.empty()) throw DataError("estimate_sigma: no observations");
    if (d0 <= 0.0) throw std::domain_error("estimate_sigma: reference distance must be positive");
    double ss = 0.0;
    for (const auto& [d, pl] : points) {
        if (d <= 0.0) throw std::domain_error("estimate_sigma: nonpositive distance");
        const double r = pl - pl_d0 - 10.0 * n * std::log10(d / d0);
        ss += r * r;
    }
    return std::sqrt(ss / double(points.size()));
}

namespace {

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (const double x : v) s += x;
    return s / double(v.size());
}

double pop_std(const std::vector<double>& v, double mean) {
    double ss = 0.0;
    for (const double x : v) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / double(v.size()));
}

// links flattened to a counts matrix (rows = links, cols = sorted materials)
// and per-link excess over free space
struct LinkMatrix {
    std::vector<std::string> materials;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> a;  // row-major counts
    std::vector<double> excess;
};

LinkMatrix build_matrix(const std::vector<LinkObservation>& links) {
    if (links.empty()) throw DataError("no link observations");
    const double f0 = links.front().band.frequency_ghz;
    std::set<std::string> ids;
    for (const LinkObservation& l : links) {
        if (std::fabs(l.band.frequency_ghz - f0) > 1e-9)
            throw DataError("links mix frequency bands; fit one band at a time");
        if (l.distance_m <= 0.0)
            throw DataError("link '" + l.link_id + "' has nonpositive distance");
        for (const auto& [material, count] : l.counts) {
            if (count < 0)
                throw DataError("link '" + l.link_id + "' has a negative count for '" + material +
                                "'");
            ids.insert(material);
        }
    }
    LinkMatrix lm;
    lm.materials.assign(ids.begin(), ids.end());
    lm.rows = links.size();
    lm.cols = lm.materials.size();
    lm.a.assign(lm.rows * lm.cols, 0.0);
    lm.excess.resize(lm.rows);
    for (std::size_t r = 0; r < lm.rows; ++r) {
        const LinkObservation& l = links[r];
        lm.excess[r] = l.measured_pl_db - free_space_path_loss(l.band, l.distance_m);
        for (std::size_t c = 0; c < lm.cols; ++c) {
            const auto it = l.counts.find(lm.materials[c]);
            if (it != l.counts.end()) lm.a[r * lm.cols + c] = double(it->second);
        }
    }
    for (std::size_t c = 0; c < lm.cols; ++c) {
        bool seen = false;
        for (std::size_t r = 0; r < lm.rows && !seen; ++r) seen = lm.a[r * lm.cols + c] > 0.0;
        if (!seen) throw DataError("material '" + lm.materials[c] + "' appears in no link");
    }
    return lm;
}

std::vector<std::string> proportional_column_warnings(const LinkMatrix& lm) {
    std::vector<std::string> out;
    for (std::size_t ci = 0; ci < lm.cols; ++ci) {
        for (std::size_t cj = ci + 1; cj < lm.cols; ++cj) {
            std::size_t ref = lm.rows;
            for (std::size_t r = 0; r < lm.rows; ++r) {
                if (lm.a[r * lm.cols + ci] != 0.0 || lm.a[r * lm.cols + cj] != 0.0) {
                    ref = r;
                    break;
                }
            }
            if (ref == lm.rows) continue;
            bool proportional = true;
            for (std::size_t r = 0; r < lm.rows && proportional; ++r) {
                proportional = lm.a[r * lm.cols + ci] * lm.a[ref * lm.cols + cj] ==
                               lm.a[ref * lm.cols + ci] * lm.a[r * lm.cols + cj];
            }
            if (proportional)
                out.push_back("materials '" + lm.materials[ci] + "' and '" + lm.materials[cj] +
                              "' have proportional crossing counts; their attenuations are not "
                              "separately identifiable");
        }
    }
    return out;
}

/// Gauss-Jordan on the (possibly singular) normal equations; variables whose
/// column never yields a usable pivot are forced to zero, which stays a
/// least-squares minimizer because such columns are linear combinations of
/// the pivoted ones.
std::vector<double> solve_normal(std::size_t n, std::vector<double> g, std::vector<double> h) {
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::fabs(g[i * n + i]));
    const double eps = 1e-12 * std::max(scale, 1.0);

    std::vector<int> pivot_row(n, -1);
    std::vector<bool> used(n, false);
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t best = n;
        double best_abs = eps;
        for (std::size_t r = 0; r < n; ++r) {
            const double v = std::fabs(g[r * n + c]);
            if (!used[r] && v > best_abs) {
                best = r;
                best_abs = v;
            }
        }
        if (best == n) continue;
        used[best] = true;
        pivot_row[c] = int(best);
        const double p = g[best * n + c];
        for (std::size_t r = 0; r < n; ++r) {
            if (r == best) continue;
            const double f = g[r * n + c] / p;
            if (f == 0.0) continue;
            for (std::size_t k = 0; k < n; ++k) g[r * n + k] -= f * g[best * n + k];
            g[r * n + c] = 0.0;
            h[r] -= f * h[best];
        }
    }
    std::vector<double> x(n, 0.0);
    for (std::size_t c = 0; c < n; ++c) {
        if (pivot_row[c] < 0) continue;
        const std::size_t r = std::size_t(pivot_row[c]);
        double s = h[r];
        for (std::size_t k = 0; k < n; ++k) {
            if (k != c && pivot_row[k] < 0) s -= g[r * n + k] * x[k];  // zeroed vars contribute 0
        }
        x[c] = s / g[r * n + c];
    }
    return x;
}

}  // namespace

std::vector<double> nnls_solve(const std::vector<double>& a, std::size_t rows, std::size_t cols,
                               const std::vector<double>& b) {
    if (a.size() != rows * cols || b.size() != rows)
        throw std::invalid_argument("nnls_solve: size mismatch");
    std::vector<double> x(cols, 0.0);
    if (rows == 0 || cols == 0) return x;

    double grad_scale = 0.0;
    for (std::size_t c = 0; c < cols; ++c) {
        double g = 0.0;
        for (std::size_t r = 0; r < rows; ++r) g += a[r * cols + c] * b[r];
        grad_scale = std::max(grad_scale, std::fabs(g));
    }
    const double tol = 1e-10 * (1.0 + grad_scale);

    std::vector<bool> passive(cols, false);
    std::vector<double> w(cols);
    std::vector<double> resid(rows);
    const int max_iter = 30 * int(cols) + 30;

    for (int outer = 0; outer < max_iter; ++outer) {
        for (std::size_t r = 0; r < rows; ++r) {
            double s = b[r];
            for (std::size_t c = 0; c < cols; ++c) s -= a[r * cols + c] * x[c];
            resid[r] = s;
        }
        for (std::size_t c = 0; c < cols; ++c) {
            double g = 0.0;
            for (std::size_t r = 0; r < rows; ++r) g += a[r * cols + c] * resid[r];
            w[c] = g;
        }
        std::size_t enter = cols;
        double enter_w = tol;
        for (std::size_t c = 0; c < cols; ++c) {
            if (!passive[c] && w[c] > enter_w) {  // strict: ties resolve to the lowest index
                enter = c;
                enter_w = w[c];
            }
        }
        if (enter == cols) break;
        passive[enter] = true;

        for (int inner = 0; inner < max_iter; ++inner) {
            std::vector<std::size_t> p;
            for (std::size_t c = 0; c < cols; ++c) {
                if (passive[c]) p.push_back(c);
            }
            const std::size_t k = p.size();
            std::vector<double> g(k * k, 0.0);
            std::vector<double> h(k, 0.0);
            for (std::size_t i = 0; i < k; ++i) {
                for (std::size_t j = i; j < k; ++j) {
                    double s = 0.0;
                    for (std::size_t r = 0; r < rows; ++r)
                        s += a[r * cols + p[i]] * a[r * cols + p[j]];
                    g[i * k + j] = s;
                    g[j * k + i] = s;
                }
                for (std::size_t r = 0; r < rows; ++r) h[i] += a[r * cols + p[i]] * b[r];
            }
            const std::vector<double> z = solve_normal(k, std::move(g), std::move(h));

            bool feasible = true;
            for (std::size_t i = 0; i < k && feasible; ++i) feasible = z[i] > 0.0;
            if (feasible) {
                std::fill(x.begin(), x.end(), 0.0);
                for (std::size_t i = 0; i < k; ++i) x[p[i]] = z[i];
                break;
            }
            double alpha = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < k; ++i) {
                if (z[i] <= 0.0) {
                    const double step = x[p[i]] / (x[p[i]] - z[i]);
                    alpha = std::min(alpha, step);
                }
            }
            for (std::size_t i = 0; i < k; ++i) x[p[i]] += alpha * (z[i] - x[p[i]]);
            for (std::size_t c = 0; c < cols; ++c) {
                if (passive[c] && x[c] <= 1e-12) {
                    x[c] = 0.0;
                    passive[c] = false;
                }
            }
        }
    }
    return x;
}

PartitionLossEstimate fit_partitions_composite(const std::vector<LinkObservation>& links) {
    const LinkMatrix lm = build_matrix(links);
    PartitionLossEstimate out;
    for (std::size_t c = 0; c < lm.cols; ++c) {
        // single-pass attribution from a zero start: the whole excess is
        // divided by this material's own crossing count, nothing charged to
        // the other materials on the link
        std::vector<double> attributed;
        for (std::size_t r = 0; r < lm.rows; ++r) {
            const double count = lm.a[r * lm.cols + c];
            if (count > 0.0) attributed.push_back(lm.excess[r] / count);
        }
        MaterialEstimate est;
        est.mean_loss_db = mean_of(attributed);
        est.std_db = pop_std(attributed, est.mean_loss_db);
        est.sample_count = int(attributed.size());
        out.by_material.emplace(lm.materials[c], est);
    }
    return out;
}

PartitionLossEstimate fit_partitions_nnls(const std::vector<LinkObservation>& links) {
    const LinkMatrix lm = build_matrix(links);
    PartitionLossEstimate out;
    out.warnings = proportional_column_warnings(lm);
    const std::vector<double> x = nnls_solve(lm.a, lm.rows, lm.cols, lm.excess);
    for (std::size_t c = 0; c < lm.cols; ++c) {
        std::vector<double> attributed;
        for (std::size_t r = 0; r < lm.rows; ++r) {
            const double count = lm.a[r * lm.cols + c];
            if (count <= 0.0) continue;
            double rest = 0.0;
            for (std::size_t c2 = 0; c2 < lm.cols; ++c2) {
                if (c2 != c) rest += lm.a[r * lm.cols + c2] * x[c2];
            }
            attributed.push_back((lm.excess[r] - rest) / count);
        }
        MaterialEstimate est;
        est.mean_loss_db = x[c];
        est.std_db = pop_std(attributed, mean_of(attributed));
        est.sample_count = int(attributed.size());
        out.by_material.emplace(lm.materials[c], est);
    }
    return out;
}

PartitionLossEstimate normalize_loss(PartitionLossEstimate estimate,
                                     const std::vector<Material>& materials) {
    for (auto& [id, est] : estimate.by_material) {
        for (const Material& m : materials) {
            if (m.id == id) {
                if (m.thickness_cm) est.normalized_db_per_cm = est.mean_loss_db / *m.thickness_cm;
                break;
            }
        }
    }
    return estimate;
}

std::vector<LinkObservation> parse_links_csv(const std::string& text, const std::string& source) {
    using textio::Field;
    const std::vector<std::string_view> lines = textio::split_lines(text);
    std::vector<LinkObservation> out;
    std::vector<std::string> materials;
    bool have_header = false;

    for (std::size_t li = 0; li < lines.size(); ++li) {
        const int ln = int(li) + 1;
        const std::string_view line = lines[li];
        if (line.empty() || line[0] == '#') continue;
        const std::vector<Field> f = textio::split_csv(line);
        if (!have_header) {
            const char* expect[] = {"link_id", "distance_m", "freq_ghz", "measured_pl_db"};
            if (f.size() < 4)
                throw ParseError(source, ln, 1,
                                 "header needs link_id,distance_m,freq_ghz,measured_pl_db");
            for (int i = 0; i < 4; ++i) {
                if (f[std::size_t(i)].text != expect[i])
                    throw ParseError(source, ln, f[std::size_t(i)].column,
                                     std::string("expected header column '") + expect[i] +
                                         "', got '" + f[std::size_t(i)].text + "'");
            }
            std::set<std::string> seen;
            for (std::size_t i = 4; i < f.size(); ++i) {
                if (f[i].text.empty())
                    throw ParseError(source, ln, f[i].column, "empty material column name");
                if (!seen.insert(f[i].text).second)
                    throw ParseError(source, ln, f[i].column,
                                     "duplicate material column '" + f[i].text + "'");
                materials.push_back(f[i].text);
            }
            have_header = true;
            continue;
        }
        if (f.size() != materials.size() + 4)
            throw ParseError(source, ln, 1,
                             "expected " + std::to_string(materials.size() + 4) + " fields, got " +
                                 std::to_string(f.size()));
        LinkObservation l;
        l.link_id = f[0].text;
        l.distance_m = textio::parse_double(f[1], source, ln);
        if (l.distance_m <= 0.0)
            throw ParseError(source, ln, f[1].column, "distance must be positive");
        const double freq = textio::parse_double(f[2], source, ln);
        if (freq <= 0.0) throw ParseError(source, ln, f[2].column, "frequency must be positive");
        l.band = make_band(freq);
        l.measured_pl_db = textio::parse_double(f[3], source, ln);
        for (std::size_t i = 0; i < materials.size(); ++i) {
            const long count = textio::parse_int(f[i + 4], source, ln);
            if (count < 0)
                throw ParseError(source, ln, f[i + 4].column, "crossing count must be >= 0");
            l.counts[materials[i]] = int(count);
        }
        out.push_back(std::move(l));
    }
    if (!have_header) throw ParseError(source, 1, 1, "missing links header");
    return out;
}

std::string links_csv(const std::vector<LinkObservation>& links) {
    std::set<std::string> ids;
    for (const LinkObservation& l : links) {
        for (const auto& [material, count] : l.counts) {
            (void)count;
            ids.insert(material);
        }
    }
    std::string out = "link_id,distance_m,freq_ghz,measured_pl_db";
    for (const std::string& id : ids) out += "," + id;
    out += "\n";
    for (const LinkObservation& l : links) {
        out += l.link_id + "," + fmt_double(l.distance_m) + "," +
               fmt_double(l.band.frequency_ghz) + "," + fmt_double(l.measured_pl_db);
        for (const std::string& id : ids) {
            const auto it = l.counts.find(id);
            out += "," + std::to_string(it == l.counts.end() ? 0 : it->second);
        }
        out += "\n";
    }
    return out;
}

std::vector<DistancePl> parse_points_csv(const std::string& text, const std::string& source) {
    using textio::Field;
    const std::vector<std::string_view> lines = textio::split_lines(text);
    std::vector<DistancePl> out;
    bool have_header = false;
    for (std::size_t li = 0; li < lines.size(); ++li) {
        const int ln = int(li) + 1;
        const std::string_view line = lines[li];
        if (line.empty() || line[0] == '#') continue;
        const std::vector<Field> f = textio::split_csv(line);
        if (!have_header) {
            if (f.size() != 3 || f[0].text != "location_id" || f[1].text != "distance_m" ||
                f[2].text != "pl_db")
                throw ParseError(source, ln, 1, "header must be location_id,distance_m,pl_db");
            have_header = true;
            continue;
        }
        if (f.size() != 3) throw ParseError(source, ln, 1, "expected 3 fields");
        out.emplace_back(textio::parse_double(f[1], source, ln),
                         textio::parse_double(f[2], source, ln));
    }
    if (!have_header) throw ParseError(source, 1, 1, "missing points header");
    return out;
}

}  // namespace femtoprop
