#include "tailest/simstudy.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <string_view>
#include <thread>

#include "tailest/error.hpp"
#include "tailest/numeric.hpp"
#include "tailest/rng.hpp"
#include "tailest/second_order.hpp"

namespace tailest {

namespace {

constexpr const char* kCsvHeader = "k,kind,bias,mse,se_bias,se_mse,fail_count";

std::string fmt_num(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}

std::string sanitize_stem(std::string_view label) {
    std::string out;
    out.reserve(label.size());
    for (char ch : label) {
        const bool keep = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') ||
                          (ch >= '0' && ch <= '9') || ch == '.' || ch == '-';
        if (keep)
            out.push_back(ch);
        else if (!out.empty() && out.back() != '_')
            out.push_back('_');
    }
    while (!out.empty() && out.back() == '_') out.pop_back();
    return out.empty() ? std::string("table") : out;
}

// mean and standard error of a vector (rep order), via the fixed pairwise
// tree so the result is the same no matter how the values were produced.
struct MeanSe {
    double mean = std::numeric_limits<double>::quiet_NaN();
    double se = 0.0;
};

MeanSe mean_se(const std::vector<double>& v, std::vector<double>& scratch) {
    MeanSe r;
    if (v.empty()) return r;
    r.mean = pairwise_mean(v);
    const std::size_t m = v.size();
    if (m < 2) return r;
    scratch.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double d = v[i] - r.mean;
        scratch[i] = d * d;
    }
    const double var = pairwise_sum(scratch) / static_cast<double>(m - 1);
    r.se = std::sqrt(var / static_cast<double>(m));
    return r;
}

} // namespace

std::size_t default_k_stride(std::size_t n) { return std::max<std::size_t>(1, n / 100); }

std::vector<std::size_t> k_grid(std::size_t n, std::size_t stride) {
    if (stride == 0) stride = default_k_stride(n);
    std::vector<std::size_t> ks;
    if (n < 3) return ks;
    for (std::size_t k = std::max<std::size_t>(2, stride); k <= n - 1; k += stride)
        ks.push_back(k);
    return ks;
}

StudyConfig standard_benchmark() {
    StudyConfig cfg;
    cfg.distributions = {
        ParetoTypeDist::frechet(10.0),
        ParetoTypeDist::frechet(2.0),
        ParetoTypeDist::frechet(1.0),
        ParetoTypeDist::burr_xii(std::sqrt(10.0), std::sqrt(10.0)),
        ParetoTypeDist::burr_xii(std::sqrt(2.0), std::sqrt(2.0)),
        ParetoTypeDist::burr_xii(2.0, 0.5),
    };
    cfg.kinds = {EstimatorKind::hill(), EstimatorKind::bchill(), EstimatorKind::ls(),
                 EstimatorKind::rr(),   EstimatorKind::wls(),    EstimatorKind::rwls()};
    return cfg;
}

StudyReport run_study(const StudyConfig& config) {
    if (config.distributions.empty()) throw DomainError("run_study: no distributions");
    if (config.kinds.empty()) throw DomainError("run_study: no estimator kinds");
    if (config.replications == 0) throw DomainError("run_study: replications must be >= 1");
    for (std::size_t n : config.sample_sizes)
        if (n < 3) throw DomainError("run_study: sample size must be >= 3");

    const std::size_t R = config.replications;
    const std::size_t n_kinds = config.kinds.size();
    bool need_so = false;
    for (const auto& kind : config.kinds)
        if (kind.tag != EstimatorTag::HILL) need_so = true;

    const CounterRng root(config.master_seed);
    const double nan = std::numeric_limits<double>::quiet_NaN();

    StudyReport report;
    for (std::size_t di = 0; di < config.distributions.size(); ++di) {
        const ParetoTypeDist& dist = config.distributions[di];
        for (std::size_t si = 0; si < config.sample_sizes.size(); ++si) {
            const std::size_t n = config.sample_sizes[si];
            const std::vector<std::size_t> ks = k_grid(n, config.k_stride);
            const std::size_t n_cells = ks.size() * n_kinds;
            // gamma_hat per cell per replication; NaN marks a failed fit.
            std::vector<double> gh(n_cells * R, nan);

            const CounterRng block_rng = root.substream(di).substream(si);
            const bool oracle_rho =
                config.oracle_second_order && std::isfinite(dist.true_rho());

            auto run_rep = [&](std::size_t r) {
                CounterRng rep_rng = block_rng.substream(r);
                CounterRng seeder0 = rep_rng.substream(0);
                CounterRng seeder1 = rep_rng.substream(1);
                const std::uint64_t sample_seed = seeder0.next_u64();
                const std::uint64_t est_seed = seeder1.next_u64();
                SortedSample s;
                try {
                    s = dist.sample(n, sample_seed);
                } catch (const Error&) {
                    return; // no sample, nothing to fit; all cells stay NaN
                }
                std::optional<SecondOrderParams> so;
                if (need_so) {
                    // A failed plug-in fit leaves so empty: HILL cells still
                    // run, the bias-aware kinds then fail per cell below.
                    try {
                        if (oracle_rho) {
                            SecondOrderParams p;
                            p.rho_hat = dist.true_rho();
                            p.beta_hat = estimate_beta_or_zero(s, default_beta_k(n),
                                                               p.rho_hat, &p.beta_fallback);
                            so = p;
                        } else {
                            so = fit_second_order(s);
                        }
                    } catch (const Error&) {
                    }
                }
                for (std::size_t ki = 0; ki < ks.size(); ++ki) {
                    for (std::size_t ei = 0; ei < n_kinds; ++ei) {
                        double g = nan;
                        try {
                            g = estimate(s, ks[ki], config.kinds[ei], so, est_seed).gamma_hat;
                        } catch (const Error&) {
                        }
                        gh[(ki * n_kinds + ei) * R + r] = g;
                    }
                }
            };

            const unsigned n_workers =
                std::max(1u, std::min<unsigned>(config.threads,
                                                static_cast<unsigned>(R)));
            if (n_workers == 1) {
                for (std::size_t r = 0; r < R; ++r) run_rep(r);
            } else {
                std::vector<std::thread> workers;
                workers.reserve(n_workers);
                const std::size_t chunk = (R + n_workers - 1) / n_workers;
                for (unsigned w = 0; w < n_workers; ++w) {
                    const std::size_t lo = static_cast<std::size_t>(w) * chunk;
                    const std::size_t hi = std::min(R, lo + chunk);
                    if (lo >= hi) break;
                    workers.emplace_back([&, lo, hi] {
                        for (std::size_t r = lo; r < hi; ++r) run_rep(r);
                    });
                }
                for (auto& t : workers) t.join();
            }

            // Fixed-order reduction: replication order is preserved inside each
            // cell, so the pairwise sums are identical for any worker count.
            StudyTable table;
            table.dist_label = dist.label();
            table.true_gamma = dist.true_gamma();
            table.n = n;
            table.replications = R;
            table.cells.reserve(n_cells);
            std::vector<double> vals, errs2, scratch;
            vals.reserve(R);
            errs2.reserve(R);
            const double gamma = dist.true_gamma();
            for (std::size_t ki = 0; ki < ks.size(); ++ki) {
                for (std::size_t ei = 0; ei < n_kinds; ++ei) {
                    const double* col = gh.data() + (ki * n_kinds + ei) * R;
                    vals.clear();
                    errs2.clear();
                    for (std::size_t r = 0; r < R; ++r) {
                        if (std::isfinite(col[r])) {
                            vals.push_back(col[r]);
                            const double e = col[r] - gamma;
                            errs2.push_back(e * e);
                        }
                    }
                    CellStats cell;
                    cell.k = ks[ki];
                    cell.tag = config.kinds[ei].tag;
                    cell.reps_used = vals.size();
                    cell.fail_count = R - vals.size();
                    cell.flagged = cell.fail_count * 20 > R; // > 5%
                    const MeanSe mg = mean_se(vals, scratch);
                    const MeanSe ms = mean_se(errs2, scratch);
                    cell.bias = mg.mean - gamma;
                    cell.se_bias = mg.se;
                    cell.mse = ms.mean;
                    cell.se_mse = ms.se;
                    table.cells.push_back(cell);
                }
            }
            report.tables.push_back(std::move(table));
        }
    }
    return report;
}

namespace {

std::string table_stem(const StudyTable& t) {
    return sanitize_stem(t.dist_label) + "_n" + std::to_string(t.n);
}

void write_file(const std::filesystem::path& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out.write(body.data(), static_cast<std::streamsize>(body.size()));
    out.flush();
    if (!out) throw IoError("write failed: " + path.string());
}

// --- minimal SVG line charts -------------------------------------------------

const char* tag_color(EstimatorTag tag) {
    switch (tag) {
    case EstimatorTag::HILL: return "#1f77b4";
    case EstimatorTag::BCHILL: return "#ff7f0e";
    case EstimatorTag::LS: return "#2ca02c";
    case EstimatorTag::RR: return "#d62728";
    case EstimatorTag::WLS: return "#9467bd";
    case EstimatorTag::RWLS: return "#8c564b";
    }
    return "#000000";
}

struct Series {
    EstimatorTag tag;
    std::vector<std::pair<double, double>> pts; // (k, value), finite only
};

void append_panel(std::string& svg, double ox, double oy, double w, double h,
                  const std::vector<Series>& series, const std::string& title,
                  bool zero_line) {
    double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    bool any = false;
    for (const auto& s : series) {
        for (const auto& [x, y] : s.pts) {
            if (!any) {
                xmin = xmax = x;
                ymin = ymax = y;
                any = true;
            } else {
                xmin = std::min(xmin, x);
                xmax = std::max(xmax, x);
                ymin = std::min(ymin, y);
                ymax = std::max(ymax, y);
            }
        }
    }
    if (zero_line) { // keep the reference level in frame
        ymin = std::min(ymin, 0.0);
        ymax = std::max(ymax, 0.0);
    }
    if (xmax <= xmin) xmax = xmin + 1;
    if (ymax <= ymin) ymax = ymin + 1;
    const double ypad = 0.05 * (ymax - ymin);
    ymin -= ypad;
    ymax += ypad;
    const double px = ox + 42, py = oy + 22, pw = w - 54, ph = h - 44;
    auto sx = [&](double x) { return px + (x - xmin) / (xmax - xmin) * pw; };
    auto sy = [&](double y) { return py + ph - (y - ymin) / (ymax - ymin) * ph; };
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "<rect x='%.1f' y='%.1f' width='%.1f' height='%.1f' fill='none' "
                  "stroke='#666' stroke-width='1'/>\n",
                  px, py, pw, ph);
    svg += buf;
    std::snprintf(buf, sizeof buf,
                  "<text x='%.1f' y='%.1f' font-size='11' text-anchor='middle' "
                  "fill='#222'>%s</text>\n",
                  px + pw / 2, oy + 14, title.c_str());
    svg += buf;
    if (zero_line && ymin < 0.0 && ymax > 0.0) {
        std::snprintf(buf, sizeof buf,
                      "<line x1='%.1f' y1='%.1f' x2='%.1f' y2='%.1f' stroke='#bbb' "
                      "stroke-dasharray='3,3'/>\n",
                      px, sy(0.0), px + pw, sy(0.0));
        svg += buf;
    }
    // axis extents as tick labels
    char ticks[512];
    std::snprintf(ticks, sizeof ticks,
                  "<text x='%.1f' y='%.1f' font-size='9' fill='#444'>%g</text>\n"
                  "<text x='%.1f' y='%.1f' font-size='9' text-anchor='end' "
                  "fill='#444'>%g</text>\n"
                  "<text x='%.1f' y='%.1f' font-size='9' text-anchor='end' "
                  "fill='#444'>%g</text>\n"
                  "<text x='%.1f' y='%.1f' font-size='9' text-anchor='end' "
                  "fill='#444'>%g</text>\n",
                  px, py + ph + 12, xmin, px + pw, py + ph + 12, xmax, px - 4,
                  py + ph, ymin + ypad, px - 4, py + 9, ymax - ypad);
    svg += ticks;
    for (const auto& s : series) {
        // split at gaps (failed cells) so the line is not drawn across them
        std::string pts;
        auto flush = [&] {
            if (pts.empty()) return;
            svg += "<polyline fill='none' stroke='";
            svg += tag_color(s.tag);
            svg += "' stroke-width='1.3' points='" + pts + "'/>\n";
            pts.clear();
        };
        for (const auto& [x, y] : s.pts) {
            std::snprintf(buf, sizeof buf, "%.2f,%.2f ", sx(x), sy(y));
            pts += buf;
        }
        flush();
    }
}

std::string render_dist_svg(const std::vector<const StudyTable*>& tables,
                            const std::string& label,
                            const std::vector<EstimatorTag>& tags) {
    const double pw = 310, ph = 230, top = 46;
    const double width = pw * static_cast<double>(tables.size()) + 20;
    const double height = top + 2 * ph + 16;
    std::string svg;
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "<svg xmlns='http://www.w3.org/2000/svg' width='%.0f' height='%.0f' "
                  "viewBox='0 0 %.0f %.0f' font-family='sans-serif'>\n"
                  "<rect width='100%%' height='100%%' fill='white'/>\n",
                  width, height, width, height);
    svg += buf;
    std::snprintf(buf, sizeof buf,
                  "<text x='12' y='18' font-size='13' fill='#111'>%s</text>\n",
                  label.c_str());
    svg += buf;
    double lx = 12;
    for (EstimatorTag tag : tags) {
        std::snprintf(buf, sizeof buf,
                      "<rect x='%.1f' y='26' width='14' height='4' fill='%s'/>"
                      "<text x='%.1f' y='33' font-size='10' fill='#333'>%s</text>\n",
                      lx, tag_color(tag), lx + 18, tag_name(tag));
        svg += buf;
        lx += 78;
    }
    for (std::size_t ci = 0; ci < tables.size(); ++ci) {
        const StudyTable& t = *tables[ci];
        std::vector<Series> bias_s, mse_s;
        for (EstimatorTag tag : tags) {
            Series sb{tag, {}}, sm{tag, {}};
            for (const auto& c : t.cells) {
                if (c.tag != tag || c.reps_used == 0) continue;
                if (std::isfinite(c.bias))
                    sb.pts.emplace_back(static_cast<double>(c.k), c.bias);
                if (std::isfinite(c.mse))
                    sm.pts.emplace_back(static_cast<double>(c.k), c.mse);
            }
            if (!sb.pts.empty()) bias_s.push_back(std::move(sb));
            if (!sm.pts.empty()) mse_s.push_back(std::move(sm));
        }
        const double ox = 10 + pw * static_cast<double>(ci);
        append_panel(svg, ox, top, pw, ph, bias_s,
                     "bias, n = " + std::to_string(t.n), true);
        append_panel(svg, ox, top + ph, pw, ph, mse_s,
                     "MSE, n = " + std::to_string(t.n), false);
    }
    svg += "</svg>\n";
    return svg;
}

} // namespace

std::vector<std::filesystem::path> export_report(const StudyReport& report,
                                                 const std::filesystem::path& dir,
                                                 bool with_svg) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory: " + dir.string() + ": " + ec.message());

    std::vector<std::filesystem::path> written;
    for (const StudyTable& t : report.tables) {
        std::string body(kCsvHeader);
        body += '\n';
        for (const CellStats& c : t.cells) {
            body += std::to_string(c.k);
            body += ',';
            body += tag_name(c.tag);
            body += ',';
            body += fmt_num(c.bias);
            body += ',';
            body += fmt_num(c.mse);
            body += ',';
            body += fmt_num(c.se_bias);
            body += ',';
            body += fmt_num(c.se_mse);
            body += ',';
            body += std::to_string(c.fail_count);
            body += '\n';
        }
        const std::filesystem::path path = dir / (table_stem(t) + ".csv");
        write_file(path, body);
        written.push_back(path);
    }

    if (with_svg) {
        // group tables by distribution, preserving first-seen order
        std::vector<std::string> labels;
        for (const StudyTable& t : report.tables)
            if (std::find(labels.begin(), labels.end(), t.dist_label) == labels.end())
                labels.push_back(t.dist_label);
        for (const std::string& label : labels) {
            std::vector<const StudyTable*> group;
            for (const StudyTable& t : report.tables)
                if (t.dist_label == label) group.push_back(&t);
            std::sort(group.begin(), group.end(),
                      [](const StudyTable* a, const StudyTable* b) { return a->n < b->n; });
            std::vector<EstimatorTag> tags;
            for (const StudyTable* t : group)
                for (const auto& c : t->cells)
                    if (std::find(tags.begin(), tags.end(), c.tag) == tags.end())
                        tags.push_back(c.tag);
            const std::filesystem::path path =
                dir / (sanitize_stem(label) + "_curves.svg");
            write_file(path, render_dist_svg(group, label, tags));
            written.push_back(path);
        }
    }
    return written;
}

namespace {

double parse_double_field(std::string_view f, std::size_t line_no,
                          const std::filesystem::path& path) {
    double v = 0.0;
    const char* first = f.data();
    const char* last = f.data() + f.size();
    auto [p, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || p != last) {
        // from_chars in this toolchain rejects "nan"/"inf"; accept them here
        // so a report with an all-failed cell still round-trips.
        if (f == "nan" || f == "-nan") return std::numeric_limits<double>::quiet_NaN();
        if (f == "inf") return std::numeric_limits<double>::infinity();
        if (f == "-inf") return -std::numeric_limits<double>::infinity();
        throw DataError("malformed number '" + std::string(f) + "' at " + path.string() +
                        ":" + std::to_string(line_no));
    }
    return v;
}

std::size_t parse_count_field(std::string_view f, std::size_t line_no,
                              const std::filesystem::path& path) {
    std::size_t v = 0;
    auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
    if (ec != std::errc() || p != f.data() + f.size())
        throw DataError("malformed count '" + std::string(f) + "' at " + path.string() +
                        ":" + std::to_string(line_no));
    return v;
}

} // namespace

std::vector<ReportRow> parse_report_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path.string());
    std::string content((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("read failed: " + path.string());

    std::vector<ReportRow> rows;
    std::size_t pos = 0, line_no = 0;
    while (pos < content.size()) {
        std::size_t eol = content.find('\n', pos);
        if (eol == std::string::npos) eol = content.size();
        std::string_view line(content.data() + pos, eol - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        pos = eol + 1;
        ++line_no;
        if (line_no == 1) {
            if (line != kCsvHeader)
                throw DataError("unexpected header in " + path.string());
            continue;
        }
        if (line.empty()) continue;
        std::vector<std::string_view> fields;
        std::size_t start = 0;
        while (true) {
            std::size_t comma = line.find(',', start);
            if (comma == std::string_view::npos) {
                fields.push_back(line.substr(start));
                break;
            }
            fields.push_back(line.substr(start, comma - start));
            start = comma + 1;
        }
        if (fields.size() != 7)
            throw DataError("expected 7 fields at " + path.string() + ":" +
                            std::to_string(line_no));
        ReportRow row;
        row.k = parse_count_field(fields[0], line_no, path);
        row.kind = std::string(fields[1]);
        row.bias = parse_double_field(fields[2], line_no, path);
        row.mse = parse_double_field(fields[3], line_no, path);
        row.se_bias = parse_double_field(fields[4], line_no, path);
        row.se_mse = parse_double_field(fields[5], line_no, path);
        row.fail_count = parse_count_field(fields[6], line_no, path);
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace tailest
