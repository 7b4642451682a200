#include "tailest/cli_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "tailest/distributions.hpp"
#include "tailest/error.hpp"
#include "tailest/estimators.hpp"
#include "tailest/second_order.hpp"
#include "tailest/simstudy.hpp"

namespace fs = std::filesystem;

namespace tailest {

namespace {

// Shortest round-trip decimal form, so identical runs emit identical bytes.
std::string fmt_num(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string_view trim(std::string_view s) {
    const char* ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

bool parse_double(std::string_view s, double& out) {
    s = trim(s);
    if (s.empty()) return false;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

bool parse_size(std::string_view s, std::size_t& out) {
    s = trim(s);
    if (s.empty()) return false;
    unsigned long long v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) return false;
    out = static_cast<std::size_t>(v);
    return true;
}

std::vector<std::string> split_fields(const std::string& line, char delim) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(delim, start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    return std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

} // namespace

ClaimsDataset read_claims(const std::string& path, const std::string& column,
                          char delimiter) {
    std::ifstream in(path);
    if (!in.is_open()) {
        throw IoError("cannot open claims file: " + path);
    }
    std::vector<std::string> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue; // blank separators are not rows
        rows.push_back(line);
    }
    if (rows.empty()) {
        throw DataError("claims file is empty: " + path);
    }

    const auto first = split_fields(rows[0], delimiter);
    const std::string want(trim(column));
    std::size_t idx = 0;
    bool header = false;
    bool resolved = false;
    if (!want.empty()) {
        // A header-name match wins, but only against a cell that is not
        // itself a number — otherwise a value row could masquerade as a
        // header when the requested name looks like one of its entries.
        for (std::size_t i = 0; i < first.size(); ++i) {
            double ignored;
            if (std::string(trim(first[i])) == want && !parse_double(first[i], ignored)) {
                idx = i;
                header = true;
                resolved = true;
                break;
            }
        }
        if (!resolved && all_digits(want)) {
            if (!parse_size(want, idx) || idx >= first.size()) {
                throw DataError("column index out of range: " + want + " in " + path);
            }
            resolved = true;
        }
        if (!resolved) {
            throw DataError("column not found: '" + want + "' in " + path);
        }
    }
    if (!header) {
        double probe;
        header = idx < first.size() && !parse_double(first[idx], probe);
    }

    ClaimsDataset ds;
    ds.source_path = path;
    ds.name = header ? std::string(trim(first[idx])) : fs::path(path).stem().string();
    if (ds.name.empty()) ds.name = "claims";

    for (std::size_t r = header ? 1 : 0; r < rows.size(); ++r) {
        ++ds.raw_rows;
        const auto fields = split_fields(rows[r], delimiter);
        double v;
        if (idx >= fields.size() || !parse_double(fields[idx], v) ||
            !std::isfinite(v) || v <= 0.0) {
            ++ds.dropped_rows;
            continue;
        }
        ds.values.push_back(v);
    }
    if (ds.values.empty()) {
        throw DataError("no usable (positive numeric) rows in column of " + path);
    }
    return ds;
}

std::vector<std::pair<double, double>> qq_data(const SortedSample& sample, QqKind kind) {
    const std::size_t n = sample.size();
    if (n < 2) {
        throw DomainError("qq_data requires at least two observations");
    }
    if (kind == QqKind::Pareto && !(sample.order_stat(1) > 0.0)) {
        throw DomainError("Pareto Q-Q plot requires strictly positive data");
    }
    std::vector<std::pair<double, double>> pts;
    pts.reserve(n);
    for (std::size_t i = 1; i <= n; ++i) {
        const double p = static_cast<double>(i) / static_cast<double>(n + 1);
        const double x = -std::log1p(-p);
        const double v = sample.order_stat(i);
        pts.emplace_back(x, kind == QqKind::Pareto ? std::log(v) : v);
    }
    return pts;
}

namespace {

int usage_error(std::ostream& err, const std::string& msg) {
    err << "error: " << msg << "\n";
    return 1;
}

// Empty path: write to the session stream.  Otherwise create/truncate.
void write_text(const std::string& out_path, const std::string& text, std::ostream& out) {
    if (out_path.empty()) {
        out << text;
        return;
    }
    std::ofstream f(out_path, std::ios::binary | std::ios::trunc);
    if (!f.is_open()) {
        throw IoError("cannot open output file: " + out_path);
    }
    f << text;
    if (!f.good()) {
        throw IoError("short write to output file: " + out_path);
    }
}

struct EstimateArgs {
    std::string input;
    std::string column;
    std::string delim = ",";
    std::string estimator = "all";
    std::string k_range = "auto";
    std::string out_path;
    std::size_t k = 0;
    double top_fraction = 0.0;
    std::uint64_t seed = 1;
};

struct QqArgs {
    std::string input;
    std::string column;
    std::string delim = ",";
    std::string kind = "pareto";
    std::string out_path;
};

struct SecondOrderArgs {
    std::string input;
    std::string column;
    std::string delim = ",";
    std::string k_range;
    std::string out_path;
};

struct SimulateArgs {
    std::string config;
    std::string out_dir = "study_out";
    std::uint64_t seed = 0;
    bool seed_given = false;
};

std::optional<char> single_char(const std::string& s) {
    if (s.size() == 1) return s[0];
    if (s == "\\t") return '\t';
    return std::nullopt;
}

ClaimsDataset load_input(const std::string& input, const std::string& column,
                         char delim, std::ostream& err) {
    ClaimsDataset ds = read_claims(input, column, delim);
    err << "read " << ds.values.size() << " values from " << input;
    if (ds.dropped_rows > 0) {
        err << " (dropped " << ds.dropped_rows << " of " << ds.raw_rows << " rows)";
    }
    err << "\n";
    return ds;
}

int cmd_estimate(const EstimateArgs& a, std::ostream& out, std::ostream& err) {
    const auto delim = single_char(a.delim);
    if (!delim) return usage_error(err, "--delimiter must be a single character");

    const ClaimsDataset ds = load_input(a.input, a.column, *delim, err);
    const SortedSample sample = SortedSample::from_unsorted(ds.values);
    const std::size_t n = sample.size();

    std::vector<EstimatorTag> tags;
    if (a.estimator == "all") {
        tags = {EstimatorTag::HILL, EstimatorTag::BCHILL, EstimatorTag::LS,
                EstimatorTag::RR,   EstimatorTag::WLS,    EstimatorTag::RWLS};
    } else {
        const auto tag = tag_from_name(a.estimator);
        if (!tag) return usage_error(err, "unknown estimator: " + a.estimator);
        tags = {*tag};
    }

    // Threshold range.  --k wins (the flag excludes --k-range); otherwise
    // "auto" spans [2, n-1], capped at floor(top_fraction * n) when given.
    std::size_t k_lo = 0, k_hi = 0;
    const std::size_t cap =
        a.top_fraction > 0.0
            ? static_cast<std::size_t>(std::floor(a.top_fraction * static_cast<double>(n)))
            : n - 1;
    if (a.k > 0) {
        k_lo = k_hi = a.k;
    } else if (a.k_range == "auto") {
        k_lo = 2;
        k_hi = std::min(n - 1, cap);
    } else {
        const auto colon = a.k_range.find(':');
        if (colon == std::string::npos || !parse_size(a.k_range.substr(0, colon), k_lo) ||
            !parse_size(a.k_range.substr(colon + 1), k_hi)) {
            return usage_error(err, "--k-range expects lo:hi or auto, got '" + a.k_range + "'");
        }
        k_hi = std::min(k_hi, std::min(n - 1, cap));
    }
    if (k_lo < 1 || k_lo > k_hi) {
        return usage_error(err, "empty threshold range [" + std::to_string(k_lo) + "," +
                                    std::to_string(k_hi) + "] after clamping to the sample");
    }

    const bool need_so =
        std::any_of(tags.begin(), tags.end(), [](EstimatorTag t) { return t != EstimatorTag::HILL; });
    std::optional<SecondOrderParams> so;
    if (need_so) {
        so = fit_second_order(sample);
        err << "second-order plug-ins: rho_hat=" << fmt_num(so->rho_hat)
            << " beta_hat=" << fmt_num(so->beta_hat);
        if (so->beta_fallback) err << " (beta fit singular, 0 substituted)";
        err << "\n";
    }

    std::vector<std::vector<EstimateResult>> paths;
    paths.reserve(tags.size());
    for (const auto tag : tags) {
        paths.push_back(tail_path(sample, EstimatorKind::from_tag(tag), k_lo, k_hi, so, a.seed));
    }

    std::string csv = "k,kind,gamma_hat,b_hat,lambda,lambda_eff\n";
    for (std::size_t i = 0; i <= k_hi - k_lo; ++i) {
        for (const auto& path : paths) {
            const EstimateResult& r = path[i];
            csv += std::to_string(r.k);
            csv += ',';
            csv += tag_name(r.tag);
            csv += ',';
            csv += fmt_num(r.gamma_hat);
            csv += ',';
            csv += fmt_num(r.b_hat);
            csv += ',';
            csv += fmt_num(r.lambda);
            csv += ',';
            csv += fmt_num(r.lambda_eff);
            csv += '\n';
        }
    }
    write_text(a.out_path, csv, out);
    return 0;
}

int cmd_qq(const QqArgs& a, std::ostream& out, std::ostream& err) {
    const auto delim = single_char(a.delim);
    if (!delim) return usage_error(err, "--delimiter must be a single character");

    const ClaimsDataset ds = load_input(a.input, a.column, *delim, err);
    const SortedSample sample = SortedSample::from_unsorted(ds.values);
    const QqKind kind = a.kind == "exponential" ? QqKind::Exponential : QqKind::Pareto;
    const auto pts = qq_data(sample, kind);

    std::string csv = "x,y\n";
    for (const auto& [x, y] : pts) {
        csv += fmt_num(x);
        csv += ',';
        csv += fmt_num(y);
        csv += '\n';
    }
    write_text(a.out_path, csv, out);
    return 0;
}

int cmd_second_order(const SecondOrderArgs& a, std::ostream& out, std::ostream& err) {
    const auto delim = single_char(a.delim);
    if (!delim) return usage_error(err, "--delimiter must be a single character");

    const ClaimsDataset ds = load_input(a.input, a.column, *delim, err);
    const SortedSample sample = SortedSample::from_unsorted(ds.values);
    const std::size_t n = sample.size();

    SecondOrderParams so;
    if (!a.k_range.empty()) {
        KRange kr;
        const auto colon = a.k_range.find(':');
        if (colon == std::string::npos || !parse_size(a.k_range.substr(0, colon), kr.lo) ||
            !parse_size(a.k_range.substr(colon + 1), kr.hi)) {
            return usage_error(err, "--k-range expects lo:hi, got '" + a.k_range + "'");
        }
        if (kr.lo < 2 || kr.lo >= kr.hi || kr.hi > n - 1) {
            throw DomainError("second-order scan range must satisfy 2 <= lo < hi <= n-1");
        }
        const auto grid = default_rho_grid();
        so.rho_hat = estimate_rho(sample, grid, kr);
        so.beta_hat = estimate_beta_or_zero(sample, default_beta_k(n), so.rho_hat,
                                            &so.beta_fallback);
    } else {
        so = fit_second_order(sample);
    }
    if (so.beta_fallback) {
        err << "beta fit singular, 0 substituted\n";
    }
    std::string csv = "rho_hat,beta_hat\n";
    csv += fmt_num(so.rho_hat);
    csv += ',';
    csv += fmt_num(so.beta_hat);
    csv += '\n';
    write_text(a.out_path, csv, out);
    return 0;
}

ParetoTypeDist dist_from_json(const nlohmann::json& j) {
    const std::string family = j.at("family").get<std::string>();
    if (family == "pareto" || family == "strict_pareto") {
        return ParetoTypeDist::strict_pareto(j.at("gamma").get<double>());
    }
    if (family == "burr" || family == "burr_xii") {
        return ParetoTypeDist::burr_xii(j.at("xi").get<double>(), j.at("tau").get<double>());
    }
    if (family == "frechet") {
        return ParetoTypeDist::frechet(j.at("alpha").get<double>());
    }
    throw DataError("unknown distribution family in config: " + family);
}

// The config mirrors StudyConfig; omitted fields keep the standard benchmark
// defaults, so "{}" runs the full comparison study.
StudyConfig config_from_json(const nlohmann::json& j, bool& svg) {
    StudyConfig cfg = standard_benchmark();
    svg = false;
    for (const auto& [key, value] : j.items()) {
        if (key == "distributions") {
            cfg.distributions.clear();
            for (const auto& d : value) cfg.distributions.push_back(dist_from_json(d));
        } else if (key == "sample_sizes") {
            cfg.sample_sizes = value.get<std::vector<std::size_t>>();
        } else if (key == "replications") {
            cfg.replications = value.get<std::size_t>();
        } else if (key == "estimators") {
            cfg.kinds.clear();
            for (const auto& e : value) {
                const auto tag = tag_from_name(e.get<std::string>());
                if (!tag) throw DataError("unknown estimator in config: " + e.get<std::string>());
                cfg.kinds.push_back(EstimatorKind::from_tag(*tag));
            }
        } else if (key == "k_stride") {
            cfg.k_stride = value.get<std::size_t>();
        } else if (key == "master_seed") {
            cfg.master_seed = value.get<std::uint64_t>();
        } else if (key == "oracle_second_order") {
            cfg.oracle_second_order = value.get<bool>();
        } else if (key == "threads") {
            cfg.threads = value.get<int>();
        } else if (key == "svg") {
            svg = value.get<bool>();
        } else {
            throw DataError("unknown config key: " + key);
        }
    }
    return cfg;
}

int cmd_simulate(const SimulateArgs& a, std::ostream& out, std::ostream& err) {
    std::ifstream in(a.config);
    if (!in.is_open()) {
        throw IoError("cannot open config file: " + a.config);
    }
    StudyConfig cfg;
    bool svg = false;
    try {
        const auto j = nlohmann::json::parse(in);
        cfg = config_from_json(j, svg);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("config parse failure: ") + e.what());
    }
    if (a.seed_given) cfg.master_seed = a.seed;

    err << "running " << cfg.distributions.size() << " distribution(s) x "
        << cfg.sample_sizes.size() << " size(s) x " << cfg.replications
        << " replication(s)\n";
    const StudyReport report = run_study(cfg);
    const auto written = export_report(report, a.out_dir, svg);
    for (const auto& p : written) {
        out << p.string() << "\n";
    }
    return 0;
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Tail-index estimation for heavy-tailed data", "tailest"};
    app.require_subcommand(1);

    EstimateArgs ea;
    auto* est = app.add_subcommand("estimate", "Estimate the tail index over a threshold range");
    est->add_option("--input", ea.input, "delimited text file of claims")->required();
    est->add_option("--column", ea.column, "column name or 0-based index (default: first)");
    est->add_option("--delimiter", ea.delim, "field delimiter (default ,; \\t for tabs)");
    est->add_option("--estimator", ea.estimator, "hill|bchill|ls|rr|wls|rwls|all")
        ->transform(CLI::IsMember({"hill", "bchill", "ls", "rr", "wls", "rwls", "all"},
                                  CLI::ignore_case));
    auto* k_opt = est->add_option("--k", ea.k, "single number of top order statistics");
    auto* kr_opt = est->add_option("--k-range", ea.k_range, "lo:hi, or auto for [2, n-1]");
    k_opt->excludes(kr_opt);
    est->add_option("--top-fraction", ea.top_fraction,
                    "cap the range at floor(f*n) thresholds")
        ->check(CLI::Range(1e-12, 1.0));
    est->add_option("--seed", ea.seed, "seed for the penalty's theta draws (default 1)");
    est->add_option("--out", ea.out_path, "write CSV here instead of stdout");

    QqArgs qa;
    auto* qq = app.add_subcommand("qq", "Quantile-quantile plot coordinates");
    qq->add_option("--input", qa.input, "delimited text file of claims")->required();
    qq->add_option("--column", qa.column, "column name or 0-based index");
    qq->add_option("--delimiter", qa.delim, "field delimiter");
    qq->add_option("--kind", qa.kind, "pareto|exponential")
        ->transform(CLI::IsMember({"pareto", "exponential"}, CLI::ignore_case));
    qq->add_option("--out", qa.out_path, "write CSV here instead of stdout");

    SecondOrderArgs sa;
    auto* so = app.add_subcommand("second-order", "Plug-in rho and beta estimates");
    so->add_option("--input", sa.input, "delimited text file of claims")->required();
    so->add_option("--column", sa.column, "column name or 0-based index");
    so->add_option("--delimiter", sa.delim, "field delimiter");
    so->add_option("--k-range", sa.k_range, "lo:hi scan range for rho (default: data-sized)");
    so->add_option("--out", sa.out_path, "write CSV here instead of stdout");

    SimulateArgs ma;
    auto* sim = app.add_subcommand("simulate", "Monte Carlo bias/MSE study");
    sim->add_option("--config", ma.config, "JSON study configuration")->required();
    sim->add_option("--out-dir", ma.out_dir, "report directory (default study_out)");
    auto* seed_opt = sim->add_option("--seed", ma.seed, "override the config master seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e, out, err);
        return rc == 0 ? 0 : 1; // normalise CLI11's many parse-error codes
    }
    ma.seed_given = seed_opt->count() > 0;

    try {
        if (est->parsed()) return cmd_estimate(ea, out, err);
        if (qq->parsed()) return cmd_qq(qa, out, err);
        if (so->parsed()) return cmd_second_order(sa, out, err);
        if (sim->parsed()) return cmd_simulate(ma, out, err);
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const DataError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}

} // namespace tailest
