#include "commands.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "sfib/errors.hpp"
#include "sfib/fractal.hpp"
#include "sfib/lyapunov.hpp"
#include "sfib/oracle.hpp"
#include "sfib/parallel.hpp"
#include "sfib/spectrum.hpp"
#include "sfib/transfer.hpp"
#include "sfib/version.hpp"

namespace sfib::cli {

namespace {

namespace fs = std::filesystem;

class UsageError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + '"';
}

// Ordered key/value echo of a run's resolved parameters. Values are kept as
// JSON literals; CSV output strips the quotes.
class Manifest {
  public:
    explicit Manifest(const std::string& command) {
        text("tool", "sfib-cli");
        text("version", kVersion);
        text("command", command);
    }

    Manifest& real(const std::string& key, double v) { return raw(key, format_real(v), false); }
    Manifest& integer(const std::string& key, long long v) {
        return raw(key, std::to_string(v), false);
    }
    Manifest& flag(const std::string& key, bool v) { return raw(key, v ? "true" : "false", false); }
    Manifest& text(const std::string& key, const std::string& v) { return raw(key, v, true); }

    std::string csv() const {
        std::string out;
        for (const auto& [k, v, is_text] : entries_) out += "# " + k + ": " + v + '\n';
        return out;
    }

    std::string json() const {
        std::string out = "{";
        for (std::size_t i = 0; i < entries_.size(); ++i) {
            const auto& [k, v, is_text] = entries_[i];
            if (i) out += ", ";
            out += quote(k) + ": " + (is_text ? quote(v) : v);
        }
        return out + '}';
    }

  private:
    Manifest& raw(const std::string& key, const std::string& v, bool is_text) {
        entries_.emplace_back(key, v, is_text);
        return *this;
    }

    std::vector<std::tuple<std::string, std::string, bool>> entries_;
};

struct Common {
    double lambda = 1.0;
    int ell = 1;
    int k = 8;
    std::optional<double> tol;
    std::string format = "csv";
    std::string out;
    int workers = 1;

    double resolved_tol() const { return tol ? *tol : default_band_tolerance(k); }
    ModelParams params() const {
        const ModelParams p{lambda, ell};
        validate(p);
        return p;
    }
    bool json() const { return format == "json"; }
};

std::pair<double, double> parse_window(const std::string& s) {
    const auto colon = s.find(':');
    if (colon == std::string::npos) throw UsageError("--window expects LO:HI, got '" + s + "'");
    try {
        std::size_t used = 0;
        const std::string a = s.substr(0, colon);
        const std::string b = s.substr(colon + 1);
        const double lo = std::stod(a, &used);
        if (used != a.size()) throw std::invalid_argument(a);
        const double hi = std::stod(b, &used);
        if (used != b.size()) throw std::invalid_argument(b);
        if (!(lo < hi)) throw UsageError("--window needs LO < HI");
        return {lo, hi};
    } catch (const UsageError&) {
        throw;
    } catch (const std::exception&) {
        throw UsageError("--window expects LO:HI, got '" + s + "'");
    }
}

std::vector<double> parse_grid(const std::string& s) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
    if (parts.size() != 3) throw UsageError("--grid expects LO:HI:N, got '" + s + "'");
    double lo = 0, hi = 0;
    long n = 0;
    try {
        std::size_t used = 0;
        lo = std::stod(parts[0], &used);
        if (used != parts[0].size()) throw std::invalid_argument(parts[0]);
        hi = std::stod(parts[1], &used);
        if (used != parts[1].size()) throw std::invalid_argument(parts[1]);
        n = std::stol(parts[2], &used);
        if (used != parts[2].size()) throw std::invalid_argument(parts[2]);
    } catch (const std::exception&) {
        throw UsageError("--grid expects LO:HI:N, got '" + s + "'");
    }
    if (n < 1 || n > 10000000) throw UsageError("--grid: N must be in [1, 1e7]");
    if (!(lo <= hi) || (n > 1 && lo == hi)) throw UsageError("--grid needs LO < HI");
    std::vector<double> grid(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) {
        grid[static_cast<std::size_t>(i)] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
    }
    return grid;
}

void emit(const Common& c, const std::string& data, std::ostream& out) {
    if (c.out.empty() || c.out == "-") {
        out << data;
        return;
    }
    std::ofstream f(c.out, std::ios::binary);
    if (!f) throw UsageError("cannot open --out path '" + c.out + "'");
    f << data;
    if (!f) throw std::runtime_error("write to '" + c.out + "' failed");
}

void write_file(const fs::path& path, const std::string& data) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary);
        if (!f) throw UsageError("cannot write '" + tmp.string() + "'");
        f << data;
        if (!f) throw std::runtime_error("write to '" + tmp.string() + "' failed");
    }
    fs::rename(tmp, path);
}

std::string read_file(const fs::path& path) {
    std::ifstream f(path, std::ios::binary);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

void add_params(Manifest& m, const Common& c) { m.real("lambda", c.lambda).integer("ell", c.ell); }

int total_merged(const BandSet& bs) {
    int n = 0;
    for (const auto& b : bs.bands) n += b.merged_gaps;
    return n;
}

// ---------------------------------------------------------------- bands

std::string run_bands(const Common& c, const std::optional<std::string>& window) {
    const auto p = c.params();
    const double tol = c.resolved_tol();
    BandSet bs;
    Manifest m("bands");
    add_params(m, c);
    m.integer("k", c.k).real("tol", tol);
    if (window) {
        const auto [lo, hi] = parse_window(*window);
        bs = sigma_k_bands(c.k, p, lo, hi, tol, c.workers);
        m.real("window_lo", lo).real("window_hi", hi);
    } else {
        bs = sigma_k_bands(c.k, p, tol, c.workers);
    }
    m.integer("bands", static_cast<long long>(bs.size()))
        .real("measure", lebesgue_measure(bs))
        .integer("merged_gaps", total_merged(bs));
    if (c.json()) return "{\"manifest\": " + m.json() + ", \"band_set\": " + to_json(bs) + "}\n";
    return m.csv() + to_csv(bs);
}

// ---------------------------------------------------------------- cover

std::string run_cover(const Common& c, const std::optional<std::string>& window, bool pair) {
    const auto p = c.params();
    const double tol = c.resolved_tol();
    Manifest m("cover");
    add_params(m, c);
    m.integer("k", c.k).real("tol", tol);
    std::optional<std::pair<double, double>> w;
    if (window) {
        w = parse_window(*window);
        m.real("window_lo", w->first).real("window_hi", w->second);
    }
    std::vector<BandSet> covers;
    for (int k = c.k; k <= c.k + (pair ? 1 : 0); ++k) {
        covers.push_back(w ? cover(k, p, w->first, w->second, tol, c.workers)
                           : cover(k, p, tol, c.workers));
    }
    for (const auto& bs : covers) {
        const std::string g = std::to_string(bs.generation);
        m.integer("bands[k=" + g + "]", static_cast<long long>(bs.size()))
            .real("measure[k=" + g + "]", lebesgue_measure(bs));
    }
    if (pair) m.flag("nested", is_subset(covers[1], covers[0], 2 * tol));

    if (c.json()) {
        std::string out = "{\"manifest\": " + m.json() + ", \"covers\": [";
        for (std::size_t i = 0; i < covers.size(); ++i) {
            if (i) out += ", ";
            out += to_json(covers[i]);
        }
        return out + "]}\n";
    }
    std::string out = m.csv() + "generation,lo,hi,length\n";
    for (const auto& bs : covers) {
        for (const auto& b : bs.bands) {
            out += std::to_string(bs.generation) + ',' + format_real(b.lo) + ',' +
                   format_real(b.hi) + ',' + format_real(b.length()) + '\n';
        }
    }
    return out;
}

// ---------------------------------------------------------------- dimension

std::string run_dimension(const Common& c, const std::vector<int>& ells, const EpsRange& eps,
                          const std::optional<std::string>& window) {
    const double tol = c.resolved_tol();
    Manifest m("dimension");
    m.real("lambda", c.lambda);
    std::string ell_list;
    for (int l : ells) ell_list += (ell_list.empty() ? "" : ",") + std::to_string(l);
    m.text("ell", ell_list)
        .integer("k", c.k)
        .real("tol", tol)
        .real("eps_min", eps.eps_min)
        .real("eps_max", eps.eps_max)
        .integer("scales", eps.n_scales);
    std::optional<std::pair<double, double>> w;
    if (window) {
        w = parse_window(*window);
        m.real("window_lo", w->first).real("window_hi", w->second);
    }

    std::vector<std::pair<int, DimensionEstimate>> estimates;
    for (int l : ells) {
        Common cl = c;
        cl.ell = l;
        const auto p = cl.params();
        DimensionEstimate d;
        if (w) {
            const double center = 0.5 * (w->first + w->second);
            const double half = 0.5 * (w->second - w->first);
            d = local_dimension(p, center, half, c.k, tol, eps, c.workers);
        } else {
            d = box_dimension(cover(c.k, p, tol, c.workers), eps.eps_min, eps.eps_max,
                              eps.n_scales);
        }
        const std::string tag = "[ell=" + std::to_string(l) + "]";
        m.real("slope" + tag, d.slope)
            .real("r_squared" + tag, d.r_squared)
            .flag("below_resolution" + tag, d.below_resolution);
        if (w) {
            m.real("surrogate_prediction" + tag,
                   predicted_local_dimension(0.5 * (w->first + w->second), p));
        }
        estimates.emplace_back(l, std::move(d));
    }
    if (w) m.text("surrogate_note", "asymptotic F(V) model, exact only as V -> infinity");

    if (c.json()) {
        std::string out = "{\"manifest\": " + m.json() + ", \"estimates\": [";
        for (std::size_t i = 0; i < estimates.size(); ++i) {
            if (i) out += ", ";
            out += "{\"ell\": " + std::to_string(estimates[i].first) +
                   ", \"estimate\": " + to_json(estimates[i].second) + "}";
        }
        return out + "]}\n";
    }
    std::string out = m.csv() + "ell,eps,count\n";
    for (const auto& [l, d] : estimates) {
        for (std::size_t i = 0; i < d.eps_values.size(); ++i) {
            out += std::to_string(l) + ',' + format_real(d.eps_values[i]) + ',' +
                   std::to_string(d.counts[i]) + '\n';
        }
    }
    return out;
}

// ---------------------------------------------------------------- special energies

std::string run_special(const Common& c, int k_max) {
    const auto p = c.params();
    Manifest m("special-energies");
    add_params(m, c);
    m.integer("k_max", k_max);
    struct Row {
        int j;
        double e, v, x1;
        MembershipVerdict verdict;
        double predicted;
    };
    std::vector<Row> rows;
    for (int j = 1; j < p.ell; ++j) {
        const double e = special_energy(j, p);
        rows.push_back({j, e, fvi_energy(e, p), x1_closed(e, p), membership(e, p, k_max),
                        predicted_local_dimension(e, p)});
    }
    m.integer("rows", static_cast<long long>(rows.size()));
    if (c.json()) {
        std::string out = "{\"manifest\": " + m.json() + ", \"rows\": [";
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const auto& r = rows[i];
            if (i) out += ", ";
            out += "{\"j\": " + std::to_string(r.j) + ", \"energy\": " + format_real(r.e) +
                   ", \"fvi\": " + format_real(r.v) + ", \"x1\": " + format_real(r.x1) +
                   ", \"membership\": " + quote(to_string(r.verdict)) +
                   ", \"predicted_dimension\": " + format_real(r.predicted) + "}";
        }
        return out + "]}\n";
    }
    std::string out = m.csv() + "j,energy,fvi,x1,membership,predicted_dimension\n";
    for (const auto& r : rows) {
        out += std::to_string(r.j) + ',' + format_real(r.e) + ',' + format_real(r.v) + ',' +
               format_real(r.x1) + ',' + to_string(r.verdict) + ',' + format_real(r.predicted) +
               '\n';
    }
    return out;
}

// ---------------------------------------------------------------- lyapunov

std::string run_lyapunov(const Common& c, const std::string& grid_spec, int k_max,
                         std::size_t samples, std::uint64_t seed) {
    const auto p = c.params();
    auto grid = parse_grid(grid_spec);
    if (k_max < 5) throw UsageError("--k-max must be >= 5");
    if (samples > 0) {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> u(grid.front(), grid.back());
        std::vector<double> drawn(samples);
        for (auto& e : drawn) e = u(rng);
        std::sort(drawn.begin(), drawn.end());
        grid = std::move(drawn);
    }
    std::vector<LyapunovEstimate> rows(grid.size());
    parallel_for(grid.size(), c.workers,
                 [&](std::size_t i) { rows[i] = lyapunov_exponent(grid[i], p, k_max); });
    Manifest m("lyapunov");
    add_params(m, c);
    m.text("grid", grid_spec).integer("k_max", k_max);
    if (samples > 0)
        m.integer("samples", static_cast<long long>(samples))
            .integer("seed", static_cast<long long>(seed));
    m.text("normalization", "per lattice site");
    if (c.json()) {
        std::string out = "{\"manifest\": " + m.json() + ", \"rows\": [";
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const auto& r = rows[i];
            if (i) out += ", ";
            out += "{\"energy\": " + format_real(r.energy) +
                   ", \"exponent\": " + format_real(r.value) +
                   ", \"k_used\": " + std::to_string(r.k_used) +
                   ", \"method\": " + quote(to_string(r.method)) + "}";
        }
        return out + "]}\n";
    }
    return m.csv() + to_csv(rows);
}

// ---------------------------------------------------------------- oracle

std::string run_oracle(const Common& c, std::size_t size, double delta,
                       std::optional<int> word_generation, const std::string& eig_out) {
    const auto p = c.params();
    const double tol = c.resolved_tol();
    int g = 0;
    if (word_generation) {
        g = *word_generation;
    } else {
        // room for a genuine middle window
        while (fibonacci(g + 1) * static_cast<std::uint64_t>(p.ell) < 2 * size) ++g;
    }
    const auto op = build_truncation(p, g, size);
    const auto eigs = eigenvalues(op, 1e-11, c.workers);
    const auto report = spectral_consistency(eigs, cover(c.k, p, tol, c.workers), delta);
    if (!eig_out.empty()) {
        std::ofstream f(eig_out, std::ios::binary);
        if (!f) throw UsageError("cannot open --eigenvalues path '" + eig_out + "'");
        f << eigenvalues_to_csv(eigs);
    }
    Manifest m("oracle-check");
    add_params(m, c);
    m.integer("k", c.k)
        .real("tol", tol)
        .integer("size", static_cast<long long>(size))
        .integer("word_generation", g)
        .real("delta", delta);
    if (c.json()) {
        return "{\"manifest\": " + m.json() +
               ", \"report\": {\"n_eigenvalues\": " + std::to_string(report.n_eigenvalues) +
               ", \"fraction_inside\": " + format_real(report.fraction_inside) +
               ", \"worst_distance\": " + format_real(report.worst_distance) +
               ", \"flagged\": " + (report.flagged ? "true" : "false") + "}}\n";
    }
    return m.csv() + "n_eigenvalues,fraction_inside,worst_distance,flagged\n" +
           std::to_string(report.n_eigenvalues) + ',' + format_real(report.fraction_inside) + ',' +
           format_real(report.worst_distance) + ',' + (report.flagged ? "true" : "false") + '\n';
}

// ---------------------------------------------------------------- report

struct ReportConfig {
    double lambda = 5.0;
    std::vector<int> ells{1, 2, 4, 8};
    int k = 12;
    EpsRange eps{1e-6, 1e-2, 9};
    std::uint64_t period = 550;
    std::vector<double> windows{0.5, 0.1, 0.02};
    std::string dir;
    int workers = 1;
};

Manifest report_manifest(const ReportConfig& r) {
    Manifest m("report");
    std::string ells;
    for (int l : r.ells) ells += (ells.empty() ? "" : ",") + std::to_string(l);
    std::string windows;
    for (double h : r.windows) windows += (windows.empty() ? "" : ",") + format_real(h);
    m.real("lambda", r.lambda)
        .text("ells", ells)
        .integer("k", r.k)
        .real("eps_min", r.eps.eps_min)
        .real("eps_max", r.eps.eps_max)
        .integer("scales", r.eps.n_scales)
        .integer("local_period", static_cast<long long>(r.period))
        .text("local_windows", windows);
    return m;
}

struct ReportParts {
    std::string summary;
    std::string measure;
    std::string window;
};

// All numbers for one ell.
ReportParts report_for_ell(const ReportConfig& r, int ell) {
    const ModelParams p{r.lambda, ell};
    validate(p);
    const std::string l = std::to_string(ell);
    ReportParts parts;

    // same number of sites per period as ell = 1 at generation r.k
    const int k_ell = generation_for_period(ell, fibonacci(r.k));
    BandSet last;
    for (int k = 1; k <= k_ell; ++k) {
        last = cover(k, p, default_band_tolerance(k), r.workers);
        parts.measure += l + ',' + std::to_string(k) + ',' + std::to_string(last.size()) + ',' +
                         format_real(lebesgue_measure(last)) + ',' +
                         format_real(last.smallest_width()) + '\n';
    }
    const auto global = box_dimension(last, r.eps.eps_min, r.eps.eps_max, r.eps.n_scales);

    // local dimension on [lambda - 2, lambda + 2] at comparable period
    const int k_local = generation_for_period(ell, r.period);
    const auto local = local_dimension(p, r.lambda, 2.0, k_local, default_band_tolerance(k_local),
                                       EpsRange{1e-6, 1e-1, 11}, r.workers);
    double fvi_min = std::numeric_limits<double>::infinity();
    double fvi_max = 0.0;
    for (int i = 0; i <= 400; ++i) {
        const double v = fvi_energy(r.lambda - 2.0 + 4.0 * i / 400.0, p);
        fvi_min = std::min(fvi_min, v);
        fvi_max = std::max(fvi_max, v);
    }
    parts.summary = l + ',' + std::to_string(k_ell) + ',' + format_real(lebesgue_measure(last)) +
                    ',' + format_real(global.slope) + ',' +
                    (global.below_resolution ? "true" : "false") + ',' + std::to_string(k_local) +
                    ',' + format_real(local.slope) + ',' + format_real(fvi_min) + ',' +
                    format_real(fvi_max) + '\n';

    if (ell >= 2) {
        const double center = special_energy(1, p);
        for (double h : r.windows) {
            const auto res = resolved_local_dimension(
                p, center, h, k_ell, EpsRange{h / 200, h / 2, 7}, r.workers, k_ell + 8);
            parts.window += l + ',' + format_real(center) + ',' + format_real(h) + ',' +
                            std::to_string(res.generation) + ',' + format_real(res.estimate.slope) +
                            ',' + (res.estimate.below_resolution ? "true" : "false") + '\n';
        }
    }
    return parts;
}

int run_report(const ReportConfig& r, std::ostream& out) {
    if (r.dir.empty()) throw UsageError("report needs --out DIR");
    if (r.ells.empty()) throw UsageError("report needs at least one ell");
    if (r.k < 1) throw UsageError("report needs --k >= 1");
    const fs::path dir(r.dir);
    fs::create_directories(dir / "parts");
    const Manifest m = report_manifest(r);
    const auto manifest_json = nlohmann::json::parse(m.json());

    const fs::path checkpoint = dir / "checkpoint.json";
    std::set<std::string> done;
    if (fs::exists(checkpoint)) {
        const auto saved = nlohmann::json::parse(read_file(checkpoint));
        if (saved.value("manifest", nlohmann::json()) == manifest_json) {
            for (const auto& t : saved.value("completed", nlohmann::json::array())) {
                done.insert(t.get<std::string>());
            }
        }
    }
    const auto save = [&] {
        nlohmann::json cp;
        cp["manifest"] = manifest_json;
        cp["completed"] = nlohmann::json::array();
        for (int ell : r.ells) {
            const std::string t = "ell=" + std::to_string(ell);
            if (done.count(t)) cp["completed"].push_back(t);
        }
        write_file(checkpoint, cp.dump(2) + '\n');
    };

    const auto part = [&](int ell, const char* what) {
        return dir / "parts" / ("ell" + std::to_string(ell) + '_' + what + ".csv");
    };
    for (int ell : r.ells) {
        const std::string task = "ell=" + std::to_string(ell);
        if (done.count(task) && fs::exists(part(ell, "summary"))) {
            out << "skip " << task << " (checkpoint)\n";
            continue;
        }
        out << "run " << task << '\n';
        const ReportParts parts = report_for_ell(r, ell);
        write_file(part(ell, "summary"), parts.summary);
        write_file(part(ell, "measure"), parts.measure);
        write_file(part(ell, "window"), parts.window);
        done.insert(task);
        save();
    }

    std::string summary = m.csv() +
                          "ell,k,measure,global_dimension,global_below_resolution,k_local,"
                          "local_dimension_K,fvi_min_K,fvi_max_K\n";
    std::string measure = m.csv() + "ell,k,bands,measure,smallest_width\n";
    std::string window = m.csv() + "ell,center,half_width,generation,slope,below_resolution\n";
    std::string dimension = m.csv() + "ell,global_dimension,local_dimension_K\n";
    for (int ell : r.ells) {
        const std::string s = read_file(part(ell, "summary"));
        summary += s;
        measure += read_file(part(ell, "measure"));
        window += read_file(part(ell, "window"));
        // columns 0, 3 and 6 of the summary row
        std::vector<std::string> cols;
        std::stringstream ss(s.substr(0, s.find('\n')));
        for (std::string item; std::getline(ss, item, ',');) cols.push_back(item);
        if (cols.size() >= 7) dimension += cols[0] + ',' + cols[3] + ',' + cols[6] + '\n';
    }
    write_file(dir / "summary.csv", summary);
    write_file(dir / "measure_vs_k.csv", measure);
    write_file(dir / "local_dimension_vs_window.csv", window);
    write_file(dir / "dimension_vs_ell.csv", dimension);
    write_file(dir / "manifest.json", m.json() + '\n');
    out << "report written to " << dir.string() << '\n';
    return kOk;
}

// ---------------------------------------------------------------- wiring

void add_common(CLI::App* cmd, Common& c, bool with_k = true, bool with_tol = true) {
    cmd->add_option("--lambda", c.lambda, "Coupling constant (>= 0)");
    cmd->add_option("--ell", c.ell, "Sieving parameter (>= 1)");
    if (with_k) cmd->add_option("--k", c.k, "Generation");
    if (with_tol) cmd->add_option("--tol", c.tol, "Band-edge tolerance (default by k)");
    cmd->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--out", c.out, "Output path (default stdout)");
    cmd->add_option("--workers", c.workers, "Worker threads")->check(CLI::Range(1, 1024));
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Spectra of sieved Fibonacci Hamiltonians via the trace map", "sfib-cli"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    Common c;
    std::optional<std::string> window;
    bool pair = false;
    std::vector<int> ells{1};
    EpsRange eps;
    int k_max = 20;
    std::string grid;
    std::size_t size = 2500;
    double delta = 1e-2;
    std::optional<int> word_generation;
    std::string eig_out;
    std::uint64_t seed = 0;
    std::size_t samples = 0;
    ReportConfig rep;

    auto* bands = app.add_subcommand("bands", "Bands of the periodic approximant Sigma_k");
    add_common(bands, c);
    bands->add_option("--window", window, "Restrict to LO:HI");

    auto* cov = app.add_subcommand("cover", "Cover Sigma_k union Sigma_{k+1}");
    add_common(cov, c);
    cov->add_option("--window", window, "Restrict to LO:HI");
    cov->add_flag("--pair", pair, "Also export cover(k+1) and test nesting");

    auto* dim = app.add_subcommand("dimension", "Box-counting dimension of cover(k)");
    add_common(dim, c);
    dim->remove_option(dim->get_option("--ell"));
    dim->add_option("--ell", ells, "Sieving parameter; repeat for a contrast table");
    dim->add_option("--eps-min", eps.eps_min, "Smallest box size");
    dim->add_option("--eps-max", eps.eps_max, "Largest box size");
    dim->add_option("--scales", eps.n_scales, "Number of box sizes");
    dim->add_option("--window", window, "Local dimension on LO:HI");

    auto* special = app.add_subcommand("special-energies", "Energies 2cos(pi j / ell)");
    add_common(special, c, false, false);
    special->add_option("--k-max", k_max, "Orbit length for membership");

    auto* lyap = app.add_subcommand("lyapunov", "Per-site Lyapunov exponents on a grid");
    add_common(lyap, c, false, false);
    lyap->add_option("--grid", grid, "LO:HI:N")->required();
    lyap->add_option("--k-max", k_max, "Largest generation");
    lyap->add_option("--samples", samples, "Draw this many random energies in [LO, HI] instead");
    lyap->add_option("--seed", seed, "Seed for --samples");

    auto* oracle = app.add_subcommand("oracle-check", "Truncation eigenvalues against cover(k)");
    add_common(oracle, c);
    oracle->add_option("--size", size, "Truncation size");
    oracle->add_option("--delta", delta, "Distance counted as inside");
    oracle->add_option("--word-generation", word_generation, "Word w_g to cut the window from");
    oracle->add_option("--eigenvalues", eig_out, "Also write the eigenvalues to this path");

    auto* report = app.add_subcommand("report", "Full experiment matrix with checkpointing");
    report->add_option("--lambda", rep.lambda, "Coupling constant");
    report->add_option("--ells", rep.ells, "Sieving parameters")->delimiter(',');
    report->add_option("--k", rep.k, "Largest cover generation");
    report->add_option("--eps-min", rep.eps.eps_min, "Smallest box size");
    report->add_option("--eps-max", rep.eps.eps_max, "Largest box size");
    report->add_option("--scales", rep.eps.n_scales, "Number of box sizes");
    report->add_option("--period", rep.period, "Minimum period for the local K-window runs");
    report->add_option("--out", rep.dir, "Output directory")->required();
    report->add_option("--workers", rep.workers, "Worker threads")->check(CLI::Range(1, 1024));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        std::string data;
        if (*bands)
            data = run_bands(c, window);
        else if (*cov)
            data = run_cover(c, window, pair);
        else if (*dim)
            data = run_dimension(c, ells, eps, window);
        else if (*special)
            data = run_special(c, k_max);
        else if (*lyap)
            data = run_lyapunov(c, grid, k_max, samples, seed);
        else if (*oracle)
            data = run_oracle(c, size, delta, word_generation, eig_out);
        else if (*report) {
            rep.windows = {0.5, 0.1, 0.02};
            return run_report(rep, out);
        }
        emit(c, data, out);
        return kOk;
    } catch (const UnresolvedEdge& e) {
        err << "error: " << e.what() << " (bracket [" << format_real(e.lo()) << ", "
            << format_real(e.hi()) << "])\n";
        return kNumerical;
    } catch (const NumericalOverflow& e) {
        err << "error: " << e.what() << '\n';
        return kNumerical;
    } catch (const ResourceLimit& e) {
        err << "error: " << e.what() << '\n';
        return kResource;
    } catch (const std::overflow_error& e) {
        err << "error: " << e.what() << '\n';
        return kResource;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kFailure;
    }
}

}  // namespace sfib::cli
