#pragma once

#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "rsi/mmio.hpp"
#include "rsi/report.hpp"
#include "rsi/testmatrices.hpp"

namespace rsi {

inline constexpr const char* kLibraryVersion = "rsi-0.1.0";
inline constexpr const char* kCacheEnvVar = "RSVD_DIAG_CACHE";

/// Full sweep description: matrices x k x rho x q x seeds, evaluated for the
/// selected experiments and norm specs.
struct ExperimentConfig {
    std::vector<TestMatrixSpec> matrices;
    std::vector<int> ks{25};
    std::vector<int> rhos{20};
    std::vector<int> qs{0, 1, 2};
    std::vector<std::uint64_t> seeds{1};
    std::vector<NormSpec> norm_specs{NormSpec::spectral(), NormSpec::frobenius()};
    double delta = 0.1;
    std::vector<Experiment> experiments{Experiment::angles_no_extraction};
    std::string output_dir = "out";
    SketchVariant variant = SketchVariant::practical;
    bool dump_matrices = false;
    int jobs = 1;

    void validate() const {
        if (matrices.empty() || ks.empty() || rhos.empty() || qs.empty() || seeds.empty())
            throw InvalidArgument("ExperimentConfig: empty grid");
        if (!(delta > 0.0 && delta < 1.0))
            throw InvalidArgument("ExperimentConfig: delta must be in (0,1)");
        for (const auto& m : matrices) m.validate();
        for (int k : ks)
            if (k < 1) throw InvalidArgument("ExperimentConfig: k must be >= 1");
        for (int r : rhos)
            if (r < 0) throw InvalidArgument("ExperimentConfig: rho must be >= 0");
        for (int q : qs)
            if (q < 0) throw InvalidArgument("ExperimentConfig: q must be >= 0");
    }
};

/// The paper's default study: nine matrices, k=25, rho=20, q in {0,1,2}.
inline ExperimentConfig default_config() {
    ExperimentConfig cfg;
    cfg.matrices = standard_test_matrices();
    return cfg;
}

inline std::optional<TestMatrixSpec> standard_spec_by_name(const std::string& name) {
    for (const TestMatrixSpec& s : standard_test_matrices())
        if (s.name == name) return s;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// JSON (de)serialization
// ---------------------------------------------------------------------------

inline void to_json(nlohmann::json& j, const TestMatrixSpec& s) {
    j = {{"family", to_string(s.family)}, {"param", s.param}, {"n", s.n},
         {"r", s.r},                      {"seed", s.seed},   {"name", s.name}};
}

inline void from_json(const nlohmann::json& j, TestMatrixSpec& s) {
    if (j.contains("name") && !j.contains("family")) {
        const auto named = standard_spec_by_name(j.at("name").get<std::string>());
        if (!named) throw InvalidArgument("config: unknown standard matrix name");
        s = *named;
    } else {
        s.family = matrix_family_from_string(j.at("family").get<std::string>());
        s.param = j.at("param").get<double>();
        s.name = j.value("name", to_string(s.family));
    }
    if (j.contains("n")) s.n = j.at("n").get<int>();
    if (j.contains("r")) s.r = j.at("r").get<int>();
    if (j.contains("seed")) s.seed = j.at("seed").get<std::uint64_t>();
}

inline nlohmann::json config_to_json(const ExperimentConfig& cfg) {
    nlohmann::json specs = nlohmann::json::array();
    for (const auto& s : cfg.norm_specs) specs.push_back(s.str());
    nlohmann::json exps = nlohmann::json::array();
    for (const auto& e : cfg.experiments) exps.push_back(to_string(e));
    return {{"matrices", cfg.matrices},
            {"sketch",
             {{"k", cfg.ks},
              {"rho", cfg.rhos},
              {"q", cfg.qs},
              {"seeds", cfg.seeds},
              {"variant", to_string(cfg.variant)}}},
            {"norm_specs", specs},
            {"delta", cfg.delta},
            {"experiments", exps},
            {"output_dir", cfg.output_dir}};
}

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
    ExperimentConfig cfg;
    cfg.matrices = j.at("matrices").get<std::vector<TestMatrixSpec>>();
    if (j.contains("sketch")) {
        const auto& sk = j.at("sketch");
        if (sk.contains("k")) cfg.ks = sk.at("k").get<std::vector<int>>();
        if (sk.contains("rho")) cfg.rhos = sk.at("rho").get<std::vector<int>>();
        if (sk.contains("q")) cfg.qs = sk.at("q").get<std::vector<int>>();
        if (sk.contains("seeds")) cfg.seeds = sk.at("seeds").get<std::vector<std::uint64_t>>();
        if (sk.contains("variant"))
            cfg.variant = sketch_variant_from_string(sk.at("variant").get<std::string>());
    }
    if (j.contains("norm_specs")) {
        cfg.norm_specs.clear();
        for (const auto& s : j.at("norm_specs"))
            cfg.norm_specs.push_back(NormSpec::parse(s.get<std::string>()));
    }
    if (j.contains("delta")) cfg.delta = j.at("delta").get<double>();
    if (j.contains("experiments")) {
        cfg.experiments.clear();
        for (const auto& e : j.at("experiments"))
            cfg.experiments.push_back(experiment_from_string(e.get<std::string>()));
    }
    if (j.contains("output_dir")) cfg.output_dir = j.at("output_dir").get<std::string>();
    cfg.validate();
    return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw InvalidArgument("load_config: cannot open " + path);
    nlohmann::json j;
    is >> j;
    return config_from_json(j);
}

inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

// ---------------------------------------------------------------------------
// Reference SVD cache (in memory, optionally on disk via RSVD_DIAG_CACHE)
// ---------------------------------------------------------------------------

namespace detail {

inline std::string matrix_cache_key(const TestMatrixSpec& s) {
    std::ostringstream os;
    os << to_string(s.family) << "|" << s.param << "|" << s.n << "|" << s.r << "|" << s.seed
       << "|" << kPrngVersion;
    return os.str();
}

inline void write_matrix_block(std::ofstream& os, const DenseMatrix& M) {
    const int r = M.rows(), c = M.cols();
    os.write(reinterpret_cast<const char*>(&r), sizeof r);
    os.write(reinterpret_cast<const char*>(&c), sizeof c);
    os.write(reinterpret_cast<const char*>(M.data()),
             static_cast<std::streamsize>(M.size() * sizeof(double)));
}

inline DenseMatrix read_matrix_block(std::ifstream& is) {
    int r = 0, c = 0;
    is.read(reinterpret_cast<char*>(&r), sizeof r);
    is.read(reinterpret_cast<char*>(&c), sizeof c);
    if (!is || r < 1 || c < 1) throw Error("reference cache: corrupt matrix block");
    DenseMatrix M(r, c);
    is.read(reinterpret_cast<char*>(M.data()),
            static_cast<std::streamsize>(M.size() * sizeof(double)));
    if (!is) throw Error("reference cache: truncated matrix block");
    return M;
}

inline constexpr char kCacheMagic[8] = {'R', 'S', 'I', 'R', 'E', 'F', '0', '1'};

inline void save_reference(const std::string& path, const SvdFactors& f) {
    std::ofstream os(path, std::ios::binary);
    if (!os) return; // cache is best-effort
    os.write(kCacheMagic, sizeof kCacheMagic);
    write_matrix_block(os, f.U);
    const int r = static_cast<int>(f.singular_values.size());
    os.write(reinterpret_cast<const char*>(&r), sizeof r);
    os.write(reinterpret_cast<const char*>(f.singular_values.data()),
             static_cast<std::streamsize>(f.singular_values.size() * sizeof(double)));
    write_matrix_block(os, f.V);
}

inline std::optional<SvdFactors> load_reference(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) return std::nullopt;
    char magic[8];
    is.read(magic, sizeof magic);
    if (!is || !std::equal(magic, magic + 8, kCacheMagic)) return std::nullopt;
    SvdFactors f;
    f.U = read_matrix_block(is);
    int r = 0;
    is.read(reinterpret_cast<char*>(&r), sizeof r);
    if (!is || r < 1) return std::nullopt;
    f.singular_values.resize(static_cast<std::size_t>(r));
    is.read(reinterpret_cast<char*>(f.singular_values.data()),
            static_cast<std::streamsize>(f.singular_values.size() * sizeof(double)));
    f.V = read_matrix_block(is);
    if (!is) return std::nullopt;
    return f;
}

} // namespace detail

/// Full SVD of a generated matrix, memoized in-process and persisted under
/// $RSVD_DIAG_CACHE when that directory is set.
class ReferenceCache {
public:
    const SvdFactors& full_svd(const TestMatrixSpec& spec, const DenseMatrix& A) {
        const std::string key = detail::matrix_cache_key(spec);
        {
            std::lock_guard<std::mutex> lock(mutex_);
            auto it = memo_.find(key);
            if (it != memo_.end()) return it->second;
        }
        SvdFactors f;
        bool loaded = false;
        const std::string disk = disk_path(key);
        if (!disk.empty()) {
            if (auto cached = detail::load_reference(disk)) {
                f = std::move(*cached);
                loaded = true;
            }
        }
        if (!loaded) {
            f = svd(A, SvdMode::full);
            if (!disk.empty()) detail::save_reference(disk, f);
        }
        std::lock_guard<std::mutex> lock(mutex_);
        return memo_.emplace(key, std::move(f)).first->second;
    }

private:
    static std::string disk_path(const std::string& key) {
        const char* dir = std::getenv(kCacheEnvVar);
        if (!dir || !*dir) return "";
        std::error_code ec;
        std::filesystem::create_directories(dir, ec);
        if (ec) return "";
        return (std::filesystem::path(dir) / ("ref_" + hex64(fnv1a(key)) + ".bin")).string();
    }

    std::mutex mutex_;
    std::map<std::string, SvdFactors> memo_;
};

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

inline constexpr const char* kCsvHeader = "matrix,k,rho,q,seed,quantity,j,measured,bound,norm_spec";

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline void emit_csv_rows(std::ostream& os, const BoundReport& rep) {
    for (const BoundEntry& e : rep.entries) {
        os << rep.matrix_name << ',' << rep.k << ',' << rep.rho << ',' << rep.q << ','
           << rep.seed << ',' << e.quantity << ',' << e.j << ',' << format_double(e.measured)
           << ',' << format_double(e.bound) << ',' << e.norm_spec << '\n';
    }
}

inline void emit_csv(std::ostream& os, const std::vector<BoundReport>& reports) {
    os << kCsvHeader << '\n';
    for (const BoundReport& r : reports) emit_csv_rows(os, r);
}

/// Re-verify the master property from a stored CSV: every structural row must
/// satisfy bound >= measured - slack. Probabilistic rows ("prob_" prefix) are
/// per-seed samples of tail/expectation bounds and are excluded; so are the
/// "gensintheta" rows, which carry their own acceptance check at the
/// extraction target rank. Returns the violating lines.
inline std::vector<std::string> check_csv(std::istream& is, double slack = 1e-8) {
    std::vector<std::string> violations;
    std::string line;
    if (!std::getline(is, line) || line != kCsvHeader)
        throw InvalidArgument("check_csv: unexpected header");
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() < 9) throw InvalidArgument("check_csv: short row: " + line);
        const std::string& quantity = cells[5];
        if (quantity.rfind("prob_", 0) == 0 || quantity == "gensintheta") continue;
        const double measured = std::stod(cells[7]);
        const double bound = std::stod(cells[8]);
        if (!(bound >= measured - slack)) violations.push_back(line);
    }
    return violations;
}

inline std::vector<std::string> check_csv_file(const std::string& path, double slack = 1e-8) {
    std::ifstream is(path);
    if (!is) throw InvalidArgument("check_csv: cannot open " + path);
    return check_csv(is, slack);
}

// ---------------------------------------------------------------------------
// SVG plotting
// ---------------------------------------------------------------------------

struct PlotSeries {
    std::string label;
    std::vector<double> xs, ys;
    bool dashed = false;
    std::string color = "#1f77b4";
};

/// Self-contained SVG line plot; log-scale y (decade ticks) when log_y.
inline void emit_svg(std::ostream& os, const std::string& title, const std::string& xlabel,
                     const std::string& ylabel, const std::vector<PlotSeries>& series,
                     bool log_y = true) {
    const double width = 860, height = 560;
    const double left = 80, right = 180, top = 50, bottom = 60;
    const double pw = width - left - right, ph = height - top - bottom;

    double xmin = 0, xmax = 1, ymin = 1e300, ymax = -1e300;
    bool first = true;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.xs.size(); ++i) {
            const double x = s.xs[i], y = s.ys[i];
            if (first) {
                xmin = xmax = x;
                first = false;
            } else {
                xmin = std::min(xmin, x);
                xmax = std::max(xmax, x);
            }
            if (!log_y || y > 0.0) {
                ymin = std::min(ymin, y);
                ymax = std::max(ymax, y);
            }
        }
    if (xmax <= xmin) xmax = xmin + 1;
    if (ymin > ymax) {
        ymin = 1e-16;
        ymax = 1.0;
    }
    double lo, hi;
    if (log_y) {
        lo = std::floor(std::log10(std::max(ymin, 1e-18)));
        hi = std::ceil(std::log10(std::max(ymax, 1e-17)));
        if (hi <= lo) hi = lo + 1;
    } else {
        lo = ymin;
        hi = ymax > ymin ? ymax : ymin + 1;
        const double pad = 0.05 * (hi - lo);
        lo -= pad;
        hi += pad;
    }
    auto xpix = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
    auto ypix = [&](double y) {
        double t;
        if (log_y) {
            const double yc = std::max(y, std::pow(10.0, lo));
            t = (std::log10(yc) - lo) / (hi - lo);
        } else {
            t = (y - lo) / (hi - lo);
        }
        return top + ph - t * ph;
    };
    char buf[160];
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
       << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << width / 2 << "\" y=\"28\" text-anchor=\"middle\" font-size=\"16\" "
          "font-family=\"sans-serif\">" << title << "</text>\n";
    // axes
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"black\"/>\n", left,
                  top + ph, left + pw, top + ph);
    os << buf;
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"black\"/>\n", left, top,
                  left, top + ph);
    os << buf;
    os << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 14
       << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\">" << xlabel
       << "</text>\n";
    os << "<text x=\"20\" y=\"" << top + ph / 2
       << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\" "
          "transform=\"rotate(-90 20 " << top + ph / 2 << ")\">" << ylabel << "</text>\n";
    // y ticks
    if (log_y) {
        int step = std::max(1, static_cast<int>((hi - lo) / 10.0 + 0.999));
        for (int d = static_cast<int>(lo); d <= static_cast<int>(hi); d += step) {
            const double y = ypix(std::pow(10.0, d));
            std::snprintf(buf, sizeof buf,
                          "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"#cccccc\"/>\n",
                          left, y, left + pw, y);
            os << buf;
            os << "<text x=\"" << left - 8 << "\" y=\"" << y + 4
               << "\" text-anchor=\"end\" font-size=\"11\" font-family=\"sans-serif\">1e" << d
               << "</text>\n";
        }
    } else {
        for (int t = 0; t <= 5; ++t) {
            const double yv = lo + (hi - lo) * t / 5.0;
            const double y = ypix(yv);
            std::snprintf(buf, sizeof buf,
                          "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"#cccccc\"/>\n",
                          left, y, left + pw, y);
            os << buf;
            std::snprintf(buf, sizeof buf, "%.3g", yv);
            os << "<text x=\"" << left - 8 << "\" y=\"" << y + 4
               << "\" text-anchor=\"end\" font-size=\"11\" font-family=\"sans-serif\">" << buf
               << "</text>\n";
        }
    }
    // x ticks (integers when the span is small)
    const int nticks = std::min(10, static_cast<int>(xmax - xmin) > 0
                                        ? static_cast<int>(xmax - xmin)
                                        : 1);
    for (int t = 0; t <= nticks; ++t) {
        const double xv = xmin + (xmax - xmin) * t / nticks;
        const double x = xpix(xv);
        std::snprintf(buf, sizeof buf,
                      "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"black\"/>\n", x,
                      top + ph, x, top + ph + 5);
        os << buf;
        std::snprintf(buf, sizeof buf, "%g", xv);
        os << "<text x=\"" << x << "\" y=\"" << top + ph + 20
           << "\" text-anchor=\"middle\" font-size=\"11\" font-family=\"sans-serif\">" << buf
           << "</text>\n";
    }
    // series
    for (const auto& s : series) {
        if (s.xs.empty()) continue;
        os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.6\"";
        if (s.dashed) os << " stroke-dasharray=\"6,4\"";
        os << " points=\"";
        for (std::size_t i = 0; i < s.xs.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.2f,%.2f ", xpix(s.xs[i]), ypix(s.ys[i]));
            os << buf;
        }
        os << "\"/>\n";
    }
    // legend
    double ly = top + 10;
    for (const auto& s : series) {
        os << "<line x1=\"" << left + pw + 14 << "\" y1=\"" << ly << "\" x2=\""
           << left + pw + 44 << "\" y2=\"" << ly << "\" stroke=\"" << s.color
           << "\" stroke-width=\"1.6\"" << (s.dashed ? " stroke-dasharray=\"6,4\"" : "")
           << "/>\n";
        os << "<text x=\"" << left + pw + 50 << "\" y=\"" << ly + 4
           << "\" font-size=\"11\" font-family=\"sans-serif\">" << s.label << "</text>\n";
        ly += 18;
    }
    os << "</svg>\n";
}

// ---------------------------------------------------------------------------
// Sweep runner
// ---------------------------------------------------------------------------

namespace detail {

template <typename F>
void parallel_for(int count, int jobs, F&& body) {
    jobs = std::max(1, std::min(jobs, count));
    if (jobs == 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> workers;
    for (int w = 0; w < jobs; ++w) {
        workers.emplace_back([&] {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    }
    for (auto& w : workers) w.join();
    if (first_error) std::rethrow_exception(first_error);
}

inline nlohmann::json report_to_json(const BoundReport& rep) {
    nlohmann::json entries = nlohmann::json::array();
    for (const BoundEntry& e : rep.entries) {
        nlohmann::json je = {{"quantity", e.quantity}, {"j", e.j},
                             {"norm_spec", e.norm_spec}, {"measured", e.measured},
                             {"bound", e.bound},         {"structural", e.structural}};
        if (e.exceeds_one) je["exceeds_one"] = true;
        entries.push_back(std::move(je));
    }
    nlohmann::json j = {{"matrix", rep.matrix_name},
                        {"k", rep.k},
                        {"rho", rep.rho},
                        {"q", rep.q},
                        {"seed", rep.seed},
                        {"variant", rep.variant},
                        {"gammas", rep.gammas},
                        {"leverage", rep.leverage},
                        {"delta", rep.delta},
                        {"notes", rep.notes},
                        {"entries", std::move(entries)}};
    if (std::isfinite(rep.c_e)) j["c_e"] = rep.c_e;
    if (std::isfinite(rep.c_d)) j["c_d"] = rep.c_d;
    return j;
}

struct RunOutcome {
    std::string matrix;
    int k = 0, rho = 0, q = 0;
    std::uint64_t seed = 0;
    std::string status = "ok"; ///< ok | skipped
    std::string reason;
    std::string report_file;
    std::optional<BoundReport> report;
};

inline std::string run_label(const std::string& matrix, int k, int rho, int q,
                             std::uint64_t seed) {
    std::ostringstream os;
    os << matrix << "_k" << k << "_rho" << rho << "_q" << q << "_s" << seed;
    return os.str();
}

} // namespace detail

/// Execute the sweep. Writes manifest.json, reports/*.json, results.csv and
/// plots/*.svg under cfg.output_dir; returns the run directory path.
/// Assumption violations mark individual runs skipped-with-reason rather than
/// aborting the sweep.
inline std::string run(const ExperimentConfig& cfg, ReferenceCache* shared_cache = nullptr) {
    cfg.validate();
    namespace fs = std::filesystem;
    const fs::path out(cfg.output_dir);
    std::error_code ec;
    fs::create_directories(out / "reports", ec);
    fs::create_directories(out / "plots", ec);
    if (cfg.dump_matrices) fs::create_directories(out / "matrices", ec);
    if (ec) throw Error("run: cannot create output directory " + cfg.output_dir);
    {
        std::ofstream probe(out / ".write_probe");
        if (!probe) throw Error("run: output directory not writable: " + cfg.output_dir);
    }
    fs::remove(out / ".write_probe", ec);

    const auto t_start = std::chrono::system_clock::now();
    ReferenceCache local_cache;
    ReferenceCache& cache = shared_cache ? *shared_cache : local_cache;

    const std::set<Experiment> experiments(cfg.experiments.begin(), cfg.experiments.end());
    const bool calibration = experiments.count(Experiment::probabilistic_calibration) > 0;

    std::vector<detail::RunOutcome> outcomes;
    std::ostringstream csv;
    csv << kCsvHeader << '\n';
    nlohmann::json calibration_summary = nlohmann::json::array();

    for (const TestMatrixSpec& mspec : cfg.matrices) {
        const DenseMatrix A = generate(mspec);
        if (cfg.dump_matrices)
            write_matrix_market((out / "matrices" / (mspec.name + ".mtx")).string(), A);
        if (experiments.empty()) continue;

        const SvdFactors& full = cache.full_svd(mspec, A);
        std::map<int, ReferenceSvd> refs;
        for (int k : cfg.ks)
            refs.emplace(k, make_reference(full, A.rows(), A.cols(), k));

        struct GridPoint {
            int k, rho, q;
            std::uint64_t seed;
        };
        std::vector<GridPoint> grid;
        for (int k : cfg.ks)
            for (int rho : cfg.rhos)
                for (int q : cfg.qs)
                    for (std::uint64_t seed : cfg.seeds) grid.push_back({k, rho, q, seed});

        std::vector<detail::RunOutcome> matrix_outcomes(grid.size());
        detail::parallel_for(static_cast<int>(grid.size()), cfg.jobs, [&](int gi) {
            const GridPoint& g = grid[static_cast<std::size_t>(gi)];
            detail::RunOutcome& oc = matrix_outcomes[static_cast<std::size_t>(gi)];
            oc.matrix = mspec.name;
            oc.k = g.k;
            oc.rho = g.rho;
            oc.q = g.q;
            oc.seed = g.seed;
            try {
                SketchConfig sc{g.k, g.rho, g.q, g.seed, cfg.variant};
                if (sc.ell() > std::min(A.rows(), A.cols()))
                    throw InvalidArgument("k + rho exceeds min(m, n)");
                const DenseMatrix omega = gaussian_guess(A.cols(), sc.ell(), g.seed);
                BoundReport rep = evaluate_report(A, mspec.name, refs.at(g.k), sc, omega,
                                                  experiments, cfg.norm_specs, cfg.delta);
                const std::string label =
                    detail::run_label(mspec.name, g.k, g.rho, g.q, g.seed);
                oc.report_file = "reports/" + label + ".json";
                std::ofstream rf(out / "reports" / (label + ".json"));
                rf << detail::report_to_json(rep).dump(2) << '\n';
                oc.report = std::move(rep);
            } catch (const AssumptionError& e) {
                oc.status = "skipped";
                oc.reason = e.what();
            } catch (const RankDeficiencyError& e) {
                oc.status = "skipped";
                oc.reason = e.what();
            } catch (const InvalidArgument& e) {
                oc.status = "skipped";
                oc.reason = e.what();
            }
        });

        for (auto& oc : matrix_outcomes)
            if (oc.report) emit_csv_rows(csv, *oc.report);

        // Figures: first (k, rho, seed) of the grid, one file per experiment.
        const int k0 = cfg.ks.front();
        const int rho0 = cfg.rhos.front();
        const std::uint64_t seed0 = cfg.seeds.front();
        auto find_report = [&](int q) -> const BoundReport* {
            for (const auto& oc : matrix_outcomes)
                if (oc.report && oc.k == k0 && oc.rho == rho0 && oc.seed == seed0 && oc.q == q)
                    return &*oc.report;
            return nullptr;
        };
        const std::vector<std::string> palette = {"#1f77b4", "#ff7f0e", "#2ca02c",
                                                  "#d62728", "#9467bd"};
        auto series_from = [&](const std::string& quantity, bool use_bound,
                               int q) -> PlotSeries {
            PlotSeries s;
            const BoundReport* rep = find_report(q);
            if (!rep) return s;
            for (const BoundEntry& e : rep->entries)
                if (e.quantity == quantity && e.norm_spec.empty()) {
                    s.xs.push_back(e.j);
                    s.ys.push_back(use_bound ? e.bound : e.measured);
                }
            return s;
        };
        auto plot_per_j = [&](Experiment exp, const std::string& quantity,
                              const std::string& fname, const std::string& title,
                              const std::string& ylabel) {
            if (!experiments.count(exp)) return;
            std::vector<PlotSeries> series;
            int ci = 0;
            for (int q : cfg.qs) {
                PlotSeries m = series_from(quantity, false, q);
                PlotSeries b = series_from(quantity, true, q);
                const std::string color = palette[static_cast<std::size_t>(ci++) % palette.size()];
                m.label = "measured q=" + std::to_string(q);
                m.color = color;
                b.label = "bound q=" + std::to_string(q);
                b.color = color;
                b.dashed = true;
                if (!m.xs.empty()) series.push_back(std::move(m));
                if (!b.xs.empty()) series.push_back(std::move(b));
            }
            if (series.empty()) return;
            std::ofstream f(out / "plots" / fname);
            emit_svg(f, title, "index j", ylabel, series, true);
        };

        plot_per_j(Experiment::angles_no_extraction, "sin_theta",
                   mspec.name + "_angles_no_extraction.svg",
                   mspec.name + ": sin angle(U_k, U_hat)", "sin theta_j");
        plot_per_j(Experiment::angles_extraction, "extraction_angle",
                   mspec.name + "_angles_extraction.svg",
                   mspec.name + ": max{sin theta'_j, sin nu'_j}", "max sine");

        if (experiments.count(Experiment::singular_values)) {
            std::vector<PlotSeries> series;
            PlotSeries exact = series_from("sigma_upper", true, cfg.qs.front());
            exact.label = "sigma_j(A)";
            exact.color = "#000000";
            if (!exact.xs.empty()) series.push_back(std::move(exact));
            int ci = 0;
            for (int q : cfg.qs) {
                PlotSeries m = series_from("sigma_upper", false, q);
                PlotSeries l = series_from("sigma_lower", false, q);
                const std::string color = palette[static_cast<std::size_t>(ci++) % palette.size()];
                m.label = "sigma_hat q=" + std::to_string(q);
                m.color = color;
                l.label = "lower bound q=" + std::to_string(q);
                l.color = color;
                l.dashed = true;
                if (!m.xs.empty()) series.push_back(std::move(m));
                if (!l.xs.empty()) series.push_back(std::move(l));
            }
            if (!series.empty()) {
                std::ofstream f(out / "plots" / (mspec.name + "_singular_values.svg"));
                emit_svg(f, mspec.name + ": singular values", "index j", "sigma_j", series, true);
            }
        }

        if (experiments.count(Experiment::lowrank_errors)) {
            std::vector<PlotSeries> series;
            int ci = 0;
            for (const NormSpec& spec : cfg.norm_specs) {
                PlotSeries m, b;
                for (int q : cfg.qs) {
                    if (const BoundReport* rep = find_report(q)) {
                        for (const BoundEntry& e : rep->entries)
                            if (e.quantity == "lowrank_nnorm" && e.norm_spec == spec.str()) {
                                m.xs.push_back(q);
                                m.ys.push_back(e.measured);
                                b.xs.push_back(q);
                                b.ys.push_back(e.bound);
                            }
                    }
                }
                const std::string color = palette[static_cast<std::size_t>(ci++) % palette.size()];
                m.label = spec.str() + " measured";
                m.color = color;
                b.label = spec.str() + " bound";
                b.color = color;
                b.dashed = true;
                if (!m.xs.empty()) series.push_back(std::move(m));
                if (!b.xs.empty()) series.push_back(std::move(b));
            }
            if (!series.empty()) {
                std::ofstream f(out / "plots" / (mspec.name + "_lowrank_errors.svg"));
                emit_svg(f, mspec.name + ": |||(I-QQ^T)A|||", "q", "error", series, true);
            }
        }

        if (calibration) {
            // Tail-bound calibration across the seed grid, per (k, rho, q, j).
            for (int k : cfg.ks)
                for (int rho : cfg.rhos)
                    for (int q : cfg.qs) {
                        std::map<int, int> viol;
                        std::map<int, double> bound_at_j;
                        std::vector<double> sin_theta_k;
                        double exp_bound_k = 0.0;
                        int runs = 0;
                        for (const auto& oc : matrix_outcomes) {
                            if (!oc.report || oc.k != k || oc.rho != rho || oc.q != q) continue;
                            ++runs;
                            for (const BoundEntry& e : oc.report->entries) {
                                if (e.quantity == "prob_tail_sin_theta") {
                                    if (e.measured > e.bound) viol[e.j] += 1;
                                    bound_at_j[e.j] = e.bound;
                                }
                                if (e.quantity == "prob_exp_sin_theta" && e.j == k)
                                    exp_bound_k = e.bound;
                                if (e.quantity == "sin_theta" && e.j == k)
                                    sin_theta_k.push_back(e.measured);
                            }
                        }
                        if (runs == 0) continue;
                        double mean_sin_theta_k = 0.0;
                        for (double v : sin_theta_k) mean_sin_theta_k += v;
                        if (!sin_theta_k.empty()) mean_sin_theta_k /= sin_theta_k.size();
                        nlohmann::json fractions = nlohmann::json::array();
                        for (int j = 1; j <= k; ++j)
                            fractions.push_back(runs ? static_cast<double>(viol[j]) / runs : 0.0);
                        calibration_summary.push_back(
                            {{"matrix", mspec.name},
                             {"k", k},
                             {"rho", rho},
                             {"q", q},
                             {"seeds", runs},
                             {"delta", cfg.delta},
                             {"tail_violation_fraction", fractions},
                             {"mean_sin_theta_k", mean_sin_theta_k},
                             {"expectation_bound_k", exp_bound_k}});
                        std::vector<PlotSeries> series;
                        PlotSeries f;
                        for (int j = 1; j <= k; ++j) {
                            f.xs.push_back(j);
                            f.ys.push_back(runs ? static_cast<double>(viol[j]) / runs : 0.0);
                        }
                        f.label = "violation fraction";
                        f.color = "#1f77b4";
                        PlotSeries dl;
                        dl.xs = {1.0, static_cast<double>(k)};
                        dl.ys = {cfg.delta, cfg.delta};
                        dl.label = "delta";
                        dl.color = "#d62728";
                        dl.dashed = true;
                        series.push_back(std::move(f));
                        series.push_back(std::move(dl));
                        std::ofstream pf(out / "plots" /
                                         (mspec.name + "_calibration_k" + std::to_string(k) +
                                          "_rho" + std::to_string(rho) + "_q" +
                                          std::to_string(q) + ".svg"));
                        emit_svg(pf, mspec.name + ": tail calibration", "index j", "fraction",
                                 series, false);
                    }
        }

        for (auto& oc : matrix_outcomes) {
            oc.report.reset();
            outcomes.push_back(std::move(oc));
        }
    }

    {
        std::ofstream cf(out / "results.csv", std::ios::binary);
        cf << csv.str();
    }
    if (calibration) {
        std::ofstream jf(out / "calibration.json");
        jf << calibration_summary.dump(2) << '\n';
    }

    const auto t_end = std::chrono::system_clock::now();
    nlohmann::json runs_json = nlohmann::json::array();
    for (const auto& oc : outcomes) {
        nlohmann::json r = {{"matrix", oc.matrix}, {"k", oc.k},         {"rho", oc.rho},
                            {"q", oc.q},           {"seed", oc.seed},   {"status", oc.status}};
        if (!oc.reason.empty()) r["reason"] = oc.reason;
        if (!oc.report_file.empty()) r["report"] = oc.report_file;
        runs_json.push_back(std::move(r));
    }
    const nlohmann::json config_json = config_to_json(cfg);
    auto to_time = [](std::chrono::system_clock::time_point tp) {
        return static_cast<long long>(
            std::chrono::duration_cast<std::chrono::milliseconds>(tp.time_since_epoch()).count());
    };
    nlohmann::json manifest = {{"config", config_json},
                               {"config_hash", hex64(fnv1a(config_json.dump()))},
                               {"prng_version", kPrngVersion},
                               {"library_version", kLibraryVersion},
                               {"started_ms", to_time(t_start)},
                               {"finished_ms", to_time(t_end)},
                               {"runs", std::move(runs_json)}};
    {
        std::ofstream mf(out / "manifest.json");
        mf << manifest.dump(2) << '\n';
    }
    return out.string();
}

} // namespace rsi
