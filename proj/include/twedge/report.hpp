#pragma once
// Table, rate and figure computations behind the command-line tool, plus CSV/manifest output.

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "twedge/ensembles.hpp"
#include "twedge/errors.hpp"
#include "twedge/fredholm.hpp"
#include "twedge/lg.hpp"
#include "twedge/specfun.hpp"

namespace twedge::cli {

using specfun::Ensemble;
using specfun::Variant;

inline constexpr const char* kVersion = "0.3.0";

inline const std::vector<double>& table_alphas() {
    static const std::vector<double> a{0.01, 0.05, 0.1, 0.3, 0.5, 0.7, 0.9, 0.95, 0.99};
    return a;
}

struct TableLayout {
    int id;
    Ensemble ensemble;
    Variant variant;
    std::vector<int> rows;  // N for GUE tables, matrix size N+1 for GOE tables
    bool monte_carlo;
};

inline TableLayout table_layout(int id) {
    switch (id) {
        case 1: return {1, Ensemble::GUE, Variant::theorem, {2, 5, 10, 25, 50, 75, 100, 200, 500}, false};
        case 2: return {2, Ensemble::GUE, Variant::averaged, {2, 5, 10, 25, 50}, false};
        case 3: return {3, Ensemble::GOE, Variant::theorem, {2, 5, 10, 25, 50, 75, 100, 200, 500}, true};
        case 4: return {4, Ensemble::GOE, Variant::tuned, {2, 3, 4, 5, 10, 25, 50, 75, 100, 200, 500}, true};
        default: throw usage_error("table id must be 1, 2, 3 or 4");
    }
}

inline constexpr std::int64_t kMaxReplications = 100000000;
inline constexpr double kSelfConvergence = 1e-7;

struct TableOptions {
    int nodes = fredholm::kDefaultNodes;
    std::int64_t reps = 100000;
    std::uint64_t seed = 20260101;
    double gamma = 0.2;  // tuned centering
    double c = 1.0;      // tuned centering
    std::vector<int> rows;  // subset of the layout rows; empty = all
};

struct TableRow {
    int label = 0;  // N, or N+1 for GOE tables
    double mu = 0.0;
    std::vector<double> values;
    std::vector<double> spread;  // self-convergence (determinants) or standard error (Monte Carlo)
};

inline specfun::CenteringSpec layout_spec(const TableLayout& t, const TableOptions& o) {
    return {t.ensemble, t.variant, o.gamma, o.c};
}

/// One table row. Determinant rows must self-converge to 1e-7 on halving m.
inline TableRow compute_table_row(const TableLayout& t, int label, const TableOptions& o) {
    const auto spec = layout_spec(t, o);
    TableRow row;
    row.label = label;
    const int N = t.ensemble == Ensemble::GOE ? label - 1 : label;
    row.mu = specfun::centering(spec, N).mu;
    if (!t.monte_carlo) {
        for (double a : table_alphas()) {
            const auto r = fredholm::finite_cdf(t.ensemble, N, spec, fredholm::tw_quantile(2, a), o.nodes);
            if (r.convergence >= kSelfConvergence)
                throw accuracy_error("table " + std::to_string(t.id) + " row " + std::to_string(label) +
                                     ": determinant not self-converged (" + std::to_string(r.convergence) + ")");
            row.values.push_back(r.value);
            row.spread.push_back(r.convergence);
        }
        return row;
    }
    ensembles::SampleConfig cfg{t.ensemble, label, ensembles::Model::automatic, o.seed, o.reps};
    const auto est = ensembles::mc_cdf(cfg, spec, table_alphas());
    row.values = est.p_hat;
    row.spread = est.stderr_;
    return row;
}

inline std::vector<TableRow> compute_table(int id, const TableOptions& o) {
    if (o.reps < 1 || o.reps > kMaxReplications) throw usage_error("reps must lie in [1, 1e8]");
    if (o.nodes < 8 || o.nodes > fredholm::kMaxNodes) throw usage_error("nodes must lie in [8, 2000]");
    const auto t = table_layout(id);
    std::vector<TableRow> rows;
    for (int label : o.rows.empty() ? t.rows : o.rows) rows.push_back(compute_table_row(t, label, o));
    return rows;
}

// ---------------------------------------------------------------------------
// CSV helpers.

inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

class CsvWriter {
public:
    explicit CsvWriter(const std::string& path) : out_(path, std::ios::binary) {
        if (!out_) throw usage_error("cannot open output file: " + path);
    }
    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << cells[i];
        }
        out_ << '\n';
    }

private:
    std::ofstream out_;
};

inline void write_table_csv(const std::string& path, int id, const std::vector<TableRow>& rows) {
    const auto t = table_layout(id);
    CsvWriter w(path);
    std::vector<std::string> head{t.ensemble == Ensemble::GOE ? "N+1" : "N"};
    if (!t.monte_carlo) head.push_back("mu_N");
    for (double a : table_alphas()) {
        char buf[16];
        std::snprintf(buf, sizeof buf, "%g", a);
        head.emplace_back(buf);
    }
    w.row(head);
    for (const auto& r : rows) {
        std::vector<std::string> cells{std::to_string(r.label)};
        if (!t.monte_carlo) cells.push_back(fmt(r.mu));
        for (double v : r.values) cells.push_back(fmt(v));
        w.row(cells);
    }
}

struct Manifest {
    std::string command_line;
    std::uint64_t seed = 0;
    int nodes = 0;
    std::int64_t reps = 0;
    nlohmann::json tolerances = nlohmann::json::object();
    nlohmann::json extra = nlohmann::json::object();
    std::vector<std::string> outputs;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
};

/// JSON sidecar written next to the data files.
inline void write_manifest(const std::string& path, const Manifest& m) {
    nlohmann::json j;
    j["command_line"] = m.command_line;
    j["seed"] = m.seed;
    j["nodes"] = m.nodes;
    j["reps"] = m.reps;
    j["tolerances"] = m.tolerances;
    j["outputs"] = m.outputs;
    j["extra"] = m.extra;
    j["wall_time_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - m.start).count();
    j["version"] = kVersion;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw usage_error("cannot open manifest file: " + path);
    out << j.dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// Rate reports.

struct RateRecord {
    int N;
    double s;
    double raw;
    double scaled;        // N^{2/3} e^{w s} raw
    double scaled_third;  // N^{1/3} e^{w s} raw
};

/// |F_N(s) - F_beta(s)| with theorem centering; w = 1 for GUE, 1/2 for GOE.
inline std::vector<RateRecord> edge_rates(Ensemble ensemble, const std::vector<int>& N_list,
                                          const std::vector<double>& s_grid, int nodes = fredholm::kDefaultNodes) {
    const int beta = ensemble == Ensemble::GUE ? 2 : 1;
    const double w = ensemble == Ensemble::GUE ? 1.0 : 0.5;
    const specfun::CenteringSpec spec{ensemble, Variant::theorem};
    std::vector<double> limit;
    for (double s : s_grid) limit.push_back(fredholm::tw_cdf(beta, s));
    std::vector<RateRecord> out;
    for (int N : N_list) {
        if (ensemble == Ensemble::GOE && (N - 1) % 2 != 0) throw usage_error("GOE rates need N-1 even");
        for (std::size_t i = 0; i < s_grid.size(); ++i) {
            const double s = s_grid[i];
            const double raw = std::abs(fredholm::finite_cdf(ensemble, N, spec, s, nodes).value - limit[i]);
            const double env = std::exp(w * s);
            out.push_back({N, s, raw, std::pow(N, 2.0 / 3.0) * env * raw, std::pow(N, 1.0 / 3.0) * env * raw});
        }
    }
    return out;
}

inline void write_rates_csv(const std::string& path, Ensemble ensemble, const std::vector<RateRecord>& edge,
                            const std::vector<lg::RateRow>& wave) {
    CsvWriter w(path);
    w.row({"section", "N", "s", "raw_error", "scaled_error", "scaled_error_third"});
    const std::string tag = ensemble == Ensemble::GUE ? "cdf_gue" : "cdf_goe";
    for (const auto& r : edge) w.row({tag, std::to_string(r.N), fmt(r.s), fmt(r.raw), fmt(r.scaled), fmt(r.scaled_third)});
    for (const auto& r : wave) w.row({"wave", std::to_string(r.N), "", "", fmt(r.value), ""});
    for (const auto& r : wave) w.row({"wave_derivative", std::to_string(r.N), "", "", fmt(r.derivative), ""});
}

// ---------------------------------------------------------------------------
// F1 on a grid with cubic Hermite interpolation (values and central-difference densities).

class TabulatedF1 {
public:
    static constexpr double kLo = -10.0;
    static constexpr double kHi = 6.0;
    static constexpr double kStep = 0.1;
    static constexpr double kDiffStep = 1e-3;
    static constexpr int kNodes = 64;

    TabulatedF1() {
        static const auto kernel = kernels::goe_matrix_kernel_limit();
        auto F = [](double s) { return std::sqrt(fredholm::det_block(kernel, s, kNodes)); };
        const int n = static_cast<int>(std::lround((kHi - kLo) / kStep)) + 1;
        for (int i = 0; i < n; ++i) {
            const double s = kLo + kStep * i;
            s_.push_back(s);
            F_.push_back(F(s));
            f_.push_back((F(s + kDiffStep) - F(s - kDiffStep)) / (2.0 * kDiffStep));
        }
    }

    const std::vector<double>& grid() const { return s_; }
    const std::vector<double>& cdf_values() const { return F_; }
    const std::vector<double>& density_values() const { return f_; }

    double cdf(double s) const {
        if (s <= kLo) return F_.front();
        if (s >= kHi) return F_.back();
        auto i = static_cast<std::size_t>((s - kLo) / kStep);
        i = std::min(i, s_.size() - 2);
        const double h = kStep, t = (s - s_[i]) / h;
        const double h00 = (1 + 2 * t) * (1 - t) * (1 - t), h10 = t * (1 - t) * (1 - t);
        const double h01 = t * t * (3 - 2 * t), h11 = t * t * (t - 1);
        return h00 * F_[i] + h10 * h * f_[i] + h01 * F_[i + 1] + h11 * h * f_[i + 1];
    }

    double quantile(double alpha) const {
        alpha = std::clamp(alpha, 1e-6, 1.0 - 1e-6);
        return fredholm::invert_cdf([this](double s) { return cdf(s); }, alpha, kLo, kHi, 1e-12);
    }

private:
    std::vector<double> s_, F_, f_;
};

struct FigureData {
    ensembles::Histogram hist;
    std::vector<std::pair<double, double>> density;      // (s, f1(s))
    std::vector<std::pair<double, double>> probability;  // (F1 percentile, sorted sample)
    std::vector<std::pair<double, double>> markers;      // (alpha, F1 quantile)
};

/// Rescaled GOE edge sample against F1: histogram vs density and a probability plot.
inline FigureData figure1(std::int64_t reps, std::uint64_t seed, int bins, int size = 2,
                          const specfun::CenteringSpec& spec = {Ensemble::GOE, Variant::tuned}) {
    if (reps < 1 || reps > 10000000) throw usage_error("figure1: reps must lie in [1, 1e7]");
    static const TabulatedF1 table;
    FigureData out;
    ensembles::SampleConfig cfg{Ensemble::GOE, size, ensembles::Model::automatic, seed, reps};
    auto xs = ensembles::rescaled_sample(cfg, spec);
    out.hist = ensembles::histogram(xs, bins);
    for (std::size_t i = 0; i < table.grid().size(); ++i) out.density.emplace_back(table.grid()[i], table.density_values()[i]);
    std::sort(xs.begin(), xs.end());
    const std::size_t R = xs.size();
    const std::size_t stride = std::max<std::size_t>(1, (R + 9999) / 10000);
    for (std::size_t i = 0; i < R; i += stride) {
        const double p = (static_cast<double>(i) + 0.5) / static_cast<double>(R);
        out.probability.emplace_back(table.quantile(p), xs[i]);
    }
    for (double a : {0.01, 0.95, 0.99}) out.markers.emplace_back(a, table.quantile(a));
    return out;
}

/// Least-squares slope of sample quantiles against F1 quantiles.
inline double probability_plot_slope(const std::vector<std::pair<double, double>>& pairs) {
    double mx = 0, my = 0;
    for (auto [x, y] : pairs) {
        mx += x;
        my += y;
    }
    mx /= pairs.size();
    my /= pairs.size();
    double sxy = 0, sxx = 0;
    for (auto [x, y] : pairs) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    return sxy / sxx;
}

}  // namespace twedge::cli
