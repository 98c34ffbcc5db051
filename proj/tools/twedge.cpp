// twedge: reproduce edge-law tables, Tracy-Widom values, rate reports and figure data.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "twedge/report.hpp"

namespace {

using namespace twedge;

constexpr int kExitUsage = 2;
constexpr int kExitAccuracy = 3;

struct Args {
    int table = 1;
    int beta = 2;
    std::vector<int> N;
    std::vector<double> s0;
    std::vector<double> alpha;
    std::int64_t reps = 100000;
    std::uint64_t seed = 20260101;
    int nodes = fredholm::kDefaultNodes;
    double gamma = 0.2;
    double c = 1.0;
    std::string centering;  // empty: tuned for figure1, theorem elsewhere
    std::string out;
    int bins = 60;
};

std::string joined(int argc, char** argv) {
    std::string s;
    for (int i = 0; i < argc; ++i) {
        if (i) s += ' ';
        s += argv[i];
    }
    return s;
}

specfun::Variant parse_variant(const std::string& v) {
    if (v == "theorem") return specfun::Variant::theorem;
    if (v == "averaged") return specfun::Variant::averaged;
    if (v == "tuned") return specfun::Variant::tuned;
    throw usage_error("unknown centering: " + v);
}

std::string out_or(const Args& a, const std::string& fallback) { return a.out.empty() ? fallback : a.out; }

std::string sidecar(const std::string& path) { return path + ".manifest.json"; }

int run_table(const Args& a, cli::Manifest m) {
    cli::TableOptions o;
    o.nodes = a.nodes;
    o.reps = a.reps;
    o.seed = a.seed;
    o.gamma = a.gamma;
    o.c = a.c;
    o.rows = a.N;
    const auto rows = cli::compute_table(a.table, o);
    const auto path = out_or(a, "table" + std::to_string(a.table) + ".csv");
    cli::write_table_csv(path, a.table, rows);
    m.seed = a.seed;
    m.nodes = a.nodes;
    m.reps = a.reps;
    m.tolerances = {{"self_convergence", cli::kSelfConvergence}, {"quantile", 1e-8}};
    m.outputs = {path};
    cli::write_manifest(sidecar(path), m);
    return 0;
}

int run_tw(const Args& a, cli::Manifest m) {
    if (a.beta != 1 && a.beta != 2) throw usage_error("--beta must be 1 or 2");
    const auto path = out_or(a, "tw" + std::to_string(a.beta) + ".csv");
    cli::CsvWriter w(path);
    if (!a.alpha.empty()) {
        w.row({"alpha", "quantile"});
        for (double al : a.alpha) w.row({cli::fmt(al), cli::fmt(fredholm::tw_quantile(a.beta, al))});
    } else {
        w.row({"s", "F"});
        for (double s : a.s0) {
            if (s < fredholm::kTwLo || s > fredholm::kTwHi) throw usage_error("s outside [-12, 10]");
            w.row({cli::fmt(s), cli::fmt(fredholm::tw_cdf(a.beta, s))});
        }
    }
    m.outputs = {path};
    m.tolerances = {{"cdf", a.beta == 2 ? 1e-8 : 1e-6}, {"quantile", 1e-8}};
    cli::write_manifest(sidecar(path), m);
    return 0;
}

int run_cdf(const Args& a, cli::Manifest m) {
    const auto ens = a.beta == 2 ? specfun::Ensemble::GUE : specfun::Ensemble::GOE;
    const specfun::CenteringSpec spec{ens, parse_variant(a.centering), a.gamma, a.c};
    const auto path = out_or(a, "cdf.csv");
    cli::CsvWriter w(path);
    w.row({"N", "s", "F", "convergence"});
    for (int N : a.N) {
        for (double s : a.s0) {
            const auto r = fredholm::finite_cdf(ens, N, spec, s, a.nodes);
            if (r.flagged) throw accuracy_error("finite_cdf not converged at N=" + std::to_string(N));
            w.row({std::to_string(N), cli::fmt(s), cli::fmt(r.value), cli::fmt(r.convergence)});
        }
    }
    m.nodes = a.nodes;
    m.outputs = {path};
    cli::write_manifest(sidecar(path), m);
    return 0;
}

int run_rates(const Args& a, cli::Manifest m) {
    const auto ens = a.beta == 2 ? specfun::Ensemble::GUE : specfun::Ensemble::GOE;
    const auto edge = cli::edge_rates(ens, a.N, a.s0, a.nodes);
    std::vector<double> wave_grid;
    for (double s = -6.0; s <= 10.0 + 1e-12; s += 0.25) wave_grid.push_back(s);
    const auto wave = lg::rate_scan(a.N, wave_grid);
    const auto path = out_or(a, "rates.csv");
    cli::write_rates_csv(path, ens, edge, wave);
    m.nodes = a.nodes;
    m.outputs = {path};
    cli::write_manifest(sidecar(path), m);
    return 0;
}

int run_figure1(const Args& a, cli::Manifest m) {
    const int size = a.N.empty() ? 2 : a.N.front();
    const specfun::CenteringSpec spec{specfun::Ensemble::GOE, parse_variant(a.centering), a.gamma, a.c};
    const auto fig = cli::figure1(a.reps, a.seed, a.bins, size, spec);
    const auto base = out_or(a, "figure1");
    const auto dpath = base + "_density.csv", ppath = base + "_probability.csv";
    {
        cli::CsvWriter w(dpath);
        w.row({"kind", "s", "value"});
        for (std::size_t i = 0; i < fig.hist.heights.size(); ++i)
            w.row({"histogram", cli::fmt(fig.hist.center(i)), cli::fmt(fig.hist.heights[i])});
        for (auto [s, f] : fig.density) w.row({"f1", cli::fmt(s), cli::fmt(f)});
        for (auto [al, q] : fig.markers) w.row({"percentile_" + cli::fmt(al), cli::fmt(q), cli::fmt(al)});
    }
    {
        cli::CsvWriter w(ppath);
        w.row({"f1_quantile", "sample_quantile"});
        for (auto [x, y] : fig.probability) w.row({cli::fmt(x), cli::fmt(y)});
    }
    m.seed = a.seed;
    m.reps = a.reps;
    m.outputs = {dpath, ppath};
    m.extra = {{"matrix_size", size}, {"bins", a.bins}, {"slope", cli::probability_plot_slope(fig.probability)}};
    cli::write_manifest(sidecar(base), m);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Finite-N largest-eigenvalue laws for GUE/GOE and their Tracy-Widom limits"};
    app.require_subcommand(1);
    Args a;

    auto add_common = [&a](CLI::App* sub) {
        sub->add_option("--out", a.out, "Output path (CSV; manifest written alongside)");
        sub->add_option("--nodes", a.nodes, "Quadrature nodes m")->check(CLI::Range(8, 2000));
        sub->add_option("--gamma", a.gamma, "Tuned-centering gamma");
        sub->add_option("--c", a.c, "Tuned-centering c");
        sub->add_option("--centering", a.centering, "theorem | averaged | tuned")
            ->check(CLI::IsMember({"theorem", "averaged", "tuned"}));
        sub->add_option("--seed", a.seed, "Random seed");
        sub->add_option("--reps", a.reps, "Monte Carlo replications");
    };

    auto* table = app.add_subcommand("table", "Reproduce one of the four edge tables");
    table->add_option("--table", a.table, "Table id")->required()->check(CLI::Range(1, 4));
    table->add_option("--N", a.N, "Restrict to these rows");
    add_common(table);

    auto* tw = app.add_subcommand("tw", "Tracy-Widom CDF values or quantiles");
    tw->add_option("--beta", a.beta, "1 or 2")->check(CLI::IsMember({1, 2}));
    tw->add_option("--s0", a.s0, "Evaluation points");
    tw->add_option("--alpha", a.alpha, "Quantile levels")->check(CLI::Range(1e-6, 1.0 - 1e-6));
    add_common(tw);

    auto* cdf = app.add_subcommand("cdf", "Finite-N edge CDF (beta 2: GUE of size N, beta 1: GOE of size N+1)");
    cdf->add_option("--beta", a.beta, "1 or 2")->check(CLI::IsMember({1, 2}));
    cdf->add_option("--N", a.N, "Sizes")->required();
    cdf->add_option("--s0", a.s0, "Rescaled thresholds")->required();
    add_common(cdf);

    auto* rates = app.add_subcommand("rates", "Scaled convergence-rate report");
    rates->add_option("--beta", a.beta, "1 (GOE) or 2 (GUE)")->check(CLI::IsMember({1, 2}));
    rates->add_option("--N", a.N, "Sizes");
    rates->add_option("--s0", a.s0, "Rescaled thresholds");
    add_common(rates);

    auto* fig = app.add_subcommand("figure1", "Histogram, F1 density and probability-plot data");
    fig->add_option("--N", a.N, "Matrix size (default 2)");
    fig->add_option("--bins", a.bins, "Histogram bins")->check(CLI::Range(10, 100000));
    add_common(fig);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }
    if (a.centering.empty()) a.centering = fig->parsed() ? "tuned" : "theorem";

    cli::Manifest m;
    m.command_line = joined(argc, argv);
    try {
        if (table->parsed()) return run_table(a, m);
        if (tw->parsed()) return run_tw(a, m);
        if (cdf->parsed()) return run_cdf(a, m);
        if (rates->parsed()) return run_rates(a, m);
        return run_figure1(a, m);
    } catch (const usage_error& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const domain_error& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const accuracy_error& e) {
        std::cerr << "accuracy failure: " << e.what() << '\n';
        return kExitAccuracy;
    } catch (const numerical_failure& e) {
        std::cerr << "accuracy failure: " << e.what() << '\n';
        return kExitAccuracy;
    }
}
