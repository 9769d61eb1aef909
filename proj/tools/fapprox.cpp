// Command-line front end for the approximation benchmark library.
#include <cstdio>
#include <exception>
#include <filesystem>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "fapprox/experiments.hpp"

namespace {

using namespace fapprox;

struct CommonArgs {
    std::string config_path;
    std::string out_dir = "out";
    int trials = -1;
    int n_max = -1;
    long long seed = -1;
    int grid = -1;
};

void add_common(CLI::App* cmd, CommonArgs& a) {
    cmd->add_option("--config", a.config_path,
                    "JSON config file; flags below override its fields");
    cmd->add_option("--out", a.out_dir, "Output directory")
        ->capture_default_str();
    cmd->add_option("--trials", a.trials, "Independent trials (default 100)");
    cmd->add_option("--n-max", a.n_max, "Largest approximant size (default 100)");
    cmd->add_option("--seed", a.seed, "Master seed (default 0)");
    cmd->add_option("--grid", a.grid, "Quadrature grid points (default 1000)");
}

ExperimentPlan plan_from(const CLI::App* cmd, const CommonArgs& a) {
    ExperimentPlan p;
    if (!a.config_path.empty())
        p = parse_plan_json(read_text_file(a.config_path));
    if (cmd->count("--trials")) p.trials = a.trials;
    if (cmd->count("--n-max")) p.n_max = a.n_max;
    if (cmd->count("--seed")) p.master_seed = static_cast<std::uint64_t>(a.seed);
    if (cmd->count("--grid")) p.grid_points = a.grid;
    p.validate();
    return p;
}

GridFunction make_target(const ExperimentPlan& p) {
    return target_function(make_grid(1, p.grid_points));
}

void write_series_outputs(const TrialSeries& s, const std::string& out_dir,
                          std::vector<std::string>& written) {
    std::filesystem::create_directories(out_dir);
    const std::string base = out_dir + "/" + method_name(s.method);
    write_text_file(base + ".csv", render_series_csv(s));
    written.push_back(base + ".csv");
    if (s.trials >= 4) {
        write_text_file(base + "_stats.csv", render_stats_csv(s, boxplot_stats(s)));
        written.push_back(base + "_stats.csv");
    } else {
        std::fprintf(stderr, "note: stats need at least 4 trials, skipped\n");
    }
}

int run_single_method(Method m, const CLI::App* cmd, const CommonArgs& a) {
    const ExperimentPlan p = plan_from(cmd, a);
    const GridFunction f = make_target(p);
    const TrialSeries s = run_trials(m, f, p);
    std::vector<std::string> written;
    write_series_outputs(s, a.out_dir, written);
    if (m == Method::mc_direct && p.trials >= 30) {
        try {
            const auto table = run_mc_variance(f, p);
            const std::string path = a.out_dir + "/mc_variance.csv";
            write_text_file(path, render_variance_csv(table));
            written.push_back(path);
        } catch (const std::invalid_argument& e) {
            std::fprintf(stderr, "note: variance table skipped: %s\n", e.what());
        }
    }
    for (const std::string& w : written) std::printf("wrote %s\n", w.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Function approximation benchmark: greedy convex-hull "
                 "iteration, random-basis least squares, Monte-Carlo direct "
                 "construction, and a trained one-hidden-layer network on a "
                 "shared 1-d target"};
    app.require_subcommand(1);

    CommonArgs args;
    struct Sub {
        const char* name;
        const char* help;
        Method method;
        CLI::App* cmd = nullptr;
    };
    std::vector<Sub> subs = {
        {"greedy", "Run greedy trials; write series and stats CSVs",
         Method::greedy},
        {"random", "Run random-basis trials; write series and stats CSVs",
         Method::random},
        {"mc-direct",
         "Run Monte-Carlo direct-construction trials; write series, stats, "
         "and (at 30+ trials) a variance table",
         Method::mc_direct},
        {"mlp", "Train networks over the configured size list; write series "
                "and stats CSVs",
         Method::mlp_full},
    };
    for (Sub& s : subs) {
        s.cmd = app.add_subcommand(s.name, s.help);
        add_common(s.cmd, args);
    }

    CLI::App* compare = app.add_subcommand(
        "compare", "Run all four methods and write CSVs, a box-plot SVG, and "
                   "a JSON summary");
    add_common(compare, args);

    CLI::App* stats = app.add_subcommand(
        "stats", "Recompute a stats CSV from an existing series CSV");
    std::string stats_in, stats_out = "stats.csv";
    stats->add_option("--in", stats_in, "Series CSV path")->required();
    stats->add_option("--out-file", stats_out, "Stats CSV path")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        for (const Sub& s : subs)
            if (s.cmd->parsed()) return run_single_method(s.method, s.cmd, args);
        if (compare->parsed()) {
            const ExperimentPlan p = plan_from(compare, args);
            const GridFunction f = make_target(p);
            for (const std::string& w : run_compare(f, p, args.out_dir))
                std::printf("wrote %s\n", w.c_str());
            return 0;
        }
        if (stats->parsed()) {
            const TrialSeries s = parse_series_csv(read_text_file(stats_in));
            write_text_file(stats_out, render_stats_csv(s, boxplot_stats(s)));
            std::printf("wrote %s\n", stats_out.c_str());
            return 0;
        }
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
