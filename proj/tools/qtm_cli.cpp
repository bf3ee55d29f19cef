// Batch driver: reproduces the experiment tables and figures, and computes
// means of quasi-Toeplitz matrices stored as JSON files.
#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

#include "qtm/experiments.hpp"

namespace {

using namespace qtm;

std::vector<MeanKind> parse_kinds(const std::string& arg) {
    std::vector<MeanKind> kinds;
    std::string cur;
    for (char c : arg + ",") {
        if (c == ',') {
            if (!cur.empty()) kinds.push_back(mean_kind_from_string(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    return kinds;
}

int run_mean_command(const std::vector<std::string>& inputs, const std::string& kind_name,
                     double tol, double eps, int max_iter, const std::vector<double>& weights,
                     const std::string& out_path, const std::string& trace_path) {
    MeanRequest req;
    for (const std::string& path : inputs) req.matrices.push_back(io::qt_from_json(io::load_json(path)));
    req.kind = mean_kind_from_string(kind_name);
    req.tol = tol;
    req.max_iter = max_iter;
    req.cfg.trunc_eps = eps / 10.0;
    req.cfg.tol = tol;
    req.cfg.max_iter = max_iter;
    req.weights = weights;

    MeanResult res = compute_mean(req);
    io::save_json(out_path, io::qt_to_json(res.mean));
    if (!trace_path.empty()) io::write_file_atomic(trace_path, io::trace_to_csv(res.trace));

    std::cout << to_string(req.kind) << " mean of " << req.matrices.size() << " matrices: "
              << res.trace.iterations << " iterations, symbol size "
              << res.mean.symbol().size() << ", correction support "
              << res.mean.correction().support() << " rank " << res.mean.correction().rank()
              << ", symbol law deviation " << res.symbol_check_rel << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"arithmetic, matrix functions and geometric means of quasi-Toeplitz matrices"};
    app.require_subcommand(0, 1);

    // experiment driver options
    std::vector<int> tables;
    bool figures = false;
    std::vector<double> thetas;
    double eps = 1e-14, tol = 1e-13;
    int max_iter = 100;
    std::string kinds_arg, out_dir = "out", config_path;
    app.add_option("--table", tables, "emit experiment table (1, 2 or 3)")
        ->check(CLI::Range(1, 3));
    app.add_flag("--figures", figures, "emit symbol/correction grids for the first theta");
    app.add_option("--theta", thetas, "theta values (default 1, 0.1, 0.01)");
    app.add_option("--eps", eps, "truncation epsilon");
    app.add_option("--tol", tol, "iteration tolerance");
    app.add_option("--max-iter", max_iter, "iteration cap");
    app.add_option("--kinds", kinds_arg, "comma-separated mean kinds (default ALM,NBMP)");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--config", config_path, "JSON config file; overrides the flags");

    // file-based mean subcommand
    auto* mean_cmd = app.add_subcommand("mean", "compute a mean of QT matrices from JSON files");
    std::vector<std::string> mean_inputs;
    std::string mean_kind = "ALM", mean_out = "mean.json", mean_trace;
    std::vector<double> mean_weights;
    double mean_tol = 1e-13, mean_eps = 1e-14;
    int mean_max_iter = 100;
    mean_cmd->add_option("inputs", mean_inputs, "QT matrix JSON files")->required()->expected(-2);
    mean_cmd->add_option("--kind", mean_kind, "ALM, NBMP, WEIGHTED or KARCHER");
    mean_cmd->add_option("--weights", mean_weights, "weights (WEIGHTED only)");
    mean_cmd->add_option("--tol", mean_tol, "iteration tolerance");
    mean_cmd->add_option("--eps", mean_eps, "truncation epsilon");
    mean_cmd->add_option("--max-iter", mean_max_iter, "iteration cap");
    mean_cmd->add_option("--out", mean_out, "output JSON file");
    mean_cmd->add_option("--trace", mean_trace, "write the iteration trace CSV here");

    CLI11_PARSE(app, argc, argv);

    try {
        if (mean_cmd->parsed())
            return run_mean_command(mean_inputs, mean_kind, mean_tol, mean_eps, mean_max_iter,
                                    mean_weights, mean_out, mean_trace);

        ExperimentConfig cfg;
        if (!thetas.empty()) cfg.thetas = thetas;
        cfg.eps = eps;
        cfg.tol = tol;
        cfg.max_iter = max_iter;
        if (!kinds_arg.empty()) cfg.kinds = parse_kinds(kinds_arg);
        cfg.out_dir = out_dir;
        if (!config_path.empty()) cfg = ExperimentConfig::from_json(io::load_json(config_path));
        cfg.validate();

        if (tables.empty() && !figures) {
            std::cerr << "nothing to do: pass --table N and/or --figures (see --help)\n";
            return 2;
        }

        write_manifest(cfg);
        for (int t : tables) {
            if (t == 1) {
                auto rows = run_table1(cfg);
                for (const auto& r : rows)
                    std::cout << "table1 theta=" << r.theta << " length=" << r.length
                              << " n=" << r.points << " seconds=" << r.seconds << "\n";
            } else if (t == 2) {
                auto rows = run_table2(cfg);
                for (const auto& r : rows)
                    std::cout << "table2 theta=" << r.theta << " kind=" << to_string(r.kind)
                              << " iterations=" << r.iterations << " seconds=" << r.seconds
                              << " size=" << r.size << " rank=" << r.rank << "\n";
            } else {
                auto rows = run_table3(cfg);
                for (const auto& r : rows)
                    std::cout << "table3 theta=" << r.theta << " kind=" << to_string(r.kind)
                              << " m=" << r.m << " finite=" << r.finite_seconds
                              << "s infinite=" << r.infinite_seconds << "s\n";
            }
        }
        if (figures) run_figures(cfg);
        return 0;
    } catch (const std::exception& e) {
        qtm::io::json err{{"error", "failure"}, {"message", e.what()}};
        std::cerr << err.dump() << "\n";
        return 1;
    }
}
