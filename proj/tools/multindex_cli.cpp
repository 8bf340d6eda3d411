// Batch front end: ingest price/quantity CSVs, run one or all index
// systems, write a JSON or CSV report with solutions and existence
// diagnostics.

#include <CLI11.hpp>

#include "multindex/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"multindex - multilateral price index systems"};

    multindex::RunConfig config;
    app.add_option("--prices", config.prices_path, "CSV of prices (rows commodities, columns countries)")
        ->required();
    app.add_option("--quantities", config.quantities_path, "CSV of quantities, same layout")
        ->required();
    app.add_option("--beta", config.beta_path, "country weight file for ggk/gk-mean");
    app.add_option("--method", config.method,
                   "gk|ggk|ewgk|gk-mean|rao|idb|arith|gen-mean|neary|rao76");
    app.add_option("--rho", config.rho, "order of the generalized mean (gk-mean, gen-mean)");
    app.add_option("--preference", config.preference, "leontief|cobb-douglas|ces (neary, rao76)");
    app.add_option("--share-params", config.share_params_path,
                   "commodity share parameter file (cobb-douglas, ces)");
    app.add_option("--sigma", config.sigma, "CES elasticity of substitution");
    app.add_option("--normalize", config.normalize, "first|geomean (default first)")
        ->check(CLI::IsMember({"first", "geomean"}));
    app.add_option("--tol", config.tol, "convergence tolerance (default per method)");
    app.add_option("--max-iter", config.max_iter, "iteration cap (default per method)");
    app.add_option("--probe-uniqueness", config.probe_starts,
                   "run a k-start uniqueness probe and report the spread");
    app.add_flag("--check-only", config.check_only,
                 "verify connectedness/compatibility without solving");
    app.add_flag("--all-methods", config.all_methods,
                 "run every method whose parameters were supplied");
    app.add_option("--seed", config.seed, "seed for the uniqueness probe starts");
    app.add_option("--out", config.out_path, "report file to write")->required();
    app.add_option("--format", config.format, "json|csv (default json)")
        ->check(CLI::IsMember({"json", "csv"}));

    CLI11_PARSE(app, argc, argv);
    return multindex::run(config);
}
