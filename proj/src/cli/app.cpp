#include "specnet/cli.hpp"

#include "CLI11.hpp"

#include <iostream>

namespace specnet::cli {

namespace fs = std::filesystem;

namespace {

struct CommonOptions {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
};

void add_common(CLI::App* cmd, CommonOptions& opts)
{
    cmd->add_option("--config", opts.config, "JSON run configuration")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--seed", opts.seed, "Override the config seed (split, init, forest)");
    cmd->add_option("--out", opts.out, "Override the config output directory");
}

RunConfig resolve_config(const CommonOptions& opts)
{
    RunConfig config = load_config(opts.config);
    if (opts.seed) {
        config.seed = *opts.seed;
    }
    if (!opts.out.empty()) {
        config.output_dir = fs::absolute(opts.out);
    }
    return config;
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Soil texture classification from reflectance spectra", "specnet"};
    app.require_subcommand(1);

    std::string input;
    std::string output;
    std::string boundary;
    std::string preprocess_config;
    CLI::App* pre = app.add_subcommand("preprocess", "Reduce, deduplicate and label a raw CSV");
    pre->add_option("--input", input, "Raw CSV (4200 bands plus texture)")
        ->required()
        ->check(CLI::ExistingFile);
    pre->add_option("--out", output, "Reduced CSV to write")->required();
    pre->add_option("--boundary-table", boundary, "Class boundary CSV (default KA5 table)")
        ->check(CLI::ExistingFile);
    pre->add_option("--config", preprocess_config, "Take the boundary table from this config")
        ->check(CLI::ExistingFile);

    CommonOptions train_opts;
    std::string arch = "all";
    CLI::App* train_cmd = app.add_subcommand("train", "Train one model or all of them");
    add_common(train_cmd, train_opts);
    train_cmd->add_option("--arch", arch, "Architecture name, rf, or all");

    CommonOptions eval_opts;
    std::vector<std::string> checkpoints;
    CLI::App* eval_cmd = app.add_subcommand("evaluate", "Score checkpoints on the test subset");
    add_common(eval_cmd, eval_opts);
    eval_cmd->add_option("--checkpoint", checkpoints, "Checkpoint files (default: all found)")
        ->check(CLI::ExistingFile);

    std::string checkpoint;
    std::string format = "reduced";
    CLI::App* predict_cmd = app.add_subcommand("predict", "Classify spectra with a checkpoint");
    predict_cmd->add_option("--checkpoint", checkpoint, "Network or forest checkpoint")
        ->required()
        ->check(CLI::ExistingFile);
    predict_cmd->add_option("--input", input, "Spectra CSV")->required()->check(CLI::ExistingFile);
    predict_cmd->add_option("--format", format, "Input CSV layout: reduced or raw")
        ->check(CLI::IsMember({"reduced", "raw"}));
    predict_cmd->add_option("--out", output, "Predictions CSV to write")->required();

    CommonOptions bench_opts;
    CLI::App* bench_cmd =
        app.add_subcommand("benchmark", "Prepare, train all models, evaluate, bundle");
    add_common(bench_cmd, bench_opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        if (pre->parsed()) {
            std::optional<fs::path> table;
            if (!boundary.empty()) {
                table = fs::path(boundary);
            } else if (!preprocess_config.empty()) {
                const RunConfig config = load_config(preprocess_config);
                if (config.boundary_table) {
                    table = config.resolve(*config.boundary_table);
                }
            }
            cmd_preprocess(input, output, table, out);
        } else if (train_cmd->parsed()) {
            cmd_train(resolve_config(train_opts), arch, out);
        } else if (eval_cmd->parsed()) {
            cmd_evaluate(resolve_config(eval_opts),
                         std::vector<fs::path>(checkpoints.begin(), checkpoints.end()), out);
        } else if (predict_cmd->parsed()) {
            cmd_predict(checkpoint, input, parse_csv_format(format), output, out);
        } else if (bench_cmd->parsed()) {
            cmd_benchmark(resolve_config(bench_opts), out);
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

} // namespace specnet::cli
