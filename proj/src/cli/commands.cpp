#include "specnet/cli.hpp"

#include "specnet/checkpoint.hpp"
#include "specnet/models.hpp"
#include "util/binary_io.hpp"
#include "util/text.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

namespace specnet::cli {

namespace fs = std::filesystem;

namespace {

const std::vector<std::string>& class_names()
{
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (SoilClass c : all_soil_classes) {
            out.emplace_back(1, to_char(c));
        }
        return out;
    }();
    return names;
}

std::ofstream open_output(const fs::path& path)
{
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot write " + path.string());
    }
    return out;
}

std::string stage_error(std::string_view stage, const std::string& what)
{
    return "preprocess stage '" + std::string(stage) + "': " + what;
}

const BoundaryTable& boundary_table_for(const std::optional<fs::path>& path,
                                        std::optional<BoundaryTable>& storage)
{
    if (!path) {
        return BoundaryTable::ka5_default();
    }
    storage = BoundaryTable::load_csv(*path);
    return *storage;
}

std::size_t report_rank(std::string_view model)
{
    const auto it = std::find(report_order.begin(), report_order.end(), model);
    return static_cast<std::size_t>(it - report_order.begin());
}

void check_run_id(const std::string& stored, const std::string& expected, const fs::path& path)
{
    if (stored != expected) {
        throw Error("checkpoint " + path.string() + " was trained on split '" + stored +
                    "', but this configuration produces split '" + expected +
                    "' (different seed, ratios or data); refusing to evaluate");
    }
}

std::string timestamp()
{
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm utc{};
    gmtime_r(&now, &utc);
    char buffer[32];
    std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &utc);
    return buffer;
}

} // namespace

fs::path model_path(const fs::path& out, std::string_view model)
{
    return out / "models" / (std::string(model) + ".ckpt");
}

fs::path history_path(const fs::path& out, std::string_view model)
{
    return out / "history" / (std::string(model) + ".csv");
}

fs::path confusion_path(const fs::path& out, std::string_view model)
{
    return out / ("confusion_" + std::string(model) + ".csv");
}

fs::path report_path(const fs::path& out)
{
    return out / "report.csv";
}

std::vector<std::string> parse_arch_selection(std::string_view selection)
{
    if (selection == "all") {
        std::vector<std::string> out(models::architecture_names.begin(),
                                     models::architecture_names.end());
        out.emplace_back(forest_name);
        return out;
    }
    if (selection == "rf" || selection == forest_name) {
        return {std::string(forest_name)};
    }
    if (models::is_architecture(selection)) {
        return {std::string(selection)};
    }
    throw Error("unknown architecture '" + std::string(selection) +
                "' (expected lucas_cnn, lucas_resnet, lucas_coordconv, hu2015, liu2018, rf "
                "or all)");
}

std::vector<Sample> preprocess(std::span<const Sample> raw, const BoundaryTable& table)
{
    std::vector<Sample> reduced(raw.begin(), raw.end());
    for (Sample& s : reduced) {
        try {
            s.spectrum = reduce_bands(s.spectrum);
        } catch (const Error& e) {
            throw Error(stage_error("reduce_bands", "sample '" + s.id + "': " + e.what()));
        }
    }

    std::vector<Sample> unique;
    try {
        unique = deduplicate(reduced);
    } catch (const Error& e) {
        throw Error(stage_error("deduplicate", e.what()));
    }

    for (Sample& s : unique) {
        if (!s.texture) {
            throw Error(stage_error("assign_soil_class", "sample '" + s.id + "' has no texture"));
        }
        try {
            s.label = assign_soil_class(*s.texture, table);
        } catch (const Error& e) {
            throw Error(stage_error("assign_soil_class", "sample '" + s.id + "': " + e.what()));
        }
    }
    return unique;
}

std::string compute_run_id(const RunConfig& config, std::span<const Sample> samples)
{
    std::string key = "seed=" + std::to_string(config.seed) +
                      ";train=" + text::format_double(config.split.train) +
                      ";validation=" + text::format_double(config.split.validation) +
                      ";test=" + text::format_double(config.split.test) +
                      ";stratified=" + (config.stratified ? "1" : "0") + ";";
    for (const Sample& s : samples) {
        key += s.id;
        key += '=';
        key += s.label ? to_char(*s.label) : '?';
        key += '\n';
    }
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx",
                  static_cast<unsigned long long>(binary::fnv1a(key)));
    return hex;
}

PreparedData prepare_data(const RunConfig& config, std::ostream& log)
{
    PreparedData prepared;
    std::optional<BoundaryTable> storage;
    std::optional<fs::path> table_path;
    if (config.boundary_table) {
        table_path = config.resolve(*config.boundary_table);
    }

    if (config.synthetic) {
        std::vector<Sample> generated = synth_generate(*config.synthetic);
        if (config.synthetic->bands == raw_band_count) {
            prepared.samples = preprocess(generated, boundary_table_for(table_path, storage));
        } else {
            prepared.samples = deduplicate(generated);
        }
        log << "generated " << generated.size() << " synthetic spectra ("
            << prepared.samples.size() << " unique)\n";
    } else {
        const fs::path path = config.resolve(config.data->path);
        if (config.data->format == CsvFormat::raw) {
            const std::vector<Sample> raw = load_csv(path, CsvFormat::raw);
            prepared.samples = preprocess(raw, boundary_table_for(table_path, storage));
        } else {
            prepared.samples = load_csv(path, CsvFormat::reduced);
        }
        log << "loaded " << prepared.samples.size() << " samples from " << path.string() << "\n";
    }

    for (const Sample& s : prepared.samples) {
        if (!s.label) {
            throw Error("sample '" + s.id + "' has no class label");
        }
    }
    prepared.split = split(prepared.samples, config.split, config.seed, config.stratified);
    prepared.run_id = compute_run_id(config, prepared.samples);
    return prepared;
}

PreprocessSummary cmd_preprocess(const fs::path& raw_csv, const fs::path& out_csv,
                                 const std::optional<fs::path>& boundary_table, std::ostream& log)
{
    std::vector<Sample> raw;
    try {
        raw = load_csv(raw_csv, CsvFormat::raw);
    } catch (const CsvError& e) {
        throw CsvError(std::string("preprocess stage 'read_csv': ") + e.what(), e.row());
    }
    std::optional<BoundaryTable> storage;
    const std::vector<Sample> reduced = preprocess(raw, boundary_table_for(boundary_table, storage));
    save_csv(out_csv, reduced, CsvFormat::reduced);

    PreprocessSummary summary;
    summary.input_rows = raw.size();
    summary.output_rows = reduced.size();
    summary.class_counts = class_counts(reduced);
    log << "read " << summary.input_rows << " rows, wrote " << summary.output_rows
        << " unique samples to " << out_csv.string() << "\n";
    log << "class,count\n";
    for (SoilClass c : all_soil_classes) {
        log << to_char(c) << ',' << summary.class_counts[class_index(c)] << "\n";
    }
    return summary;
}

void cmd_train(const RunConfig& config, std::string_view selection, std::ostream& log)
{
    const std::vector<std::string> selected = parse_arch_selection(selection);
    // Resolve hyperparameters before any data work so bad overrides fail fast.
    std::vector<TrainConfig> train_configs;
    for (const std::string& name : selected) {
        if (name != forest_name) {
            train_configs.push_back(train_config(config, name));
        }
    }

    const PreparedData data = prepare_data(config, log);
    const fs::path out = config.output();
    const std::size_t bands = data.split.train.front().spectrum.size();
    log << "split " << data.split.train.size() << '/' << data.split.validation.size() << '/'
        << data.split.test.size() << " (run " << data.run_id << ")\n";

    auto tc = train_configs.begin();
    for (const std::string& name : selected) {
        const fs::path ckpt = model_path(out, name);
        fs::create_directories(ckpt.parent_path());
        if (name == forest_name) {
            const forest::FeatureMatrix matrix = forest::FeatureMatrix::from_samples(data.split.train);
            forest::Forest model = forest::fit_forest(matrix, forest_config(config));
            model.run_id = data.run_id;
            forest::save_forest(model, ckpt);
            log << name << ": " << model.trees().size() << " trees -> " << ckpt.string() << "\n";
            continue;
        }
        const TrainConfig& cfg = *tc++;
        const auto on_epoch = [&](const EpochRecord& r) {
            log << name << " epoch " << r.epoch << '/' << cfg.epochs
                << " loss " << text::format_fixed(r.train_loss, 6)
                << " val OA " << text::format_fixed(r.validation.overall_accuracy, 4) << "\n";
        };
        TrainResult result =
            train(models::build(name, bands, soil_class_count), data.split.train,
                  data.split.validation, cfg, on_epoch);
        result.network.run_id = data.run_id;
        save_checkpoint(result.network, ckpt);
        std::ofstream history = open_output(history_path(out, name));
        write_history_csv(history, result.history);
        log << name << " -> " << ckpt.string() << "\n";
    }
}

std::vector<metrics::ReportRow> cmd_evaluate(const RunConfig& config,
                                             std::vector<fs::path> checkpoints, std::ostream& log)
{
    const fs::path out = config.output();
    if (checkpoints.empty()) {
        for (std::string_view model : report_order) {
            if (fs::exists(model_path(out, model))) {
                checkpoints.push_back(model_path(out, model));
            }
        }
        if (checkpoints.empty()) {
            throw Error("no checkpoints found under " + (out / "models").string());
        }
    }

    const PreparedData data = prepare_data(config, log);
    const std::vector<std::size_t> truth = label_indices(data.split.test);

    struct Scored {
        std::string model;
        metrics::ConfusionMatrix cm;
    };
    std::vector<Scored> scored;
    std::set<std::string> seen;
    for (const fs::path& path : checkpoints) {
        std::string model;
        std::vector<std::size_t> predicted;
        if (checkpoint_kind(path) == CheckpointKind::forest) {
            const forest::Forest f = forest::load_forest(path);
            check_run_id(f.run_id, data.run_id, path);
            model = std::string(forest_name);
            predicted = f.predict(std::span<const Sample>(data.split.test));
        } else {
            const Network net = load_checkpoint(path);
            check_run_id(net.run_id, data.run_id, path);
            model = net.spec().name;
            predicted = predict(net, std::span<const Sample>(data.split.test)).labels;
        }
        if (!seen.insert(model).second) {
            throw Error("model '" + model + "' was given more than once");
        }
        scored.push_back({model, metrics::confusion(truth, predicted, soil_class_count)});
    }
    std::stable_sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
        return report_rank(a.model) < report_rank(b.model);
    });

    std::vector<metrics::ReportRow> rows;
    for (const Scored& s : scored) {
        rows.push_back({s.model, metrics::summarize(s.cm)});
        std::ofstream cm_out = open_output(confusion_path(out, s.model));
        metrics::write_confusion_csv(cm_out, s.cm, class_names());
        log << s.model << " OA " << text::format_fixed(rows.back().summary.overall_accuracy, 4)
            << " AA " << text::format_fixed(rows.back().summary.average_accuracy, 4)
            << " kappa " << text::format_fixed(rows.back().summary.kappa, 4) << "\n";
    }
    std::ofstream report = open_output(report_path(out));
    metrics::write_report_csv(report, rows);
    return rows;
}

void cmd_predict(const fs::path& checkpoint, const fs::path& input, CsvFormat format,
                 const fs::path& out_csv, std::ostream& log)
{
    std::vector<Sample> samples = load_csv(input, format);
    if (format == CsvFormat::raw) {
        for (Sample& s : samples) {
            s.spectrum = reduce_bands(s.spectrum);
        }
    }

    std::vector<std::vector<double>> probabilities;
    std::vector<std::size_t> labels;
    if (checkpoint_kind(checkpoint) == CheckpointKind::forest) {
        const forest::Forest f = forest::load_forest(checkpoint);
        for (const Sample& s : samples) {
            const std::vector<std::uint32_t> votes = f.votes(s.spectrum.values());
            std::vector<double> p;
            for (std::uint32_t v : votes) {
                p.push_back(static_cast<double>(v) / static_cast<double>(f.trees().size()));
            }
            labels.push_back(f.predict(s.spectrum.values()));
            probabilities.push_back(std::move(p));
        }
    } else {
        const Network net = load_checkpoint(checkpoint);
        Prediction pred = predict(net, std::span<const Sample>(samples));
        labels = std::move(pred.labels);
        for (const Tensor& p : pred.probabilities) {
            probabilities.emplace_back(p.values().begin(), p.values().end());
        }
    }

    std::ofstream out = open_output(out_csv);
    out << "sample_id,label";
    for (const std::string& name : class_names()) {
        out << ",p_" << name;
    }
    out << "\n";
    for (std::size_t i = 0; i < samples.size(); ++i) {
        out << samples[i].id << ',' << to_char(soil_class_from_index(labels[i]));
        for (double p : probabilities[i]) {
            out << ',' << text::format_double(p);
        }
        out << "\n";
    }
    log << "wrote " << samples.size() << " predictions to " << out_csv.string() << "\n";
}

void cmd_benchmark(const RunConfig& config, std::ostream& log)
{
    const fs::path out = config.output();
    fs::create_directories(out);
    std::ofstream run_log = open_output(out / "run.log");
    const auto stage = [&](const std::string& what) {
        run_log << timestamp() << ' ' << what << std::endl;
        log << "== " << what << "\n";
    };

    stage("prepare data");
    const PreparedData data = prepare_data(config, log);
    fs::create_directories(out / "data");
    save_csv(out / "data" / "dataset.csv", data.samples, CsvFormat::reduced);

    // The bundle config reads the prepared CSV back, so a rerun from it
    // (in place) repeats exactly what follows.
    RunConfig bundle = config;
    bundle.data = DataSource{"data/dataset.csv", CsvFormat::reduced};
    bundle.synthetic.reset();
    bundle.boundary_table.reset();
    bundle.output_dir = ".";
    bundle.base_dir = out;
    {
        std::ofstream cfg = open_output(out / "config.json");
        cfg << config_to_json(bundle);
    }

    stage("train");
    cmd_train(bundle, "all", log);
    stage("evaluate");
    cmd_evaluate(bundle, {}, log);
    stage("done");
}

} // namespace specnet::cli
