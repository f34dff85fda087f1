#include "specnet/cli.hpp"

#include "specnet/models.hpp"

#include "json.hpp"

#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

namespace specnet::cli {

using nlohmann::json;

namespace {

class ConfigError : public Error {
public:
    using Error::Error;
};

[[noreturn]] void fail(const std::string& where, const std::string& what)
{
    throw ConfigError("config " + where + ": " + what);
}

void require_keys(const json& object, const std::string& where,
                  std::initializer_list<std::string_view> allowed)
{
    if (!object.is_object()) {
        fail(where, "expected an object");
    }
    for (const auto& item : object.items()) {
        bool known = false;
        for (std::string_view key : allowed) {
            known = known || item.key() == key;
        }
        if (!known) {
            fail(where, "unknown key '" + item.key() + "'");
        }
    }
}

std::uint64_t get_unsigned(const json& value, const std::string& where)
{
    if (!value.is_number_unsigned()) {
        fail(where, "expected a non-negative integer");
    }
    return value.get<std::uint64_t>();
}

std::size_t get_count(const json& value, const std::string& where)
{
    const std::uint64_t v = get_unsigned(value, where);
    if (v == 0) {
        fail(where, "must be at least 1");
    }
    return static_cast<std::size_t>(v);
}

double get_double(const json& value, const std::string& where)
{
    if (!value.is_number()) {
        fail(where, "expected a number");
    }
    return value.get<double>();
}

bool get_bool(const json& value, const std::string& where)
{
    if (!value.is_boolean()) {
        fail(where, "expected true or false");
    }
    return value.get<bool>();
}

std::string get_string(const json& value, const std::string& where)
{
    if (!value.is_string()) {
        fail(where, "expected a string");
    }
    return value.get<std::string>();
}

ArchitectureOverrides parse_overrides(const json& j, const std::string& where)
{
    require_keys(j, where,
                 {"epochs", "batch_size", "learning_rate", "beta1", "beta2", "epsilon"});
    ArchitectureOverrides o;
    if (j.contains("epochs")) {
        o.epochs = get_count(j["epochs"], where + ".epochs");
    }
    if (j.contains("batch_size")) {
        o.batch_size = get_count(j["batch_size"], where + ".batch_size");
    }
    if (j.contains("learning_rate")) {
        o.learning_rate = get_double(j["learning_rate"], where + ".learning_rate");
    }
    if (j.contains("beta1")) {
        o.beta1 = get_double(j["beta1"], where + ".beta1");
    }
    if (j.contains("beta2")) {
        o.beta2 = get_double(j["beta2"], where + ".beta2");
    }
    if (j.contains("epsilon")) {
        o.epsilon = get_double(j["epsilon"], where + ".epsilon");
    }
    return o;
}

const char* format_name(CsvFormat format)
{
    return format == CsvFormat::raw ? "raw" : "reduced";
}

} // namespace

std::filesystem::path RunConfig::resolve(const std::filesystem::path& p) const
{
    if (p.is_absolute() || base_dir.empty()) {
        return p.lexically_normal();
    }
    return (base_dir / p).lexically_normal();
}

RunConfig parse_config(std::string_view json_text, const std::filesystem::path& base_dir)
{
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    require_keys(root, "root",
                 {"version", "seed", "data", "synthetic", "boundary_table", "output_dir", "split",
                  "normalize", "architectures", "forest"});
    if (!root.contains("version")) {
        fail("root", "missing \"version\"");
    }
    const std::uint64_t version = get_unsigned(root["version"], "version");
    if (version != config_version) {
        fail("version", "unsupported version " + std::to_string(version) + " (expected " +
                            std::to_string(config_version) + ")");
    }

    RunConfig config;
    config.base_dir = base_dir;
    if (root.contains("seed")) {
        config.seed = get_unsigned(root["seed"], "seed");
    }

    if (root.contains("data") == root.contains("synthetic")) {
        fail("root", "exactly one of \"data\" and \"synthetic\" must be given");
    }
    if (root.contains("data")) {
        const json& d = root["data"];
        require_keys(d, "data", {"path", "format"});
        if (!d.contains("path")) {
            fail("data", "missing \"path\"");
        }
        DataSource source;
        source.path = get_string(d["path"], "data.path");
        if (d.contains("format")) {
            try {
                source.format = parse_csv_format(get_string(d["format"], "data.format"));
            } catch (const ConfigError&) {
                throw;
            } catch (const Error& e) {
                fail("data.format", e.what());
            }
        }
        config.data = source;
    } else {
        const json& s = root["synthetic"];
        require_keys(s, "synthetic",
                     {"n_per_class", "seed", "bands", "noise_sigma", "brightness_jitter",
                      "repeats"});
        SynthConfig synth;
        synth.seed = config.seed;
        if (s.contains("n_per_class")) {
            synth.n_per_class = get_count(s["n_per_class"], "synthetic.n_per_class");
        }
        if (s.contains("seed")) {
            synth.seed = get_unsigned(s["seed"], "synthetic.seed");
        }
        if (s.contains("bands")) {
            synth.bands = get_count(s["bands"], "synthetic.bands");
        }
        if (s.contains("noise_sigma")) {
            synth.noise_sigma = get_double(s["noise_sigma"], "synthetic.noise_sigma");
        }
        if (s.contains("brightness_jitter")) {
            synth.brightness_jitter =
                get_double(s["brightness_jitter"], "synthetic.brightness_jitter");
        }
        if (s.contains("repeats")) {
            synth.repeats = static_cast<std::size_t>(get_unsigned(s["repeats"], "synthetic.repeats"));
        }
        config.synthetic = synth;
    }

    if (root.contains("boundary_table")) {
        config.boundary_table = get_string(root["boundary_table"], "boundary_table");
    }
    if (root.contains("output_dir")) {
        config.output_dir = get_string(root["output_dir"], "output_dir");
    }
    if (root.contains("split")) {
        const json& s = root["split"];
        require_keys(s, "split", {"train", "validation", "test", "stratified"});
        if (s.contains("train")) {
            config.split.train = get_double(s["train"], "split.train");
        }
        if (s.contains("validation")) {
            config.split.validation = get_double(s["validation"], "split.validation");
        }
        if (s.contains("test")) {
            config.split.test = get_double(s["test"], "split.test");
        }
        if (s.contains("stratified")) {
            config.stratified = get_bool(s["stratified"], "split.stratified");
        }
    }
    if (root.contains("normalize")) {
        config.normalize = get_bool(root["normalize"], "normalize");
    }
    if (root.contains("architectures")) {
        const json& a = root["architectures"];
        if (!a.is_object()) {
            fail("architectures", "expected an object");
        }
        for (const auto& item : a.items()) {
            if (item.key() != "*" && !models::is_architecture(item.key())) {
                fail("architectures", "unknown architecture '" + item.key() + "'");
            }
            config.architectures[item.key()] =
                parse_overrides(item.value(), "architectures." + item.key());
        }
    }
    if (root.contains("forest")) {
        const json& f = root["forest"];
        require_keys(f, "forest", {"n_estimators", "max_features", "min_samples_leaf"});
        if (f.contains("n_estimators")) {
            config.forest.n_estimators = get_count(f["n_estimators"], "forest.n_estimators");
        }
        if (f.contains("max_features")) {
            config.forest.max_features =
                static_cast<std::size_t>(get_unsigned(f["max_features"], "forest.max_features"));
        }
        if (f.contains("min_samples_leaf")) {
            config.forest.min_samples_leaf =
                get_count(f["min_samples_leaf"], "forest.min_samples_leaf");
        }
    }
    return config;
}

RunConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open config file " + path.string());
    }
    std::ostringstream text;
    text << in.rdbuf();
    try {
        return parse_config(text.str(), std::filesystem::absolute(path).parent_path());
    } catch (const Error& e) {
        throw Error(path.string() + ": " + e.what());
    }
}

std::string config_to_json(const RunConfig& config)
{
    // ordered_json keeps keys in insertion order so the file reads top-down.
    nlohmann::ordered_json root;
    root["version"] = config_version;
    root["seed"] = config.seed;
    if (config.data) {
        root["data"] = {{"path", config.data->path.generic_string()},
                        {"format", format_name(config.data->format)}};
    }
    if (config.synthetic) {
        const SynthConfig& s = *config.synthetic;
        root["synthetic"] = {{"n_per_class", s.n_per_class},
                             {"seed", s.seed},
                             {"bands", s.bands},
                             {"noise_sigma", s.noise_sigma},
                             {"brightness_jitter", s.brightness_jitter},
                             {"repeats", s.repeats}};
    }
    if (config.boundary_table) {
        root["boundary_table"] = config.boundary_table->generic_string();
    }
    root["output_dir"] = config.output_dir.generic_string();
    root["split"] = {{"train", config.split.train},
                     {"validation", config.split.validation},
                     {"test", config.split.test},
                     {"stratified", config.stratified}};
    root["normalize"] = config.normalize;
    nlohmann::ordered_json archs = nlohmann::ordered_json::object();
    for (const auto& [name, o] : config.architectures) {
        nlohmann::ordered_json entry = nlohmann::ordered_json::object();
        if (o.epochs) {
            entry["epochs"] = *o.epochs;
        }
        if (o.batch_size) {
            entry["batch_size"] = *o.batch_size;
        }
        if (o.learning_rate) {
            entry["learning_rate"] = *o.learning_rate;
        }
        if (o.beta1) {
            entry["beta1"] = *o.beta1;
        }
        if (o.beta2) {
            entry["beta2"] = *o.beta2;
        }
        if (o.epsilon) {
            entry["epsilon"] = *o.epsilon;
        }
        archs[name] = entry;
    }
    root["architectures"] = archs;
    root["forest"] = {{"n_estimators", config.forest.n_estimators},
                      {"max_features", config.forest.max_features},
                      {"min_samples_leaf", config.forest.min_samples_leaf}};
    return root.dump(2) + "\n";
}

TrainConfig train_config(const RunConfig& config, std::string_view architecture)
{
    TrainConfig tc = TrainConfig::defaults_for(architecture, config.seed);
    tc.normalize = config.normalize;
    const auto apply = [&tc](const ArchitectureOverrides& o) {
        tc.epochs = o.epochs.value_or(tc.epochs);
        tc.batch_size = o.batch_size.value_or(tc.batch_size);
        tc.adam.learning_rate = o.learning_rate.value_or(tc.adam.learning_rate);
        tc.adam.beta1 = o.beta1.value_or(tc.adam.beta1);
        tc.adam.beta2 = o.beta2.value_or(tc.adam.beta2);
        tc.adam.epsilon = o.epsilon.value_or(tc.adam.epsilon);
    };
    if (const auto it = config.architectures.find("*"); it != config.architectures.end()) {
        apply(it->second);
    }
    if (const auto it = config.architectures.find(std::string(architecture));
        it != config.architectures.end()) {
        apply(it->second);
    }
    tc.validate();
    return tc;
}

forest::ForestConfig forest_config(const RunConfig& config)
{
    forest::ForestConfig fc = config.forest;
    fc.seed = config.seed;
    return fc;
}

} // namespace specnet::cli
