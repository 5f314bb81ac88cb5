#include "core/run_config.hpp"

#include "core/csv.hpp"
#include "core/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

namespace epl {

const char* const kToolVersion = "0.1.0";

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t");
    return s.substr(begin, end - begin + 1);
}

[[noreturn]] void parse_fail(const std::string& context, std::size_t line_no,
                             const std::string& message) {
    raise(ErrorKind::invalid_argument,
          context + ":" + std::to_string(line_no) + ": " + message);
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> items;
    std::string current;
    for (char ch : value) {
        if (ch == ',') {
            items.push_back(trim(current));
            current.clear();
        } else {
            current.push_back(ch);
        }
    }
    items.push_back(trim(current));
    return items;
}

struct KeyValue {
    std::string key;
    std::string value;
    std::size_t line_no;
};

struct Section {
    std::string header;
    std::size_t line_no;
    std::vector<KeyValue> entries;
};

std::vector<Section> tokenize(const std::vector<std::string>& lines,
                              const std::string& context) {
    std::vector<Section> sections;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        std::string line = lines[i];
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') parse_fail(context, i + 1, "unterminated section header");
            sections.push_back({trim(line.substr(1, line.size() - 2)), i + 1, {}});
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            parse_fail(context, i + 1, "expected 'key = value' or '[section]'");
        if (sections.empty())
            parse_fail(context, i + 1, "key outside of any [section]");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            parse_fail(context, i + 1, "empty key or value");
        sections.back().entries.push_back({key, value, i + 1});
    }
    return sections;
}

double to_double(const KeyValue& kv, const std::string& context) {
    try {
        return parse_double(kv.value, context);
    } catch (const Error&) {
        parse_fail(context, kv.line_no, "expected a number for '" + kv.key + "'");
    }
}

std::int64_t to_int(const KeyValue& kv, const std::string& context) {
    const double v = to_double(kv, context);
    if (v != std::floor(v))
        parse_fail(context, kv.line_no, "expected an integer for '" + kv.key + "'");
    return static_cast<std::int64_t>(v);
}

std::string valid_method_ids() {
    std::string names;
    for (MethodId id : all_method_ids()) {
        if (!names.empty()) names += ", ";
        names += method_name(id);
    }
    return names;
}

void apply_method_key(MethodConfig& config, const KeyValue& kv, const std::string& context) {
    if (kv.key == "C") config.svm_c = to_double(kv, context);
    else if (kv.key == "base_C") config.base_c = to_double(kv, context);
    else if (kv.key == "T") config.hypothesis_count = static_cast<int>(to_int(kv, context));
    else if (kv.key == "c") config.pseudo_classes = static_cast<int>(to_int(kv, context));
    else if (kv.key == "m") config.neighbors_per_seed = static_cast<int>(to_int(kv, context));
    else if (kv.key == "k_nn") config.k_nn = static_cast<int>(to_int(kv, context));
    else if (kv.key == "gamma_A") config.gamma_ambient = to_double(kv, context);
    else if (kv.key == "gamma_I") config.gamma_intrinsic = to_double(kv, context);
    else if (kv.key == "reg_group") config.reg_group = static_cast<int>(to_int(kv, context));
    else if (kv.key == "bandwidth") {
        if (kv.value == "labeled") config.bandwidth_mode = BandwidthMode::labeled_only;
        else if (kv.value == "pool") config.bandwidth_mode = BandwidthMode::train_pool;
        else parse_fail(context, kv.line_no, "bandwidth must be 'labeled' or 'pool'");
    } else {
        parse_fail(context, kv.line_no, "unknown method key '" + kv.key + "'");
    }
}

} // namespace

RunConfig parse_run_config(const std::vector<std::string>& lines, const std::string& context) {
    RunConfig config;
    bool saw_dataset = false, saw_split = false;

    for (const auto& section : tokenize(lines, context)) {
        if (section.header == "dataset") {
            saw_dataset = true;
            std::string source = "synth";
            SynthSpec spec;
            spec.class_count = 6;
            spec.samples_per_class = 100;
            spec.manifold_strength = 0.8;
            spec.seed = 7;
            std::vector<int> dims;
            std::vector<double> noise;
            for (const auto& kv : section.entries) {
                if (kv.key == "source") source = kv.value;
                else if (kv.key == "path") config.csv_path = kv.value;
                else if (kv.key == "classes") spec.class_count = static_cast<int>(to_int(kv, context));
                else if (kv.key == "per_class") spec.samples_per_class = static_cast<int>(to_int(kv, context));
                else if (kv.key == "manifold_strength") spec.manifold_strength = to_double(kv, context);
                else if (kv.key == "seed") spec.seed = static_cast<std::uint64_t>(to_int(kv, context));
                else if (kv.key == "groups") {
                    for (const auto& item : split_list(kv.value))
                        dims.push_back(static_cast<int>(
                            to_int({kv.key, item, kv.line_no}, context)));
                } else if (kv.key == "noise") {
                    for (const auto& item : split_list(kv.value))
                        noise.push_back(to_double({kv.key, item, kv.line_no}, context));
                } else {
                    parse_fail(context, kv.line_no, "unknown dataset key '" + kv.key + "'");
                }
            }
            if (source == "synth") {
                if (dims.empty()) dims = {16, 32};
                if (noise.empty()) noise = {0.05};
                if (noise.size() == 1) noise.assign(dims.size(), noise[0]);
                if (noise.size() != dims.size())
                    parse_fail(context, section.line_no,
                               "noise list must match the number of groups");
                for (std::size_t g = 0; g < dims.size(); ++g)
                    spec.groups.push_back({dims[g], noise[g]});
                config.synth = spec;
            } else if (source == "csv") {
                if (!config.csv_path)
                    parse_fail(context, section.line_no, "source=csv requires a 'path' key");
            } else {
                parse_fail(context, section.line_no, "source must be 'synth' or 'csv'");
            }
        } else if (section.header == "split") {
            saw_split = true;
            for (const auto& kv : section.entries) {
                if (kv.key == "n_labeled") {
                    for (const auto& item : split_list(kv.value))
                        config.grid.n_labeled.push_back(static_cast<int>(
                            to_int({kv.key, item, kv.line_no}, context)));
                } else if (kv.key == "fractions") {
                    for (const auto& item : split_list(kv.value))
                        config.grid.fractions.push_back(
                            to_double({kv.key, item, kv.line_no}, context));
                } else if (kv.key == "seeds") {
                    for (const auto& item : split_list(kv.value))
                        config.grid.seeds.push_back(static_cast<std::uint64_t>(
                            to_int({kv.key, item, kv.line_no}, context)));
                } else if (kv.key == "leak") {
                    if (kv.value == "false") config.grid.leak_flags = {false};
                    else if (kv.value == "true") config.grid.leak_flags = {true};
                    else if (kv.value == "both") config.grid.leak_flags = {false, true};
                    else parse_fail(context, kv.line_no, "leak must be false, true or both");
                } else {
                    parse_fail(context, kv.line_no, "unknown split key '" + kv.key + "'");
                }
            }
        } else if (section.header == "output") {
            for (const auto& kv : section.entries) {
                if (kv.key == "dir") config.output_dir = kv.value;
                else parse_fail(context, kv.line_no, "unknown output key '" + kv.key + "'");
            }
        } else if (section.header.rfind("method", 0) == 0) {
            const std::string name = trim(section.header.substr(6));
            const auto id = parse_method_id(name);
            if (!id)
                parse_fail(context, section.line_no,
                           "unknown method id '" + name + "'; valid ids: " + valid_method_ids());
            MethodConfig method = default_config(*id);
            for (const auto& kv : section.entries) apply_method_key(method, kv, context);
            config.grid.methods.push_back(method);
        } else {
            parse_fail(context, section.line_no, "unknown section '" + section.header + "'");
        }
    }

    if (!saw_dataset) raise(ErrorKind::invalid_argument, context + ": missing [dataset] section");
    if (!saw_split) raise(ErrorKind::invalid_argument, context + ": missing [split] section");
    if (config.grid.methods.empty())
        raise(ErrorKind::invalid_argument, context + ": declare at least one [method <id>] section");
    if (config.grid.n_labeled.empty())
        raise(ErrorKind::invalid_argument, context + ": [split] needs an n_labeled list");
    if (config.grid.fractions.empty()) config.grid.fractions = {0.5};
    if (config.grid.seeds.empty()) config.grid.seeds = {1, 2, 3, 4, 5};
    if (config.grid.leak_flags.empty()) config.grid.leak_flags = {false};
    return config;
}

RunConfig load_run_config(const std::string& path) {
    return parse_run_config(read_lines(path), path);
}

void write_manifest(const std::string& for_path, const std::string& config_hash,
                    const std::vector<std::string>& extra_lines) {
    std::ostringstream out;
    out << "tool=eplab " << kToolVersion << "\n";
    out << "config_hash=" << config_hash << "\n";
    for (const auto& line : extra_lines) out << line << "\n";
    write_file(for_path + ".manifest", out.str());
}

namespace {

std::string render_summary(const std::vector<AggregateRow>& rows) {
    std::ostringstream out;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%-16s %9s %9s %6s %9s %9s\n", "method", "n_labeled",
                  "fraction", "leak", "map_mean", "map_std");
    out << buf;
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof(buf), "%-16s %9d %9.3f %6s %9.4f %9.4f\n",
                      method_name(r.method).c_str(), r.n_labeled, r.unlabeled_fraction,
                      r.leak ? "true" : "false", r.map_mean, r.map_std);
        out << buf;
    }
    return out.str();
}

} // namespace

std::string execute_run(const RunConfig& config, const std::string& config_bytes,
                        const std::string& out_dir_override, int jobs) {
    std::string out_dir = !out_dir_override.empty() ? out_dir_override : config.output_dir;
    if (out_dir.empty()) out_dir = ".";
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) raise(ErrorKind::io, "cannot create output directory '" + out_dir + "'");

    DescriptorSet data;
    if (config.synth) data = generate(*config.synth);
    else data = load_dataset_csv(*config.csv_path);

    const auto records = run_grid(config.grid, data, jobs);
    const auto aggregate = aggregate_records(records);
    const std::string hash = content_hash_hex(config_bytes);

    const std::string runs_path = out_dir + "/runs.csv";
    const std::string agg_path = out_dir + "/aggregate.csv";
    write_file(runs_path, records_to_csv(records));
    write_manifest(runs_path, hash);
    write_file(agg_path, aggregate_to_csv(aggregate));
    write_manifest(agg_path, hash);

    return render_summary(aggregate);
}

namespace {

struct PanelRow {
    std::string series;
    double x;
    double mean;
    double std_dev;
};

std::string panel_csv(std::vector<PanelRow> rows) {
    std::sort(rows.begin(), rows.end(), [](const PanelRow& a, const PanelRow& b) {
        return a.series != b.series ? a.series < b.series : a.x < b.x;
    });
    std::ostringstream out;
    out << "x,series,mean,std\n";
    for (const auto& r : rows)
        out << format_double(r.x) << "," << r.series << "," << format_double(r.mean) << ","
            << format_double(r.std_dev) << "\n";
    return out.str();
}

double mean_of(const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += x;
    return acc / static_cast<double>(v.size());
}

double std_of(const std::vector<double>& v, double mean) {
    if (v.size() < 2) return 0.0;
    double acc = 0.0;
    for (double x : v) acc += (x - mean) * (x - mean);
    return std::sqrt(acc / static_cast<double>(v.size() - 1));
}

} // namespace

void write_report(const std::string& results_csv_path, const std::string& figure_id,
                  const std::string& out_dir) {
    if (figure_id != "fig1" && figure_id != "fig2" && figure_id != "fig3")
        raise(ErrorKind::invalid_argument,
              "figure id must be fig1, fig2 or fig3; got '" + figure_id + "'");

    const auto records =
        records_from_csv_text(read_lines(results_csv_path), results_csv_path);
    if (records.empty())
        raise(ErrorKind::invalid_argument, results_csv_path + ": no result rows");

    std::vector<PanelRow> panel;
    if (figure_id == "fig1") {
        // Delta = MAP(leak) - MAP(clean), matched on (method, n, fraction, seed).
        std::map<std::tuple<int, int, double, std::uint64_t>, std::pair<double, double>> pairs;
        std::map<std::tuple<int, int, double, std::uint64_t>, std::pair<bool, bool>> seen;
        for (const auto& r : records) {
            const auto key = std::make_tuple(static_cast<int>(r.method), r.n_labeled,
                                             r.unlabeled_fraction, r.seed);
            if (r.leak) {
                pairs[key].first = r.map;
                seen[key].first = true;
            } else {
                pairs[key].second = r.map;
                seen[key].second = true;
            }
        }
        std::map<std::pair<std::string, double>, std::vector<double>> deltas;
        for (const auto& [key, maps] : pairs) {
            if (!seen[key].first || !seen[key].second) continue;
            const std::string series =
                method_name(static_cast<MethodId>(std::get<0>(key))) + "@" +
                std::to_string(std::get<1>(key));
            deltas[{series, std::get<2>(key)}].push_back(maps.first - maps.second);
        }
        if (deltas.empty())
            raise(ErrorKind::invalid_argument,
                  results_csv_path + ": fig1 needs matched leak=true and leak=false rows");
        for (const auto& [key, values] : deltas) {
            const double mean = mean_of(values);
            panel.push_back({key.first, key.second, mean, std_of(values, mean)});
        }
    } else if (figure_id == "fig2") {
        std::map<std::pair<std::string, int>, std::vector<double>> maps;
        std::set<double> fractions;
        for (const auto& r : records) {
            if (r.leak) continue;
            fractions.insert(r.unlabeled_fraction);
            maps[{method_name(r.method), r.n_labeled}].push_back(r.map);
        }
        if (maps.empty())
            raise(ErrorKind::invalid_argument, results_csv_path + ": fig2 needs leak=false rows");
        if (fractions.size() != 1)
            raise(ErrorKind::invalid_argument,
                  results_csv_path + ": fig2 expects a single unlabeled_fraction");
        for (const auto& [key, values] : maps) {
            const double mean = mean_of(values);
            panel.push_back(
                {key.first, static_cast<double>(key.second), mean, std_of(values, mean)});
        }
    } else {
        std::map<std::pair<std::string, double>, std::vector<double>> maps;
        for (const auto& r : records) {
            if (r.leak) continue;
            const std::string series = method_name(r.method) + "@" + std::to_string(r.n_labeled);
            maps[{series, r.unlabeled_fraction}].push_back(r.map);
        }
        if (maps.empty())
            raise(ErrorKind::invalid_argument, results_csv_path + ": fig3 needs leak=false rows");
        for (const auto& [key, values] : maps) {
            const double mean = mean_of(values);
            panel.push_back({key.first, key.second, mean, std_of(values, mean)});
        }
    }

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) raise(ErrorKind::io, "cannot create output directory '" + out_dir + "'");

    std::string results_bytes;
    for (const auto& line : read_lines(results_csv_path)) {
        results_bytes += line;
        results_bytes += '\n';
    }
    const std::string path =
        out_dir + "/" + figure_id + (figure_id == "fig1" ? "_delta.csv" : "_map.csv");
    write_file(path, panel_csv(std::move(panel)));
    write_manifest(path, content_hash_hex(results_bytes));
}

void synth_to_file(const SynthSpec& spec, const std::string& csv_path) {
    const DescriptorSet data = generate(spec);
    save_dataset_csv(data, csv_path);

    std::vector<std::string> echo;
    echo.push_back("classes=" + std::to_string(spec.class_count));
    echo.push_back("per_class=" + std::to_string(spec.samples_per_class));
    std::string dims, noise;
    for (std::size_t g = 0; g < spec.groups.size(); ++g) {
        if (g) {
            dims += ",";
            noise += ",";
        }
        dims += std::to_string(spec.groups[g].dim);
        noise += format_double(spec.groups[g].noise_scale);
    }
    echo.push_back("groups=" + dims);
    echo.push_back("noise=" + noise);
    echo.push_back("manifold_strength=" + format_double(spec.manifold_strength));
    echo.push_back("seed=" + std::to_string(spec.seed));

    std::string echo_bytes;
    for (const auto& line : echo) {
        echo_bytes += line;
        echo_bytes += '\n';
    }
    write_manifest(csv_path, content_hash_hex(echo_bytes), echo);
}

} // namespace epl
