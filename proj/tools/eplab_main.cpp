// eplab command line front-end. Everything goes through the C API in
// eplab.h; this file only parses arguments and maps statuses to exit codes
// (0 ok, 2 usage/config, 3 io, 4 internal).

#include "eplab.h"

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

namespace {

std::string default_out_dir() {
    const char* env = std::getenv("EPLAB_OUT_DIR");
    return env && *env ? env : ".";
}

int report_failure(eplab_status status) {
    std::fprintf(stderr, "eplab: error: %s\n", eplab_last_error());
    return static_cast<int>(status);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"eplab — semi-supervised learning laboratory"};
    app.require_subcommand(1);

    // synth
    auto* synth = app.add_subcommand("synth", "Generate a synthetic histogram dataset CSV");
    int classes = 6;
    int per_class = 100;
    std::vector<int> group_dims;
    std::vector<double> group_noise;
    double manifold = 0.8;
    std::uint64_t synth_seed = 7;
    std::string synth_out;
    synth->add_option("--classes", classes, "Number of classes")->capture_default_str();
    synth->add_option("--per-class", per_class, "Samples per class")->capture_default_str();
    synth->add_option("--groups", group_dims, "Group dimensions, e.g. 16,32")
        ->delimiter(',')
        ->required();
    synth->add_option("--noise", group_noise,
                      "Per-group noise scale (single value broadcasts)")
        ->delimiter(',');
    synth->add_option("--manifold", manifold, "Manifold strength in [0,1]")
        ->capture_default_str();
    synth->add_option("--seed", synth_seed, "Generator seed")->capture_default_str();
    synth->add_option("--out", synth_out, "Output CSV path (default <out-dir>/dataset.csv)");

    // run
    auto* run = app.add_subcommand("run", "Run the experiment grid from a config file");
    std::string config_path;
    std::string run_out;
    int jobs = 1;
    run->add_option("config", config_path, "Run config file")->required();
    run->add_option("--out", run_out, "Output directory (overrides the config)");
    run->add_option("--jobs", jobs, "Worker threads")->capture_default_str();

    // report
    auto* report = app.add_subcommand("report", "Emit plot-ready CSVs from a results CSV");
    std::string results_path;
    std::string figure = "fig1";
    std::string report_out;
    report->add_option("results", results_path, "Per-run results CSV")->required();
    report->add_option("--figure", figure, "Figure id: fig1, fig2 or fig3")
        ->capture_default_str();
    report->add_option("--out", report_out, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (synth->parsed()) {
        if (group_noise.size() == 1)
            group_noise.assign(group_dims.size(), group_noise[0]);
        if (!group_noise.empty() && group_noise.size() != group_dims.size()) {
            std::fprintf(stderr, "eplab: error: --noise must match --groups\n");
            return 2;
        }
        std::vector<std::int32_t> dims(group_dims.begin(), group_dims.end());
        eplab_synth_spec spec;
        spec.class_count = classes;
        spec.samples_per_class = per_class;
        spec.group_count = static_cast<std::int32_t>(dims.size());
        spec.group_dims = dims.data();
        spec.group_noise = group_noise.empty() ? nullptr : group_noise.data();
        spec.manifold_strength = manifold;
        spec.seed = synth_seed;

        const std::string out_path =
            !synth_out.empty() ? synth_out : default_out_dir() + "/dataset.csv";
        const eplab_status status = eplab_synth_to_csv(&spec, out_path.c_str());
        if (status != EPLAB_OK) return report_failure(status);
        std::printf("wrote %s\n", out_path.c_str());
        return 0;
    }

    if (run->parsed()) {
        const std::string out_dir = !run_out.empty() ? run_out : default_out_dir();
        char* summary = nullptr;
        const eplab_status status =
            eplab_run_config(config_path.c_str(), out_dir.c_str(), jobs, &summary);
        if (status != EPLAB_OK) return report_failure(status);
        std::printf("%s", summary);
        std::printf("results under %s\n", out_dir.c_str());
        eplab_string_free(summary);
        return 0;
    }

    const std::string out_dir = !report_out.empty() ? report_out : default_out_dir();
    const eplab_status status =
        eplab_report(results_path.c_str(), figure.c_str(), out_dir.c_str());
    if (status != EPLAB_OK) return report_failure(status);
    std::printf("wrote %s/%s_%s.csv\n", out_dir.c_str(), figure.c_str(),
                figure == "fig1" ? "delta" : "map");
    return 0;
}
