#include "eplab.h"

#include "core/csv.hpp"
#include "core/dataset.hpp"
#include "core/error.hpp"
#include "core/run_config.hpp"
#include "core/synth.hpp"

#include <cstring>
#include <exception>
#include <new>
#include <string>

struct eplab_dataset {
    epl::DescriptorSet data;
};

namespace {

thread_local std::string g_last_error;

eplab_status status_of(epl::ErrorKind kind) {
    switch (kind) {
        case epl::ErrorKind::io:
            return EPLAB_ERROR_IO;
        case epl::ErrorKind::invariant:
        case epl::ErrorKind::numerical:
            return EPLAB_ERROR_INTERNAL;
        default:
            return EPLAB_ERROR_USAGE;
    }
}

template <typename Fn>
eplab_status guarded(Fn&& fn) {
    try {
        fn();
        g_last_error.clear();
        return EPLAB_OK;
    } catch (const epl::Error& e) {
        g_last_error = e.what();
        return status_of(e.kind());
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return EPLAB_ERROR_INTERNAL;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return EPLAB_ERROR_INTERNAL;
    }
}

eplab_status fail_usage(const char* message) {
    g_last_error = message;
    return EPLAB_ERROR_USAGE;
}

} // namespace

extern "C" {

const char* eplab_version(void) { return epl::kToolVersion; }

const char* eplab_last_error(void) { return g_last_error.c_str(); }

namespace {

epl::SynthSpec to_cxx_spec(const eplab_synth_spec* spec) {
    epl::SynthSpec cxx_spec;
    cxx_spec.class_count = spec->class_count;
    cxx_spec.samples_per_class = spec->samples_per_class;
    cxx_spec.manifold_strength = spec->manifold_strength;
    cxx_spec.seed = spec->seed;
    for (int32_t g = 0; g < spec->group_count; ++g)
        cxx_spec.groups.push_back(
            {spec->group_dims[g], spec->group_noise ? spec->group_noise[g] : 0.05});
    return cxx_spec;
}

} // namespace

eplab_status eplab_dataset_synth(const eplab_synth_spec* spec, eplab_dataset** out) {
    if (!spec || !out) return fail_usage("eplab_dataset_synth: null argument");
    if (spec->group_count < 1 || !spec->group_dims)
        return fail_usage("eplab_dataset_synth: need group_count >= 1 with group_dims");
    *out = nullptr;
    return guarded([&]() { *out = new eplab_dataset{epl::generate(to_cxx_spec(spec))}; });
}

eplab_status eplab_synth_to_csv(const eplab_synth_spec* spec, const char* path) {
    if (!spec || !path) return fail_usage("eplab_synth_to_csv: null argument");
    if (spec->group_count < 1 || !spec->group_dims)
        return fail_usage("eplab_synth_to_csv: need group_count >= 1 with group_dims");
    return guarded([&]() { epl::synth_to_file(to_cxx_spec(spec), path); });
}

eplab_status eplab_dataset_load_csv(const char* path, eplab_dataset** out) {
    if (!path || !out) return fail_usage("eplab_dataset_load_csv: null argument");
    *out = nullptr;
    return guarded([&]() { *out = new eplab_dataset{epl::load_dataset_csv(path)}; });
}

eplab_status eplab_dataset_save_csv(const eplab_dataset* data, const char* path) {
    if (!data || !path) return fail_usage("eplab_dataset_save_csv: null argument");
    return guarded([&]() {
        epl::save_dataset_csv(data->data, path);
        // Checksum of the written bytes; synth_to_file hashes the spec instead.
        std::string bytes;
        for (const auto& line : epl::read_lines(path)) {
            bytes += line;
            bytes += '\n';
        }
        epl::write_manifest(path, epl::content_hash_hex(bytes),
                            {"samples=" + std::to_string(data->data.n_samples()),
                             "classes=" + std::to_string(data->data.class_count),
                             "groups=" + std::to_string(data->data.group_count())});
    });
}

void eplab_dataset_free(eplab_dataset* data) { delete data; }

int64_t eplab_dataset_samples(const eplab_dataset* data) {
    return data ? static_cast<int64_t>(data->data.n_samples()) : -1;
}

int64_t eplab_dataset_classes(const eplab_dataset* data) {
    return data ? data->data.class_count : -1;
}

int64_t eplab_dataset_groups(const eplab_dataset* data) {
    return data ? static_cast<int64_t>(data->data.group_count()) : -1;
}

eplab_status eplab_dataset_split_csv(const eplab_dataset* data, int32_t n_labeled_per_class,
                                     double unlabeled_fraction, int32_t leak, uint64_t seed,
                                     const char* path) {
    if (!data || !path) return fail_usage("eplab_dataset_split_csv: null argument");
    return guarded([&]() {
        const epl::SplitPlan plan = epl::make_split(data->data, n_labeled_per_class,
                                                    unlabeled_fraction, leak != 0, seed);
        epl::save_split_csv(plan, path);
    });
}

eplab_status eplab_run_config(const char* config_path, const char* out_dir, int32_t jobs,
                              char** summary_out) {
    if (!config_path) return fail_usage("eplab_run_config: null config path");
    if (summary_out) *summary_out = nullptr;
    return guarded([&]() {
        const auto lines = epl::read_lines(config_path);
        std::string bytes;
        for (const auto& line : lines) {
            bytes += line;
            bytes += '\n';
        }
        const epl::RunConfig config = epl::parse_run_config(lines, config_path);
        const std::string summary = epl::execute_run(
            config, bytes, out_dir ? std::string(out_dir) : std::string(),
            jobs > 0 ? jobs : 1);
        if (summary_out) {
            *summary_out = new char[summary.size() + 1];
            std::memcpy(*summary_out, summary.c_str(), summary.size() + 1);
        }
    });
}

eplab_status eplab_report(const char* results_csv, const char* figure_id,
                          const char* out_dir) {
    if (!results_csv || !figure_id || !out_dir)
        return fail_usage("eplab_report: null argument");
    return guarded([&]() { epl::write_report(results_csv, figure_id, out_dir); });
}

void eplab_string_free(char* s) { delete[] s; }

} // extern "C"
