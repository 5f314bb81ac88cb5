#include "core/dataset.hpp"

#include "core/csv.hpp"
#include "core/error.hpp"
#include "core/rng.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace epl {

std::size_t DescriptorSet::total_dim() const {
    std::size_t dim = 0;
    for (const auto& g : groups) dim += static_cast<std::size_t>(g.cols());
    return dim;
}

Eigen::VectorXd DescriptorSet::concat_row(std::size_t i) const {
    Eigen::VectorXd row(static_cast<Eigen::Index>(total_dim()));
    Eigen::Index offset = 0;
    for (const auto& g : groups) {
        row.segment(offset, g.cols()) = g.row(static_cast<Eigen::Index>(i));
        offset += g.cols();
    }
    return row;
}

Eigen::MatrixXd DescriptorSet::concat_all() const {
    Eigen::MatrixXd all(static_cast<Eigen::Index>(n_samples()),
                        static_cast<Eigen::Index>(total_dim()));
    Eigen::Index offset = 0;
    for (const auto& g : groups) {
        all.middleCols(offset, g.cols()) = g;
        offset += g.cols();
    }
    return all;
}

void DescriptorSet::validate(bool require_all_classes) const {
    if (groups.empty()) raise(ErrorKind::invalid_argument, "descriptor set has no groups");
    if (class_count < 1) raise(ErrorKind::invalid_argument, "class_count must be positive");
    const auto n = static_cast<Eigen::Index>(n_samples());
    for (std::size_t g = 0; g < groups.size(); ++g) {
        if (groups[g].rows() != n)
            raise(ErrorKind::dimension_mismatch,
                  "group " + std::to_string(g) + " has " + std::to_string(groups[g].rows()) +
                      " rows, expected " + std::to_string(n));
        if ((groups[g].array() < 0.0).any() || !groups[g].allFinite())
            raise(ErrorKind::domain,
                  "group " + std::to_string(g) + " contains negative or non-finite values");
    }
    if (source_ids.size() != labels.size())
        raise(ErrorKind::invariant, "source_ids size does not match labels");
    std::vector<bool> seen(static_cast<std::size_t>(class_count), false);
    for (int label : labels) {
        if (label < 0 || label >= class_count)
            raise(ErrorKind::domain, "label " + std::to_string(label) + " outside [0, " +
                                         std::to_string(class_count) + ")");
        seen[static_cast<std::size_t>(label)] = true;
    }
    if (require_all_classes) {
        for (int c = 0; c < class_count; ++c)
            if (!seen[static_cast<std::size_t>(c)])
                raise(ErrorKind::degenerate_labels,
                      "class " + std::to_string(c) + " has no samples");
    }
}

SplitPlan make_split(const DescriptorSet& data, int n_labeled_per_class,
                     double unlabeled_fraction, bool leak, std::uint64_t seed) {
    if (n_labeled_per_class < 1)
        raise(ErrorKind::invalid_argument, "n_labeled_per_class must be >= 1");
    if (!(unlabeled_fraction > 0.0) || unlabeled_fraction > 1.0)
        raise(ErrorKind::invalid_argument, "unlabeled_fraction must be in (0, 1]");

    // Per-class id lists in ascending class id, ascending sample id order.
    std::vector<std::vector<std::size_t>> by_class(static_cast<std::size_t>(data.class_count));
    for (std::size_t i = 0; i < data.n_samples(); ++i)
        by_class[static_cast<std::size_t>(data.labels[i])].push_back(i);

    Rng rng(seed);
    SplitPlan plan;
    plan.leak_test_into_train = leak;
    plan.seed = seed;
    plan.n_labeled_per_class = n_labeled_per_class;
    plan.unlabeled_fraction = unlabeled_fraction;

    for (int c = 0; c < data.class_count; ++c) {
        auto& ids = by_class[static_cast<std::size_t>(c)];
        if (ids.size() <= static_cast<std::size_t>(n_labeled_per_class))
            raise(ErrorKind::insufficient_data,
                  "class " + std::to_string(c) + " has " + std::to_string(ids.size()) +
                      " samples, need more than " + std::to_string(n_labeled_per_class));
        rng.shuffle(ids);

        const std::size_t pool = ids.size() - static_cast<std::size_t>(n_labeled_per_class);
        if (pool < 2)
            raise(ErrorKind::degenerate_split,
                  "class " + std::to_string(c) + " cannot fill both unlabeled-train and test");
        // floor(fraction * pool), clamped so both unlabeled-train and test
        // keep at least one id per class.
        std::size_t n_unlabeled =
            static_cast<std::size_t>(std::floor(unlabeled_fraction * static_cast<double>(pool)));
        n_unlabeled = std::clamp<std::size_t>(n_unlabeled, 1, pool - 1);

        std::size_t k = 0;
        for (; k < static_cast<std::size_t>(n_labeled_per_class); ++k)
            plan.labeled.push_back(ids[k]);
        for (; k < static_cast<std::size_t>(n_labeled_per_class) + n_unlabeled; ++k)
            plan.unlabeled_train.push_back(ids[k]);
        for (; k < ids.size(); ++k)
            plan.test.push_back(ids[k]);
    }

    if (plan.test.empty()) raise(ErrorKind::degenerate_split, "split produced an empty test set");

    if (leak)
        plan.unlabeled_train.insert(plan.unlabeled_train.end(), plan.test.begin(),
                                    plan.test.end());

    std::sort(plan.labeled.begin(), plan.labeled.end());
    std::sort(plan.unlabeled_train.begin(), plan.unlabeled_train.end());
    std::sort(plan.test.begin(), plan.test.end());
    return plan;
}

bool assert_no_leak(const SplitPlan& plan) {
    std::set<std::size_t> train(plan.labeled.begin(), plan.labeled.end());
    train.insert(plan.unlabeled_train.begin(), plan.unlabeled_train.end());
    for (std::size_t id : plan.test)
        if (train.count(id)) return false;
    return true;
}

DescriptorSet restrict(const DescriptorSet& data, std::vector<std::size_t> ids) {
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    for (std::size_t id : ids)
        if (id >= data.n_samples())
            raise(ErrorKind::invalid_argument,
                  "row index " + std::to_string(id) + " out of range");

    DescriptorSet view;
    view.class_count = data.class_count;
    view.labels.reserve(ids.size());
    view.source_ids.reserve(ids.size());
    for (std::size_t id : ids) {
        view.labels.push_back(data.labels[id]);
        view.source_ids.push_back(data.source_ids.empty() ? id : data.source_ids[id]);
    }
    view.groups.reserve(data.groups.size());
    for (const auto& g : data.groups) {
        Eigen::MatrixXd sub(static_cast<Eigen::Index>(ids.size()), g.cols());
        for (std::size_t r = 0; r < ids.size(); ++r)
            sub.row(static_cast<Eigen::Index>(r)) = g.row(static_cast<Eigen::Index>(ids[r]));
        view.groups.push_back(std::move(sub));
    }
    return view;
}

void save_dataset_csv(const DescriptorSet& data, const std::string& path) {
    std::ostringstream out;
    out << "id,label";
    for (std::size_t g = 0; g < data.groups.size(); ++g)
        for (Eigen::Index j = 0; j < data.groups[g].cols(); ++j)
            out << ",g" << g << "_" << j;
    out << "\n";
    for (std::size_t i = 0; i < data.n_samples(); ++i) {
        out << i << "," << data.labels[i];
        for (const auto& g : data.groups)
            for (Eigen::Index j = 0; j < g.cols(); ++j)
                out << "," << format_double(g(static_cast<Eigen::Index>(i), j));
        out << "\n";
    }
    write_file(path, out.str());
}

DescriptorSet load_dataset_csv(const std::string& path) {
    const auto lines = read_lines(path);
    if (lines.empty()) raise(ErrorKind::io, path + ": empty dataset file");

    const auto header = split_csv_line(lines[0]);
    if (header.size() < 3 || header[0] != "id" || header[1] != "label")
        raise(ErrorKind::io, path + ": expected header starting with 'id,label,g0_0'");

    // Infer group dimensions from g<k>_<j> column names.
    std::vector<Eigen::Index> dims;
    for (std::size_t c = 2; c < header.size(); ++c) {
        const auto& name = header[c];
        const auto underscore = name.find('_');
        if (name.size() < 4 || name[0] != 'g' || underscore == std::string::npos)
            raise(ErrorKind::io, path + ": bad feature column '" + name + "'");
        const auto k = parse_uint(name.substr(1, underscore - 1), path);
        const auto j = parse_uint(name.substr(underscore + 1), path);
        if (k != dims.size() && k != dims.size() - 1)
            raise(ErrorKind::io, path + ": feature columns out of order at '" + name + "'");
        if (k == dims.size()) dims.push_back(0);
        if (static_cast<Eigen::Index>(j) != dims[k])
            raise(ErrorKind::io, path + ": feature columns out of order at '" + name + "'");
        ++dims[k];
    }
    if (dims.empty()) raise(ErrorKind::io, path + ": no feature columns");

    const std::size_t n = lines.size() - 1;
    DescriptorSet data;
    for (Eigen::Index d : dims) data.groups.emplace_back(static_cast<Eigen::Index>(n), d);
    data.labels.resize(n);
    data.source_ids.resize(n);

    int max_label = -1;
    for (std::size_t i = 0; i < n; ++i) {
        const auto fields = split_csv_line(lines[i + 1]);
        if (fields.size() != header.size())
            raise(ErrorKind::io, path + ": row " + std::to_string(i + 2) + " has " +
                                     std::to_string(fields.size()) + " fields, expected " +
                                     std::to_string(header.size()));
        data.source_ids[i] = parse_uint(fields[0], path);
        const auto label = parse_double(fields[1], path);
        data.labels[i] = static_cast<int>(label);
        max_label = std::max(max_label, data.labels[i]);
        std::size_t c = 2;
        for (std::size_t g = 0; g < dims.size(); ++g)
            for (Eigen::Index j = 0; j < dims[g]; ++j, ++c)
                data.groups[g](static_cast<Eigen::Index>(i), j) = parse_double(fields[c], path);
    }
    data.class_count = max_label + 1;
    data.validate();
    return data;
}

void save_split_csv(const SplitPlan& plan, const std::string& path) {
    // Rows sorted by id; under a leak plan test ids also sit in
    // unlabeled_train, and are reported with their test role.
    std::vector<std::pair<std::size_t, const char*>> rows;
    std::set<std::size_t> test_ids(plan.test.begin(), plan.test.end());
    for (std::size_t id : plan.labeled) rows.emplace_back(id, "labeled");
    for (std::size_t id : plan.unlabeled_train)
        if (!test_ids.count(id)) rows.emplace_back(id, "unlabeled");
    for (std::size_t id : plan.test) rows.emplace_back(id, "test");
    std::sort(rows.begin(), rows.end());

    std::ostringstream out;
    out << "id,role\n";
    for (const auto& [id, role] : rows) out << id << "," << role << "\n";
    write_file(path, out.str());
}

} // namespace epl
