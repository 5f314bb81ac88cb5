#include "core/synth.hpp"

#include "core/error.hpp"
#include "core/rng.hpp"

#include <cmath>

namespace epl {

void SynthSpec::validate() const {
    if (class_count < 2) raise(ErrorKind::invalid_argument, "class_count must be >= 2");
    if (samples_per_class < 4)
        raise(ErrorKind::invalid_argument, "samples_per_class must be >= 4");
    if (groups.empty()) raise(ErrorKind::invalid_argument, "need at least one group");
    for (const auto& g : groups) {
        if (g.dim < 2) raise(ErrorKind::invalid_argument, "group dimensions must be >= 2");
        if (g.noise_scale < 0.0)
            raise(ErrorKind::invalid_argument, "noise_scale must be non-negative");
    }
    if (manifold_strength < 0.0 || manifold_strength > 1.0)
        raise(ErrorKind::invalid_argument, "manifold_strength must be in [0, 1]");
}

namespace {

// Mass multiplier for the bins a class "owns" (j = class mod class_count).
// Keeps each class's curve inside its own simplex region while the anchors
// still vary within it.
constexpr double kSignatureBoost = 1.5;

// Dirichlet-style simplex draw: normalized unit-rate exponentials, sharpened
// so histograms are spiky the way real bag-of-feature descriptors are, then
// tilted toward the class's signature bins.
Eigen::VectorXd draw_prototype(Rng& rng, int dim, int class_id, int class_count) {
    Eigen::VectorXd p(dim);
    double sum = 0.0;
    for (int j = 0; j < dim; ++j) {
        const double e = rng.exponential();
        const double boost = (j % class_count == class_id) ? 1.0 + kSignatureBoost : 1.0;
        p[j] = e * e * boost;
        sum += p[j];
    }
    return p / sum;
}

} // namespace

DescriptorSet generate(const SynthSpec& spec) {
    spec.validate();
    const std::size_t n_total =
        static_cast<std::size_t>(spec.class_count) *
        static_cast<std::size_t>(spec.samples_per_class);

    DescriptorSet data;
    data.class_count = spec.class_count;
    data.labels.resize(n_total);
    data.source_ids.resize(n_total);
    for (std::size_t i = 0; i < n_total; ++i) data.source_ids[i] = i;
    for (const auto& g : spec.groups)
        data.groups.emplace_back(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_total), g.dim));

    for (int c = 0; c < spec.class_count; ++c) {
        Rng rng(derive_seed(spec.seed, static_cast<std::uint64_t>(c)));

        // Quadratic curve anchors per group: start, control, end.
        std::vector<Eigen::VectorXd> start, control, end;
        for (const auto& g : spec.groups) {
            start.push_back(draw_prototype(rng, g.dim, c, spec.class_count));
            control.push_back(draw_prototype(rng, g.dim, c, spec.class_count));
            end.push_back(draw_prototype(rng, g.dim, c, spec.class_count));
        }

        for (int s = 0; s < spec.samples_per_class; ++s) {
            const std::size_t row =
                static_cast<std::size_t>(c) * static_cast<std::size_t>(spec.samples_per_class) +
                static_cast<std::size_t>(s);
            data.labels[row] = c;

            // Shared curve position across groups keeps descriptors correlated.
            const double t = spec.manifold_strength * rng.unit();
            const double b0 = (1.0 - t) * (1.0 - t);
            const double b1 = 2.0 * t * (1.0 - t);
            const double b2 = t * t;
            // Heteroscedastic per-sample noise: most samples sit close to the
            // curve, a minority drift well off it.
            const double sample_factor = rng.unit() < 0.125 ? 3.0 : 0.75;

            for (std::size_t g = 0; g < spec.groups.size(); ++g) {
                const int dim = spec.groups[g].dim;
                Eigen::VectorXd h = b0 * start[g] + b1 * control[g] + b2 * end[g];
                // Bin noise grows with bin mass (count-statistics style), with
                // a small floor so empty bins can fill in.
                const double noise = sample_factor * spec.groups[g].noise_scale;
                for (int j = 0; j < dim; ++j) {
                    const double sd =
                        noise * (0.15 / dim + std::sqrt(std::max(h[j], 0.0) / dim));
                    h[j] = std::max(h[j] + sd * rng.normal(), 0.0);
                }
                const double sum = h.sum();
                if (sum > 1e-12) h /= sum;
                else h.setConstant(1.0 / static_cast<double>(dim));
                data.groups[g].row(static_cast<Eigen::Index>(row)) = h;
            }
        }
    }
    data.validate();
    return data;
}

} // namespace epl
