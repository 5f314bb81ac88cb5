#pragma once

#include "core/dataset.hpp"

#include <cstdint>
#include <vector>

namespace epl {

struct GroupSpec {
    int dim = 8;
    double noise_scale = 0.05;
};

/// Seeded generator spec for multi-descriptor histogram data. Group 0 plays
/// the designated regularization-group role in graph-based methods.
struct SynthSpec {
    int class_count = 2;
    int samples_per_class = 4;
    std::vector<GroupSpec> groups;
    double manifold_strength = 0.0; // 0 = isotropic clusters, 1 = full class curve
    std::uint64_t seed = 0;

    void validate() const;
};

/// Per class and group, draws prototype histograms and a class-specific
/// quadratic curve through the simplex; each sample sits at a position along
/// the curve scaled by manifold_strength, plus isotropic noise, clamped at 0
/// and renormalized to unit sum. Pure function of the spec.
DescriptorSet generate(const SynthSpec& spec);

} // namespace epl
