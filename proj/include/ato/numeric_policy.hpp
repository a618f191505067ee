// numeric_policy.hpp: Centralized tolerances shared by every module

#pragma once

#include <cstddef>

namespace ato {

struct NumericPolicy {
    double structural{1e-12};       // Hermiticity, trace, unitarity (max-entry)
    double spectral_grouping{1e-9}; // equal-energy grouping, Bohr checks
    double psd_floor{1e-10};        // minimum eigenvalue accepted for a state
    double commutator{1e-10};       // |U H_T - H_T U| for conserving unitaries
    std::size_t max_composite_dim{4096};
};

inline constexpr NumericPolicy default_policy{};

} // namespace ato
