#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "propsel/csp.hpp"

namespace propsel {

enum class Family { PigeonHole, LatinSquare, GraphColouring, RandomBinaryDiseq, RandomTable };

const char* to_string(Family f);
std::optional<Family> family_from_string(std::string_view s);

// Size bounds per family, inclusive.
struct FamilyBounds {
    int min_size;
    int max_size;
};
FamilyBounds family_bounds(Family f);

// Deterministic for a fixed (family, size, seed) triple.
// Throws std::invalid_argument when size is out of range.
CspInstance generate_instance(Family f, int size, uint64_t seed);

}  // namespace propsel
