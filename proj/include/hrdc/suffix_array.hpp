#pragma once

// SA-IS suffix array construction.

#include <cstdint>
#include <span>
#include <vector>

namespace hrdc {

// `s` holds values in [0, alphabet) and must end with a unique 0 sentinel.
std::vector<std::int32_t> suffix_array(std::span<const std::int32_t> s, std::int32_t alphabet);

}  // namespace hrdc
