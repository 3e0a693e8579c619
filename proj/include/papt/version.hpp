// Copyright (c) 2026 the papt authors. Apache-2.0 license; see LICENSE.
#pragma once

#include <string_view>

namespace papt {

inline constexpr std::string_view kArtifactVersion = "papt-0.1.0";

}  // namespace papt
