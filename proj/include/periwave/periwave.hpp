// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "periwave/analytic.hpp"
#include "periwave/config.hpp"
#include "periwave/control.hpp"
#include "periwave/evolution.hpp"
#include "periwave/field.hpp"
#include "periwave/grid.hpp"
#include "periwave/io.hpp"
#include "periwave/operators.hpp"
#include "periwave/oracle.hpp"
#include "periwave/scenario.hpp"

namespace periwave {
inline constexpr const char* kVersion = "1.0.0";
}
