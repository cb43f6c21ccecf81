// SPDX-License-Identifier: Apache-2.0

// Umbrella header: the whole library in one include.

#ifndef SESSMON_SESSMON_HPP_
#define SESSMON_SESSMON_HPP_

#include "sessmon/errors.hpp"      // IWYU pragma: export
#include "sessmon/harness.hpp"     // IWYU pragma: export
#include "sessmon/lattice.hpp"     // IWYU pragma: export
#include "sessmon/parse.hpp"       // IWYU pragma: export
#include "sessmon/print.hpp"       // IWYU pragma: export
#include "sessmon/projection.hpp"  // IWYU pragma: export
#include "sessmon/scenario.hpp"    // IWYU pragma: export
#include "sessmon/semantics.hpp"   // IWYU pragma: export
#include "sessmon/syntax.hpp"      // IWYU pragma: export
#include "sessmon/trace.hpp"       // IWYU pragma: export
#include "sessmon/typing.hpp"      // IWYU pragma: export

#endif  // SESSMON_SESSMON_HPP_
