// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>

namespace onebit {

/// Quick self-checks behind the `validate` CLI subcommand: kernel values
/// against quadrature, route cross-checks, permutation and reconstruction
/// identities. Prints one line per check; returns true when all pass.
bool run_validation(std::ostream& os);

}  // namespace onebit
