#pragma once

#include <iosfwd>

#include "beamrl/mlp.hpp"
#include "beamrl/optim.hpp"

namespace beamrl {

// Binary network records, little-endian, layout documented in the README.
// Round trips are bit-exact: doubles are written raw.

void write_mlp(std::ostream& out, const Mlp& net);
Mlp read_mlp(std::istream& in);

void write_adam_state(std::ostream& out, const AdamState& state);
AdamState read_adam_state(std::istream& in, const Mlp& shapes);

}  // namespace beamrl
