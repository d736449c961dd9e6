#pragma once

// Core headers.  JSON potential specs, reports and the scoreboard live in
// potential_spec.hpp, report.hpp and scoreboard.hpp (they need json.hpp).

#include "latvar/lattice.hpp"
#include "latvar/parallel.hpp"
#include "latvar/spectrum.hpp"
#include "latvar/families.hpp"
#include "latvar/oscillation.hpp"
#include "latvar/variational.hpp"
#include "latvar/greens.hpp"
#include "latvar/theorems.hpp"
