#pragma once

// Umbrella header: the whole library except the JSON config loader
// (include config_io.hpp separately to avoid the JSON dependency where
// it is not needed).

#include "csv.hpp"
#include "divergences.hpp"
#include "experiment.hpp"
#include "generators.hpp"
#include "multinomial.hpp"
#include "risk.hpp"
#include "rng.hpp"
#include "slope.hpp"
#include "subset_select.hpp"
#include "types.hpp"
