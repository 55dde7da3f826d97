#pragma once

// Umbrella header.

#include "maglev/config.hpp"
#include "maglev/core_model.hpp"
#include "maglev/csv.hpp"
#include "maglev/diagnostics.hpp"
#include "maglev/errors.hpp"
#include "maglev/integrator.hpp"
#include "maglev/ms_common.hpp"
#include "maglev/ms_internal.hpp"
#include "maglev/ms_primary.hpp"
#include "maglev/parallel.hpp"
#include "maglev/stability.hpp"
#include "maglev/svg.hpp"
#include "maglev/sweeps.hpp"
