#pragma once

#include "autometric/analysis.hpp"
#include "autometric/architecture.hpp"
#include "autometric/config.hpp"
#include "autometric/error.hpp"
#include "autometric/fuzzy_system.hpp"
#include "autometric/membership.hpp"
#include "autometric/nnge.hpp"
#include "autometric/simulation.hpp"
#include "autometric/version.hpp"
