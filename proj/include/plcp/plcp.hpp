#pragma once

#include "plcp/coverage.hpp"
#include "plcp/geometry.hpp"
#include "plcp/laws.hpp"
#include "plcp/load.hpp"
#include "plcp/montecarlo.hpp"
#include "plcp/numerics/exp_derivatives.hpp"
#include "plcp/numerics/quadrature.hpp"
#include "plcp/processes.hpp"
#include "plcp/stats.hpp"
#include "plcp/tessellation.hpp"
