#pragma once

#include "nlb/calculus.hpp"
#include "nlb/coupling.hpp"
#include "nlb/diagnostics.hpp"
#include "nlb/error.hpp"
#include "nlb/grid.hpp"
#include "nlb/initial_condition.hpp"
#include "nlb/interpolation.hpp"
#include "nlb/oracle.hpp"
#include "nlb/picard.hpp"
#include "nlb/solver.hpp"
#include "nlb/spectral.hpp"
