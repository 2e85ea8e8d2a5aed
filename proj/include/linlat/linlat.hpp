#pragma once

#include "linlat/constraints.hpp"
#include "linlat/engine.hpp"
#include "linlat/error.hpp"
#include "linlat/lattice.hpp"
#include "linlat/phase.hpp"
#include "linlat/planner.hpp"
#include "linlat/product.hpp"
#include "linlat/scenario.hpp"
#include "linlat/solver.hpp"
#include "linlat/verify.hpp"
