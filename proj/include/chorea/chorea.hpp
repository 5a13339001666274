#pragma once

#include "chorea/common.hpp"
#include "chorea/nbody.hpp"
#include "chorea/symmetry.hpp"
#include "chorea/loop.hpp"
#include "chorea/topology.hpp"
#include "chorea/ngon.hpp"
#include "chorea/rearrange.hpp"
#include "chorea/action.hpp"
#include "chorea/integrate.hpp"
#include "chorea/deform.hpp"
#include "chorea/solver.hpp"
#include "chorea/continuation.hpp"
#include "chorea/diagnostics.hpp"
