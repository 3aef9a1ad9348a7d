#pragma once

#include "branching.hpp"
#include "flory.hpp"
#include "graphsim.hpp"
#include "measures.hpp"
#include "model_io.hpp"
#include "numeric.hpp"
#include "rates.hpp"
#include "solvers.hpp"
#include "trees.hpp"
#include "types.hpp"
#include "verify.hpp"
