#pragma once

#include "splitsys/types.hpp"
#include "splitsys/geometry.hpp"
#include "splitsys/core.hpp"
#include "splitsys/linesearch.hpp"
#include "splitsys/solver.hpp"
#include "splitsys/problems.hpp"
#include "splitsys/bench.hpp"
