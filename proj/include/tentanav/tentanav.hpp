#pragma once

#include "tentanav/bench.hpp"
#include "tentanav/geometry.hpp"
#include "tentanav/grid.hpp"
#include "tentanav/heuristics.hpp"
#include "tentanav/io.hpp"
#include "tentanav/navigator.hpp"
#include "tentanav/params.hpp"
#include "tentanav/sim.hpp"
#include "tentanav/tentacles.hpp"
