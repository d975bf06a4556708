#pragma once

#include "immunet/analytic.hpp"
#include "immunet/components.hpp"
#include "immunet/degree_dist.hpp"
#include "immunet/error.hpp"
#include "immunet/graph_gen.hpp"
#include "immunet/heuristics.hpp"
#include "immunet/plot.hpp"
#include "immunet/report_io.hpp"
#include "immunet/rng.hpp"
#include "immunet/simulate.hpp"
