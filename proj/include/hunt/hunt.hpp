#pragma once

#include "hunt/bayes.hpp"
#include "hunt/bayes_io.hpp"
#include "hunt/bench.hpp"
#include "hunt/dataset.hpp"
#include "hunt/error.hpp"
#include "hunt/geometry.hpp"
#include "hunt/loglik.hpp"
#include "hunt/metrics.hpp"
#include "hunt/passive.hpp"
#include "hunt/passive_bench.hpp"
#include "hunt/planner.hpp"
#include "hunt/policies.hpp"
#include "hunt/rng.hpp"
#include "hunt/roadmap.hpp"
#include "hunt/scenario.hpp"
#include "hunt/session.hpp"
#include "hunt/sim.hpp"
#include "hunt/strategies.hpp"
#include "hunt/svg.hpp"
#include "hunt/workspace.hpp"
