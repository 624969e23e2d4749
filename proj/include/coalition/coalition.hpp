#pragma once

// Umbrella header: cooperative-game Shapley values, OLS and random-forest
// regression, model-agnostic attribution, seeded experiment generators, and
// the comparison-report plumbing.

#include "coalition/attribution.hpp"
#include "coalition/data.hpp"
#include "coalition/error.hpp"
#include "coalition/forest.hpp"
#include "coalition/game.hpp"
#include "coalition/game_io.hpp"
#include "coalition/linear.hpp"
#include "coalition/parallel.hpp"
#include "coalition/report.hpp"
#include "coalition/rng.hpp"
#include "coalition/simulation.hpp"
