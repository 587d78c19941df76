#pragma once

// Umbrella header for the CW-DGC BD-RIS simulator library.

#include "bdris/channel.hpp"
#include "bdris/config.hpp"
#include "bdris/grouping.hpp"
#include "bdris/harness.hpp"
#include "bdris/manifold.hpp"
#include "bdris/matrix_io.hpp"
#include "bdris/rng.hpp"
#include "bdris/solver.hpp"
#include "bdris/surface.hpp"
