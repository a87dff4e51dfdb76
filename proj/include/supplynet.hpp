#pragma once

#include "supplynet/errors.hpp"
#include "supplynet/random.hpp"
#include "supplynet/network.hpp"
#include "supplynet/branching.hpp"
#include "supplynet/generators.hpp"
#include "supplynet/percolation.hpp"
#include "supplynet/estimator.hpp"
#include "supplynet/bounds.hpp"
#include "supplynet/contagion.hpp"
#include "supplynet/interventions.hpp"
#include "supplynet/io.hpp"
#include "supplynet/experiment.hpp"
