#pragma once

// Umbrella header.

#include "maxstein/bounds.hpp"
#include "maxstein/common.hpp"
#include "maxstein/csv.hpp"
#include "maxstein/frechet.hpp"
#include "maxstein/kstest.hpp"
#include "maxstein/lepage.hpp"
#include "maxstein/measures.hpp"
#include "maxstein/metrics.hpp"
#include "maxstein/parallel.hpp"
#include "maxstein/quadrature.hpp"
#include "maxstein/ratelab.hpp"
#include "maxstein/rng.hpp"
#include "maxstein/sampling.hpp"
#include "maxstein/semigroup.hpp"
#include "maxstein/stein.hpp"
#include "maxstein/testfunctions.hpp"
