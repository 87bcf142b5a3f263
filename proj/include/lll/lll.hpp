#pragma once

// Umbrella include for the whole library.

#include "lll/errors.hpp"
#include "lll/generate.hpp"
#include "lll/geometry.hpp"
#include "lll/instance.hpp"
#include "lll/local_sim.hpp"
#include "lll/oracle.hpp"
#include "lll/pstar.hpp"
#include "lll/rational.hpp"
#include "lll/report.hpp"
#include "lll/rng.hpp"
