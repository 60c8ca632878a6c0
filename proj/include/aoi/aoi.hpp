#pragma once

#include "aoi/bounds.hpp"
#include "aoi/config.hpp"
#include "aoi/distribution.hpp"
#include "aoi/dynamics.hpp"
#include "aoi/errors.hpp"
#include "aoi/harness.hpp"
#include "aoi/metrics.hpp"
#include "aoi/policy.hpp"
#include "aoi/process.hpp"
#include "aoi/random.hpp"
#include "aoi/simulation.hpp"
#include "aoi/state.hpp"
#include "aoi/trajectory.hpp"
