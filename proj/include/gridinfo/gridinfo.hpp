#pragma once

// Umbrella header: pulls in the full toolkit.

#include "gridinfo/channel.hpp"
#include "gridinfo/check.hpp"
#include "gridinfo/config.hpp"
#include "gridinfo/density.hpp"
#include "gridinfo/distribution.hpp"
#include "gridinfo/errors.hpp"
#include "gridinfo/extrapolate.hpp"
#include "gridinfo/fft.hpp"
#include "gridinfo/grid.hpp"
#include "gridinfo/harness.hpp"
#include "gridinfo/joint.hpp"
#include "gridinfo/mutual_information.hpp"
#include "gridinfo/quadrature.hpp"
#include "gridinfo/report.hpp"
#include "gridinfo/rng.hpp"
#include "gridinfo/runner.hpp"
#include "gridinfo/score.hpp"
#include "gridinfo/version.hpp"
