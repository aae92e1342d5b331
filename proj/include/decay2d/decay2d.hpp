#pragma once

#include "decay2d/error.hpp"
#include "decay2d/grid.hpp"
#include "decay2d/core.hpp"
#include "decay2d/solver.hpp"
#include "decay2d/diagnostics.hpp"
#include "decay2d/inequalities.hpp"
#include "decay2d/kernel_oracle.hpp"
#include "decay2d/scattering.hpp"
#include "decay2d/run.hpp"
#include "decay2d/io.hpp"
#include "decay2d/config.hpp"
#include "decay2d/experiments.hpp"
#include "decay2d/presets.hpp"
