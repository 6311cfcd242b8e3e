// SPDX-License-Identifier: Apache-2.0
//
// Umbrella header for the seirs-spde library.
#pragma once

#include "seirs/analysis.hpp"
#include "seirs/config.hpp"
#include "seirs/convergence.hpp"
#include "seirs/csv.hpp"
#include "seirs/ensemble.hpp"
#include "seirs/expression.hpp"
#include "seirs/field.hpp"
#include "seirs/integrator.hpp"
#include "seirs/manifest.hpp"
#include "seirs/model.hpp"
#include "seirs/noise.hpp"
#include "seirs/picard.hpp"
#include "seirs/rng.hpp"
#include "seirs/runner.hpp"
#include "seirs/spectral.hpp"
#include "seirs/util.hpp"
#include "seirs/version.hpp"
