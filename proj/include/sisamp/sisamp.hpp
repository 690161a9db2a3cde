#pragma once

// Umbrella header for the library modules (the CLI layer lives in sisamp/cli).

#include "sisamp/common.hpp"
#include "sisamp/polyrat.hpp"
#include "sisamp/generator.hpp"
#include "sisamp/sets.hpp"
#include "sisamp/spectral.hpp"
#include "sisamp/synthesis.hpp"
#include "sisamp/frames.hpp"
#include "sisamp/counterexample.hpp"
