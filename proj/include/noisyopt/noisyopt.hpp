#pragma once

#include "algorithms.hpp"
#include "budget.hpp"
#include "errors.hpp"
#include "experiment.hpp"
#include "genotype.hpp"
#include "harness.hpp"
#include "io.hpp"
#include "problems.hpp"
#include "random.hpp"
#include "stats.hpp"
#include "trial_result.hpp"
