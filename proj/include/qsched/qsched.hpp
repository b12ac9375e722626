#pragma once

#include "qsched/baselines.hpp"
#include "qsched/errors.hpp"
#include "qsched/format.hpp"
#include "qsched/harness.hpp"
#include "qsched/qagent.hpp"
#include "qsched/rng.hpp"
#include "qsched/sim.hpp"
#include "qsched/workload.hpp"
