#pragma once

#include "tiersim/engine.hpp"
#include "tiersim/errors.hpp"
#include "tiersim/experiments.hpp"
#include "tiersim/format.hpp"
#include "tiersim/metrics.hpp"
#include "tiersim/platform.hpp"
#include "tiersim/query_parser.hpp"
#include "tiersim/report.hpp"
#include "tiersim/schedulers.hpp"
#include "tiersim/streamops.hpp"
#include "tiersim/workload.hpp"
