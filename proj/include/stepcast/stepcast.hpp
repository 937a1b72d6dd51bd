#pragma once

#include "stepcast/abc.hpp"
#include "stepcast/ar_gibbs.hpp"
#include "stepcast/date.hpp"
#include "stepcast/error.hpp"
#include "stepcast/evaluate.hpp"
#include "stepcast/forecast.hpp"
#include "stepcast/intersect.hpp"
#include "stepcast/json_io.hpp"
#include "stepcast/market.hpp"
#include "stepcast/particles.hpp"
#include "stepcast/rng.hpp"
#include "stepcast/run_config.hpp"
#include "stepcast/service.hpp"
#include "stepcast/step_curve.hpp"
#include "stepcast/summaries.hpp"
#include "stepcast/synthetic.hpp"
