#pragma once

#include "ela/auction_model.hpp"
#include "ela/bfgs.hpp"
#include "ela/censored_mle.hpp"
#include "ela/config.hpp"
#include "ela/csv.hpp"
#include "ela/dist.hpp"
#include "ela/error.hpp"
#include "ela/fit_io.hpp"
#include "ela/log.hpp"
#include "ela/market_data.hpp"
#include "ela/pipeline.hpp"
#include "ela/report.hpp"
#include "ela/simulator.hpp"
#include "ela/subsample.hpp"
#include "ela/types.hpp"
#include "ela/vol_estimators.hpp"
