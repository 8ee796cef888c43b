#pragma once

#include "pairs/backtest.hpp"
#include "pairs/cointegration.hpp"
#include "pairs/config.hpp"
#include "pairs/critical_values.hpp"
#include "pairs/error.hpp"
#include "pairs/fusion.hpp"
#include "pairs/macro_signals.hpp"
#include "pairs/market_data.hpp"
#include "pairs/pipeline.hpp"
#include "pairs/report.hpp"
#include "pairs/scan.hpp"
#include "pairs/series.hpp"
#include "pairs/spread.hpp"
#include "pairs/unit_root.hpp"
