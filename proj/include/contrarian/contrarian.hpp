#pragma once

#include "contrarian/error.hpp"
#include "contrarian/month.hpp"
#include "contrarian/panel.hpp"
#include "contrarian/report.hpp"
#include "contrarian/returns.hpp"
#include "contrarian/stats.hpp"
#include "contrarian/strategy.hpp"
#include "contrarian/sweep.hpp"
#include "contrarian/synth.hpp"
