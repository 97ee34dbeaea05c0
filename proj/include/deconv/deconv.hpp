#pragma once

#include "bandwidth.hpp"
#include "config.hpp"
#include "empirical.hpp"
#include "estimators.hpp"
#include "freq_grid.hpp"
#include "models.hpp"
#include "rates.hpp"
#include "risk.hpp"
#include "runner.hpp"
