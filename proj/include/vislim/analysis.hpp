#pragma once

#include "vislim/analysis/anomaly.hpp"
#include "vislim/analysis/bank.hpp"
#include "vislim/analysis/equivalence.hpp"
#include "vislim/analysis/sweep.hpp"
#include "vislim/analysis/zeta.hpp"
