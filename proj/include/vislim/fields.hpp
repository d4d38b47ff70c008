#pragma once

#include "vislim/error.hpp"
#include "vislim/fields/domain.hpp"
#include "vislim/fields/fft.hpp"
#include "vislim/fields/field.hpp"
#include "vislim/fields/operators.hpp"
#include "vislim/fields/poisson.hpp"
