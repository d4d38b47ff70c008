#pragma once

#include "vislim/fields.hpp"
#include "vislim/solver/basis.hpp"
#include "vislim/solver/forcing.hpp"
#include "vislim/solver/initial.hpp"
#include "vislim/solver/ledger.hpp"
#include "vislim/solver/run.hpp"
#include "vislim/solver/stepper.hpp"
