#pragma once

#include "vislim/norms/besov.hpp"
#include "vislim/norms/cutoff.hpp"
#include "vislim/norms/embedding.hpp"
#include "vislim/norms/sobolev.hpp"
#include "vislim/norms/structure_function.hpp"
