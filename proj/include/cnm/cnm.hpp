#pragma once

#include "cnm/causality.hpp"
#include "cnm/config.hpp"
#include "cnm/csv.hpp"
#include "cnm/error.hpp"
#include "cnm/grouping.hpp"
#include "cnm/markers.hpp"
#include "cnm/models/genetic.hpp"
#include "cnm/models/linear_oracle.hpp"
#include "cnm/models/mutualistic.hpp"
#include "cnm/models/turing.hpp"
#include "cnm/parallel.hpp"
#include "cnm/sde.hpp"
#include "cnm/series.hpp"
#include "cnm/svg.hpp"
#include "cnm/sweep.hpp"
