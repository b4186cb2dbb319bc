#pragma once

#include "tvme/armodel.hpp"
#include "tvme/constancy.hpp"
#include "tvme/efficiency.hpp"
#include "tvme/pipeline.hpp"
#include "tvme/rng.hpp"
#include "tvme/series.hpp"
#include "tvme/simlab.hpp"
#include "tvme/stationarity.hpp"
#include "tvme/tvar.hpp"
#include "tvme/version.hpp"
