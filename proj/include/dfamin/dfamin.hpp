#pragma once

// Umbrella header for the whole library.

#include "dfamin/bench.hpp"
#include "dfamin/core.hpp"
#include "dfamin/generators.hpp"
#include "dfamin/ingest.hpp"
#include "dfamin/min_partref.hpp"
#include "dfamin/min_sort.hpp"
#include "dfamin/min_trans.hpp"
#include "dfamin/min_transpr.hpp"
#include "dfamin/substrate.hpp"
