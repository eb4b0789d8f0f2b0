#pragma once

#include "rangeagg/aggregation_tree.hpp"
#include "rangeagg/aifp_engine.hpp"
#include "rangeagg/ameb_engine.hpp"
#include "rangeagg/bd_index.hpp"
#include "rangeagg/constrained_aifp.hpp"
#include "rangeagg/core.hpp"
#include "rangeagg/datasets.hpp"
#include "rangeagg/io.hpp"
#include "rangeagg/oracle.hpp"
#include "rangeagg/range_cover.hpp"
#include "rangeagg/stable_lsh.hpp"
#include "rangeagg/workload.hpp"
