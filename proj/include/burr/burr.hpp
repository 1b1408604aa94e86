#pragma once

#include "burr/bench.hpp"
#include "burr/config.hpp"
#include "burr/filter.hpp"
#include "burr/hashing.hpp"
#include "burr/layer.hpp"
#include "burr/layered_structure.hpp"
#include "burr/parallel_construction.hpp"
#include "burr/ribbon_solver.hpp"
#include "burr/serialization.hpp"
#include "burr/threshold_store.hpp"
