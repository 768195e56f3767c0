#pragma once

#include "ahlfors/cubes.hpp"
#include "ahlfors/error.hpp"
#include "ahlfors/graph.hpp"
#include "ahlfors/metric.hpp"
#include "ahlfors/nets.hpp"
#include "ahlfors/partition.hpp"
#include "ahlfors/quadrature.hpp"
#include "ahlfors/regularity.hpp"
#include "ahlfors/space.hpp"
#include "ahlfors/subset.hpp"
