#pragma once

#include "rideshare/network.hpp"
#include "rideshare/model.hpp"
#include "rideshare/pd_network.hpp"
#include "rideshare/pruning.hpp"
#include "rideshare/dtree.hpp"
#include "rideshare/combos.hpp"
#include "rideshare/assign.hpp"
#include "rideshare/oracle.hpp"
#include "rideshare/mipexport.hpp"
#include "rideshare/pipeline.hpp"
#include "rideshare/scenario.hpp"
#include "rideshare/io.hpp"
