#pragma once

#include "frrsim/types.hpp"
#include "frrsim/max_flow.hpp"
#include "frrsim/topology.hpp"
#include "frrsim/generators.hpp"
#include "frrsim/forwarding.hpp"
#include "frrsim/frr.hpp"
#include "frrsim/shortcut.hpp"
#include "frrsim/scheme.hpp"
#include "frrsim/analysis.hpp"
#include "frrsim/scenario.hpp"
