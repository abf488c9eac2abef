#pragma once

#include "transcoord/error.hpp"
#include "transcoord/numeric.hpp"
#include "transcoord/chart.hpp"
#include "transcoord/geometry.hpp"
#include "transcoord/wavepacket.hpp"
#include "transcoord/partition.hpp"
#include "transcoord/differentials.hpp"
#include "transcoord/photon.hpp"
#include "transcoord/states.hpp"
#include "transcoord/scenario.hpp"
#include "transcoord/csv.hpp"
