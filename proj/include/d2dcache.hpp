#pragma once

#include "d2dcache/analytics.hpp"
#include "d2dcache/channel.hpp"
#include "d2dcache/content.hpp"
#include "d2dcache/experiments.hpp"
#include "d2dcache/geometry.hpp"
#include "d2dcache/mobility.hpp"
#include "d2dcache/placement.hpp"
#include "d2dcache/simulator.hpp"
