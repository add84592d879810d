#pragma once

#include "tacton/core.hpp"
#include "tacton/experiments.hpp"
#include "tacton/guidance.hpp"
#include "tacton/library.hpp"
#include "tacton/player.hpp"
