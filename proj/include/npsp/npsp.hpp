#pragma once

#include <npsp/behavior.hpp>
#include <npsp/error.hpp>
#include <npsp/evolution.hpp>
#include <npsp/harness.hpp>
#include <npsp/io.hpp>
#include <npsp/maze.hpp>
#include <npsp/network.hpp>
#include <npsp/parallel.hpp>
#include <npsp/plasticity.hpp>
#include <npsp/random.hpp>
#include <npsp/trainer.hpp>
