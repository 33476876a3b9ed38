#pragma once

#include "imitate/rng.hpp"
#include "imitate/model.hpp"
#include "imitate/policies.hpp"
#include "imitate/dynamics.hpp"
#include "imitate/sim.hpp"
