#pragma once

#include "qlab/bell.hpp"
#include "qlab/error.hpp"
#include "qlab/evolution.hpp"
#include "qlab/geometry.hpp"
#include "qlab/linalg.hpp"
#include "qlab/measurement.hpp"
#include "qlab/runner.hpp"
#include "qlab/scenario.hpp"
#include "qlab/simplex.hpp"
