#pragma once

#include "vlp/analysis.hpp"
#include "vlp/calibration.hpp"
#include "vlp/camera_model.hpp"
#include "vlp/circle.hpp"
#include "vlp/error.hpp"
#include "vlp/experiment.hpp"
#include "vlp/io.hpp"
#include "vlp/positioning.hpp"
#include "vlp/simulator.hpp"
