#pragma once

#include "levelseg/config.hpp"
#include "levelseg/harness.hpp"
#include "levelseg/image_io.hpp"
#include "levelseg/levelset.hpp"
#include "levelseg/metrics.hpp"
#include "levelseg/models.hpp"
#include "levelseg/raster.hpp"
#include "levelseg/saliency.hpp"
#include "levelseg/synthetic.hpp"
