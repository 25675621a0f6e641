#pragma once

#include "chargrid/bench.hpp"
#include "chargrid/charset.hpp"
#include "chargrid/detector_decode.hpp"
#include "chargrid/geometry.hpp"
#include "chargrid/grid.hpp"
#include "chargrid/grid_io.hpp"
#include "chargrid/metrics.hpp"
#include "chargrid/network_output.hpp"
#include "chargrid/page.hpp"
#include "chargrid/parallel.hpp"
#include "chargrid/random.hpp"
#include "chargrid/raster.hpp"
#include "chargrid/spatial_index.hpp"
#include "chargrid/synthgen.hpp"
#include "chargrid/target_codec.hpp"
#include "chargrid/word_assembly.hpp"
