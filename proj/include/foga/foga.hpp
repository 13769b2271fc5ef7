#pragma once

// Umbrella header for the FoGA forward-consistency anomaly detection library.

#include "foga/core/errors.hpp"
#include "foga/core/rng.hpp"
#include "foga/core/tensor.hpp"
#include "foga/datapipe/dataset.hpp"
#include "foga/datapipe/image.hpp"
#include "foga/datapipe/synthetic.hpp"
#include "foga/engine/ablate.hpp"
#include "foga/engine/bench.hpp"
#include "foga/engine/checkpoint.hpp"
#include "foga/engine/config.hpp"
#include "foga/engine/eval.hpp"
#include "foga/engine/export.hpp"
#include "foga/engine/train.hpp"
#include "foga/model/backbone.hpp"
#include "foga/model/config.hpp"
#include "foga/model/conv_block.hpp"
#include "foga/model/gcam.hpp"
#include "foga/model/losses.hpp"
#include "foga/scoring/scoring.hpp"
