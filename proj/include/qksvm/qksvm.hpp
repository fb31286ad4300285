#pragma once

// Umbrella header: pulls in the full toolkit.

#include "qksvm/circuit.hpp"
#include "qksvm/dataset.hpp"
#include "qksvm/device.hpp"
#include "qksvm/errors.hpp"
#include "qksvm/feature_map.hpp"
#include "qksvm/kernel.hpp"
#include "qksvm/linalg.hpp"
#include "qksvm/noise.hpp"
#include "qksvm/pca.hpp"
#include "qksvm/pipeline.hpp"
#include "qksvm/rng.hpp"
#include "qksvm/routing.hpp"
#include "qksvm/state_vector.hpp"
#include "qksvm/svm.hpp"
