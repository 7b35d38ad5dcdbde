#pragma once

// Umbrella header.

#include "tubal/algebra.hpp"
#include "tubal/error.hpp"
#include "tubal/fourier.hpp"
#include "tubal/io.hpp"
#include "tubal/metrics.hpp"
#include "tubal/parallel.hpp"
#include "tubal/penalty.hpp"
#include "tubal/random.hpp"
#include "tubal/solvers.hpp"
#include "tubal/synth.hpp"
#include "tubal/tensor.hpp"
#include "tubal/thresholding.hpp"
#include "tubal/tsvd.hpp"
