#pragma once

// Structured pseudo-random binary embeddings: structured Gaussian projections
// followed by a sign nonlinearity, with angular-distance estimation from
// Hamming distances, plus the structure analysis, bound evaluators and the
// Monte Carlo / 1-NN verification harness.

#include "structhash/bounds.hpp"
#include "structhash/dataset.hpp"
#include "structhash/graph.hpp"
#include "structhash/io.hpp"
#include "structhash/matrix.hpp"
#include "structhash/pipeline.hpp"
#include "structhash/rng.hpp"
#include "structhash/stats.hpp"
#include "structhash/transforms.hpp"
