#pragma once

// Umbrella header for the SSD library: supervised semantic differential
// analysis with PCA-sweep dimensionality selection, pole interpretation, and
// the planted-gradient synthetic benchmark.

#include "ssd/compose.hpp"
#include "ssd/config.hpp"
#include "ssd/corpus.hpp"
#include "ssd/embeddings.hpp"
#include "ssd/error.hpp"
#include "ssd/interpret.hpp"
#include "ssd/pca.hpp"
#include "ssd/pipeline.hpp"
#include "ssd/regression.hpp"
#include "ssd/report.hpp"
#include "ssd/rng.hpp"
#include "ssd/stats.hpp"
#include "ssd/sweep.hpp"
#include "ssd/synthbench.hpp"
#include "ssd/text.hpp"
